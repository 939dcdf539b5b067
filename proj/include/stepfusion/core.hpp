/**
 * @file core.hpp
 * @brief Shared vocabulary types for dual-wrist step detection.
 *
 * Signals live on a uniform time base: sample i of a series sampled at
 * `rate` Hz starting at `t0` sits at t0 + i / rate seconds. All window
 * parameters are expressed in seconds and converted to samples with
 * round(w * rate).
 */

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stepfusion {

/// Raised for malformed files, inconsistent sessions and other runtime failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tolerance used when comparing times against inclusive distance bounds.
inline constexpr double kTimeEps = 1e-9;

// ─── Signals ────────────────────────────────────────────────────────────────

/**
 * @brief Uniformly sampled three-axis accelerometer trace.
 *
 * Units are whatever the source used (g or m/s^2); downstream math is
 * scale-free after min-max normalization.
 */
class TriaxialSeries {
public:
    TriaxialSeries(double rate, std::vector<double> x, std::vector<double> y,
                   std::vector<double> z, double t0 = 0.0);

    double rate() const noexcept { return rate_; }
    double t0() const noexcept { return t0_; }
    std::size_t size() const noexcept { return x_.size(); }
    double duration() const noexcept { return static_cast<double>(size()) / rate_; }

    std::span<const double> x() const noexcept { return x_; }
    std::span<const double> y() const noexcept { return y_; }
    std::span<const double> z() const noexcept { return z_; }

    bool operator==(const TriaxialSeries&) const = default;

private:
    double rate_;
    double t0_;
    std::vector<double> x_, y_, z_;
};

/// One-dimensional signal sharing the accelerometer time base.
class ScalarSeries {
public:
    ScalarSeries(double rate, std::vector<double> values, double t0 = 0.0);

    double rate() const noexcept { return rate_; }
    double t0() const noexcept { return t0_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    bool operator==(const ScalarSeries&) const = default;

private:
    double rate_;
    double t0_;
    std::vector<double> values_;
};

/// Time of sample `index`; throws std::out_of_range when index >= size.
double time_of(const ScalarSeries& series, std::size_t index);

/// Nearest sample index to `t`, clamped to the series extent.
std::size_t index_of(const ScalarSeries& series, double t);

/// round(seconds * rate) as a sample count; seconds must be >= 0.
std::size_t seconds_to_samples(double seconds, double rate);

// ─── Peaks ──────────────────────────────────────────────────────────────────

struct Peak {
    std::size_t index = 0;  ///< sample index in the source series
    double time = 0.0;      ///< seconds
    double amplitude = 0.0; ///< source value at the peak

    bool operator==(const Peak&) const = default;
};

/// Peaks ordered by strictly increasing time.
class PeakSet {
public:
    PeakSet() = default;
    explicit PeakSet(std::vector<Peak> peaks);

    std::size_t size() const noexcept { return peaks_.size(); }
    bool empty() const noexcept { return peaks_.empty(); }
    std::span<const Peak> peaks() const noexcept { return peaks_; }
    const Peak& operator[](std::size_t i) const noexcept { return peaks_[i]; }
    std::vector<double> times() const;
    std::vector<double> amplitudes() const;

    auto begin() const noexcept { return peaks_.begin(); }
    auto end() const noexcept { return peaks_.end(); }

    bool operator==(const PeakSet&) const = default;

private:
    std::vector<Peak> peaks_;
};

// ─── Tasks and algorithms ───────────────────────────────────────────────────

enum class Side { Left, Right };

enum class TaskCategory { Unconstrained, ArmsConstrained, Asymmetrical };

enum class WalkTask {
    SlowPace,
    ComfortablePace,
    FastPace,
    BagRightHand,
    PhoneTwoHands,
    NoArmSwing,
    NoRightShoe,
    CaneRightHand,
};

inline constexpr std::array<WalkTask, 8> kAllTasks{
    WalkTask::SlowPace,     WalkTask::ComfortablePace, WalkTask::FastPace,
    WalkTask::BagRightHand, WalkTask::PhoneTwoHands,   WalkTask::NoArmSwing,
    WalkTask::NoRightShoe,  WalkTask::CaneRightHand,
};

TaskCategory category_of(WalkTask task) noexcept;
std::string_view to_string(WalkTask task) noexcept;
std::string_view to_string(TaskCategory category) noexcept;
WalkTask parse_task(std::string_view name);

enum class AlgorithmId {
    NoFusionLeft,
    NoFusionRight,
    LowLevelSum,
    LowLevelDiff,
    HighLevelIntersect,
    HighLevelUnion,
};

inline constexpr std::array<AlgorithmId, 6> kAllAlgorithms{
    AlgorithmId::NoFusionLeft,       AlgorithmId::NoFusionRight,
    AlgorithmId::LowLevelSum,        AlgorithmId::LowLevelDiff,
    AlgorithmId::HighLevelIntersect, AlgorithmId::HighLevelUnion,
};

/// Short CLI name: left, right, sum, diff, intersect, union.
std::string_view to_string(AlgorithmId alg) noexcept;
AlgorithmId parse_algorithm(std::string_view name);

// ─── Recordings ─────────────────────────────────────────────────────────────

/**
 * @brief Reference gait events for one recording.
 *
 * Step k belongs to foot `step_sides[k]`; if it is the j-th step of that
 * foot, its heel strike and toe-off are element j of that side's lists.
 */
struct GroundTruth {
    std::vector<double> step_times;
    std::vector<Side> step_sides;
    std::vector<double> heel_strikes_left, heel_strikes_right;
    std::vector<double> toe_offs_left, toe_offs_right;
    std::size_t label_count = 0;

    /// Throws std::invalid_argument naming the violated invariant.
    void validate() const;

    bool operator==(const GroundTruth&) const = default;
};

struct Recording {
    std::string id;
    std::string subject_id;
    WalkTask task = WalkTask::ComfortablePace;
    TriaxialSeries left;
    TriaxialSeries right;
    double duration = 0.0;
    std::optional<GroundTruth> ground_truth;
    std::optional<int> self_count;

    /// Wrist synchrony, positive duration and ground-truth invariants.
    void validate() const;

    bool operator==(const Recording&) const = default;
};

// ─── Detector parameters ────────────────────────────────────────────────────

/// Tunable parameters; which optional fields are required depends on the algorithm.
struct DetectorParams {
    double smooth_single = 0.0;
    std::optional<double> smooth_fused;
    double min_peak_amp = 0.0;
    double min_peak_gap = 0.0;
    std::optional<double> fuse_max_dist;
    std::optional<double> fuse_min_dist;

    /// Throws std::invalid_argument when a field required by `alg` is
    /// missing or a value is out of range.
    void validate_for(AlgorithmId alg) const;

    bool operator==(const DetectorParams&) const = default;
};

} // namespace stepfusion
