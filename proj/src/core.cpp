#include "stepfusion/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stepfusion {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

bool strictly_increasing(const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(),
                              [](double a, double b) { return !(a < b); }) == v.end();
}

} // namespace

TriaxialSeries::TriaxialSeries(double rate, std::vector<double> x, std::vector<double> y,
                               std::vector<double> z, double t0)
    : rate_(rate), t0_(t0), x_(std::move(x)), y_(std::move(y)), z_(std::move(z)) {
    require(std::isfinite(rate_) && rate_ > 0.0, "TriaxialSeries: rate must be positive");
    require(std::isfinite(t0_), "TriaxialSeries: t0 must be finite");
    require(!x_.empty(), "TriaxialSeries: at least one sample required");
    require(x_.size() == y_.size() && y_.size() == z_.size(),
            "TriaxialSeries: x, y, z must have equal length");
    auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
    };
    require(finite(x_) && finite(y_) && finite(z_), "TriaxialSeries: samples must be finite");
}

ScalarSeries::ScalarSeries(double rate, std::vector<double> values, double t0)
    : rate_(rate), t0_(t0), values_(std::move(values)) {
    require(std::isfinite(rate_) && rate_ > 0.0, "ScalarSeries: rate must be positive");
    require(std::isfinite(t0_), "ScalarSeries: t0 must be finite");
    require(!values_.empty(), "ScalarSeries: at least one sample required");
    require(std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }),
            "ScalarSeries: values must be finite");
}

double time_of(const ScalarSeries& series, std::size_t index) {
    if (index >= series.size()) {
        throw std::out_of_range("time_of: index " + std::to_string(index) +
                                " outside series of length " + std::to_string(series.size()));
    }
    return series.t0() + static_cast<double>(index) / series.rate();
}

std::size_t index_of(const ScalarSeries& series, double t) {
    const double pos = std::round((t - series.t0()) * series.rate());
    if (pos <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(pos), series.size() - 1);
}

std::size_t seconds_to_samples(double seconds, double rate) {
    require(std::isfinite(seconds) && seconds >= 0.0, "window must be a non-negative duration");
    return static_cast<std::size_t>(std::llround(seconds * rate));
}

PeakSet::PeakSet(std::vector<Peak> peaks) : peaks_(std::move(peaks)) {
    for (std::size_t i = 1; i < peaks_.size(); ++i) {
        require(peaks_[i - 1].time < peaks_[i].time, "PeakSet: times must be strictly increasing");
    }
}

std::vector<double> PeakSet::times() const {
    std::vector<double> out;
    out.reserve(peaks_.size());
    for (const auto& p : peaks_) out.push_back(p.time);
    return out;
}

std::vector<double> PeakSet::amplitudes() const {
    std::vector<double> out;
    out.reserve(peaks_.size());
    for (const auto& p : peaks_) out.push_back(p.amplitude);
    return out;
}

TaskCategory category_of(WalkTask task) noexcept {
    switch (task) {
    case WalkTask::SlowPace:
    case WalkTask::ComfortablePace:
    case WalkTask::FastPace:
        return TaskCategory::Unconstrained;
    case WalkTask::BagRightHand:
    case WalkTask::PhoneTwoHands:
    case WalkTask::NoArmSwing:
        return TaskCategory::ArmsConstrained;
    case WalkTask::NoRightShoe:
    case WalkTask::CaneRightHand:
        return TaskCategory::Asymmetrical;
    }
    return TaskCategory::Unconstrained;
}

std::string_view to_string(WalkTask task) noexcept {
    switch (task) {
    case WalkTask::SlowPace: return "slow_pace";
    case WalkTask::ComfortablePace: return "comfortable_pace";
    case WalkTask::FastPace: return "fast_pace";
    case WalkTask::BagRightHand: return "bag_right_hand";
    case WalkTask::PhoneTwoHands: return "phone_two_hands";
    case WalkTask::NoArmSwing: return "no_arm_swing";
    case WalkTask::NoRightShoe: return "no_right_shoe";
    case WalkTask::CaneRightHand: return "cane_right_hand";
    }
    return "unknown";
}

std::string_view to_string(TaskCategory category) noexcept {
    switch (category) {
    case TaskCategory::Unconstrained: return "unconstrained";
    case TaskCategory::ArmsConstrained: return "arms_constrained";
    case TaskCategory::Asymmetrical: return "asymmetrical";
    }
    return "unknown";
}

WalkTask parse_task(std::string_view name) {
    for (auto task : kAllTasks) {
        if (to_string(task) == name) return task;
    }
    throw std::invalid_argument("unknown walking task '" + std::string(name) + "'");
}

std::string_view to_string(AlgorithmId alg) noexcept {
    switch (alg) {
    case AlgorithmId::NoFusionLeft: return "left";
    case AlgorithmId::NoFusionRight: return "right";
    case AlgorithmId::LowLevelSum: return "sum";
    case AlgorithmId::LowLevelDiff: return "diff";
    case AlgorithmId::HighLevelIntersect: return "intersect";
    case AlgorithmId::HighLevelUnion: return "union";
    }
    return "unknown";
}

AlgorithmId parse_algorithm(std::string_view name) {
    for (auto alg : kAllAlgorithms) {
        if (to_string(alg) == name) return alg;
    }
    throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                                "' (expected left, right, sum, diff, intersect or union)");
}

void GroundTruth::validate() const {
    require(label_count == step_times.size(), "GroundTruth: label_count must equal number of steps");
    require(step_sides.size() == step_times.size(), "GroundTruth: one side per step required");
    require(strictly_increasing(step_times), "GroundTruth: step times must be increasing");
    require(strictly_increasing(heel_strikes_left) && strictly_increasing(heel_strikes_right) &&
                strictly_increasing(toe_offs_left) && strictly_increasing(toe_offs_right),
            "GroundTruth: event times must be increasing");

    const auto lefts = static_cast<std::size_t>(
        std::count(step_sides.begin(), step_sides.end(), Side::Left));
    const auto rights = step_sides.size() - lefts;
    require(heel_strikes_left.size() == lefts && toe_offs_left.size() == lefts,
            "GroundTruth: each left step needs exactly one heel strike and toe-off");
    require(heel_strikes_right.size() == rights && toe_offs_right.size() == rights,
            "GroundTruth: each right step needs exactly one heel strike and toe-off");
    for (std::size_t j = 0; j < lefts; ++j) {
        require(heel_strikes_left[j] < toe_offs_left[j],
                "GroundTruth: toe-off precedes heel strike for left step " + std::to_string(j));
    }
    for (std::size_t j = 0; j < rights; ++j) {
        require(heel_strikes_right[j] < toe_offs_right[j],
                "GroundTruth: toe-off precedes heel strike for right step " + std::to_string(j));
    }
}

void Recording::validate() const {
    require(left.rate() == right.rate(), "Recording " + id + ": wrist sample rates differ");
    const double period = 1.0 / left.rate();
    require(std::abs(left.t0() - right.t0()) < period,
            "Recording " + id + ": wrist start times differ by a sample period or more");
    const double end_l = left.t0() + left.duration();
    const double end_r = right.t0() + right.duration();
    require(std::abs(end_l - end_r) <= period + kTimeEps,
            "Recording " + id + ": wrists cover different time spans");
    require(std::isfinite(duration) && duration > 0.0, "Recording " + id + ": duration must be positive");
    if (ground_truth) ground_truth->validate();
}

void DetectorParams::validate_for(AlgorithmId alg) const {
    auto window = [](double w, const char* name) {
        require(std::isfinite(w) && w >= 0.0, std::string(name) + " must be >= 0");
    };
    window(smooth_single, "smooth_single");
    window(min_peak_gap, "min_peak_gap");
    require(min_peak_amp >= 0.0 && min_peak_amp <= 1.0, "min_peak_amp must lie in [0, 1]");

    switch (alg) {
    case AlgorithmId::NoFusionLeft:
    case AlgorithmId::NoFusionRight:
        break;
    case AlgorithmId::LowLevelSum:
    case AlgorithmId::LowLevelDiff:
        require(smooth_fused.has_value(), std::string(to_string(alg)) + " requires smooth_fused");
        window(*smooth_fused, "smooth_fused");
        break;
    case AlgorithmId::HighLevelIntersect:
        require(fuse_max_dist.has_value(), "intersect requires fuse_max_dist");
        window(*fuse_max_dist, "fuse_max_dist");
        require(*fuse_max_dist <= min_peak_gap + kTimeEps,
                "fuse_max_dist must not exceed min_peak_gap");
        break;
    case AlgorithmId::HighLevelUnion:
        require(fuse_min_dist.has_value(), "union requires fuse_min_dist");
        window(*fuse_min_dist, "fuse_min_dist");
        break;
    }
}

} // namespace stepfusion
