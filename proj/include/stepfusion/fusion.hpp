/**
 * @file fusion.hpp
 * @brief The six dual-wrist step detection pipelines.
 *
 * Single side:  magnitude -> moving average -> normalize -> peaks.
 * Low level:    combine the two smoothed magnitudes (sum or |R - L|),
 *               smooth again, normalize, detect peaks.
 * High level:   detect peaks on each wrist, then fuse the two peak sets
 *               by mutual-nearest intersection or greedy union.
 *
 * Normalization contexts are corpus statistics of the signal the peak
 * detector consumes; fit them with fit_detector_context.
 */

#pragma once

#include "stepfusion/core.hpp"
#include "stepfusion/peaks.hpp"
#include "stepfusion/preprocess.hpp"

#include <span>

namespace stepfusion {

enum class LowLevelMode { Sum, Diff };
enum class HighLevelMode { Intersect, Union };

struct StepDetection {
    AlgorithmId algorithm = AlgorithmId::NoFusionLeft;
    PeakSet steps;
    std::size_t count = 0;

    bool operator==(const StepDetection&) const = default;
};

/// Smoothed magnitude of one wrist (N_L or N_R before normalization).
ScalarSeries smoothed_magnitude(const TriaxialSeries& wrist, double window);

/// Pointwise sum or absolute difference of two aligned signals, then smoothed.
/// Throws std::invalid_argument on mismatched lengths.
ScalarSeries fused_signal(const ScalarSeries& left, const ScalarSeries& right, LowLevelMode mode,
                          double window);

/// Candidate peaks of a raw detection signal with amplitudes mapped through `ctx`.
PeakSet normalized_candidates(const ScalarSeries& signal, const NormalizationContext& ctx);

StepDetection detect_single_side(const Recording& rec, Side side, const DetectorParams& params,
                                 const NormalizationContext& ctx);

StepDetection fuse_low_level(const Recording& rec, LowLevelMode mode, const DetectorParams& params,
                             const NormalizationContext& ctx);

/**
 * Mutual-nearest intersection of two peak sets.
 *
 * A left peak pairs with its nearest right peak when that peak is within
 * `max_dist` and the left peak is strictly closer to it than every other
 * left peak. Each accepted pair emits its stronger member (right on ties).
 */
PeakSet intersect_fuse(const PeakSet& left, const PeakSet& right, double max_dist);

/**
 * Greedy union of two peak sets: repeatedly take the strongest pooled peak
 * (right before left, then earlier, on ties) and discard every pooled peak
 * within `min_dist` seconds of it, inclusive.
 */
PeakSet union_fuse(const PeakSet& left, const PeakSet& right, double min_dist);

/// Pooled peaks of both wrists in union pick order.
struct UnionPool {
    std::vector<Peak> by_rank;
};

UnionPool rank_union_pool(const PeakSet& left, const PeakSet& right);

/// Greedy union over an already ranked pool; union_fuse == union_select(rank_union_pool(...)).
PeakSet union_select(const UnionPool& pool, double min_dist);

StepDetection detect_high_level(const Recording& rec, HighLevelMode mode, const DetectorParams& params,
                                const NormalizationContext& ctx);

/// Dispatch to the pipeline for `alg`; validates the required parameters first.
StepDetection run_detector(AlgorithmId alg, const Recording& rec, const DetectorParams& params,
                           const NormalizationContext& ctx);

/// Key naming the detection signal an algorithm/params pair normalizes, e.g. "single/w5".
std::string signal_family(AlgorithmId alg, const DetectorParams& params, double rate);

/// Global extrema of the detection signal of `alg` over the whole corpus.
NormalizationContext fit_detector_context(std::span<const Recording> corpus, AlgorithmId alg,
                                          const DetectorParams& params);

} // namespace stepfusion
