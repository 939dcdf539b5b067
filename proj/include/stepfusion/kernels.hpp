/**
 * @file kernels.hpp
 * @brief Step counts for every (grid point, recording) pair.
 *
 * score_grid_parallel caches smoothing, normalization and candidate peaks
 * per recording and spreads recordings over OpenMP threads.
 * score_grid_serial is the reference: it calls run_detector for every pair
 * with a context fitted by fit_detector_context. Both return identical
 * matrices.
 */

#pragma once

#include "stepfusion/core.hpp"

#include <span>
#include <vector>

namespace stepfusion {

/// Row-major counts: one row per grid point, one column per recording.
struct CountMatrix {
    std::size_t points = 0;
    std::size_t recordings = 0;
    std::vector<int> counts;

    int at(std::size_t point, std::size_t recording) const { return counts[point * recordings + recording]; }
    int& at(std::size_t point, std::size_t recording) { return counts[point * recordings + recording]; }

    bool operator==(const CountMatrix&) const = default;
};

/// Normalization contexts are fitted over `corpus` itself.
CountMatrix score_grid_serial(std::span<const Recording> corpus, AlgorithmId alg,
                              std::span<const DetectorParams> points);

CountMatrix score_grid_parallel(std::span<const Recording> corpus, AlgorithmId alg,
                                std::span<const DetectorParams> points);

} // namespace stepfusion
