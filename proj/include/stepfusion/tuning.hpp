/**
 * @file tuning.hpp
 * @brief k-fold cross-validated grid search minimizing step-count RMSE.
 *
 * Normalization contexts are fitted on the whole corpus handed to
 * cross_validate, so a recording's count under a given grid point does not
 * depend on the fold it lands in. The count matrix is therefore scored
 * once and every fold searches its own rows of it.
 */

#pragma once

#include "stepfusion/core.hpp"
#include "stepfusion/kernels.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace stepfusion {

/// Candidate values per DetectorParams field, in declaration order.
struct ParamGrid {
    std::vector<double> smooth_single;
    std::vector<double> smooth_fused;
    std::vector<double> min_peak_amp;
    std::vector<double> min_peak_gap;
    std::vector<double> fuse_max_dist;
    std::vector<double> fuse_min_dist;

    /// Brackets the spread of published mean values by +/-50% on every field.
    static ParamGrid standard();

    bool operator==(const ParamGrid&) const = default;
};

/**
 * Cartesian product of the fields `alg` uses, enumerated lexicographically
 * in field order (last field fastest). Intersection points with
 * fuse_max_dist > min_peak_gap are dropped. Throws when nothing remains.
 */
std::vector<DetectorParams> grid_points(const ParamGrid& grid, AlgorithmId alg);

enum class Execution { Serial, Parallel };

struct CVReport {
    AlgorithmId algorithm = AlgorithmId::NoFusionLeft;
    std::vector<DetectorParams> fold_params;
    DetectorParams mean_params;
    std::vector<double> fold_train_rmse;
    std::vector<double> fold_test_rmse;
    double mean_test_rmse = 0.0;
    std::vector<std::vector<std::size_t>> folds;
    /// Count predicted for each recording by the parameters of the fold that held it out.
    std::vector<int> held_out_counts;

    bool operator==(const CVReport&) const = default;
};

/// Seeded, task-stratified partition of dataset indices; fold sizes differ by at most one.
std::vector<std::vector<std::size_t>> make_folds(std::span<const Recording> dataset, int k,
                                                 std::uint64_t seed);

/// Root mean square difference between predicted and labelled counts.
double rmse(std::span<const int> predicted, std::span<const int> labels);

/// Ground-truth label counts; throws when a recording is unlabelled.
std::vector<int> label_counts(std::span<const Recording> dataset);

/// Row of `scores` with the lowest RMSE over `rows`; ties go to the lowest point index.
std::size_t best_point(const CountMatrix& scores, std::span<const std::size_t> rows,
                       std::span<const int> labels);

/// Exhaustive search over the grid, contexts fitted on `train`.
DetectorParams grid_search(std::span<const Recording> train, AlgorithmId alg, const ParamGrid& grid,
                           Execution exec = Execution::Parallel);

CVReport cross_validate(std::span<const Recording> dataset, AlgorithmId alg, const ParamGrid& grid,
                        int k = 5, std::uint64_t seed = 42, Execution exec = Execution::Parallel);

/// Field-wise arithmetic mean; optional fields are averaged when every entry has them.
DetectorParams mean_params(std::span<const DetectorParams> params);

} // namespace stepfusion
