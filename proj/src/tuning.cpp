#include "stepfusion/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

namespace stepfusion {

namespace {

bool is_low_level(AlgorithmId alg) {
    return alg == AlgorithmId::LowLevelSum || alg == AlgorithmId::LowLevelDiff;
}

void require_values(const std::vector<double>& v, const char* field) {
    if (v.empty()) throw std::invalid_argument(std::string("ParamGrid: no values for ") + field);
}

CountMatrix score(std::span<const Recording> corpus, AlgorithmId alg,
                  std::span<const DetectorParams> points, Execution exec) {
    return exec == Execution::Serial ? score_grid_serial(corpus, alg, points)
                                     : score_grid_parallel(corpus, alg, points);
}

} // namespace

ParamGrid ParamGrid::standard() {
    return {
        {0.01, 0.02, 0.04, 0.08, 0.14, 0.22, 0.40, 0.60},
        {0.01, 0.02, 0.03, 0.05, 0.08, 0.12},
        {0.03, 0.06, 0.10, 0.15, 0.22, 0.30, 0.40, 0.54},
        {0.12, 0.18, 0.24, 0.30, 0.36, 0.42, 0.50, 0.60},
        {0.16, 0.22, 0.28, 0.34, 0.40, 0.48},
        {0.15, 0.20, 0.25, 0.29, 0.34, 0.40, 0.44},
    };
}

std::vector<DetectorParams> grid_points(const ParamGrid& grid, AlgorithmId alg) {
    require_values(grid.smooth_single, "smooth_single");
    require_values(grid.min_peak_amp, "min_peak_amp");
    require_values(grid.min_peak_gap, "min_peak_gap");

    const std::vector<double> none{0.0};
    const auto& fused = is_low_level(alg) ? grid.smooth_fused : none;
    const auto& max_dist = alg == AlgorithmId::HighLevelIntersect ? grid.fuse_max_dist : none;
    const auto& min_dist = alg == AlgorithmId::HighLevelUnion ? grid.fuse_min_dist : none;
    require_values(fused, "smooth_fused");
    require_values(max_dist, "fuse_max_dist");
    require_values(min_dist, "fuse_min_dist");

    std::vector<DetectorParams> out;
    for (double s1 : grid.smooth_single)
        for (double s2 : fused)
            for (double amp : grid.min_peak_amp)
                for (double gap : grid.min_peak_gap)
                    for (double dmax : max_dist)
                        for (double dmin : min_dist) {
                            DetectorParams p;
                            p.smooth_single = s1;
                            p.min_peak_amp = amp;
                            p.min_peak_gap = gap;
                            if (is_low_level(alg)) p.smooth_fused = s2;
                            if (alg == AlgorithmId::HighLevelIntersect) {
                                if (dmax > gap + kTimeEps) continue;
                                p.fuse_max_dist = dmax;
                            }
                            if (alg == AlgorithmId::HighLevelUnion) p.fuse_min_dist = dmin;
                            p.validate_for(alg);
                            out.push_back(p);
                        }
    if (out.empty()) {
        throw std::invalid_argument("grid for " + std::string(to_string(alg)) +
                                    " is empty after constraint filtering");
    }
    return out;
}

std::vector<std::vector<std::size_t>> make_folds(std::span<const Recording> dataset, int k,
                                                 std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("make_folds: k must be at least 2");
    if (static_cast<std::size_t>(k) > dataset.size()) {
        throw std::invalid_argument("make_folds: k = " + std::to_string(k) + " exceeds dataset size " +
                                    std::to_string(dataset.size()));
    }
    std::map<WalkTask, std::vector<std::size_t>> by_task;
    for (std::size_t i = 0; i < dataset.size(); ++i) by_task[dataset[i].task].push_back(i);

    // deal each shuffled task group round-robin, continuing where the last group stopped
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    std::size_t next = 0;
    for (auto& [task, members] : by_task) {
        std::shuffle(members.begin(), members.end(), rng);
        for (auto idx : members) folds[next++ % folds.size()].push_back(idx);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

double rmse(std::span<const int> predicted, std::span<const int> labels) {
    if (predicted.empty()) throw std::invalid_argument("rmse: empty input");
    if (predicted.size() != labels.size()) throw std::invalid_argument("rmse: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = static_cast<double>(predicted[i]) - labels[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(predicted.size()));
}

std::vector<int> label_counts(std::span<const Recording> dataset) {
    std::vector<int> labels;
    labels.reserve(dataset.size());
    for (const auto& rec : dataset) {
        if (!rec.ground_truth) throw std::invalid_argument("recording " + rec.id + " has no ground truth");
        labels.push_back(static_cast<int>(rec.ground_truth->label_count));
    }
    return labels;
}

std::size_t best_point(const CountMatrix& scores, std::span<const std::size_t> rows,
                       std::span<const int> labels) {
    if (rows.empty()) throw std::invalid_argument("grid_search: empty training set");
    std::size_t best = 0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < scores.points; ++p) {
        double sse = 0.0;
        for (auto r : rows) {
            const double d = static_cast<double>(scores.at(p, r)) - labels[r];
            sse += d * d;
        }
        if (sse < best_sse) {
            best_sse = sse;
            best = p;
        }
    }
    return best;
}

DetectorParams grid_search(std::span<const Recording> train, AlgorithmId alg, const ParamGrid& grid,
                           Execution exec) {
    if (train.empty()) throw std::invalid_argument("grid_search: empty training set");
    const auto points = grid_points(grid, alg);
    const auto labels = label_counts(train);
    const auto scores = score(train, alg, points, exec);
    std::vector<std::size_t> rows(train.size());
    std::iota(rows.begin(), rows.end(), 0);
    return points[best_point(scores, rows, labels)];
}

CVReport cross_validate(std::span<const Recording> dataset, AlgorithmId alg, const ParamGrid& grid, int k,
                        std::uint64_t seed, Execution exec) {
    const auto points = grid_points(grid, alg);
    const auto labels = label_counts(dataset);
    auto folds = make_folds(dataset, k, seed);
    const auto scores = score(dataset, alg, points, exec);

    CVReport report;
    report.algorithm = alg;
    report.held_out_counts.assign(dataset.size(), 0);
    for (const auto& test : folds) {
        std::vector<std::size_t> train;
        for (const auto& other : folds) {
            if (&other != &test) train.insert(train.end(), other.begin(), other.end());
        }
        std::sort(train.begin(), train.end());
        const auto best = best_point(scores, train, labels);

        auto fold_rmse = [&](const std::vector<std::size_t>& rows) {
            std::vector<int> pred, lab;
            for (auto r : rows) {
                pred.push_back(scores.at(best, r));
                lab.push_back(labels[r]);
            }
            return rmse(pred, lab);
        };
        report.fold_params.push_back(points[best]);
        report.fold_train_rmse.push_back(fold_rmse(train));
        report.fold_test_rmse.push_back(fold_rmse(test));
        for (auto r : test) report.held_out_counts[r] = scores.at(best, r);
    }
    report.mean_params = mean_params(report.fold_params);
    report.mean_test_rmse = std::accumulate(report.fold_test_rmse.begin(), report.fold_test_rmse.end(), 0.0) /
                            static_cast<double>(report.fold_test_rmse.size());
    report.folds = std::move(folds);
    return report;
}

DetectorParams mean_params(std::span<const DetectorParams> params) {
    if (params.empty()) throw std::invalid_argument("mean_params: no parameter sets");
    const auto n = static_cast<double>(params.size());
    auto mean_of = [&](auto field) {
        double sum = 0.0;
        for (const auto& p : params) sum += field(p);
        return sum / n;
    };
    auto optional_mean = [&](auto member) -> std::optional<double> {
        if (!std::all_of(params.begin(), params.end(), [&](const DetectorParams& p) { return (p.*member).has_value(); })) {
            return std::nullopt;
        }
        return mean_of([&](const DetectorParams& p) { return *(p.*member); });
    };

    DetectorParams out;
    out.smooth_single = mean_of([](const DetectorParams& p) { return p.smooth_single; });
    out.min_peak_amp = mean_of([](const DetectorParams& p) { return p.min_peak_amp; });
    out.min_peak_gap = mean_of([](const DetectorParams& p) { return p.min_peak_gap; });
    out.smooth_fused = optional_mean(&DetectorParams::smooth_fused);
    out.fuse_max_dist = optional_mean(&DetectorParams::fuse_max_dist);
    out.fuse_min_dist = optional_mean(&DetectorParams::fuse_min_dist);
    return out;
}

} // namespace stepfusion
