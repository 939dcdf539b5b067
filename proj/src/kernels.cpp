#include "stepfusion/kernels.hpp"

#include "stepfusion/fusion.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <map>
#include <string>

namespace stepfusion {

namespace {

bool is_low_level(AlgorithmId alg) {
    return alg == AlgorithmId::LowLevelSum || alg == AlgorithmId::LowLevelDiff;
}

/// Points sharing one detection signal (and so one normalization context).
struct Family {
    double smooth_single = 0.0;
    double smooth_fused = 0.0;
    std::vector<std::size_t> points;
    NormalizationContext ctx{std::numeric_limits<double>::infinity(),
                             -std::numeric_limits<double>::infinity()};
};

std::vector<Family> group_points(AlgorithmId alg, std::span<const DetectorParams> points) {
    std::map<std::pair<double, double>, std::size_t> index;
    std::vector<Family> families;
    for (std::size_t p = 0; p < points.size(); ++p) {
        points[p].validate_for(alg);
        const double s2 = is_low_level(alg) ? *points[p].smooth_fused : 0.0;
        const auto key = std::make_pair(points[p].smooth_single, s2);
        auto [it, fresh] = index.try_emplace(key, families.size());
        if (fresh) families.push_back({key.first, key.second, {}});
        families[it->second].points.push_back(p);
    }
    return families;
}

/// Visit the detection signal(s) of every family for one recording.
template <typename Visit>
void for_each_signal(const Recording& rec, AlgorithmId alg, const std::vector<Family>& families,
                     Visit&& visit) {
    const auto mag_l = magnitude(rec.left);
    const auto mag_r = magnitude(rec.right);
    const auto mode = alg == AlgorithmId::LowLevelSum ? LowLevelMode::Sum : LowLevelMode::Diff;

    std::map<double, std::pair<ScalarSeries, ScalarSeries>> smoothed;
    for (std::size_t f = 0; f < families.size(); ++f) {
        const auto& fam = families[f];
        auto it = smoothed.find(fam.smooth_single);
        if (it == smoothed.end()) {
            it = smoothed
                     .emplace(fam.smooth_single,
                              std::make_pair(moving_average(mag_l, fam.smooth_single),
                                             moving_average(mag_r, fam.smooth_single)))
                     .first;
        }
        const auto& [left, right] = it->second;
        if (is_low_level(alg)) {
            const auto fused = fused_signal(left, right, mode, fam.smooth_fused);
            visit(f, fused, fused);
        } else {
            visit(f, left, right);
        }
    }
}

void absorb(NormalizationContext& ctx, const ScalarSeries& s) {
    const auto [lo, hi] = std::minmax_element(s.values().begin(), s.values().end());
    ctx.global_min = std::min(ctx.global_min, *lo);
    ctx.global_max = std::max(ctx.global_max, *hi);
}

int count_for(AlgorithmId alg, const DetectorParams& params, const PeakSet& left, const PeakSet& right,
              const UnionPool& pool) {
    switch (alg) {
    case AlgorithmId::NoFusionLeft:
        return static_cast<int>(left.size());
    case AlgorithmId::NoFusionRight:
    case AlgorithmId::LowLevelSum:
    case AlgorithmId::LowLevelDiff:
        return static_cast<int>(right.size());
    case AlgorithmId::HighLevelIntersect:
        return static_cast<int>(intersect_fuse(left, right, *params.fuse_max_dist).size());
    case AlgorithmId::HighLevelUnion:
        return static_cast<int>(union_select(pool, *params.fuse_min_dist).size());
    }
    return 0;
}

void rethrow_first(const std::vector<std::exception_ptr>& errors) {
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace

CountMatrix score_grid_serial(std::span<const Recording> corpus, AlgorithmId alg,
                              std::span<const DetectorParams> points) {
    CountMatrix m{points.size(), corpus.size(), std::vector<int>(points.size() * corpus.size(), 0)};
    std::map<std::pair<double, double>, NormalizationContext> contexts;
    for (std::size_t p = 0; p < points.size(); ++p) {
        points[p].validate_for(alg);
        const auto key = std::make_pair(points[p].smooth_single,
                                        is_low_level(alg) ? *points[p].smooth_fused : 0.0);
        auto it = contexts.find(key);
        if (it == contexts.end()) {
            it = contexts.emplace(key, fit_detector_context(corpus, alg, points[p])).first;
        }
        for (std::size_t r = 0; r < corpus.size(); ++r) {
            m.at(p, r) = static_cast<int>(run_detector(alg, corpus[r], points[p], it->second).count);
        }
    }
    return m;
}

CountMatrix score_grid_parallel(std::span<const Recording> corpus, AlgorithmId alg,
                                std::span<const DetectorParams> points) {
    auto families = group_points(alg, points);
    const auto n_rec = corpus.size();
    const auto n_fam = families.size();
    CountMatrix m{points.size(), n_rec, std::vector<int>(points.size() * n_rec, 0)};
    if (n_rec == 0 || points.empty()) return m;

    const bool both_sides = !is_low_level(alg);
    std::vector<std::exception_ptr> errors(n_rec);

    // pass 1: per-recording extrema of every detection signal
    std::vector<NormalizationContext> extrema(n_rec * n_fam, families.front().ctx);
    const auto count = static_cast<std::ptrdiff_t>(n_rec);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
        const auto r = static_cast<std::size_t>(s);
        try {
            for_each_signal(corpus[r], alg, families,
                            [&](std::size_t f, const ScalarSeries& left, const ScalarSeries& right) {
                                absorb(extrema[r * n_fam + f], left);
                                if (both_sides) absorb(extrema[r * n_fam + f], right);
                            });
        } catch (...) {
            errors[r] = std::current_exception();
        }
    }
    rethrow_first(errors);
    for (std::size_t f = 0; f < n_fam; ++f) {
        for (std::size_t r = 0; r < n_rec; ++r) {
            const auto& e = extrema[r * n_fam + f];
            families[f].ctx.global_min = std::min(families[f].ctx.global_min, e.global_min);
            families[f].ctx.global_max = std::max(families[f].ctx.global_max, e.global_max);
        }
    }

    // pass 2: rank candidates once per signal, then sweep the family's points
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
        const auto r = static_cast<std::size_t>(s);
        try {
            for_each_signal(corpus[r], alg, families,
                            [&](std::size_t f, const ScalarSeries& left, const ScalarSeries& right) {
                                const auto& fam = families[f];
                                const auto ranked_l = rank_peaks(normalized_candidates(left, fam.ctx), left.rate());
                                const auto ranked_r = both_sides
                                    ? rank_peaks(normalized_candidates(right, fam.ctx), right.rate())
                                    : ranked_l;
                                double last_amp = -1.0;
                                double last_gap = -1.0;
                                PeakSet peaks_l, peaks_r;
                                UnionPool pool;
                                for (const auto p : fam.points) {
                                    const auto& params = points[p];
                                    if (params.min_peak_amp != last_amp || params.min_peak_gap != last_gap) {
                                        last_amp = params.min_peak_amp;
                                        last_gap = params.min_peak_gap;
                                        peaks_r = select_peaks(ranked_r, last_amp, last_gap);
                                        peaks_l = both_sides ? select_peaks(ranked_l, last_amp, last_gap) : peaks_r;
                                        if (alg == AlgorithmId::HighLevelUnion) pool = rank_union_pool(peaks_l, peaks_r);
                                    }
                                    m.at(p, r) = count_for(alg, params, peaks_l, peaks_r, pool);
                                }
                            });
        } catch (...) {
            errors[r] = std::current_exception();
        }
    }
    rethrow_first(errors);
    return m;
}

} // namespace stepfusion
