#include "stepfusion/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace stepfusion {

namespace {

void require_context(const NormalizationContext& ctx) {
    if (!(ctx.global_max > ctx.global_min)) {
        throw std::invalid_argument("normalization context is degenerate (max == min)");
    }
}

StepDetection make_detection(AlgorithmId alg, PeakSet steps) {
    const auto n = steps.size();
    return {alg, std::move(steps), n};
}

PeakSet side_peaks(const ScalarSeries& smoothed, const DetectorParams& params,
                   const NormalizationContext& ctx) {
    return select_peaks(rank_peaks(normalized_candidates(smoothed, ctx), smoothed.rate()),
                        params.min_peak_amp, params.min_peak_gap);
}

const TriaxialSeries& wrist(const Recording& rec, Side side) {
    return side == Side::Left ? rec.left : rec.right;
}

} // namespace

ScalarSeries smoothed_magnitude(const TriaxialSeries& wrist, double window) {
    return moving_average(magnitude(wrist), window);
}

ScalarSeries fused_signal(const ScalarSeries& left, const ScalarSeries& right, LowLevelMode mode,
                          double window) {
    if (left.size() != right.size()) {
        throw std::invalid_argument("low-level fusion: wrist signals differ in length (" +
                                    std::to_string(left.size()) + " vs " +
                                    std::to_string(right.size()) + ")");
    }
    std::vector<double> combined(left.size());
    for (std::size_t i = 0; i < combined.size(); ++i) {
        combined[i] = mode == LowLevelMode::Sum ? right[i] + left[i] : std::abs(right[i] - left[i]);
    }
    return moving_average(ScalarSeries(left.rate(), std::move(combined), left.t0()), window);
}

PeakSet normalized_candidates(const ScalarSeries& signal, const NormalizationContext& ctx) {
    require_context(ctx);
    const auto raw = candidate_peaks(signal);
    std::vector<Peak> out(raw.begin(), raw.end());
    for (auto& p : out) p.amplitude = ctx.apply(p.amplitude);
    return PeakSet(std::move(out));
}

StepDetection detect_single_side(const Recording& rec, Side side, const DetectorParams& params,
                                 const NormalizationContext& ctx) {
    const auto smoothed = smoothed_magnitude(wrist(rec, side), params.smooth_single);
    const auto alg = side == Side::Left ? AlgorithmId::NoFusionLeft : AlgorithmId::NoFusionRight;
    return make_detection(alg, side_peaks(smoothed, params, ctx));
}

StepDetection fuse_low_level(const Recording& rec, LowLevelMode mode, const DetectorParams& params,
                             const NormalizationContext& ctx) {
    if (!params.smooth_fused) throw std::invalid_argument("low-level fusion requires smooth_fused");
    const auto left = smoothed_magnitude(rec.left, params.smooth_single);
    const auto right = smoothed_magnitude(rec.right, params.smooth_single);
    const auto fused = fused_signal(left, right, mode, *params.smooth_fused);
    const auto alg = mode == LowLevelMode::Sum ? AlgorithmId::LowLevelSum : AlgorithmId::LowLevelDiff;
    return make_detection(alg, side_peaks(fused, params, ctx));
}

PeakSet intersect_fuse(const PeakSet& left, const PeakSet& right, double max_dist) {
    if (!(max_dist >= 0.0)) throw std::invalid_argument("intersect_fuse: max_dist must be >= 0");
    std::vector<Peak> out;
    if (left.empty() || right.empty()) return PeakSet{};

    const auto rt = right.times();
    for (std::size_t li = 0; li < left.size(); ++li) {
        const double tl = left[li].time;

        // nearest right peak; equidistant neighbours resolve to the earlier one
        const auto it = std::lower_bound(rt.begin(), rt.end(), tl);
        std::size_t ri = static_cast<std::size_t>(it - rt.begin());
        if (ri == rt.size() || (ri > 0 && tl - rt[ri - 1] <= rt[ri] - tl)) --ri;
        const double d = std::abs(tl - rt[ri]);
        if (d > max_dist + kTimeEps) continue;

        // t_l must be strictly the closest left peak to t_r; only its neighbours can compete
        const double tr = rt[ri];
        if (li > 0 && !(d < std::abs(left[li - 1].time - tr))) continue;
        if (li + 1 < left.size() && !(d < std::abs(left[li + 1].time - tr))) continue;

        out.push_back(right[ri].amplitude >= left[li].amplitude ? right[ri] : left[li]);
    }

    std::stable_sort(out.begin(), out.end(), [](const Peak& a, const Peak& b) { return a.time < b.time; });
    std::vector<Peak> unique;
    for (const auto& p : out) {
        if (!unique.empty() && unique.back().time == p.time) {
            if (p.amplitude > unique.back().amplitude) unique.back() = p;
            continue;
        }
        unique.push_back(p);
    }
    return PeakSet(std::move(unique));
}

UnionPool rank_union_pool(const PeakSet& left, const PeakSet& right) {
    struct Pooled {
        Peak peak;
        bool from_right;
    };
    std::vector<Pooled> pool;
    pool.reserve(left.size() + right.size());
    for (const auto& p : right) pool.push_back({p, true});
    for (const auto& p : left) pool.push_back({p, false});
    std::stable_sort(pool.begin(), pool.end(), [](const Pooled& a, const Pooled& b) {
        if (a.peak.amplitude != b.peak.amplitude) return a.peak.amplitude > b.peak.amplitude;
        if (a.from_right != b.from_right) return a.from_right;
        return a.peak.time < b.peak.time;
    });
    UnionPool out;
    out.by_rank.reserve(pool.size());
    for (const auto& item : pool) out.by_rank.push_back(item.peak);
    return out;
}

PeakSet union_select(const UnionPool& pool, double min_dist) {
    if (!(min_dist >= 0.0)) throw std::invalid_argument("union_fuse: min_dist must be >= 0");

    // Taking the pool in rank order and skipping anything already within
    // reach of a kept peak reproduces the pick-max-then-remove loop.
    const double reach = min_dist + kTimeEps;
    std::vector<Peak> kept; // sorted by time
    for (const auto& peak : pool.by_rank) {
        const auto next = std::lower_bound(kept.begin(), kept.end(), peak.time,
                                           [](const Peak& k, double t) { return k.time < t; });
        if (next != kept.end() && next->time - peak.time <= reach) continue;
        if (next != kept.begin() && peak.time - std::prev(next)->time <= reach) continue;
        kept.insert(next, peak);
    }
    return PeakSet(std::move(kept));
}

PeakSet union_fuse(const PeakSet& left, const PeakSet& right, double min_dist) {
    return union_select(rank_union_pool(left, right), min_dist);
}

StepDetection detect_high_level(const Recording& rec, HighLevelMode mode, const DetectorParams& params,
                                const NormalizationContext& ctx) {
    if (mode == HighLevelMode::Intersect) {
        if (!params.fuse_max_dist) throw std::invalid_argument("intersect requires fuse_max_dist");
        if (*params.fuse_max_dist > params.min_peak_gap + kTimeEps) {
            throw std::invalid_argument("intersect: fuse_max_dist exceeds min_peak_gap");
        }
    } else if (!params.fuse_min_dist) {
        throw std::invalid_argument("union requires fuse_min_dist");
    }

    const auto left = side_peaks(smoothed_magnitude(rec.left, params.smooth_single), params, ctx);
    const auto right = side_peaks(smoothed_magnitude(rec.right, params.smooth_single), params, ctx);
    if (mode == HighLevelMode::Intersect) {
        return make_detection(AlgorithmId::HighLevelIntersect,
                              intersect_fuse(left, right, *params.fuse_max_dist));
    }
    return make_detection(AlgorithmId::HighLevelUnion, union_fuse(left, right, *params.fuse_min_dist));
}

StepDetection run_detector(AlgorithmId alg, const Recording& rec, const DetectorParams& params,
                           const NormalizationContext& ctx) {
    params.validate_for(alg);
    switch (alg) {
    case AlgorithmId::NoFusionLeft: return detect_single_side(rec, Side::Left, params, ctx);
    case AlgorithmId::NoFusionRight: return detect_single_side(rec, Side::Right, params, ctx);
    case AlgorithmId::LowLevelSum: return fuse_low_level(rec, LowLevelMode::Sum, params, ctx);
    case AlgorithmId::LowLevelDiff: return fuse_low_level(rec, LowLevelMode::Diff, params, ctx);
    case AlgorithmId::HighLevelIntersect: return detect_high_level(rec, HighLevelMode::Intersect, params, ctx);
    case AlgorithmId::HighLevelUnion: return detect_high_level(rec, HighLevelMode::Union, params, ctx);
    }
    throw std::invalid_argument("run_detector: unknown algorithm");
}

std::string signal_family(AlgorithmId alg, const DetectorParams& params, double rate) {
    const auto w1 = smoothing_window(params.smooth_single, rate);
    switch (alg) {
    case AlgorithmId::LowLevelSum:
    case AlgorithmId::LowLevelDiff: {
        const auto w2 = smoothing_window(params.smooth_fused.value_or(0.0), rate);
        return std::string(to_string(alg)) + "/w" + std::to_string(w1) + "/w" + std::to_string(w2);
    }
    default:
        return "single/w" + std::to_string(w1);
    }
}

NormalizationContext fit_detector_context(std::span<const Recording> corpus, AlgorithmId alg,
                                          const DetectorParams& params) {
    if (corpus.empty()) throw std::invalid_argument("fit_detector_context: empty corpus");
    NormalizationContext ctx{std::numeric_limits<double>::infinity(),
                             -std::numeric_limits<double>::infinity()};
    auto absorb = [&ctx](const ScalarSeries& s) {
        const auto [lo, hi] = std::minmax_element(s.values().begin(), s.values().end());
        ctx.global_min = std::min(ctx.global_min, *lo);
        ctx.global_max = std::max(ctx.global_max, *hi);
    };
    const bool low_level = alg == AlgorithmId::LowLevelSum || alg == AlgorithmId::LowLevelDiff;
    for (const auto& rec : corpus) {
        auto left = smoothed_magnitude(rec.left, params.smooth_single);
        auto right = smoothed_magnitude(rec.right, params.smooth_single);
        if (low_level) {
            const auto mode = alg == AlgorithmId::LowLevelSum ? LowLevelMode::Sum : LowLevelMode::Diff;
            absorb(fused_signal(left, right, mode, params.smooth_fused.value_or(0.0)));
        } else {
            absorb(left);
            absorb(right);
        }
    }
    return ctx;
}

} // namespace stepfusion
