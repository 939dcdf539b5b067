#pragma once

#include "stepfusion/core.hpp"
#include "stepfusion/simgait.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace support {

using namespace stepfusion;

/// Recording whose wrists carry `left` and `right` on the x axis only, so magnitude == |value|.
inline Recording from_signals(const std::vector<double>& left, const std::vector<double>& right, double rate,
                              double t0 = 0.0, const std::string& id = "r") {
    const std::vector<double> zl(left.size(), 0.0), zr(right.size(), 0.0);
    return Recording{id,
                     "s",
                     WalkTask::ComfortablePace,
                     TriaxialSeries(rate, left, zl, zl, t0),
                     TriaxialSeries(rate, right, zr, zr, t0),
                     static_cast<double>(left.size()) / rate,
                     std::nullopt,
                     std::nullopt};
}

/// Noiseless, jitter-free comfortable walk.
inline GaitModelParams clean_walk(double duration = 30.0) {
    auto p = task_profile(WalkTask::ComfortablePace);
    p.noise_std = 0.0;
    p.impact_variability = 0.0;
    p.interval_jitter = 0.0;
    p.duration = duration;
    return p;
}

inline std::vector<Recording> small_corpus(std::uint64_t seed = 3, int per_task = 1, double duration = 12.0) {
    std::vector<Recording> out;
    int i = 0;
    for (auto task : kAllTasks) {
        for (int k = 0; k < per_task; ++k, ++i) {
            auto p = task_profile(task);
            p.duration = duration;
            out.push_back(simulate_recording(task, p, "s" + std::to_string(k), mix_seed(seed, i)));
        }
    }
    return out;
}

inline DetectorParams params_for(AlgorithmId alg) {
    DetectorParams p;
    p.smooth_single = 0.08;
    p.min_peak_amp = 0.06;
    p.min_peak_gap = 0.42;
    if (alg == AlgorithmId::LowLevelSum || alg == AlgorithmId::LowLevelDiff) p.smooth_fused = 0.05;
    if (alg == AlgorithmId::HighLevelIntersect) p.fuse_max_dist = 0.28;
    if (alg == AlgorithmId::HighLevelUnion) p.fuse_min_dist = 0.34;
    return p;
}

} // namespace support
