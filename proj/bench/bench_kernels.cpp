// Serial reference vs OpenMP grid-scoring kernel on a small synthetic corpus.
// usage: bench_kernels [recordings_per_task=3] [repeats=3]

#include "stepfusion/kernels.hpp"
#include "stepfusion/simgait.hpp"
#include "stepfusion/tuning.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>

using namespace stepfusion;
using bench_clock = std::chrono::steady_clock;

template <typename F>
double best_of(int repeats, F&& f) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = bench_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(bench_clock::now() - t0).count());
    }
    return best;
}

int main(int argc, char** argv) {
    const int per_task = argc > 1 ? std::atoi(argv[1]) : 3;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;

    CorpusSpec spec = CorpusSpec::standard(7);
    for (auto& [task, n] : spec.counts) n = per_task;
    const auto corpus = simulate_corpus(spec);

    ParamGrid grid;
    grid.smooth_single = {0.04, 0.08};
    grid.smooth_fused = {0.02, 0.05};
    grid.min_peak_amp = {0.06, 0.10, 0.15};
    grid.min_peak_gap = {0.36, 0.42};
    grid.fuse_max_dist = {0.22, 0.28};
    grid.fuse_min_dist = {0.25, 0.34};

    std::printf("threads=%d recordings=%zu repeats=%d\n", omp_get_max_threads(), corpus.size(), repeats);
    std::printf("%-10s %7s %12s %12s %8s %s\n", "algorithm", "points", "serial_s", "parallel_s", "speedup", "match");
    for (const auto alg : kAllAlgorithms) {
        const auto points = grid_points(grid, alg);
        CountMatrix serial, parallel;
        const double ts = best_of(repeats, [&] { serial = score_grid_serial(corpus, alg, points); });
        const double tp = best_of(repeats, [&] { parallel = score_grid_parallel(corpus, alg, points); });
        std::printf("%-10s %7zu %12.4f %12.4f %7.1fx %s\n", std::string(to_string(alg)).c_str(), points.size(), ts,
                    tp, ts / tp, serial == parallel ? "yes" : "NO");
    }
    return 0;
}
