#include "doctest.h"

#include "stepfusion/tuning.hpp"
#include "support.hpp"

#include <numeric>
#include <set>

using namespace stepfusion;

namespace {

std::vector<Recording> tagged(int n) {
    // short recordings, tasks cycling so the stratification has work to do
    std::vector<Recording> out;
    for (int i = 0; i < n; ++i) {
        auto p = task_profile(kAllTasks[i % 3]);
        p.duration = 3.0;
        out.push_back(simulate_recording(kAllTasks[i % 3], p, "s" + std::to_string(i), 100 + i));
    }
    return out;
}

double train_rmse(std::span<const Recording> data, AlgorithmId alg, const DetectorParams& p) {
    const std::vector<DetectorParams> one{p};
    const auto m = score_grid_serial(data, alg, one);
    return rmse(m.counts, label_counts(data));
}

ParamGrid tiny_grid() {
    ParamGrid g;
    g.smooth_single = {0.04, 0.08};
    g.smooth_fused = {0.02};
    g.min_peak_amp = {0.03, 0.06, 0.15};
    g.min_peak_gap = {0.24, 0.42};
    g.fuse_max_dist = {0.22};
    g.fuse_min_dist = {0.25, 0.34};
    return g;
}

} // namespace

TEST_CASE("make_folds examples") {
    const auto ten = tagged(10);
    const auto f10 = make_folds(ten, 5, 1);
    REQUIRE(f10.size() == 5);
    for (const auto& f : f10) CHECK(f.size() == 2);

    const auto f11 = make_folds(tagged(11), 5, 1);
    std::multiset<std::size_t> sizes;
    for (const auto& f : f11) sizes.insert(f.size());
    CHECK(sizes == std::multiset<std::size_t>{2, 2, 2, 2, 3});

    CHECK(make_folds(ten, 5, 9) == make_folds(ten, 5, 9));
    CHECK_THROWS(make_folds(ten, 1, 1));
    CHECK_THROWS(make_folds(ten, 11, 1));
}

TEST_CASE("folds are disjoint, covering and stratified") {
    for (int n : {7, 12, 25, 40}) {
        const auto data = tagged(n);
        for (int k : {2, 3, 5}) {
            if (k > n) continue;
            for (std::uint64_t seed : {1u, 2u, 3u}) {
                const auto folds = make_folds(data, k, seed);
                std::vector<int> seen(data.size(), 0);
                for (const auto& f : folds)
                    for (auto i : f) ++seen[i];
                CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));

                for (auto task : {kAllTasks[0], kAllTasks[1], kAllTasks[2]}) {
                    std::vector<int> per_fold;
                    for (const auto& f : folds) {
                        per_fold.push_back(static_cast<int>(
                            std::count_if(f.begin(), f.end(), [&](std::size_t i) { return data[i].task == task; })));
                    }
                    const auto [lo, hi] = std::minmax_element(per_fold.begin(), per_fold.end());
                    CHECK(*hi - *lo <= 1);
                }
            }
        }
    }
}

TEST_CASE("rmse examples") {
    CHECK(rmse(std::vector<int>{100, 90}, std::vector<int>{100, 90}) == 0.0);
    CHECK(rmse(std::vector<int>{101}, std::vector<int>{100}) == 1.0);
    CHECK(rmse(std::vector<int>{98, 104}, std::vector<int>{100, 100}) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-12));
    CHECK_THROWS(rmse(std::vector<int>{}, std::vector<int>{}));
    CHECK_THROWS(rmse(std::vector<int>{1}, std::vector<int>{1, 2}));
}

TEST_CASE("grid_points enumerates lexicographically and honours the intersection bound") {
    ParamGrid g = tiny_grid();
    const auto left = grid_points(g, AlgorithmId::NoFusionLeft);
    CHECK(left.size() == 2 * 3 * 2);
    CHECK(left[0].smooth_single == 0.04);
    CHECK(left[0].min_peak_amp == 0.03);
    CHECK(left[1].min_peak_gap == 0.42);
    CHECK_FALSE(left[0].smooth_fused.has_value());

    g.fuse_max_dist = {0.22, 0.30};
    for (const auto& p : grid_points(g, AlgorithmId::HighLevelIntersect)) CHECK(*p.fuse_max_dist <= p.min_peak_gap);
    g.min_peak_gap = {0.1};
    CHECK_THROWS(grid_points(g, AlgorithmId::HighLevelIntersect));
    g.min_peak_amp.clear();
    CHECK_THROWS(grid_points(g, AlgorithmId::NoFusionLeft));
}

TEST_CASE("best_point keeps the first of equally good points") {
    CountMatrix m{3, 2, {5, 5, 4, 6, 4, 6}};
    const std::vector<std::size_t> rows{0, 1};
    const std::vector<int> labels{5, 5};
    CHECK(best_point(m, rows, labels) == 0);
    const std::vector<int> shifted{4, 6};
    CHECK(best_point(m, rows, shifted) == 1);
}

TEST_CASE("grid_search") {
    const auto train = support::small_corpus(21, 1, 10.0);

    SUBCASE("single point") {
        ParamGrid g = tiny_grid();
        g.smooth_single = {0.08};
        g.min_peak_amp = {0.06};
        g.min_peak_gap = {0.42};
        const auto p = grid_search(train, AlgorithmId::NoFusionLeft, g);
        CHECK(p == grid_points(g, AlgorithmId::NoFusionLeft)[0]);
    }
    SUBCASE("equal scores resolve to the first declared point") {
        ParamGrid g = tiny_grid();
        g.smooth_single = {0.08};
        g.min_peak_gap = {0.42};
        g.min_peak_amp = {0.0, 1e-9};
        const auto points = grid_points(g, AlgorithmId::NoFusionLeft);
        const auto m = score_grid_serial(train, AlgorithmId::NoFusionLeft, points);
        REQUIRE(std::equal(m.counts.begin(), m.counts.begin() + train.size(), m.counts.begin() + train.size()));
        CHECK(grid_search(train, AlgorithmId::NoFusionLeft, g).min_peak_amp == 0.0);
    }
    SUBCASE("result is a grid member no worse than any other point") {
        for (const auto alg : kAllAlgorithms) {
            const auto g = tiny_grid();
            const auto points = grid_points(g, alg);
            const auto best = grid_search(train, alg, g);
            REQUIRE(std::find(points.begin(), points.end(), best) != points.end());
            const double chosen = train_rmse(train, alg, best);
            for (const auto& p : points) CHECK(chosen <= train_rmse(train, alg, p));
        }
    }
    SUBCASE("a larger grid never selects a worse point") {
        ParamGrid small = tiny_grid();
        small.min_peak_amp = {0.15};
        ParamGrid large = tiny_grid();
        for (const auto alg : {AlgorithmId::NoFusionRight, AlgorithmId::HighLevelUnion}) {
            const double a = train_rmse(train, alg, grid_search(train, alg, small));
            const double b = train_rmse(train, alg, grid_search(train, alg, large));
            CHECK(b <= a);
        }
    }
    SUBCASE("serial and parallel scoring agree") {
        for (const auto alg : kAllAlgorithms) {
            CHECK(grid_search(train, alg, tiny_grid(), Execution::Serial) ==
                  grid_search(train, alg, tiny_grid(), Execution::Parallel));
        }
    }
}

TEST_CASE("cross_validate") {
    SUBCASE("a perfect point is selected in every fold") {
        std::vector<Recording> data;
        for (int i = 0; i < 10; ++i) {
            data.push_back(simulate_recording(WalkTask::ComfortablePace, support::clean_walk(8.0 + i),
                                              "s" + std::to_string(i), 50 + i));
        }
        ParamGrid g = tiny_grid();
        g.smooth_single = {0.08};
        // 0.15 clears the swing maximum left after the final step
        g.min_peak_amp = {0.15};
        g.min_peak_gap = {1.5, 0.42};
        const auto report = cross_validate(data, AlgorithmId::NoFusionLeft, g, 5, 3);
        REQUIRE(report.fold_params.size() == 5);
        for (const auto& p : report.fold_params) CHECK(p.min_peak_gap == 0.42);
        CHECK(report.mean_test_rmse == 0.0);
        CHECK(report.held_out_counts == label_counts(data));
    }
    SUBCASE("deterministic and independent of the execution mode") {
        const auto data = support::small_corpus(31, 2, 8.0);
        const auto a = cross_validate(data, AlgorithmId::HighLevelIntersect, tiny_grid(), 4, 5);
        const auto b = cross_validate(data, AlgorithmId::HighLevelIntersect, tiny_grid(), 4, 5);
        const auto c = cross_validate(data, AlgorithmId::HighLevelIntersect, tiny_grid(), 4, 5, Execution::Serial);
        CHECK(a == b);
        CHECK(a == c);
    }
    SUBCASE("full synthetic corpus, five folds") {
        const auto data = simulate_corpus(CorpusSpec::standard());
        REQUIRE(data.size() == 203);
        ParamGrid g = tiny_grid();
        const auto report = cross_validate(data, AlgorithmId::NoFusionLeft, g, 5, 42);
        REQUIRE(report.fold_params.size() == 5);
        double s = 0, a = 0, gap = 0;
        for (const auto& p : report.fold_params) {
            s += p.smooth_single;
            a += p.min_peak_amp;
            gap += p.min_peak_gap;
        }
        CHECK(report.mean_params.smooth_single == doctest::Approx(s / 5));
        CHECK(report.mean_params.min_peak_amp == doctest::Approx(a / 5));
        CHECK(report.mean_params.min_peak_gap == doctest::Approx(gap / 5));
        CHECK_FALSE(report.mean_params.fuse_min_dist.has_value());
        std::size_t covered = 0;
        for (const auto& f : report.folds) covered += f.size();
        CHECK(covered == 203);
    }
}
