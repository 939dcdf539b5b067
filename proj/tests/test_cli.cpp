#include "doctest.h"

#include "cli_support.hpp"

namespace {

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

const char* kSmallConfig = R"({
 "version": 1,
 "corpus": {"seed": 5, "counts": {"comfortable_pace": 3, "bag_right_hand": 3, "cane_right_hand": 3}},
 "grid": {
  "smooth_single": [0.04, 0.08],
  "smooth_fused": [0.02, 0.05],
  "min_peak_amp": [0.06, 0.15],
  "min_peak_gap": [0.3, 0.42],
  "fuse_max_dist": [0.22],
  "fuse_min_dist": [0.34]
 }
})";

} // namespace

TEST_CASE("simulate --spec default writes the full corpus") {
    cli::TempDir tmp("cli_default");
    const auto out = tmp.path / "corpus";
    const auto r = cli::run("simulate --spec default --out \"" + out.string() + "\"", tmp.path);
    REQUIRE_MESSAGE(r.status == 0, r.output);
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(out)) files += e.is_regular_file();
    CHECK(files == 203 * 3 + 1);
    CHECK(std::filesystem::exists(out / "manifest.json"));
}

TEST_CASE("pipeline runs end to end and is byte-identical across runs") {
    cli::TempDir tmp("cli_pipeline");
    std::ofstream(tmp.path / "small.json") << kSmallConfig;
    const auto cfg = (tmp.path / "small.json").string();

    for (const char* name : {"a", "b"}) {
        const auto dir = (tmp.path / name).string();
        auto r = cli::run("simulate --spec \"" + cfg + "\" --out \"" + dir + "\"", tmp.path);
        REQUIRE_MESSAGE(r.status == 0, r.output);
        r = cli::run("tune --corpus \"" + dir + "\" --folds 3 --config \"" + cfg + "\"", tmp.path);
        REQUIRE_MESSAGE(r.status == 0, r.output);
        r = cli::run("detect --corpus \"" + dir + "\" --params \"" + dir + "/tuned.json\"", tmp.path);
        REQUIRE_MESSAGE(r.status == 0, r.output);
        r = cli::run("evaluate --corpus \"" + dir + "\"", tmp.path);
        REQUIRE_MESSAGE(r.status == 0, r.output);
    }
    CHECK(cli::first_difference(tmp.path / "a", tmp.path / "b").empty());
    for (const char* f : {"tuned.json", "cv_union.json", "detections_diff.csv", "context_left.json", "summary.json",
                          "errors_long.csv", "phase_offsets.csv"}) {
        CHECK_MESSAGE(std::filesystem::exists(tmp.path / "a" / f), f);
    }

    const auto rep = cli::run("report --out \"" + (tmp.path / "a").string() + "\"", tmp.path);
    CHECK(rep.status == 0);
    CHECK(contains(rep.output, "cane_right_hand"));
    CHECK(contains(rep.output, "union"));
    CHECK(contains(rep.output, "pearson r"));

    // a seed override changes the corpus
    const auto c = (tmp.path / "c").string();
    REQUIRE(cli::run("simulate --spec \"" + cfg + "\" --seed 6 --out \"" + c + "\"", tmp.path).status == 0);
    CHECK(cli::slurp(tmp.path / "a" / "manifest.json") != cli::slurp(tmp.path / "c" / "manifest.json"));

    // single-algorithm detection with a CV report
    const auto only = tmp.path / "only";
    const auto r = cli::run("detect --corpus \"" + c + "\" --alg sum --params \"" + (tmp.path / "a").string() +
                                "/cv_sum.json\" --out \"" + only.string() + "\"",
                            tmp.path);
    CHECK_MESSAGE(r.status == 0, r.output);
    CHECK(std::filesystem::exists(only / "detections_sum.csv"));
    CHECK_FALSE(std::filesystem::exists(only / "detections_union.csv"));
}

TEST_CASE("actionable errors") {
    cli::TempDir tmp("cli_errors");
    const auto empty = tmp.path / "empty";
    std::filesystem::create_directories(empty);

    auto r = cli::run("tune --corpus \"" + empty.string() + "\"", tmp.path);
    CHECK(r.status != 0);
    CHECK(contains(r.output, "no manifest"));

    std::ofstream(tmp.path / "small.json") << kSmallConfig;
    const auto dir = (tmp.path / "c").string();
    REQUIRE(cli::run("simulate --spec \"" + (tmp.path / "small.json").string() + "\" --out \"" + dir + "\"", tmp.path)
                .status == 0);
    r = cli::run("evaluate --corpus \"" + dir + "\"", tmp.path);
    CHECK(r.status != 0);
    CHECK(contains(r.output, "stepfusion detect"));

    r = cli::run("detect --corpus \"" + dir + "\" --alg sideways --params x.json", tmp.path);
    CHECK(r.status != 0);
    CHECK(contains(r.output, "sideways"));

    r = cli::run("simulate --out \"" + dir + "\" --bogus", tmp.path);
    CHECK(r.status != 0);

    r = cli::run("detect --corpus \"" + dir + "\" --params \"" + (tmp.path / "missing.json").string() + "\"", tmp.path);
    CHECK(r.status != 0);
    CHECK(contains(r.output, "missing.json"));

    std::ofstream(tmp.path / "bad.json") << R"({"version": 1, "grid": {"gap": [0.3]}})";
    r = cli::run("simulate --spec \"" + (tmp.path / "bad.json").string() + "\" --out \"" + dir + "2\"", tmp.path);
    CHECK(r.status != 0);
    CHECK(contains(r.output, "unknown key 'gap'"));

    CHECK(cli::run("report --out \"" + empty.string() + "\"", tmp.path).status != 0);
}
