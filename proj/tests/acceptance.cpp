// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "cli_support.hpp"
#include "oracles.hpp"
#include "stepfusion/eval.hpp"
#include "stepfusion/fusion.hpp"
#include "stepfusion/peaks.hpp"
#include "stepfusion/preprocess.hpp"
#include "stepfusion/simgait.hpp"
#include "stepfusion/tuning.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <random>

using namespace stepfusion;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& why) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += why;
        }
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

/// Everything the corpus-level criteria share: one simulation, one CV per algorithm.
struct Study {
    std::vector<Recording> corpus;
    std::map<AlgorithmId, CVReport> reports;
    std::vector<int> labels;
    double seconds = 0.0;

    double mean_abs_error(AlgorithmId alg, std::optional<WalkTask> task = std::nullopt) const {
        double sum = 0.0;
        int n = 0;
        for (std::size_t i = 0; i < corpus.size(); ++i) {
            if (task && corpus[i].task != *task) continue;
            sum += std::abs(percent_error(reports.at(alg).held_out_counts[i], labels[i]));
            ++n;
        }
        return sum / n;
    }

    double r(AlgorithmId alg) const {
        const auto& c = reports.at(alg).held_out_counts;
        const std::vector<double> x(c.begin(), c.end()), y(labels.begin(), labels.end());
        return pearson_r(x, y);
    }
};

Study run_study() {
    const auto start = std::chrono::steady_clock::now();
    Study s;
    s.corpus = simulate_corpus(CorpusSpec::standard(42));
    s.labels = label_counts(s.corpus);
    for (auto alg : kAllAlgorithms) s.reports[alg] = cross_validate(s.corpus, alg, ParamGrid::standard(), 5, 42);
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return s;
}

Outcome fusion_dominance(const Study& s) {
    Outcome o;
    const auto e = [&](AlgorithmId a) { return s.mean_abs_error(a); };
    const double u = e(AlgorithmId::HighLevelUnion), l = e(AlgorithmId::NoFusionLeft),
                 rt = e(AlgorithmId::NoFusionRight), d = e(AlgorithmId::LowLevelDiff);
    o.require(u < l && u < rt, "union not below both single sides");
    for (auto alg : kAllAlgorithms) {
        if (alg != AlgorithmId::LowLevelDiff) o.require(d > e(alg), "diff is not worst (vs " + std::string(to_string(alg)) + ")");
    }
    o.require(s.seconds < 120.0, "runtime over 2 minutes");
    std::string table;
    for (auto alg : kAllAlgorithms) table += fmt(" %s=%.2f%%", std::string(to_string(alg)).c_str(), e(alg));
    o.detail = fmt("mean |err|:%s; simulate+tune %.1f s", table.c_str(), s.seconds) + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

Outcome correlation(const Study& s) {
    Outcome o;
    const double u = s.r(AlgorithmId::HighLevelUnion), l = s.r(AlgorithmId::NoFusionLeft),
                 rt = s.r(AlgorithmId::NoFusionRight);
    o.require(u > l && u > rt, "union r not above both single sides");
    o.require(u >= 0.95, "union r below 0.95");
    const auto msg = fmt("r union=%.4f left=%.4f right=%.4f", u, l, rt);
    o.detail = o.detail.empty() ? msg : msg + "; " + o.detail;
    return o;
}

Outcome per_task(const Study& s) {
    Outcome o;
    double worst_union = 0.0;
    std::string worst_single;
    double worst_single_err = 0.0;
    for (auto task : kAllTasks) {
        const double u = s.mean_abs_error(AlgorithmId::HighLevelUnion, task);
        worst_union = std::max(worst_union, u);
        o.require(u <= 3.0, fmt("union %.2f%% on %s", u, std::string(to_string(task)).c_str()));

        const bool stressed = category_of(task) == TaskCategory::Asymmetrical || task == WalkTask::SlowPace ||
                              task == WalkTask::FastPace;
        if (!stressed) continue;
        for (auto side : {AlgorithmId::NoFusionLeft, AlgorithmId::NoFusionRight}) {
            const double e = s.mean_abs_error(side, task);
            if (e > worst_single_err) {
                worst_single_err = e;
                worst_single = std::string(to_string(side)) + "/" + std::string(to_string(task));
            }
        }
    }
    o.require(worst_single_err > 5.0, "no single side exceeds 5% on a pace-varied or asymmetrical task");
    const auto msg = fmt("union worst task %.2f%%; worst single side %s %.2f%%", worst_union,
                         worst_single.c_str(), worst_single_err);
    o.detail = o.detail.empty() ? msg : msg + "; " + o.detail;
    return o;
}

Outcome oracles() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> window(0.0, 0.5);
    int fusion_bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto l = oracle::random_peaks(rng, 10), r = oracle::random_peaks(rng, 10);
        const double d = window(rng);
        const PeakSet L(l), R(r);
        const auto in = intersect_fuse(L, R, d), un = union_fuse(L, R, d);
        if (std::vector<Peak>(in.begin(), in.end()) != oracle::intersect(l, r, d)) ++fusion_bad;
        if (std::vector<Peak>(un.begin(), un.end()) != oracle::union_loop(l, r, d)) ++fusion_bad;
    }
    int peaks_bad = 0;
    std::uniform_real_distribution<double> amp(0.0, 0.9), gap(0.0, 0.4);
    for (int trial = 0; trial < 500; ++trial) {
        const auto n = 3 + static_cast<std::size_t>(rng() % 254);
        const auto v = oracle::random_series(rng, n);
        const double a = amp(rng), g = gap(rng);
        const auto got = detect_peaks(ScalarSeries(128.0, v), a, g);
        if (std::vector<Peak>(got.begin(), got.end()) != oracle::greedy_peaks(v, 128.0, a, g)) ++peaks_bad;
    }
    o.require(fusion_bad == 0, fmt("%d fusion mismatches", fusion_bad));
    o.require(peaks_bad == 0, fmt("%d peak mismatches", peaks_bad));
    if (o.pass) o.detail = "1000 fusion instances x2 and 500 peak series match";
    return o;
}

Outcome toe_off_adjacency(const Study& s) {
    Outcome o;
    const auto params = s.reports.at(AlgorithmId::HighLevelUnion).mean_params;
    std::vector<Recording> walks;
    for (int i = 0; i < 10; ++i) {
        auto p = task_profile(WalkTask::ComfortablePace);
        p.noise_std = 0.0;
        walks.push_back(simulate_recording(WalkTask::ComfortablePace, p, fmt("n%02d", i), mix_seed(5, i)));
    }
    const auto ctx = fit_detector_context(walks, AlgorithmId::HighLevelUnion, params);
    std::vector<double> dt;
    for (const auto& w : walks) {
        const auto det = run_detector(AlgorithmId::HighLevelUnion, w, params, ctx);
        const auto off = phase_offsets(det.steps, *w.ground_truth);
        dt.insert(dt.end(), off.to_toe_off.begin(), off.to_toe_off.end());
    }
    const auto d = describe(dt);
    const double width = task_profile(WalkTask::ComfortablePace).impact_width;
    o.require(d.std_dev < 0.05, "toe-off offset spread too wide");
    o.require(std::abs(d.mean) < width, "toe-off offset mean beyond impact_width");
    const auto msg = fmt("n=%zu mean %+.4f s std %.4f s (impact_width %.2f s)", d.n, d.mean, d.std_dev, width);
    o.detail = o.detail.empty() ? msg : msg + "; " + o.detail;
    return o;
}

Outcome tuner_sanity(const Study& s) {
    Outcome o;
    double lo = 1e9, hi = -1e9;
    for (const auto& [alg, report] : s.reports) {
        for (const auto& p : report.fold_params) {
            lo = std::min(lo, p.min_peak_gap);
            hi = std::max(hi, p.min_peak_gap);
            o.require(p.min_peak_gap >= 0.2 - 1e-12 && p.min_peak_gap <= 0.45 + 1e-12,
                      fmt("%s gap %.3f", std::string(to_string(alg)).c_str(), p.min_peak_gap));
            if (alg == AlgorithmId::HighLevelIntersect) {
                o.require(*p.fuse_max_dist <= p.min_peak_gap, "intersect fuse_max_dist exceeds min_peak_gap");
            }
        }
    }
    const auto msg = fmt("fold min_peak_gap range [%.3f, %.3f] s", lo, hi);
    o.detail = o.detail.empty() ? msg : msg + "; " + o.detail;
    return o;
}

Outcome determinism() {
    Outcome o;
    cli::TempDir tmp("acceptance");
    for (const char* name : {"a", "b"}) {
        const auto dir = "\"" + (tmp.path / name).string() + "\"";
        const std::vector<std::string> steps{
            "simulate --spec default --seed 42 --out " + dir,
            "tune --corpus " + dir + " --seed 42",
            "detect --corpus " + dir + " --params " + dir.substr(0, dir.size() - 1) + "/tuned.json\"",
            "evaluate --corpus " + dir,
        };
        for (const auto& step : steps) {
            const auto r = cli::run(step, tmp.path);
            if (r.status != 0) {
                o.require(false, "`stepfusion " + step.substr(0, step.find(' ')) + "` failed: " + r.output);
                return o;
            }
        }
    }
    const auto files = cli::tree(tmp.path / "a").size();
    const auto diff = cli::first_difference(tmp.path / "a", tmp.path / "b");
    o.require(diff.empty(), "outputs differ at " + diff);
    if (o.pass) o.detail = fmt("simulate, tune, detect, evaluate twice: %zu files byte-identical", files);
    return o;
}

Outcome numerics() {
    Outcome o;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-2.0, 2.0), w(0.0, 0.6);
    double lin = 0.0, cst = 0.0, aff = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = 5 + static_cast<std::size_t>(rng() % 500);
        std::vector<double> a(n), b(n), mix(n);
        const double ca = u(rng), cb = u(rng), win = w(rng), k = u(rng);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
            mix[i] = ca * a[i] + cb * b[i];
        }
        const auto ma = moving_average(ScalarSeries(128.0, a), win), mb = moving_average(ScalarSeries(128.0, b), win);
        const auto mm = moving_average(ScalarSeries(128.0, mix), win);
        const auto mc = moving_average(ScalarSeries(128.0, std::vector<double>(n, k)), win);
        for (std::size_t i = 0; i < n; ++i) {
            lin = std::max(lin, std::abs(mm[i] - (ca * ma[i] + cb * mb[i])));
            cst = std::max(cst, std::abs(mc[i] - k));
        }

        const double r = pearson_r(a, b);
        const double scale = 0.01 + std::abs(u(rng)) * 50.0, shift = u(rng) * 500.0;
        std::vector<double> t(a);
        for (auto& v : t) v = scale * v + shift;
        aff = std::max(aff, std::abs(pearson_r(t, b) - r));
    }
    bool sign = true;
    for (int label = 1; label < 300; label += 3) {
        for (int pred = 0; pred < 400; pred += 7) {
            const double e = percent_error(pred, label);
            sign = sign && ((pred < label) == (e < 0.0)) && ((pred > label) == (e > 0.0));
        }
    }
    sign = sign && percent_error(98, 100) == -2.0 && percent_error(105, 100) == 5.0 && percent_error(104, 104) == 0.0;
    o.require(lin <= 1e-12, "moving average not linear");
    o.require(cst <= 1e-12, "moving average does not preserve constants");
    o.require(aff <= 1e-9, "pearson_r not affine invariant");
    o.require(sign, "percent_error sign convention");
    const auto msg = fmt("max deviations: linearity %.1e, constant %.1e, pearson affine %.1e", lin, cst, aff);
    o.detail = o.detail.empty() ? msg : msg + "; " + o.detail;
    return o;
}

} // namespace

int main() {
    int failed = 0;
    auto report = [&](int id, const char* name, const Outcome& o) {
        std::printf("[%s] criterion %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    };
    auto guarded = [&](int id, const char* name, auto&& fn) {
        try {
            report(id, name, fn());
        } catch (const std::exception& e) {
            report(id, name, Outcome{false, std::string("threw: ") + e.what()});
        }
    };

    std::optional<Study> study;
    try {
        study = run_study();
    } catch (const std::exception& e) {
        std::printf("study failed: %s\n", e.what());
    }
    const auto needs_study = [&](auto fn) {
        return [&, fn] { return study ? fn(*study) : Outcome{false, "corpus study unavailable"}; };
    };

    guarded(1, "fusion dominance", needs_study(fusion_dominance));
    guarded(2, "correlation ordering", needs_study(correlation));
    guarded(3, "per-task robustness", needs_study(per_task));
    guarded(4, "algorithm oracles", oracles);
    guarded(5, "toe-off adjacency", needs_study(toe_off_adjacency));
    guarded(6, "tuner sanity", needs_study(tuner_sanity));
    guarded(7, "determinism", determinism);
    guarded(8, "numerical properties", numerics);

    std::printf("%d of 8 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
