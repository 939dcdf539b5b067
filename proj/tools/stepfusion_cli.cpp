// stepfusion: simulate -> tune -> detect -> evaluate -> report

#include "stepfusion/eval.hpp"
#include "stepfusion/fusion.hpp"
#include "stepfusion/io.hpp"
#include "stepfusion/simgait.hpp"
#include "stepfusion/tuning.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace stepfusion;
using nlohmann::json;

namespace {

std::vector<AlgorithmId> selected_algorithms(const std::vector<std::string>& names) {
    if (names.empty()) return {kAllAlgorithms.begin(), kAllAlgorithms.end()};
    std::vector<AlgorithmId> out;
    for (const auto& n : names) {
        const auto alg = parse_algorithm(n);
        if (std::find(out.begin(), out.end(), alg) == out.end()) out.push_back(alg);
    }
    return out;
}

std::vector<AlgorithmId> alg_order(std::vector<AlgorithmId> algs) {
    std::sort(algs.begin(), algs.end());
    return algs;
}

int run_simulate(const std::string& spec, std::optional<std::uint64_t> seed, const fs::path& out) {
    CorpusSpec corpus = CorpusSpec::standard();
    if (spec != "default") corpus = load_config(spec).corpus;
    if (seed) corpus.seed = *seed;
    const auto recordings = simulate_corpus(corpus);
    save_corpus(recordings, out);
    std::cout << "wrote " << recordings.size() << " recordings and manifest.json to " << out.string() << "\n";
    return 0;
}

int run_tune(const fs::path& corpus_dir, const std::vector<std::string>& algs, int folds, std::uint64_t seed,
             const std::string& config_path, const fs::path& out) {
    const auto grid = config_path.empty() ? ParamGrid::standard() : load_config(config_path).grid;
    const auto corpus = load_corpus(corpus_dir);
    fs::create_directories(out);

    // tuned.json accumulates the mean parameters of every algorithm tuned into `out`
    const auto tuned_path = out / "tuned.json";
    Config tuned;
    tuned.grid = grid;
    if (fs::exists(tuned_path)) tuned.params = load_config(tuned_path).params;

    for (const auto alg : selected_algorithms(algs)) {
        const auto report = cross_validate(corpus, alg, grid, folds, seed);
        const auto path = out / ("cv_" + std::string(to_string(alg)) + ".json");
        write_text(path, to_json(report, corpus).dump(1) + "\n");
        tuned.params[alg] = report.mean_params;
        std::printf("%-10s mean test RMSE %.3f steps  -> %s\n", std::string(to_string(alg)).c_str(),
                    report.mean_test_rmse, path.string().c_str());
    }
    write_text(tuned_path, to_json(tuned).dump(1) + "\n");
    return 0;
}

int run_detect(const fs::path& corpus_dir, const std::vector<std::string>& algs, const fs::path& params_path,
               const fs::path& out) {
    const auto corpus = load_corpus(corpus_dir);
    if (corpus.empty()) throw Error(corpus_dir.string() + ": corpus has no recordings");
    fs::create_directories(out);

    for (const auto alg : selected_algorithms(algs)) {
        const auto params = load_detector_params(params_path, alg);
        params.validate_for(alg);
        const auto ctx = fit_detector_context(corpus, alg, params);

        std::vector<std::optional<StepDetection>> found(corpus.size());
        std::vector<std::exception_ptr> errors(corpus.size());
        const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            try {
                found[i] = run_detector(alg, corpus[i], params, ctx);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
        std::vector<StepDetection> detections;
        for (auto& d : found) detections.push_back(std::move(*d));

        const auto name = std::string(to_string(alg));
        write_text(out / ("detections_" + name + ".csv"), detections_csv(corpus, detections));
        const json used = {
            {"format_version", kFormatVersion},
            {"algorithm", name},
            {"params", to_json(params)},
            {"signal_family", signal_family(alg, params, corpus.front().left.rate())},
            {"normalization", to_json(ctx)},
        };
        write_text(out / ("context_" + name + ".json"), used.dump(1) + "\n");
        std::cout << "wrote detections_" << name << ".csv (" << detections.size() << " recordings)\n";
    }
    return 0;
}

int run_evaluate(const fs::path& corpus_dir, const fs::path& out) {
    std::vector<fs::path> files;
    if (fs::is_directory(out)) {
        for (const auto& entry : fs::directory_iterator(out)) {
            const auto name = entry.path().filename().string();
            if (name.rfind("detections_", 0) == 0 && entry.path().extension() == ".csv") files.push_back(entry.path());
        }
    }
    if (files.empty()) {
        throw Error("no detections_<alg>.csv files in " + out.string() +
                    "; run `stepfusion detect --corpus " + corpus_dir.string() + " --params <tuned.json> --out " +
                    out.string() + "` first");
    }
    std::sort(files.begin(), files.end());

    const auto corpus = load_corpus(corpus_dir);
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < corpus.size(); ++i) index[corpus[i].id] = i;

    std::map<AlgorithmId, std::vector<DetectionOutcome>> outcomes;
    for (const auto& path : files) {
        for (auto& [id, det] : parse_detections_csv(read_text(path), path.string())) {
            const auto it = index.find(id);
            if (it == index.end()) throw Error(path.string() + ": recording '" + id + "' is not in the corpus");
            auto& slot = outcomes[det.algorithm];
            if (slot.empty()) {
                slot.resize(corpus.size());
                for (auto& o : slot) o.error = "no detection recorded";
            }
            slot[it->second] = {std::move(det), ""};
        }
    }

    const auto ev = evaluate_detections(corpus, outcomes);
    write_text(out / "summary.json", summary_json(ev).dump(1) + "\n");
    write_text(out / "errors_long.csv", errors_long_csv(ev));
    write_text(out / "phase_offsets.csv", phase_offsets_csv(corpus, outcomes));
    std::cout << "evaluated " << outcomes.size() << " algorithm(s) on " << corpus.size()
              << " recordings; wrote summary.json, errors_long.csv, phase_offsets.csv\n";
    return 0;
}

int run_report(const fs::path& out) {
    const auto path = out / "summary.json";
    if (!fs::exists(path)) {
        throw Error(path.string() + " not found; run `stepfusion evaluate --out " + out.string() + "` first");
    }
    const auto summary = json::parse(read_text(path));
    std::vector<AlgorithmId> algs;
    for (const auto& [name, v] : summary.at("algorithms").items()) algs.push_back(parse_algorithm(name));
    algs = alg_order(algs);

    std::printf("Mean |percent error| by task (median signed error in brackets)\n\n");
    std::printf("%-18s %-16s", "task", "category");
    for (auto a : algs) std::printf(" %18s", std::string(to_string(a)).c_str());
    std::printf("\n");

    auto cell = [](const json& d) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%6.2f [%+6.2f]", d.at("mean_abs").get<double>(), d.at("median").get<double>());
        return std::string(buf);
    };
    const auto& by_task = summary.at("by_task");
    for (const auto task : kAllTasks) {
        const auto key = std::string(to_string(task));
        if (!by_task.contains(key)) continue;
        std::printf("%-18s %-16s", key.c_str(), std::string(to_string(category_of(task))).c_str());
        for (auto a : algs) {
            const auto name = std::string(to_string(a));
            std::printf(" %18s", by_task[key].contains(name) ? cell(by_task[key][name]).c_str() : "-");
        }
        std::printf("\n");
    }
    std::printf("%-18s %-16s", "all", "");
    for (auto a : algs) std::printf(" %18s", cell(summary["algorithms"][std::string(to_string(a))]["percent_error"]).c_str());
    std::printf("\n%-18s %-16s", "pearson r", "");
    for (auto a : algs) {
        const auto& r = summary["algorithms"][std::string(to_string(a))]["pearson_r"];
        if (r.is_null()) std::printf(" %18s", "-");
        else std::printf(" %18.3f", r.get<double>());
    }
    std::printf("\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-wrist step detection: simulate, tune, detect, evaluate, report"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Write a synthetic corpus and its manifest");
    std::string spec = "default";
    std::optional<std::uint64_t> sim_seed;
    fs::path sim_out;
    sim->add_option("--spec", spec, "'default' or a config file with a corpus section")->capture_default_str();
    sim->add_option("--seed", sim_seed, "Corpus seed (overrides the spec)");
    sim->add_option("--out", sim_out, "Output corpus directory")->required();

    auto* tune = app.add_subcommand("tune", "Cross-validate parameters; writes cv_<alg>.json and tuned.json");
    fs::path tune_corpus, tune_out;
    std::vector<std::string> tune_algs;
    int folds = 5;
    std::uint64_t tune_seed = 42;
    std::string config_path;
    tune->add_option("--corpus", tune_corpus, "Corpus directory")->required();
    tune->add_option("--alg", tune_algs, "left|right|sum|diff|intersect|union (repeatable; default all)");
    tune->add_option("--folds", folds, "Number of folds")->capture_default_str();
    tune->add_option("--seed", tune_seed, "Fold assignment seed")->capture_default_str();
    tune->add_option("--config", config_path, "Config file providing the parameter grid");
    tune->add_option("--out", tune_out, "Output directory (default: the corpus directory)");

    auto* detect = app.add_subcommand("detect", "Count steps with fixed parameters; writes detections_<alg>.csv");
    fs::path det_corpus, det_params, det_out;
    std::vector<std::string> det_algs;
    detect->add_option("--corpus", det_corpus, "Corpus directory")->required();
    detect->add_option("--alg", det_algs, "Algorithm (repeatable; default all)");
    detect->add_option("--params", det_params, "CV report, tuned.json/config, or bare parameter JSON")->required();
    detect->add_option("--out", det_out, "Output directory (default: the corpus directory)");

    auto* evaluate = app.add_subcommand("evaluate", "Score detections; writes summary.json and plot-ready CSVs");
    fs::path ev_corpus, ev_out;
    evaluate->add_option("--corpus", ev_corpus, "Corpus directory")->required();
    evaluate->add_option("--out", ev_out, "Directory holding detections (default: the corpus directory)");

    auto* report = app.add_subcommand("report", "Print the per-task error table from summary.json");
    fs::path rep_out;
    report->add_option("--out", rep_out, "Directory holding summary.json")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) return run_simulate(spec, sim_seed, sim_out);
        if (*tune) return run_tune(tune_corpus, tune_algs, folds, tune_seed, config_path,
                                   tune_out.empty() ? tune_corpus : tune_out);
        if (*detect) return run_detect(det_corpus, det_algs, det_params, det_out.empty() ? det_corpus : det_out);
        if (*evaluate) return run_evaluate(ev_corpus, ev_out.empty() ? ev_corpus : ev_out);
        if (*report) return run_report(rep_out);
    } catch (const std::exception& e) {
        std::cerr << "stepfusion: error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
