#include "stepfusion/io.hpp"

#include "stepfusion/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace stepfusion {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw Error(origin + ": " + what);
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) fail(where, "expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            fail(where, "unknown key '" + key + "'");
        }
    }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view s, const std::string& where) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        fail(where, "invalid number '" + std::string(s) + "'");
    }
    return v;
}

template <typename Int>
Int parse_int(std::string_view s, const std::string& where) {
    Int v{};
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) fail(where, "invalid integer '" + std::string(s) + "'");
    return v;
}

template <typename T>
T get_field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) fail(where, std::string("missing key '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        fail(where, std::string("bad value for '") + key + "': " + e.what());
    }
}

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(origin, std::string("malformed JSON: ") + e.what());
    }
}

json sides_json(const std::vector<Side>& sides) {
    json out = json::array();
    for (auto s : sides) out.push_back(s == Side::Left ? "L" : "R");
    return out;
}

std::vector<Side> sides_from_json(const json& j, const std::string& where) {
    std::vector<Side> out;
    for (const auto& s : j) {
        const auto v = s.get<std::string>();
        if (v == "L") out.push_back(Side::Left);
        else if (v == "R") out.push_back(Side::Right);
        else fail(where, "step side must be \"L\" or \"R\", got '" + v + "'");
    }
    return out;
}

json ground_truth_json(const GroundTruth& gt) {
    return {
        {"step_times", gt.step_times},
        {"step_sides", sides_json(gt.step_sides)},
        {"heel_strikes_left", gt.heel_strikes_left},
        {"heel_strikes_right", gt.heel_strikes_right},
        {"toe_offs_left", gt.toe_offs_left},
        {"toe_offs_right", gt.toe_offs_right},
        {"label_count", gt.label_count},
    };
}

GroundTruth ground_truth_from_json(const json& j, const std::string& where) {
    check_keys(j, {"step_times", "step_sides", "heel_strikes_left", "heel_strikes_right", "toe_offs_left",
                   "toe_offs_right", "label_count"},
               where);
    GroundTruth gt;
    gt.step_times = get_field<std::vector<double>>(j, "step_times", where);
    gt.step_sides = sides_from_json(get_field<json>(j, "step_sides", where), where);
    gt.heel_strikes_left = get_field<std::vector<double>>(j, "heel_strikes_left", where);
    gt.heel_strikes_right = get_field<std::vector<double>>(j, "heel_strikes_right", where);
    gt.toe_offs_left = get_field<std::vector<double>>(j, "toe_offs_left", where);
    gt.toe_offs_right = get_field<std::vector<double>>(j, "toe_offs_right", where);
    gt.label_count = get_field<std::size_t>(j, "label_count", where);
    try {
        gt.validate();
    } catch (const std::invalid_argument& e) {
        fail(where, std::string("ground truth validation failed: ") + e.what());
    }
    return gt;
}

json distribution_json(const Distribution& d) {
    return {{"n", d.n},           {"mean", d.mean}, {"mean_abs", d.mean_abs}, {"std", d.std_dev},
            {"p5", d.p5},         {"q1", d.q1},     {"median", d.median},     {"q3", d.q3},
            {"p95", d.p95}};
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ';';
        out += format_double(v[i]);
    }
    return out;
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw Error("format_double: conversion failed");
    return std::string(buf, ptr);
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    const auto tmp = fs::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(path.string() + ": cannot write file");
        out << text;
        if (!out) throw Error(path.string() + ": write failed");
    }
    fs::rename(tmp, path);
}

// ─── Recordings ─────────────────────────────────────────────────────────────

std::string wrist_csv(const TriaxialSeries& series) {
    std::string out = "t,ax,ay,az\n";
    out.reserve(series.size() * 64);
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += format_double(series.t0() + static_cast<double>(i) / series.rate());
        out += ',';
        out += format_double(series.x()[i]);
        out += ',';
        out += format_double(series.y()[i]);
        out += ',';
        out += format_double(series.z()[i]);
        out += '\n';
    }
    return out;
}

TriaxialSeries parse_wrist_csv(const std::string& text, double rate, double t0, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) fail(origin, "empty file, header row 't,ax,ay,az' required");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split(line, ',');
    auto column = [&](std::string_view name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) fail(origin + ":1", "missing column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto ct = column("t"), cx = column("ax"), cy = column("ay"), cz = column("az");

    std::vector<double> x, y, z;
    double last_t = -std::numeric_limits<double>::infinity();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto where = origin + ":" + std::to_string(line_no);
        const auto fields = split(line, ',');
        if (fields.size() != header.size()) {
            fail(where, "expected " + std::to_string(header.size()) + " fields, found " +
                            std::to_string(fields.size()));
        }
        const double t = parse_double(fields[ct], where);
        if (!(t > last_t)) fail(where, "timestamps must be strictly increasing");
        last_t = t;
        x.push_back(parse_double(fields[cx], where));
        y.push_back(parse_double(fields[cy], where));
        z.push_back(parse_double(fields[cz], where));
    }
    if (x.empty()) fail(origin, "no samples");
    return TriaxialSeries(rate, std::move(x), std::move(y), std::move(z), t0);
}

RecordingFiles save_recording(const Recording& rec, const fs::path& dir) {
    rec.validate();
    fs::create_directories(dir);
    RecordingFiles files{rec.id + "_left.csv", rec.id + "_right.csv", rec.id + ".json"};
    write_text(dir / files.left, wrist_csv(rec.left));
    write_text(dir / files.right, wrist_csv(rec.right));

    json meta = {
        {"format_version", kFormatVersion},
        {"id", rec.id},
        {"subject_id", rec.subject_id},
        {"task", to_string(rec.task)},
        {"duration", rec.duration},
        {"rate", rec.left.rate()},
        {"t0_left", rec.left.t0()},
        {"t0_right", rec.right.t0()},
        {"files", {{"left", files.left}, {"right", files.right}}},
        {"self_count", rec.self_count ? json(*rec.self_count) : json(nullptr)},
        {"ground_truth", rec.ground_truth ? ground_truth_json(*rec.ground_truth) : json(nullptr)},
    };
    write_text(dir / files.meta, meta.dump(1) + "\n");
    return files;
}

Recording load_recording(const fs::path& sidecar) {
    const auto origin = sidecar.string();
    const auto meta = parse_json(read_text(sidecar), origin);
    check_keys(meta, {"format_version", "id", "subject_id", "task", "duration", "rate", "t0_left", "t0_right",
                      "files", "self_count", "ground_truth"},
               origin);
    if (get_field<int>(meta, "format_version", origin) != kFormatVersion) {
        fail(origin, "unsupported format_version");
    }
    const auto files = get_field<json>(meta, "files", origin);
    check_keys(files, {"left", "right"}, origin + " (files)");
    const auto dir = sidecar.parent_path();
    const auto left_path = dir / get_field<std::string>(files, "left", origin);
    const auto right_path = dir / get_field<std::string>(files, "right", origin);
    const double rate = get_field<double>(meta, "rate", origin);

    WalkTask task;
    try {
        task = parse_task(get_field<std::string>(meta, "task", origin));
    } catch (const std::invalid_argument& e) {
        fail(origin, e.what());
    }

    std::optional<GroundTruth> gt;
    if (!meta.at("ground_truth").is_null()) gt = ground_truth_from_json(meta.at("ground_truth"), origin);
    std::optional<int> self_count;
    if (!meta.at("self_count").is_null()) self_count = get_field<int>(meta, "self_count", origin);

    try {
        Recording rec{
            get_field<std::string>(meta, "id", origin),
            get_field<std::string>(meta, "subject_id", origin),
            task,
            parse_wrist_csv(read_text(left_path), rate, get_field<double>(meta, "t0_left", origin),
                            left_path.string()),
            parse_wrist_csv(read_text(right_path), rate, get_field<double>(meta, "t0_right", origin),
                            right_path.string()),
            get_field<double>(meta, "duration", origin),
            std::move(gt),
            self_count,
        };
        rec.validate();
        return rec;
    } catch (const std::invalid_argument& e) {
        fail(origin, e.what());
    }
}

// ─── Manifest ───────────────────────────────────────────────────────────────

void write_manifest(const SessionManifest& manifest, const fs::path& dir) {
    json recs = json::array();
    for (const auto& e : manifest.recordings) {
        recs.push_back({
            {"id", e.id},
            {"subject_id", e.subject_id},
            {"task", to_string(e.task)},
            {"duration", e.duration},
            {"label_count", e.label_count ? json(*e.label_count) : json(nullptr)},
            {"self_count", e.self_count ? json(*e.self_count) : json(nullptr)},
            {"files", {{"left", e.files.left}, {"right", e.files.right}, {"meta", e.files.meta}}},
        });
    }
    json norm = json::object();
    for (const auto& [family, ctx] : manifest.normalization) norm[family] = to_json(ctx);
    const json j = {{"format_version", manifest.format_version}, {"recordings", recs}, {"normalization", norm}};
    write_text(dir / "manifest.json", j.dump(1) + "\n");
}

SessionManifest read_manifest(const fs::path& dir) {
    const auto path = dir / "manifest.json";
    if (!fs::exists(path)) {
        throw Error(path.string() + ": no manifest; run `stepfusion simulate` first or point --corpus at a complete session");
    }
    const auto origin = path.string();
    const auto j = parse_json(read_text(path), origin);
    check_keys(j, {"format_version", "recordings", "normalization"}, origin);

    SessionManifest m;
    m.format_version = get_field<int>(j, "format_version", origin);
    if (m.format_version != kFormatVersion) {
        fail(origin, "incompatible format_version " + std::to_string(m.format_version) + " (expected " +
                         std::to_string(kFormatVersion) + ")");
    }
    for (const auto& e : get_field<json>(j, "recordings", origin)) {
        const auto where = origin + " (recording)";
        check_keys(e, {"id", "subject_id", "task", "duration", "label_count", "self_count", "files"}, where);
        ManifestEntry entry;
        entry.id = get_field<std::string>(e, "id", where);
        entry.subject_id = get_field<std::string>(e, "subject_id", where);
        try {
            entry.task = parse_task(get_field<std::string>(e, "task", where));
        } catch (const std::invalid_argument& ex) {
            fail(where, ex.what());
        }
        entry.duration = get_field<double>(e, "duration", where);
        if (e.contains("label_count") && !e.at("label_count").is_null()) entry.label_count = e.at("label_count").get<std::size_t>();
        if (e.contains("self_count") && !e.at("self_count").is_null()) entry.self_count = e.at("self_count").get<int>();
        const auto files = get_field<json>(e, "files", where);
        check_keys(files, {"left", "right", "meta"}, where);
        entry.files = {get_field<std::string>(files, "left", where), get_field<std::string>(files, "right", where),
                       get_field<std::string>(files, "meta", where)};
        for (const auto& f : {entry.files.left, entry.files.right, entry.files.meta}) {
            if (!fs::exists(dir / f)) fail(origin, "recording " + entry.id + " references missing file " + f);
        }
        m.recordings.push_back(std::move(entry));
    }
    if (j.contains("normalization")) {
        for (const auto& [family, ctx] : j.at("normalization").items()) m.normalization[family] = context_from_json(ctx);
    }
    return m;
}

SessionManifest save_corpus(const std::vector<Recording>& corpus, const fs::path& dir) {
    fs::create_directories(dir);
    SessionManifest m;
    std::vector<ScalarSeries> mags;
    for (const auto& rec : corpus) {
        const auto files = save_recording(rec, dir);
        m.recordings.push_back({rec.id, rec.subject_id, rec.task, rec.duration,
                                rec.ground_truth ? std::optional<std::size_t>(rec.ground_truth->label_count)
                                                 : std::nullopt,
                                rec.self_count, files});
        mags.push_back(magnitude(rec.left));
        mags.push_back(magnitude(rec.right));
    }
    if (!mags.empty()) m.normalization["magnitude"] = fit_normalization(mags);
    write_manifest(m, dir);
    return m;
}

std::vector<Recording> load_corpus(const fs::path& dir) {
    const auto m = read_manifest(dir);
    std::vector<Recording> corpus;
    std::set<std::string> ids;
    for (const auto& e : m.recordings) {
        auto rec = load_recording(dir / e.files.meta);
        if (rec.id != e.id) fail((dir / e.files.meta).string(), "id does not match manifest entry " + e.id);
        if (!ids.insert(rec.id).second) fail((dir / "manifest.json").string(), "duplicate recording id " + rec.id);
        corpus.push_back(std::move(rec));
    }
    return corpus;
}

// ─── Config and parameters ──────────────────────────────────────────────────

json to_json(const DetectorParams& p) {
    json j = {{"smooth_single", p.smooth_single}, {"min_peak_amp", p.min_peak_amp}, {"min_peak_gap", p.min_peak_gap}};
    if (p.smooth_fused) j["smooth_fused"] = *p.smooth_fused;
    if (p.fuse_max_dist) j["fuse_max_dist"] = *p.fuse_max_dist;
    if (p.fuse_min_dist) j["fuse_min_dist"] = *p.fuse_min_dist;
    return j;
}

DetectorParams params_from_json(const json& j) {
    const std::string where = "detector params";
    check_keys(j, {"smooth_single", "smooth_fused", "min_peak_amp", "min_peak_gap", "fuse_max_dist", "fuse_min_dist"},
               where);
    DetectorParams p;
    p.smooth_single = get_field<double>(j, "smooth_single", where);
    p.min_peak_amp = get_field<double>(j, "min_peak_amp", where);
    p.min_peak_gap = get_field<double>(j, "min_peak_gap", where);
    if (j.contains("smooth_fused")) p.smooth_fused = j.at("smooth_fused").get<double>();
    if (j.contains("fuse_max_dist")) p.fuse_max_dist = j.at("fuse_max_dist").get<double>();
    if (j.contains("fuse_min_dist")) p.fuse_min_dist = j.at("fuse_min_dist").get<double>();
    return p;
}

json to_json(const NormalizationContext& ctx) {
    return {{"global_min", ctx.global_min}, {"global_max", ctx.global_max}};
}

NormalizationContext context_from_json(const json& j) {
    check_keys(j, {"global_min", "global_max"}, "normalization context");
    NormalizationContext ctx{get_field<double>(j, "global_min", "normalization context"),
                             get_field<double>(j, "global_max", "normalization context")};
    if (ctx.global_max < ctx.global_min) throw Error("normalization context: global_max < global_min");
    return ctx;
}

Config parse_config(const json& j) {
    const std::string where = "config";
    check_keys(j, {"version", "corpus", "grid", "params"}, where);
    Config c;
    c.version = get_field<int>(j, "version", where);
    if (c.version != kFormatVersion) fail(where, "unsupported version " + std::to_string(c.version));

    if (j.contains("corpus")) {
        const auto& cj = j.at("corpus");
        check_keys(cj, {"seed", "counts", "subject_variability"}, where + ".corpus");
        if (cj.contains("seed")) c.corpus.seed = cj.at("seed").get<std::uint64_t>();
        if (cj.contains("subject_variability")) c.corpus.subject_variability = cj.at("subject_variability").get<bool>();
        if (cj.contains("counts")) {
            c.corpus.counts.clear();
            for (const auto& [task, n] : cj.at("counts").items()) {
                try {
                    c.corpus.counts[parse_task(task)] = n.get<int>();
                } catch (const std::invalid_argument& e) {
                    fail(where + ".corpus.counts", e.what());
                }
            }
        }
    }
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        check_keys(g, {"smooth_single", "smooth_fused", "min_peak_amp", "min_peak_gap", "fuse_max_dist", "fuse_min_dist"},
                   where + ".grid");
        auto field = [&](const char* key, std::vector<double>& out) {
            if (g.contains(key)) out = g.at(key).get<std::vector<double>>();
        };
        field("smooth_single", c.grid.smooth_single);
        field("smooth_fused", c.grid.smooth_fused);
        field("min_peak_amp", c.grid.min_peak_amp);
        field("min_peak_gap", c.grid.min_peak_gap);
        field("fuse_max_dist", c.grid.fuse_max_dist);
        field("fuse_min_dist", c.grid.fuse_min_dist);
    }
    if (j.contains("params")) {
        const auto& pj = j.at("params");
        if (!pj.is_object()) fail(where + ".params", "expected an object keyed by algorithm");
        for (const auto& [name, value] : pj.items()) {
            try {
                c.params[parse_algorithm(name)] = params_from_json(value);
            } catch (const std::invalid_argument& e) {
                fail(where + ".params", e.what());
            }
        }
    }
    return c;
}

Config load_config(const fs::path& path) {
    try {
        return parse_config(parse_json(read_text(path), path.string()));
    } catch (const json::exception& e) {
        fail(path.string(), e.what());
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

json to_json(const Config& c) {
    json counts = json::object();
    for (const auto& [task, n] : c.corpus.counts) counts[std::string(to_string(task))] = n;
    json params = json::object();
    for (const auto& [alg, p] : c.params) params[std::string(to_string(alg))] = to_json(p);
    return {
        {"version", c.version},
        {"corpus", {{"seed", c.corpus.seed}, {"counts", counts}, {"subject_variability", c.corpus.subject_variability}}},
        {"grid",
         {{"smooth_single", c.grid.smooth_single},
          {"smooth_fused", c.grid.smooth_fused},
          {"min_peak_amp", c.grid.min_peak_amp},
          {"min_peak_gap", c.grid.min_peak_gap},
          {"fuse_max_dist", c.grid.fuse_max_dist},
          {"fuse_min_dist", c.grid.fuse_min_dist}}},
        {"params", params},
    };
}

json to_json(const CVReport& r, const std::vector<Recording>& dataset) {
    json fold_params = json::array();
    for (const auto& p : r.fold_params) fold_params.push_back(to_json(p));
    json ids = json::array();
    for (const auto& rec : dataset) ids.push_back(rec.id);
    return {
        {"format_version", kFormatVersion},
        {"algorithm", to_string(r.algorithm)},
        {"k", r.folds.size()},
        {"fold_params", fold_params},
        {"mean_params", to_json(r.mean_params)},
        {"fold_train_rmse", r.fold_train_rmse},
        {"fold_test_rmse", r.fold_test_rmse},
        {"mean_test_rmse", r.mean_test_rmse},
        {"folds", r.folds},
        {"recording_ids", ids},
        {"held_out_counts", r.held_out_counts},
    };
}

CVReport cv_report_from_json(const json& j) {
    const std::string where = "cv report";
    check_keys(j, {"format_version", "algorithm", "k", "fold_params", "mean_params", "fold_train_rmse",
                   "fold_test_rmse", "mean_test_rmse", "folds", "recording_ids", "held_out_counts"},
               where);
    if (get_field<int>(j, "format_version", where) != kFormatVersion) fail(where, "unsupported format_version");
    CVReport r;
    try {
        r.algorithm = parse_algorithm(get_field<std::string>(j, "algorithm", where));
    } catch (const std::invalid_argument& e) {
        fail(where, e.what());
    }
    for (const auto& p : get_field<json>(j, "fold_params", where)) r.fold_params.push_back(params_from_json(p));
    r.mean_params = params_from_json(get_field<json>(j, "mean_params", where));
    r.fold_train_rmse = get_field<std::vector<double>>(j, "fold_train_rmse", where);
    r.fold_test_rmse = get_field<std::vector<double>>(j, "fold_test_rmse", where);
    r.mean_test_rmse = get_field<double>(j, "mean_test_rmse", where);
    r.folds = get_field<std::vector<std::vector<std::size_t>>>(j, "folds", where);
    r.held_out_counts = get_field<std::vector<int>>(j, "held_out_counts", where);
    return r;
}

DetectorParams load_detector_params(const fs::path& path, AlgorithmId alg) {
    const auto origin = path.string();
    const auto j = parse_json(read_text(path), origin);
    try {
        if (j.contains("fold_params")) {
            const auto report = cv_report_from_json(j);
            if (report.algorithm != alg) {
                fail(origin, "CV report is for '" + std::string(to_string(report.algorithm)) + "', not '" +
                                 std::string(to_string(alg)) + "'");
            }
            return report.mean_params;
        }
        if (j.contains("version")) {
            const auto cfg = parse_config(j);
            const auto it = cfg.params.find(alg);
            if (it == cfg.params.end()) fail(origin, "config has no params for '" + std::string(to_string(alg)) + "'");
            return it->second;
        }
        return params_from_json(j);
    } catch (const Error& e) {
        if (std::string(e.what()).rfind(origin, 0) == 0) throw;
        throw Error(origin + ": " + e.what());
    } catch (const json::exception& e) {
        fail(origin, e.what());
    }
}

// ─── Detections and evaluation output ───────────────────────────────────────

std::string detections_csv(const std::vector<Recording>& corpus, const std::vector<StepDetection>& detections) {
    if (corpus.size() != detections.size()) throw std::invalid_argument("detections_csv: size mismatch");
    std::string out = "recording_id,algorithm,count,step_indices,step_times,step_amplitudes\n";
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& d = detections[i];
        std::string indices;
        for (std::size_t k = 0; k < d.steps.size(); ++k) {
            if (k) indices += ';';
            indices += std::to_string(d.steps[k].index);
        }
        out += corpus[i].id + ',' + std::string(to_string(d.algorithm)) + ',' + std::to_string(d.count) + ',' +
               indices + ',' + join_doubles(d.steps.times()) + ',' + join_doubles(d.steps.amplitudes()) + '\n';
    }
    return out;
}

std::vector<std::pair<std::string, StepDetection>> parse_detections_csv(const std::string& text,
                                                                         const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "recording_id,algorithm,count,step_indices,step_times,step_amplitudes") {
        fail(origin + ":1", "unexpected header");
    }
    std::vector<std::pair<std::string, StepDetection>> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto where = origin + ":" + std::to_string(line_no);
        const auto f = split(line, ',');
        if (f.size() != 6) fail(where, "expected 6 fields");
        StepDetection det;
        try {
            det.algorithm = parse_algorithm(f[1]);
        } catch (const std::invalid_argument& e) {
            fail(where, e.what());
        }
        det.count = parse_int<std::size_t>(f[2], where);
        std::vector<Peak> peaks;
        if (!f[3].empty()) {
            const auto idx = split(f[3], ';');
            const auto ts = split(f[4], ';');
            const auto amps = split(f[5], ';');
            if (idx.size() != ts.size() || ts.size() != amps.size()) fail(where, "step lists differ in length");
            for (std::size_t k = 0; k < idx.size(); ++k) {
                peaks.push_back({parse_int<std::size_t>(idx[k], where), parse_double(ts[k], where),
                                 parse_double(amps[k], where)});
            }
        }
        if (peaks.size() != det.count) fail(where, "count does not match the number of steps");
        try {
            det.steps = PeakSet(std::move(peaks));
        } catch (const std::invalid_argument& e) {
            fail(where, e.what());
        }
        out.emplace_back(std::string(f[0]), std::move(det));
    }
    return out;
}

json summary_json(const CorpusEvaluation& ev) {
    json algorithms = json::object();
    for (const auto& [alg, s] : ev.overall) {
        const auto failures = std::count_if(ev.rows.begin(), ev.rows.end(), [&, a = alg](const EvalRow& r) {
            return r.algorithm == a && !r.error.empty();
        });
        algorithms[std::string(to_string(alg))] = {
            {"percent_error", distribution_json(s.percent_error)},
            {"pearson_r", s.pearson_r ? json(*s.pearson_r) : json(nullptr)},
            {"failed_recordings", failures},
        };
    }
    json by_task = json::object();
    for (const auto& [task, per_alg] : ev.by_task) {
        json row = json::object();
        for (const auto& [alg, d] : per_alg) row[std::string(to_string(alg))] = distribution_json(d);
        by_task[std::string(to_string(task))] = row;
    }
    json phase = json::object();
    for (const auto& [alg, p] : ev.phase) {
        json per_task = json::object();
        for (const auto& [task, d] : p.toe_off_by_task) per_task[std::string(to_string(task))] = distribution_json(d);
        phase[std::string(to_string(alg))] = {
            {"heel_strike", distribution_json(p.heel_strike)},
            {"toe_off", distribution_json(p.toe_off)},
            {"toe_off_by_task", per_task},
        };
    }
    return {{"format_version", kFormatVersion}, {"algorithms", algorithms}, {"by_task", by_task}, {"phase", phase}};
}

std::string errors_long_csv(const CorpusEvaluation& ev) {
    std::string out = "recording_id,task,category,algorithm,predicted,label,percent_error,error\n";
    for (const auto& r : ev.rows) {
        std::string msg = r.error;
        std::replace(msg.begin(), msg.end(), ',', ';');
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        out += r.recording_id + ',' + std::string(to_string(r.task)) + ',' +
               std::string(to_string(category_of(r.task))) + ',' + std::string(to_string(r.algorithm)) + ',' +
               (r.error.empty() ? std::to_string(r.predicted) : "") + ',' + std::to_string(r.label) + ',' +
               (r.error.empty() ? format_double(r.percent_error) : "") + ',' + msg + '\n';
    }
    return out;
}

std::string phase_offsets_csv(const std::vector<Recording>& corpus,
                              const std::map<AlgorithmId, std::vector<DetectionOutcome>>& outcomes) {
    std::string out = "recording_id,task,algorithm,step_time,dt_heel_strike,dt_toe_off\n";
    for (const auto& [alg, per_rec] : outcomes) {
        for (std::size_t i = 0; i < corpus.size() && i < per_rec.size(); ++i) {
            if (!per_rec[i].detection || !corpus[i].ground_truth) continue;
            const auto& steps = per_rec[i].detection->steps;
            const auto off = phase_offsets(steps, *corpus[i].ground_truth);
            for (std::size_t k = 0; k < steps.size(); ++k) {
                out += corpus[i].id + ',' + std::string(to_string(corpus[i].task)) + ',' +
                       std::string(to_string(alg)) + ',' + format_double(steps[k].time) + ',' +
                       format_double(off.to_heel_strike[k]) + ',' + format_double(off.to_toe_off[k]) + '\n';
            }
        }
    }
    return out;
}

} // namespace stepfusion
