/**
 * @file io.hpp
 * @brief On-disk session formats.
 *
 * A corpus directory holds, per recording, `<id>_left.csv` and
 * `<id>_right.csv` (header `t,ax,ay,az`, one row per sample) plus a JSON
 * sidecar `<id>.json` with metadata and ground truth. `manifest.json` is
 * written last and lists every recording; a directory without it is an
 * incomplete session.
 */

#pragma once

#include "stepfusion/core.hpp"
#include "stepfusion/eval.hpp"
#include "stepfusion/fusion.hpp"
#include "stepfusion/simgait.hpp"
#include "stepfusion/tuning.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace stepfusion {

inline constexpr int kFormatVersion = 1;

struct RecordingFiles {
    std::string left;
    std::string right;
    std::string meta;
};

/// Writes the two wrist CSVs and the sidecar into `dir`; returns the file names used.
RecordingFiles save_recording(const Recording& rec, const std::filesystem::path& dir);

/// Loads a recording from its sidecar; errors name the offending file and line.
Recording load_recording(const std::filesystem::path& sidecar);

/// CSV body of one wrist (exposed for tests).
std::string wrist_csv(const TriaxialSeries& series);
TriaxialSeries parse_wrist_csv(const std::string& text, double rate, double t0, const std::string& origin);

struct ManifestEntry {
    std::string id;
    std::string subject_id;
    WalkTask task = WalkTask::ComfortablePace;
    double duration = 0.0;
    std::optional<std::size_t> label_count;
    std::optional<int> self_count;
    RecordingFiles files;
};

struct SessionManifest {
    int format_version = kFormatVersion;
    std::vector<ManifestEntry> recordings;
    std::map<std::string, NormalizationContext> normalization;
};

void write_manifest(const SessionManifest& manifest, const std::filesystem::path& dir);
SessionManifest read_manifest(const std::filesystem::path& dir);

/// Saves every recording, then the manifest, with the raw magnitude context.
SessionManifest save_corpus(const std::vector<Recording>& corpus, const std::filesystem::path& dir);

/// Reads the manifest and every recording it lists, validating all of them before returning.
std::vector<Recording> load_corpus(const std::filesystem::path& dir);

// ─── Configuration ──────────────────────────────────────────────────────────

struct Config {
    int version = kFormatVersion;
    CorpusSpec corpus = CorpusSpec::standard();
    ParamGrid grid = ParamGrid::standard();
    std::map<AlgorithmId, DetectorParams> params;
};

/// Strict parse: unknown keys and unsupported versions are errors.
Config parse_config(const nlohmann::json& j);
Config load_config(const std::filesystem::path& path);
nlohmann::json to_json(const Config& config);

// ─── JSON conversions ───────────────────────────────────────────────────────

nlohmann::json to_json(const DetectorParams& p);
DetectorParams params_from_json(const nlohmann::json& j);

nlohmann::json to_json(const NormalizationContext& ctx);
NormalizationContext context_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CVReport& report, const std::vector<Recording>& dataset);
CVReport cv_report_from_json(const nlohmann::json& j);

/// Accepts a CV report (uses its mean parameters), a config with a `params`
/// entry for `alg`, or a bare parameter object.
DetectorParams load_detector_params(const std::filesystem::path& path, AlgorithmId alg);

// ─── Detections and evaluation output ───────────────────────────────────────

/// Columns: recording_id,algorithm,count,step_indices,step_times,step_amplitudes
std::string detections_csv(const std::vector<Recording>& corpus, const std::vector<StepDetection>& detections);
std::vector<std::pair<std::string, StepDetection>> parse_detections_csv(const std::string& text,
                                                                         const std::string& origin);

nlohmann::json summary_json(const CorpusEvaluation& ev);
/// Long format, one row per (recording, algorithm): plot-ready for boxplots.
std::string errors_long_csv(const CorpusEvaluation& ev);
/// One row per detected step with its signed heel-strike and toe-off offsets.
std::string phase_offsets_csv(const std::vector<Recording>& corpus,
                              const std::map<AlgorithmId, std::vector<DetectionOutcome>>& outcomes);

std::string read_text(const std::filesystem::path& path);
/// Writes via a temporary file and rename so readers never see partial content.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

} // namespace stepfusion
