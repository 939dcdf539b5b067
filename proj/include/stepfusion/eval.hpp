#pragma once

#include "stepfusion/core.hpp"
#include "stepfusion/fusion.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stepfusion {

/// 100 * (predicted - label) / label; negative means under-counting.
double percent_error(int predicted, int label);

/// Sample Pearson correlation; throws on length mismatch, n < 2 or zero variance.
double pearson_r(std::span<const double> xs, std::span<const double> ys);

/// Linear-interpolated percentile, q in [0, 100].
double percentile(std::vector<double> values, double q);

struct OutlierFilterResult {
    std::vector<Recording> kept;
    std::vector<std::string> removed;   ///< ids, largest cadence disagreement first
    std::vector<std::string> unranked;  ///< recordings lacking a self count, kept
};

/**
 * Drops the ceil(frac * N) ranked recordings whose self-reported cadence
 * disagrees most with the labelled cadence. Ties at the cut go by id.
 */
OutlierFilterResult cadence_outlier_filter(std::span<const Recording> dataset, double frac = 0.05);

/// Signed offsets of each detected step to the nearest pooled gait event.
struct PhaseOffsets {
    std::vector<double> to_heel_strike;
    std::vector<double> to_toe_off;
};

/// Nearest event per detection; equidistant events resolve to the earlier one.
PhaseOffsets phase_offsets(const PeakSet& steps, const GroundTruth& gt);

struct Distribution {
    std::size_t n = 0;
    double mean = 0.0;
    double mean_abs = 0.0;
    double std_dev = 0.0;
    double p5 = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double p95 = 0.0;
};

Distribution describe(std::span<const double> values);

struct ErrorSummary {
    Distribution percent_error;
    std::optional<double> pearson_r; ///< absent when undefined (n < 2 or constant counts)
};

/// One row per (recording, algorithm).
struct EvalRow {
    std::string recording_id;
    WalkTask task = WalkTask::ComfortablePace;
    AlgorithmId algorithm = AlgorithmId::NoFusionLeft;
    int predicted = 0;
    int label = 0;
    double percent_error = 0.0;
    std::string error; ///< non-empty when detection failed for this recording
};

struct PhaseSummary {
    PhaseOffsets offsets;
    Distribution heel_strike;
    Distribution toe_off;
    std::map<WalkTask, Distribution> toe_off_by_task;
};

struct CorpusEvaluation {
    std::vector<EvalRow> rows;
    std::map<AlgorithmId, ErrorSummary> overall;
    std::map<WalkTask, std::map<AlgorithmId, Distribution>> by_task;
    std::map<AlgorithmId, PhaseSummary> phase;
};

/// Outcome of one detector on one recording: a detection or an error message.
struct DetectionOutcome {
    std::optional<StepDetection> detection;
    std::string error;
};

/// Aggregate detections already computed; outcomes[alg][i] belongs to dataset[i].
CorpusEvaluation evaluate_detections(std::span<const Recording> dataset,
                                     const std::map<AlgorithmId, std::vector<DetectionOutcome>>& outcomes);

/// Runs every requested detector with contexts fitted on `dataset`, then aggregates.
CorpusEvaluation evaluate_corpus(std::span<const Recording> dataset, std::span<const AlgorithmId> algorithms,
                                 const std::map<AlgorithmId, DetectorParams>& params);

} // namespace stepfusion
