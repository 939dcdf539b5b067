#include "stepfusion/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stepfusion {

namespace {

std::size_t nearest_event(const std::vector<double>& events, double t) {
    const auto it = std::lower_bound(events.begin(), events.end(), t);
    auto idx = static_cast<std::size_t>(it - events.begin());
    if (idx == events.size() || (idx > 0 && t - events[idx - 1] <= events[idx] - t)) --idx;
    return idx;
}

std::vector<double> pooled(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace

double percent_error(int predicted, int label) {
    if (label <= 0) throw std::invalid_argument("percent_error: label must be positive");
    return 100.0 * static_cast<double>(predicted - label) / static_cast<double>(label);
}

double pearson_r(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson_r: length mismatch");
    if (xs.size() < 2) throw std::invalid_argument("pearson_r: need at least two points");
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("pearson_r: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("percentile: no values");
    if (!(q >= 0.0 && q <= 100.0)) throw std::invalid_argument("percentile: q outside [0, 100]");
    std::sort(values.begin(), values.end());
    const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

Distribution describe(std::span<const double> values) {
    Distribution d;
    d.n = values.size();
    if (values.empty()) return d;
    const double n = static_cast<double>(values.size());
    d.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double abs_sum = 0.0, sq = 0.0;
    for (double v : values) {
        abs_sum += std::abs(v);
        sq += (v - d.mean) * (v - d.mean);
    }
    d.mean_abs = abs_sum / n;
    d.std_dev = values.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
    std::vector<double> copy(values.begin(), values.end());
    d.p5 = percentile(copy, 5.0);
    d.q1 = percentile(copy, 25.0);
    d.median = percentile(copy, 50.0);
    d.q3 = percentile(copy, 75.0);
    d.p95 = percentile(copy, 95.0);
    return d;
}

OutlierFilterResult cadence_outlier_filter(std::span<const Recording> dataset, double frac) {
    if (!(frac >= 0.0 && frac < 1.0)) throw std::invalid_argument("cadence_outlier_filter: frac must lie in [0, 1)");

    struct Ranked {
        std::size_t index;
        double disagreement;
    };
    OutlierFilterResult result;
    std::vector<Ranked> ranked;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto& rec = dataset[i];
        if (!rec.self_count || !rec.ground_truth) {
            result.unranked.push_back(rec.id);
            continue;
        }
        const double self_cadence = *rec.self_count / rec.duration;
        const double label_cadence = static_cast<double>(rec.ground_truth->label_count) / rec.duration;
        ranked.push_back({i, std::abs(self_cadence - label_cadence)});
    }
    std::sort(ranked.begin(), ranked.end(), [&](const Ranked& a, const Ranked& b) {
        if (a.disagreement != b.disagreement) return a.disagreement > b.disagreement;
        return dataset[a.index].id < dataset[b.index].id;
    });

    const auto drop = static_cast<std::size_t>(std::ceil(frac * static_cast<double>(ranked.size()) - 1e-9));
    std::vector<bool> removed(dataset.size(), false);
    for (std::size_t j = 0; j < drop && j < ranked.size(); ++j) {
        removed[ranked[j].index] = true;
        result.removed.push_back(dataset[ranked[j].index].id);
    }
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (!removed[i]) result.kept.push_back(dataset[i]);
    }
    return result;
}

PhaseOffsets phase_offsets(const PeakSet& steps, const GroundTruth& gt) {
    const auto toe_offs = pooled(gt.toe_offs_left, gt.toe_offs_right);
    const auto heel_strikes = pooled(gt.heel_strikes_left, gt.heel_strikes_right);
    if (toe_offs.empty() || heel_strikes.empty()) {
        throw std::invalid_argument("phase_offsets: ground truth has no gait events");
    }
    PhaseOffsets out;
    for (const auto& p : steps) {
        out.to_toe_off.push_back(p.time - toe_offs[nearest_event(toe_offs, p.time)]);
        out.to_heel_strike.push_back(p.time - heel_strikes[nearest_event(heel_strikes, p.time)]);
    }
    return out;
}

CorpusEvaluation evaluate_detections(std::span<const Recording> dataset,
                                     const std::map<AlgorithmId, std::vector<DetectionOutcome>>& outcomes) {
    const auto labels_of = [&](std::size_t i) {
        if (!dataset[i].ground_truth) throw std::invalid_argument("recording " + dataset[i].id + " is unlabelled");
        return static_cast<int>(dataset[i].ground_truth->label_count);
    };

    CorpusEvaluation ev;
    for (const auto& [alg, per_rec] : outcomes) {
        if (per_rec.size() != dataset.size()) {
            throw std::invalid_argument("evaluate: detections for " + std::string(to_string(alg)) +
                                        " do not match the corpus size");
        }
        std::vector<double> errors, preds, labels;
        std::map<WalkTask, std::vector<double>> task_errors;
        PhaseSummary phase;
        std::map<WalkTask, std::vector<double>> task_toe;

        for (std::size_t i = 0; i < dataset.size(); ++i) {
            const auto& rec = dataset[i];
            EvalRow row{rec.id, rec.task, alg, 0, labels_of(i), 0.0, per_rec[i].error};
            if (per_rec[i].detection) {
                const auto& det = *per_rec[i].detection;
                row.predicted = static_cast<int>(det.count);
                row.percent_error = percent_error(row.predicted, row.label);
                errors.push_back(row.percent_error);
                preds.push_back(row.predicted);
                labels.push_back(row.label);
                task_errors[rec.task].push_back(row.percent_error);

                const auto off = phase_offsets(det.steps, *rec.ground_truth);
                phase.offsets.to_heel_strike.insert(phase.offsets.to_heel_strike.end(),
                                                    off.to_heel_strike.begin(), off.to_heel_strike.end());
                phase.offsets.to_toe_off.insert(phase.offsets.to_toe_off.end(), off.to_toe_off.begin(),
                                                off.to_toe_off.end());
                task_toe[rec.task].insert(task_toe[rec.task].end(), off.to_toe_off.begin(), off.to_toe_off.end());
            } else if (row.error.empty()) {
                row.error = "no detection";
            }
            ev.rows.push_back(std::move(row));
        }

        ErrorSummary summary{describe(errors), std::nullopt};
        try {
            summary.pearson_r = pearson_r(preds, labels);
        } catch (const std::invalid_argument&) {
            // undefined for fewer than two points or constant counts
        }
        ev.overall[alg] = summary;
        for (auto task : kAllTasks) ev.by_task[task][alg] = describe(task_errors[task]);

        phase.heel_strike = describe(phase.offsets.to_heel_strike);
        phase.toe_off = describe(phase.offsets.to_toe_off);
        for (auto task : kAllTasks) phase.toe_off_by_task[task] = describe(task_toe[task]);
        ev.phase[alg] = std::move(phase);
    }
    return ev;
}

CorpusEvaluation evaluate_corpus(std::span<const Recording> dataset, std::span<const AlgorithmId> algorithms,
                                 const std::map<AlgorithmId, DetectorParams>& params) {
    std::map<AlgorithmId, std::vector<DetectionOutcome>> outcomes;
    for (auto alg : algorithms) {
        const auto found = params.find(alg);
        if (found == params.end()) {
            throw std::invalid_argument("evaluate: no parameters for " + std::string(to_string(alg)));
        }
        const auto& p = found->second;
        p.validate_for(alg);
        const auto ctx = fit_detector_context(dataset, alg, p);

        auto& out = outcomes[alg];
        out.resize(dataset.size());
        const auto n = static_cast<std::ptrdiff_t>(dataset.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t s = 0; s < n; ++s) {
            const auto i = static_cast<std::size_t>(s);
            try {
                out[i].detection = run_detector(alg, dataset[i], p, ctx);
            } catch (const std::exception& e) {
                out[i].error = e.what();
            }
        }
    }
    return evaluate_detections(dataset, outcomes);
}

} // namespace stepfusion
