/**
 * @file simgait.hpp
 * @brief Synthetic dual-wrist walking recordings with exact gait events.
 *
 * Each wrist trace is gravity on the z axis, an arm-swing sinusoid at the
 * stride frequency on the x axis (anti-phase between wrists), Gaussian
 * impact bumps at toe-offs on the z axis, and white noise on every axis.
 * A toe-off bumps the contralateral wrist at full impact amplitude and the
 * ipsilateral wrist at `ipsilateral_gain` of it. All waveform constants
 * are simulator choices, not measured physiology.
 */

#pragma once

#include "stepfusion/core.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace stepfusion {

struct GaitModelParams {
    double cadence = 1.7;            ///< steps per second
    double duration = 62.0;          ///< seconds
    double swing_amp_left = 0.30;    ///< g
    double swing_amp_right = 0.30;   ///< g
    double impact_amp_left = 0.50;   ///< g, toe-off bump height seen by the left wrist
    double impact_amp_right = 0.50;  ///< g
    double impact_width = 0.04;      ///< s, Gaussian sigma of a bump
    double toe_off_lag = 0.12;       ///< s, toe-off after the step anchor
    double heel_strike_lead = 0.05;  ///< s, heel strike before the step anchor
    double step_time_asymmetry = 0.0;
    double noise_std = 0.06;         ///< g, per axis
    double rate = 128.0;             ///< Hz
    double baseline = 1.0;           ///< g, gravity
    double ipsilateral_gain = 0.45;  ///< bump scale on the wrist of the stepping foot
    double impact_variability = 0.35; ///< log-normal sigma of per-step, per-wrist bump height
    double interval_jitter = 0.03;   ///< relative Gaussian jitter of step intervals
    double cane_tap_amp = 0.0;       ///< g, right-wrist tap at every left heel strike
    double first_step = 0.0;         ///< s, first anchor; 0 means half a step interval

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;

    bool operator==(const GaitModelParams&) const = default;
};

/// Baseline model for a walking task.
GaitModelParams task_profile(WalkTask task);

/// Deterministic recording for (params, seed); throws when the duration holds no full step.
Recording simulate_recording(WalkTask task, const GaitModelParams& params, const std::string& subject_id,
                             std::uint64_t seed);

/// simulate_recording with the task's baseline profile.
Recording simulate_recording(WalkTask task, const std::string& subject_id, std::uint64_t seed);

struct CorpusSpec {
    std::map<WalkTask, int> counts;
    std::uint64_t seed = 42;
    /// Per-subject and per-trial spread of cadence, amplitudes and noise.
    bool subject_variability = true;

    /// Per-task sample sizes of the reference study (203 trials, 27 subjects).
    static CorpusSpec standard(std::uint64_t seed = 42);
};

std::vector<Recording> simulate_corpus(const CorpusSpec& spec);

/// SplitMix64 finaliser used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace stepfusion
