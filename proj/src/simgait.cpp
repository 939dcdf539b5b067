#include "stepfusion/simgait.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace stepfusion {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("GaitModelParams: ") + what);
}

struct StepEvent {
    double anchor;
    Side foot;
    double scale_left;  // per-step bump variability seen by each wrist
    double scale_right;
};

void add_bump(std::vector<double>& axis, double rate, double centre, double height, double width) {
    if (height == 0.0) return;
    const auto n = static_cast<std::ptrdiff_t>(axis.size());
    const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::floor((centre - 6 * width) * rate)));
    const auto hi = std::min<std::ptrdiff_t>(n - 1, static_cast<std::ptrdiff_t>(std::ceil((centre + 6 * width) * rate)));
    for (auto i = lo; i <= hi; ++i) {
        const double d = static_cast<double>(i) / rate - centre;
        axis[static_cast<std::size_t>(i)] += height * std::exp(-0.5 * d * d / (width * width));
    }
}

constexpr std::size_t task_index(WalkTask task) {
    return static_cast<std::size_t>(task);
}

} // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void GaitModelParams::validate() const {
    require(std::isfinite(cadence) && cadence > 0.0, "cadence must be positive");
    require(std::isfinite(duration) && duration > 0.0, "duration must be positive");
    require(std::isfinite(rate) && rate > 0.0, "rate must be positive");
    require(swing_amp_left >= 0.0 && swing_amp_right >= 0.0, "swing amplitudes must be >= 0");
    require(impact_amp_left >= 0.0 && impact_amp_right >= 0.0, "impact amplitudes must be >= 0");
    require(impact_width > 0.0, "impact_width must be positive");
    require(toe_off_lag >= 0.0 && heel_strike_lead >= 0.0 && toe_off_lag + heel_strike_lead > 0.0,
            "toe-off must follow heel strike");
    require(step_time_asymmetry >= 0.0 && step_time_asymmetry < 0.5, "asymmetry must lie in [0, 0.5)");
    require(noise_std >= 0.0, "noise_std must be >= 0");
    require(ipsilateral_gain >= 0.0, "ipsilateral_gain must be >= 0");
    require(impact_variability >= 0.0 && interval_jitter >= 0.0 && interval_jitter < 0.2,
            "variability terms out of range");
    require(cane_tap_amp >= 0.0, "cane_tap_amp must be >= 0");
    require(first_step >= 0.0, "first_step must be >= 0");
}

GaitModelParams task_profile(WalkTask task) {
    GaitModelParams p;
    switch (task) {
    case WalkTask::ComfortablePace:
        break;
    case WalkTask::SlowPace:
        p.cadence *= 0.75;
        p.duration /= 0.75;
        p.swing_amp_left = p.swing_amp_right = 0.20;
        p.impact_amp_left = p.impact_amp_right = 0.16;
        break;
    case WalkTask::FastPace:
        p.cadence *= 1.25;
        p.duration /= 1.25;
        p.swing_amp_left = p.swing_amp_right = 0.40;
        p.impact_amp_left = p.impact_amp_right = 0.75;
        break;
    case WalkTask::BagRightHand:
        p.swing_amp_right *= 0.2;
        p.impact_amp_right *= 0.2;
        break;
    case WalkTask::PhoneTwoHands:
        p.swing_amp_left = p.swing_amp_right = 0.05;
        p.impact_amp_left = p.impact_amp_right = 0.40;
        break;
    case WalkTask::NoArmSwing:
        p.swing_amp_left = p.swing_amp_right = 0.05;
        break;
    case WalkTask::NoRightShoe:
        p.step_time_asymmetry = 0.1;
        break;
    case WalkTask::CaneRightHand:
        p.swing_amp_right *= 0.2;
        p.impact_amp_right *= 0.2;
        p.cane_tap_amp = 0.30;
        break;
    }
    return p;
}

Recording simulate_recording(WalkTask task, const GaitModelParams& p, const std::string& subject_id,
                             std::uint64_t seed) {
    p.validate();
    std::mt19937_64 events(mix_seed(seed, 1));
    std::mt19937_64 noise(mix_seed(seed, 2));
    std::normal_distribution<double> gauss(0.0, 1.0);

    const double interval = 1.0 / p.cadence;
    const double first = std::max(p.first_step > 0.0 ? p.first_step : 0.5 * interval,
                                  p.heel_strike_lead + 1.0 / p.rate);
    const double last_anchor = p.duration - p.toe_off_lag - 3.0 * p.impact_width;

    // gait schedule; drawn from its own stream so signal noise never moves events
    Side foot = (events() & 1U) ? Side::Right : Side::Left;
    std::vector<StepEvent> steps;
    for (double anchor = first; anchor <= last_anchor;) {
        const double zl = gauss(events);
        const double zr = gauss(events);
        const double zi = gauss(events);
        steps.push_back({anchor, foot, std::exp(p.impact_variability * zl),
                         std::exp(p.impact_variability * zr)});
        foot = foot == Side::Left ? Side::Right : Side::Left;
        const double skew = foot == Side::Right ? 1.0 + p.step_time_asymmetry : 1.0 - p.step_time_asymmetry;
        anchor += interval * skew * std::clamp(1.0 + p.interval_jitter * zi, 0.5, 1.5);
    }
    if (steps.empty()) {
        throw std::invalid_argument("simulate_recording: duration too short for one full step");
    }

    GroundTruth gt;
    for (const auto& s : steps) {
        gt.step_times.push_back(s.anchor);
        gt.step_sides.push_back(s.foot);
        auto& hs = s.foot == Side::Left ? gt.heel_strikes_left : gt.heel_strikes_right;
        auto& to = s.foot == Side::Left ? gt.toe_offs_left : gt.toe_offs_right;
        hs.push_back(s.anchor - p.heel_strike_lead);
        to.push_back(s.anchor + p.toe_off_lag);
    }
    gt.label_count = steps.size();
    std::uniform_int_distribution<int> self_noise(-3, 3);
    const int self_count = static_cast<int>(gt.label_count) + self_noise(events);

    const auto n = static_cast<std::size_t>(std::llround(p.duration * p.rate));
    std::vector<double> lx(n), ly(n, 0.0), lz(n, p.baseline);
    std::vector<double> rx(n), ry(n, 0.0), rz(n, p.baseline);

    const double omega = std::numbers::pi * p.cadence; // stride frequency = cadence / 2
    for (std::size_t i = 0; i < n; ++i) {
        const double swing = std::cos(omega * (static_cast<double>(i) / p.rate - first));
        lx[i] = p.swing_amp_left * swing;
        rx[i] = -p.swing_amp_right * swing;
    }

    for (const auto& s : steps) {
        const double toe_off = s.anchor + p.toe_off_lag;
        const bool left_foot = s.foot == Side::Left;
        const double left_gain = left_foot ? p.ipsilateral_gain : 1.0;
        const double right_gain = left_foot ? 1.0 : p.ipsilateral_gain;
        add_bump(lz, p.rate, toe_off, p.impact_amp_left * left_gain * s.scale_left, p.impact_width);
        add_bump(rz, p.rate, toe_off, p.impact_amp_right * right_gain * s.scale_right, p.impact_width);
        if (left_foot && p.cane_tap_amp > 0.0) {
            add_bump(rz, p.rate, s.anchor - p.heel_strike_lead, p.cane_tap_amp * s.scale_right,
                     p.impact_width);
        }
    }

    if (p.noise_std > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            lx[i] += p.noise_std * gauss(noise);
            ly[i] += p.noise_std * gauss(noise);
            lz[i] += p.noise_std * gauss(noise);
            rx[i] += p.noise_std * gauss(noise);
            ry[i] += p.noise_std * gauss(noise);
            rz[i] += p.noise_std * gauss(noise);
        }
    }

    Recording rec{
        std::string(to_string(task)) + "_" + subject_id,
        subject_id,
        task,
        TriaxialSeries(p.rate, std::move(lx), std::move(ly), std::move(lz)),
        TriaxialSeries(p.rate, std::move(rx), std::move(ry), std::move(rz)),
        static_cast<double>(n) / p.rate,
        std::move(gt),
        self_count,
    };
    rec.validate();
    return rec;
}

Recording simulate_recording(WalkTask task, const std::string& subject_id, std::uint64_t seed) {
    return simulate_recording(task, task_profile(task), subject_id, seed);
}

CorpusSpec CorpusSpec::standard(std::uint64_t seed) {
    CorpusSpec spec;
    spec.seed = seed;
    spec.counts = {
        {WalkTask::SlowPace, 25},     {WalkTask::ComfortablePace, 26}, {WalkTask::FastPace, 24},
        {WalkTask::BagRightHand, 27}, {WalkTask::PhoneTwoHands, 26},   {WalkTask::NoArmSwing, 27},
        {WalkTask::NoRightShoe, 25},  {WalkTask::CaneRightHand, 23},
    };
    return spec;
}

std::vector<Recording> simulate_corpus(const CorpusSpec& spec) {
    std::vector<Recording> out;
    for (const auto& [task, count] : spec.counts) {
        if (count < 0) throw std::invalid_argument("simulate_corpus: negative count");
        for (int i = 0; i < count; ++i) {
            char subject[16];
            std::snprintf(subject, sizeof subject, "s%02d", i + 1);
            auto params = task_profile(task);
            const auto trial_seed = mix_seed(spec.seed, (task_index(task) << 16) | static_cast<std::uint64_t>(i));

            if (spec.subject_variability) {
                // traits shared by one subject across tasks, then per-trial spread
                std::mt19937_64 traits(mix_seed(spec.seed, 0x5B1EC7ULL + static_cast<std::uint64_t>(i)));
                std::uniform_real_distribution<double> u(0.0, 1.0);
                auto between = [&](std::mt19937_64& g, double lo, double hi) { return lo + (hi - lo) * u(g); };
                const double cadence_f = between(traits, 0.9, 1.1);
                const double impact_l = between(traits, 0.75, 1.25);
                const double impact_r = between(traits, 0.75, 1.25);
                const double swing_f = between(traits, 0.7, 1.3);
                const double noise_f = between(traits, 0.8, 1.2);

                std::mt19937_64 trial(mix_seed(trial_seed, 7));
                const double target_steps = params.duration * params.cadence * between(trial, 0.85, 1.15);
                params.cadence *= cadence_f * between(trial, 0.95, 1.05);
                params.duration = target_steps / params.cadence;
                params.impact_amp_left *= impact_l;
                params.impact_amp_right *= impact_r;
                params.swing_amp_left *= swing_f;
                params.swing_amp_right *= swing_f;
                params.noise_std *= noise_f;
            }
            out.push_back(simulate_recording(task, params, subject, trial_seed));
        }
    }
    return out;
}

} // namespace stepfusion
