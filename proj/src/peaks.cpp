#include "stepfusion/peaks.hpp"

#include <algorithm>
#include <cmath>

namespace stepfusion {

PeakSet candidate_peaks(const ScalarSeries& series) {
    const auto v = series.values();
    const std::size_t n = v.size();
    if (n < 3) throw std::invalid_argument("candidate_peaks: series needs at least 3 samples");

    std::vector<Peak> out;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(v[i] > v[i - 1])) {
            ++i;
            continue;
        }
        // rising edge into i; walk the plateau
        std::size_t j = i;
        while (j + 1 < n && v[j + 1] == v[j]) ++j;
        if (j + 1 < n && v[j + 1] < v[j]) {
            out.push_back({i, time_of(series, i), v[i]});
        }
        i = j + 1;
    }
    return PeakSet(std::move(out));
}

RankedPeaks rank_peaks(const PeakSet& candidates, double rate) {
    RankedPeaks ranked{rate, 0, {candidates.begin(), candidates.end()}};
    if (!candidates.empty()) ranked.extent = candidates.peaks().back().index + 1;
    std::stable_sort(ranked.by_amplitude.begin(), ranked.by_amplitude.end(),
                     [](const Peak& a, const Peak& b) {
                         if (a.amplitude != b.amplitude) return a.amplitude > b.amplitude;
                         return a.index < b.index;
                     });
    return ranked;
}

PeakSet select_peaks(const RankedPeaks& ranked, double min_amp, double min_gap) {
    if (!(min_gap >= 0.0)) throw std::invalid_argument("detect_peaks: min_gap must be >= 0");
    // integer sample distances d are suppressed when d <= min_gap * rate
    const auto reach = static_cast<std::size_t>(std::floor(min_gap * ranked.rate + kTimeEps));

    std::vector<unsigned char> blocked(ranked.extent, 0);
    std::vector<Peak> out;
    for (const auto& p : ranked.by_amplitude) {
        if (p.amplitude < min_amp) break;
        if (blocked[p.index]) continue;
        out.push_back(p);
        const auto lo = p.index > reach ? p.index - reach : 0;
        const auto hi = std::min(ranked.extent - 1, p.index + reach);
        std::fill(blocked.begin() + static_cast<std::ptrdiff_t>(lo),
                  blocked.begin() + static_cast<std::ptrdiff_t>(hi) + 1, 1);
    }
    std::sort(out.begin(), out.end(), [](const Peak& a, const Peak& b) { return a.index < b.index; });
    return PeakSet(std::move(out));
}

PeakSet detect_peaks(const ScalarSeries& series, double min_amp, double min_gap) {
    return select_peaks(rank_peaks(candidate_peaks(series), series.rate()), min_amp, min_gap);
}

} // namespace stepfusion
