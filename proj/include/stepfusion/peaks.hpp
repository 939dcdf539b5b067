#pragma once

#include "stepfusion/core.hpp"

#include <vector>

namespace stepfusion {

/**
 * Every local maximum found by the sign of the first-order difference.
 *
 * A sample is a candidate when the signal rises into it and the run of
 * equal values starting there is followed by a fall. A flat plateau
 * therefore contributes its first sample only, and the first and last
 * samples are never peaks. Throws std::invalid_argument for series
 * shorter than three samples.
 */
PeakSet candidate_peaks(const ScalarSeries& series);

/// Candidates ordered by descending amplitude, earlier time first on ties.
struct RankedPeaks {
    double rate = 1.0;
    std::size_t extent = 0; ///< one past the largest candidate index
    std::vector<Peak> by_amplitude;
};

RankedPeaks rank_peaks(const PeakSet& candidates, double rate);

/**
 * Greedy suppression over ranked candidates: peaks below `min_amp` are
 * dropped, then each remaining peak is kept unless a stronger kept peak
 * lies within `min_gap` seconds (inclusive). Result is sorted by time.
 */
PeakSet select_peaks(const RankedPeaks& ranked, double min_amp, double min_gap);

/// candidate_peaks followed by select_peaks.
PeakSet detect_peaks(const ScalarSeries& series, double min_amp, double min_gap);

} // namespace stepfusion
