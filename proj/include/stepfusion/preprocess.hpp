#pragma once

#include "stepfusion/core.hpp"

#include <span>

namespace stepfusion {

/// Corpus-wide extrema used for min-max normalization.
struct NormalizationContext {
    double global_min = 0.0;
    double global_max = 1.0;

    /// (v - min) / (max - min); throws when max == min.
    double apply(double v) const;
    double invert(double u) const noexcept { return global_min + u * (global_max - global_min); }

    bool operator==(const NormalizationContext&) const = default;
};

/// Per-sample Euclidean norm of the three axes.
ScalarSeries magnitude(const TriaxialSeries& series);

/// Odd sample window for a smoothing duration: round(seconds * rate), bumped to odd.
std::size_t smoothing_window(double seconds, double rate);

/**
 * Centered moving average over an odd window of smoothing_window(window)
 * samples. Edge windows shrink to the samples available; a window of one
 * sample (or zero) returns the input unchanged.
 */
ScalarSeries moving_average(const ScalarSeries& series, double window);

/// Same as moving_average with the window already given in samples (must be odd or <= 1).
ScalarSeries moving_average_samples(const ScalarSeries& series, std::size_t width);

/// Global min and max over every value of every series; throws on an empty collection.
NormalizationContext fit_normalization(std::span<const ScalarSeries> signals);

/// Affine map onto the fitted range. Values outside the fitting range are not clamped.
ScalarSeries min_max_normalize(const ScalarSeries& series, const NormalizationContext& ctx);

} // namespace stepfusion
