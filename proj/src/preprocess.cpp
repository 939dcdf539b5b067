#include "stepfusion/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace stepfusion {

double NormalizationContext::apply(double v) const {
    if (!(global_max > global_min)) {
        throw std::invalid_argument("min-max normalization over a degenerate range (max == min)");
    }
    return (v - global_min) / (global_max - global_min);
}

ScalarSeries magnitude(const TriaxialSeries& series) {
    const auto x = series.x();
    const auto y = series.y();
    const auto z = series.z();
    const auto n = static_cast<std::ptrdiff_t>(series.size());
    std::vector<double> out(series.size());

#pragma omp parallel for simd schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[i] = std::sqrt(x[i] * x[i] + y[i] * y[i] + z[i] * z[i]);
    }
    return ScalarSeries(series.rate(), std::move(out), series.t0());
}

std::size_t smoothing_window(double seconds, double rate) {
    if (!(seconds >= 0.0)) throw std::invalid_argument("moving_average: window must be >= 0");
    auto w = seconds_to_samples(seconds, rate);
    if (w % 2 == 0) ++w;
    return w;
}

ScalarSeries moving_average(const ScalarSeries& series, double window) {
    return moving_average_samples(series, smoothing_window(window, series.rate()));
}

ScalarSeries moving_average_samples(const ScalarSeries& series, std::size_t width) {
    if (width <= 1) return series;
    if (width % 2 == 0) throw std::invalid_argument("moving_average: sample window must be odd");

    const auto v = series.values();
    const std::size_t n = v.size();
    const std::size_t half = width / 2;

    // Extended-precision prefix sums keep window means linear to ~1e-15.
    std::vector<long double> prefix(n + 1, 0.0L);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[i];

    std::vector<double> out(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
        const auto i = static_cast<std::size_t>(s);
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n - 1, i + half);
        out[i] = static_cast<double>((prefix[hi + 1] - prefix[lo]) /
                                     static_cast<long double>(hi - lo + 1));
    }
    return ScalarSeries(series.rate(), std::move(out), series.t0());
}

NormalizationContext fit_normalization(std::span<const ScalarSeries> signals) {
    if (signals.empty()) throw std::invalid_argument("fit_normalization: no signals given");
    NormalizationContext ctx{std::numeric_limits<double>::infinity(),
                             -std::numeric_limits<double>::infinity()};
    for (const auto& s : signals) {
        const auto [lo, hi] = std::minmax_element(s.values().begin(), s.values().end());
        ctx.global_min = std::min(ctx.global_min, *lo);
        ctx.global_max = std::max(ctx.global_max, *hi);
    }
    return ctx;
}

ScalarSeries min_max_normalize(const ScalarSeries& series, const NormalizationContext& ctx) {
    if (!(ctx.global_max > ctx.global_min)) {
        throw std::invalid_argument("min_max_normalize: degenerate context (max == min)");
    }
    const double lo = ctx.global_min;
    const double span = ctx.global_max - ctx.global_min;
    std::vector<double> out(series.size());
    const auto v = series.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (v[i] - lo) / span;
    return ScalarSeries(series.rate(), std::move(out), series.t0());
}

} // namespace stepfusion
