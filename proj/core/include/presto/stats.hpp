// Copyright (c) 2026 The presto-sim developers
// Distributed under the MIT software license.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace presto::stats {

inline double mean(std::span<const double> xs) {
    double s = 0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

/// Standard error of the mean (sample std dev / sqrt(n)).
inline double std_error(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    const double m = mean(xs);
    double q = 0;
    for (double x : xs) q += (x - m) * (x - m);
    return std::sqrt(q / static_cast<double>(n - 1) / static_cast<double>(n));
}

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 1;
};

/// Ordinary least squares y = a + b*x with coefficient of determination.
inline LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    LinearFit f;
    if (n < 2) return f;
    const double mx = mean(xs), my = mean(ys);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - (f.intercept + f.slope * xs[i]);
        ss_res += r * r;
    }
    f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

struct ScaleFit {
    double coeff = 0;
    double r2 = 1;
};

/// Least-squares fit of y = c * g(x) through the origin, with R^2 against the
/// mean-model. Callers pass g(x) pre-applied (e.g. x^2 for a quadratic law).
inline ScaleFit proportional_fit(std::span<const double> gxs, std::span<const double> ys) {
    ScaleFit f;
    double num = 0, den = 0, my = mean(ys), syy = 0;
    for (std::size_t i = 0; i < gxs.size(); ++i) {
        num += gxs[i] * ys[i];
        den += gxs[i] * gxs[i];
        syy += (ys[i] - my) * (ys[i] - my);
    }
    f.coeff = den > 0 ? num / den : 0.0;
    double ss_res = 0;
    for (std::size_t i = 0; i < gxs.size(); ++i) {
        const double r = ys[i] - f.coeff * gxs[i];
        ss_res += r * r;
    }
    f.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

/// Half-width of the 3-sigma binomial band around share p over n trials.
inline double binomial_band_3sigma(double p, double n) {
    return n > 0 ? 3.0 * std::sqrt(p * (1.0 - p) / n) : 0.0;
}

}  // namespace presto::stats
