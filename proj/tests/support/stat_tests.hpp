#pragma once

// Distributional test statistics for the sampler checks.  Critical values are
// frozen: the Kolmogorov 99th percentile 1.62762 solves K(c) = 0.99 for the
// asymptotic Kolmogorov distribution, and 135.8067 / 134.6416 are the
// chi-square 0.99 quantiles at 100 and 99 degrees of freedom.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace stat {

/// Asymptotic Kolmogorov CDF K(x) = 1 - 2 sum (-1)^{k-1} exp(-2 k^2 x^2).
inline double kolmogorov_cdf(double x) {
    if (x <= 0.0) return 0.0;
    double s = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        s += (k % 2 ? term : -term);
        if (term < 1e-16) break;
    }
    return 1.0 - 2.0 * s;
}

constexpr double kKolmogorov99 = 1.62762;
constexpr double kChiSquare99Df100 = 135.8067;
constexpr double kChiSquare99Df99 = 134.6416;

/// Two-sided KS statistic of a sample against a CDF.
inline double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

/// Pearson chi-square statistic from observed counts and expected counts.
inline double chi_square_statistic(const std::vector<double>& observed,
                                   const std::vector<double>& expected) {
    double s = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double diff = observed[i] - expected[i];
        s += diff * diff / expected[i];
    }
    return s;
}

}  // namespace stat
