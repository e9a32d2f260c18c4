#pragma once

// Scaling limits of Liouville models under coordinate-wise power scalings
// t^(alpha_i).  The limit objects (limit density, scale function, limiting
// measure) live here together with the numerical verification routines the
// command-line tool exposes: density-ratio convergence, Monte Carlo tail
// probabilities, scale-function exponent checks, operator/rotation
// consistency, conditional tail behavior, and a tail-index estimator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "orv/liouville.hpp"
#include "orv/matrix.hpp"

namespace orv {

// ---------------------------------------------------------------------------
// Scaling specification and regions
// ---------------------------------------------------------------------------

struct ScalingSpec {
    Vec exponents;                    // one positive exponent per coordinate
    double alpha_max = 0.0;
    std::vector<std::size_t> argmax;  // coordinates attaining the largest exponent
};

inline ScalingSpec make_scaling_spec(Vec exponents) {
    if (exponents.empty())
        throw std::invalid_argument("scaling spec: needs at least one exponent");
    for (double a : exponents) {
        if (!(a > 0.0) || !std::isfinite(a))
            throw std::invalid_argument("scaling spec: exponents must be positive");
    }
    ScalingSpec spec;
    spec.alpha_max = *std::max_element(exponents.begin(), exponents.end());
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        if (std::abs(exponents[i] - spec.alpha_max) <= 1e-12 * spec.alpha_max)
            spec.argmax.push_back(i);
    }
    spec.exponents = std::move(exponents);
    return spec;
}

struct BoxRegion {
    Vec lower;
    Vec upper;  // entries may be +inf

    std::size_t dim() const { return lower.size(); }
};

inline BoxRegion make_box(Vec lower, Vec upper) {
    if (lower.empty() || lower.size() != upper.size())
        throw std::invalid_argument("box region: bounds must be nonempty and equal-sized");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!(lower[i] > 0.0) || !std::isfinite(lower[i]))
            throw std::invalid_argument("box region: lower bounds must be positive and finite");
        if (!(upper[i] > lower[i]))
            throw std::invalid_argument("box region: upper bounds must exceed lower bounds");
    }
    return {std::move(lower), std::move(upper)};
}

namespace detail {

inline void check_spec_dim(const LiouvilleModel& m, const ScalingSpec& spec) {
    if (spec.exponents.size() != m.dim())
        throw std::invalid_argument("scaling spec: exponent count does not match the model");
}

inline double power_tail_order(const LiouvilleModel& m) {
    if (!m.driving.rv_index)
        throw std::domain_error(
            "scaling limit: driving function has no power-tail index");
    return -*m.driving.rv_index;
}

}  // namespace detail

/// Decay order rho of the scale function: V is regularly varying with index
/// -rho, and the framework requires rho > 0.
inline double scaling_tail_index(const LiouvilleModel& m, const ScalingSpec& spec) {
    detail::check_spec_dim(m, spec);
    const double beta = detail::power_tail_order(m);
    double weighted = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) weighted += spec.exponents[i] * m.shapes[i];
    const double rho = spec.alpha_max * beta - weighted;
    if (!(rho > 0.0))
        throw std::domain_error("scaling limit: scale function does not decay");
    return rho;
}

// ---------------------------------------------------------------------------
// Limit density and scale function
// ---------------------------------------------------------------------------

/// Classical (uniform scaling) limit density: the model constant times
/// (sum x_i)^-beta times the shape powers.
inline double scalar_limit_function(const LiouvilleModel& m, const Vec& x) {
    if (x.size() != m.dim())
        throw std::invalid_argument("limit function: point dimension does not match the model");
    const double beta = detail::power_tail_order(m);
    double total = 0.0;
    double log_prod = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !std::isfinite(x[i]))
            throw std::domain_error("limit function: coordinates must be positive");
        total += x[i];
        log_prod += (m.shapes[i] - 1.0) * std::log(x[i]);
    }
    return m.normalizer * std::pow(total, -beta) * std::exp(log_prod);
}

/// Limit density under coordinate-wise scaling: only the coordinates carrying
/// the top exponent feed the power-tail factor.
inline double limit_function(const LiouvilleModel& m, const ScalingSpec& spec, const Vec& x) {
    detail::check_spec_dim(m, spec);
    if (x.size() != m.dim())
        throw std::invalid_argument("limit function: point dimension does not match the model");
    const double beta = detail::power_tail_order(m);
    double total = 0.0;
    double log_prod = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !std::isfinite(x[i]))
            throw std::domain_error("limit function: coordinates must be positive");
        log_prod += (m.shapes[i] - 1.0) * std::log(x[i]);
    }
    for (std::size_t i : spec.argmax) total += x[i];
    return m.normalizer * std::pow(total, -beta) * std::exp(log_prod);
}

/// Classical scale function g(t) t^(sum of shapes).
inline double scalar_scale_function(const LiouvilleModel& m, double t) {
    if (!(t > 0.0)) throw std::domain_error("scale function: t must be positive");
    return eval_driving(m.driving, t) * std::pow(t, m.shape_sum);
}

/// Scale function under coordinate-wise scaling:
/// g(t^alpha_max) t^(sum alpha_i a_i).  With all exponents 1 this evaluates
/// through the exact same operations as the classical form.
inline double scale_function(const LiouvilleModel& m, const ScalingSpec& spec, double t) {
    detail::check_spec_dim(m, spec);
    if (!(t > 0.0)) throw std::domain_error("scale function: t must be positive");
    const double ts = spec.alpha_max == 1.0 ? t : std::pow(t, spec.alpha_max);
    double weighted = 0.0;
    for (std::size_t i = 0; i < m.dim(); ++i) weighted += spec.exponents[i] * m.shapes[i];
    return eval_driving(m.driving, ts) * std::pow(t, weighted);
}

// ---------------------------------------------------------------------------
// Density-ratio convergence
// ---------------------------------------------------------------------------

struct ConvergenceReport {
    std::vector<double> ts;
    std::vector<double> values;      // measured quantity at each t
    std::vector<double> targets;     // its limit
    std::vector<double> rel_errors;
    bool passed = false;
    std::size_t underflow_count = 0;
    std::string note;
};

namespace detail {

// errors must end below tol and be non-increasing over the last decade of t
inline bool converging(const std::vector<double>& ts, const std::vector<double>& errs,
                       double tol) {
    if (errs.empty() || !(errs.back() < tol) || !std::isfinite(errs.back())) return false;
    const double cutoff = ts.back() / 10.0;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        if (ts[k] < cutoff) continue;
        if (errs[k + 1] > errs[k] * (1.0 + 1e-6) + 1e-13) return false;
    }
    return true;
}

}  // namespace detail

/// Ratio of the scaled density to its separable limit along a t-grid:
/// f(t^alpha .* x) * t^(sum alpha) / V(t) against the limit density at x.
inline ConvergenceReport density_ratio_curve(const LiouvilleModel& m, const ScalingSpec& spec,
                                             const Vec& x, const std::vector<double>& ts,
                                             double tol = 1e-2) {
    detail::check_spec_dim(m, spec);
    if (ts.empty()) throw std::invalid_argument("density ratio: t grid must be nonempty");
    ConvergenceReport report;
    report.ts = ts;
    if (!m.driving.rv_index) {
        report.note = "driving function has no power-tail index; the scaled density "
                      "ratio has no finite limit";
        const double nan = std::numeric_limits<double>::quiet_NaN();
        report.values.assign(ts.size(), nan);
        report.targets.assign(ts.size(), nan);
        report.rel_errors.assign(ts.size(), nan);
        return report;
    }
    scaling_tail_index(m, spec);  // validates decay
    const double target = limit_function(m, spec, x);

    Vec scaled(m.dim());
    for (double t : ts) {
        if (!(t > 0.0)) throw std::domain_error("density ratio: t grid must be positive");
        double log_jacobian = 0.0;
        for (std::size_t i = 0; i < m.dim(); ++i) {
            const double factor = spec.exponents[i] == 1.0 ? t : std::pow(t, spec.exponents[i]);
            scaled[i] = factor * x[i];
            log_jacobian += std::log(factor);
        }
        const double f = density(m, scaled);
        const double v = scale_function(m, spec, t);
        if (f <= 0.0 || v <= 0.0 || !std::isfinite(f) || !std::isfinite(v)) {
            ++report.underflow_count;
            report.values.push_back(0.0);
            report.targets.push_back(target);
            report.rel_errors.push_back(1.0);
            continue;
        }
        const double ratio = f * std::exp(log_jacobian) / v;
        report.values.push_back(ratio);
        report.targets.push_back(target);
        report.rel_errors.push_back(std::abs(ratio / target - 1.0));
    }
    report.passed = report.underflow_count == 0 &&
                    detail::converging(report.ts, report.rel_errors, tol);
    if (report.underflow_count > 0)
        report.note = "scaled density underflowed at " +
                      std::to_string(report.underflow_count) + " grid points";
    return report;
}

// ---------------------------------------------------------------------------
// Limiting measure
// ---------------------------------------------------------------------------

struct MeasureResult {
    double value = 0.0;
    double abs_error = 0.0;
    bool finite = false;
};

/// Mass the limit density assigns to a box.  Finite exactly when every
/// coordinate with an unbounded upper edge carries the top scaling exponent;
/// dimensions up to 3 integrate adaptively, higher ones use importance
/// sampling with a Pareto proposal on the unbounded edges.
inline MeasureResult limiting_measure(const LiouvilleModel& m, const ScalingSpec& spec,
                                      const BoxRegion& box, double rel_tol = 1e-8,
                                      std::uint64_t seed = 20240601) {
    detail::check_spec_dim(m, spec);
    if (box.dim() != m.dim())
        throw std::invalid_argument("limiting measure: box dimension does not match the model");
    scaling_tail_index(m, spec);

    for (std::size_t i = 0; i < box.dim(); ++i) {
        const bool unbounded = std::isinf(box.upper[i]);
        const bool top = std::find(spec.argmax.begin(), spec.argmax.end(), i) !=
                         spec.argmax.end();
        if (unbounded && !top)
            return {std::numeric_limits<double>::infinity(), 0.0, false};
    }

    if (m.dim() <= 3) {
        auto r = integrate_box([&](const Vec& x) { return limit_function(m, spec, x); },
                               box.lower, box.upper, rel_tol);
        return {r.value, r.abs_error, true};
    }

    // importance sampling: uniform on bounded edges, Pareto on unbounded ones
    // with the index chosen so the weight keeps finite variance (half the tail
    // margin of the limit density, split over the unbounded edges)
    const double beta = detail::power_tail_order(m);
    double unbounded_shapes = 0.0;
    std::size_t unbounded_count = 0;
    for (std::size_t i = 0; i < box.dim(); ++i) {
        if (std::isinf(box.upper[i])) {
            unbounded_shapes += m.shapes[i];
            ++unbounded_count;
        }
    }
    const double theta =
        unbounded_count == 0
            ? 1.0
            : std::max((beta - unbounded_shapes) / static_cast<double>(unbounded_count), 0.05);

    const std::size_t n = 500000;
    Rng rng = make_chunk_rng(seed, 0);
    Vec x(m.dim());
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double log_q = 0.0;
        for (std::size_t i = 0; i < m.dim(); ++i) {
            const double u = rng.uniform_pos();
            if (std::isinf(box.upper[i])) {
                x[i] = box.lower[i] * std::pow(u, -1.0 / theta);
                log_q += std::log(theta) + theta * std::log(box.lower[i]) -
                         (theta + 1.0) * std::log(x[i]);
            } else {
                x[i] = box.lower[i] + u * (box.upper[i] - box.lower[i]);
                log_q += -std::log(box.upper[i] - box.lower[i]);
            }
        }
        const double w = limit_function(m, spec, x) * std::exp(-log_q);
        const double delta = w - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (w - mean);
    }
    const double variance = m2 / static_cast<double>(n - 1);
    return {mean, std::sqrt(variance / static_cast<double>(n)), true};
}

// ---------------------------------------------------------------------------
// Monte Carlo tail probabilities
// ---------------------------------------------------------------------------

struct TailRatioReport {
    double t = 0.0;
    std::size_t draws = 0;
    std::size_t hits = 0;
    double probability = 0.0;   // raw hit fraction
    double ratio = 0.0;         // probability / V(t)
    double std_error = 0.0;     // one-sigma error of the ratio
    double target = 0.0;        // limiting measure of the box
    double exact_ratio = 0.0;   // quadrature probability / V(t), NaN if dim > 3
    double expected_hits = 0.0; // draws * V(t) * target
    bool well_powered = false;  // expected hits >= 100
    bool within_three_sigma = false;
};

/// Empirical check that P(X in t^alpha-scaled box) / V(t) approaches the
/// limiting measure of the box.
inline TailRatioReport tail_prob_ratio(const LiouvilleModel& m, const ScalingSpec& spec,
                                       const BoxRegion& box, double t, std::size_t draws,
                                       std::uint64_t seed, unsigned workers = 0) {
    detail::check_spec_dim(m, spec);
    if (box.dim() != m.dim())
        throw std::invalid_argument("tail probability: box dimension does not match the model");
    if (!(t > 0.0)) throw std::domain_error("tail probability: t must be positive");
    if (draws == 0) throw std::invalid_argument("tail probability: needs draws");
    scaling_tail_index(m, spec);

    TailRatioReport report;
    report.t = t;
    report.draws = draws;

    Vec factor(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i)
        factor[i] = spec.exponents[i] == 1.0 ? t : std::pow(t, spec.exponents[i]);

    const SampleBatch batch = sample(m, draws, seed, workers);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < batch.size(); ++k) {
        const double* row = batch.row(k);
        bool inside = true;
        for (std::size_t i = 0; i < batch.dim && inside; ++i) {
            const double y = row[i] / factor[i];
            inside = y >= box.lower[i] && y <= box.upper[i];
        }
        if (inside) ++hits;
    }

    const double v = scale_function(m, spec, t);
    const double p = static_cast<double>(hits) / static_cast<double>(draws);
    report.hits = hits;
    report.probability = p;
    report.ratio = p / v;
    report.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(draws)) / v;
    report.target = limiting_measure(m, spec, box).value;
    report.expected_hits = static_cast<double>(draws) * v * report.target;
    report.well_powered = report.expected_hits >= 100.0;
    report.within_three_sigma = std::abs(report.ratio - report.target) <=
                                3.0 * report.std_error;

    if (m.dim() <= 3) {
        Vec lo(m.dim()), hi(m.dim());
        for (std::size_t i = 0; i < m.dim(); ++i) {
            lo[i] = box.lower[i] * factor[i];
            hi[i] = std::isinf(box.upper[i]) ? box.upper[i] : box.upper[i] * factor[i];
        }
        auto exact = integrate_box([&](const Vec& x) { return density(m, x); }, lo, hi, 1e-8);
        report.exact_ratio = exact.value / v;
    } else {
        report.exact_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

// ---------------------------------------------------------------------------
// Scale-function exponent check
// ---------------------------------------------------------------------------

/// Measured decay exponent log(V(y t) / V(t)) / log(y) against -rho.
inline ConvergenceReport scaling_exponent_check(const LiouvilleModel& m, const ScalingSpec& spec,
                                                const std::vector<double>& ts, double y = 2.0,
                                                double tol = 1e-2) {
    if (ts.empty()) throw std::invalid_argument("exponent check: t grid must be nonempty");
    if (!(y > 0.0) || y == 1.0)
        throw std::invalid_argument("exponent check: ratio base must be positive and not 1");
    const double rho = scaling_tail_index(m, spec);
    ConvergenceReport report;
    report.ts = ts;
    for (double t : ts) {
        const double measured = std::log(scale_function(m, spec, y * t) /
                                         scale_function(m, spec, t)) /
                                std::log(y);
        report.values.push_back(measured);
        report.targets.push_back(-rho);
        report.rel_errors.push_back(std::abs((measured + rho) / rho));
    }
    report.passed = detail::converging(report.ts, report.rel_errors, tol);
    return report;
}

// ---------------------------------------------------------------------------
// Operator consistency under rotation
// ---------------------------------------------------------------------------

struct RotationReport {
    double diagonalization_gap = 0.0;  // off-diagonal mass of O E O^T
    double point_gap = 0.0;            // gap between the two scaled-point routes
    double density_gap = 0.0;          // relative gap between density routes
    bool passed = false;
};

/// Builds the operator with eigenvectors O and the spec's exponents as
/// eigenvalues, then scales a point through the full matrix machinery and
/// through the diagonal route, checking both give the same scaled density.
inline RotationReport rotate_density_check(const LiouvilleModel& m, const ScalingSpec& spec,
                                           const Matrix& rotation, const Vec& x, double t,
                                           double tol = 1e-10) {
    detail::check_spec_dim(m, spec);
    if (rotation.dim() != m.dim())
        throw std::invalid_argument("rotation check: matrix dimension does not match the model");
    if (x.size() != m.dim())
        throw std::invalid_argument("rotation check: point dimension does not match the model");
    if (!(t > 0.0)) throw std::domain_error("rotation check: t must be positive");

    const std::size_t d = m.dim();
    const Matrix ot = transpose(rotation);
    const Matrix op = matmul(ot, matmul(Matrix::diagonal(spec.exponents), rotation));
    const OperatorIndex index = make_operator_index(op);

    RotationReport report;

    // diagonalizing with the given rotation must recover the exponents
    const Matrix diag = matmul(rotation, matmul(op, ot));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double want = i == j ? spec.exponents[i] : 0.0;
            report.diagonalization_gap =
                std::max(report.diagonalization_gap, std::abs(diag(i, j) - want));
        }
    }

    // route one: ambient-coordinates action of t^op on the rotated point
    const Vec ambient = matvec(ot, x);
    const Vec through_op = matvec(power_matrix(index, t), ambient);
    // route two: diagonal scaling first, rotation after
    Vec scaled(d);
    for (std::size_t i = 0; i < d; ++i) scaled[i] = std::pow(t, spec.exponents[i]) * x[i];
    const Vec direct = matvec(ot, scaled);

    double norm = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        report.point_gap = std::max(report.point_gap, std::abs(through_op[i] - direct[i]));
        norm = std::max(norm, std::abs(direct[i]));
    }
    report.point_gap = norm > 0.0 ? report.point_gap / norm : report.point_gap;

    // both routes must price the same model point
    const Vec back = matvec(rotation, through_op);
    const double f_op = density(m, back);
    const double f_direct = density(m, scaled);
    report.density_gap = f_direct != 0.0 ? std::abs(f_op / f_direct - 1.0)
                                         : std::abs(f_op - f_direct);
    report.passed = report.diagonalization_gap <= tol && report.point_gap <= tol &&
                    report.density_gap <= 100.0 * tol;
    return report;
}

// ---------------------------------------------------------------------------
// Conditional tails
// ---------------------------------------------------------------------------

/// P(free components in t * box | fixed components equal to `given`),
/// by quadrature over the scaled box of the conditional density.
inline double conditional_tail_probability(const LiouvilleModel& m, const Vec& given,
                                           const BoxRegion& box, double t) {
    if (!(t > 0.0)) throw std::domain_error("conditional tail: t must be positive");
    const LiouvilleModel cond = condition(m, given);
    if (box.dim() != cond.dim())
        throw std::invalid_argument("conditional tail: box does not match the free components");
    Vec lo(box.dim()), hi(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) {
        lo[i] = box.lower[i] * t;
        hi[i] = std::isinf(box.upper[i]) ? box.upper[i] : box.upper[i] * t;
    }
    auto r = integrate_box([&](const Vec& y) { return density(cond, y); }, lo, hi, 1e-9);
    return r.value;
}

struct FlatnessReport {
    std::vector<double> ts;
    std::vector<double> values;
    double fitted = 0.0;        // plateau level fitted from the last decade
    double max_rel_dev = 0.0;   // worst relative deviation from it, last decade
    bool passed = false;
};

/// Conditional tail probability with the conditioning point scaled along the
/// same t: P(free in t * box | fixed = t * base).  The curve must flatten to
/// a constant; the report measures how flat the last decade is.
inline FlatnessReport conditional_tail_ratio(const LiouvilleModel& m, const Vec& base,
                                             const BoxRegion& box,
                                             const std::vector<double>& ts, double tol = 0.02) {
    if (ts.size() < 2) throw std::invalid_argument("conditional tail: needs at least two t");
    FlatnessReport report;
    report.ts = ts;
    for (double t : ts) {
        Vec given(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) given[i] = base[i] * t;
        report.values.push_back(conditional_tail_probability(m, given, box, t));
    }
    const double cutoff = ts.back() / 10.0;
    double fitted = 0.0;
    std::size_t used = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (ts[k] < cutoff) continue;
        fitted += report.values[k];
        ++used;
    }
    fitted /= static_cast<double>(used);
    report.fitted = fitted;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        if (ts[k] < cutoff) continue;
        report.max_rel_dev = std::max(report.max_rel_dev,
                                      std::abs(report.values[k] / fitted - 1.0));
    }
    report.passed = fitted > 0.0 && report.max_rel_dev <= tol;
    return report;
}

// ---------------------------------------------------------------------------
// Tail-index estimation
// ---------------------------------------------------------------------------

struct TailIndexEstimate {
    double index = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;
    std::size_t points = 0;
};

/// Least-squares slope of log(value) against log(t); needs at least 8 points
/// for the error estimate to mean anything.
inline TailIndexEstimate rv_index_estimate(const std::vector<double>& ts,
                                           const std::vector<double>& values) {
    if (ts.size() != values.size())
        throw std::invalid_argument("index estimate: grids must be equal-sized");
    if (ts.size() < 8)
        throw std::invalid_argument("index estimate: needs at least 8 points");
    const std::size_t n = ts.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(ts[i] > 0.0) || !(values[i] > 0.0))
            throw std::domain_error("index estimate: values and t must be positive");
        lx[i] = std::log(ts[i]);
        ly[i] = std::log(values[i]);
    }
    const auto [lo, hi] = std::minmax_element(lx.begin(), lx.end());
    if (!(*hi > *lo)) throw std::invalid_argument("index estimate: t grid is degenerate");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("index estimate: t grid is degenerate");

    TailIndexEstimate est;
    est.points = n;
    est.index = sxy / sxx;
    est.intercept = my - est.index * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ly[i] - est.intercept - est.index * lx[i];
        rss += r * r;
    }
    est.std_error = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
    return est;
}

/// Estimate the power-tail index of a driving function over a t-grid.
inline TailIndexEstimate rv_index_estimate(const DrivingFunction& g,
                                           const std::vector<double>& ts) {
    std::vector<double> values;
    values.reserve(ts.size());
    for (double t : ts) values.push_back(eval_driving(g, t));
    return rv_index_estimate(ts, values);
}

}  // namespace orv
