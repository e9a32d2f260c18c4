#pragma once

// Driving functions g for Liouville densities: the built-in families, the
// integrability functional int_0^inf t^(a-1) g(t) dt, and Weyl fractional
// integrals W^alpha g with closed forms where the family admits one.
//
// Conditioning produces functions of the form scale * g(shift + t); those
// carry the base family plus private shift/scale modifiers, and every
// operation here honors them (tail behavior and rv_index are unchanged).

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "orv/quadrature.hpp"

namespace orv {

enum class DrivingFamily { inverted_dirichlet, pareto_log, exponential, tabulated };

inline std::string family_name(DrivingFamily f) {
    switch (f) {
        case DrivingFamily::inverted_dirichlet: return "inverted-dirichlet";
        case DrivingFamily::pareto_log: return "pareto-log";
        case DrivingFamily::exponential: return "exponential";
        case DrivingFamily::tabulated: return "tabulated";
    }
    return "?";
}

struct DrivingFunction {
    DrivingFamily family = DrivingFamily::inverted_dirichlet;
    double beta = 0.0;   // inverted-dirichlet, pareto-log
    double delta = 0.0;  // pareto-log
    double rate = 0.0;   // exponential
    // tabulated knots, stored as (log(1+t), log g); extrapolated by end slopes
    std::vector<double> knot_u;
    std::vector<double> knot_v;
    std::optional<double> rv_index;
    // conditioning modifiers: this function evaluates scale * base(shift + t)
    double shift = 0.0;
    double scale = 1.0;
};

inline DrivingFunction inverted_dirichlet_driving(double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("inverted-dirichlet driving: beta must be nonnegative");
    DrivingFunction g;
    g.family = DrivingFamily::inverted_dirichlet;
    g.beta = beta;
    g.rv_index = -beta;
    return g;
}

inline DrivingFunction pareto_log_driving(double beta, double delta) {
    if (!(beta >= 0.0) || !std::isfinite(beta) || !std::isfinite(delta))
        throw std::invalid_argument("pareto-log driving: invalid parameters");
    DrivingFunction g;
    g.family = DrivingFamily::pareto_log;
    g.beta = beta;
    g.delta = delta;
    g.rv_index = -beta;
    return g;
}

inline DrivingFunction exponential_driving(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw std::invalid_argument("exponential driving: rate must be positive");
    DrivingFunction g;
    g.family = DrivingFamily::exponential;
    g.rate = rate;
    return g;
}

/// Tabulated driving from (t, g(t)) pairs with t strictly increasing from 0
/// and g positive; interpolation is linear in (log(1+t), log g).
inline DrivingFunction tabulated_driving(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw std::invalid_argument("tabulated driving: need at least 2 points");
    DrivingFunction g;
    g.family = DrivingFamily::tabulated;
    double prev = -1.0;
    for (const auto& [t, v] : points) {
        if (!std::isfinite(t) || !std::isfinite(v) || t < 0.0 || t <= prev || !(v > 0.0))
            throw std::invalid_argument(
                "tabulated driving: t must increase from 0 and g must be positive");
        prev = t;
        g.knot_u.push_back(std::log1p(t));
        g.knot_v.push_back(std::log(v));
    }
    return g;
}

/// Derived driving function t -> scale * g(shift + t) produced by conditioning.
inline DrivingFunction shifted_driving(const DrivingFunction& g, double shift, double scale) {
    if (!(shift >= 0.0) || !(scale > 0.0))
        throw std::invalid_argument("shifted driving: shift must be >= 0 and scale > 0");
    DrivingFunction out = g;
    out.shift += shift;
    out.scale *= scale;
    return out;
}

namespace detail {

// Interpolate log g linearly in log(1+t); end segments extrapolate.
inline double tabulated_log_eval(const DrivingFunction& g, double t) {
    const double u = std::log1p(t);
    const auto& xs = g.knot_u;
    const auto& ys = g.knot_v;
    std::size_t hi = 1;
    if (u >= xs.back()) hi = xs.size() - 1;
    else while (xs[hi] < u) ++hi;
    const std::size_t lo = hi - 1;
    const double w = (u - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + w * (ys[hi] - ys[lo]);
}

// Tail exponent sigma with g(t) ~ (1+t)^sigma, where known.
inline std::optional<double> tail_exponent(const DrivingFunction& g) {
    switch (g.family) {
        case DrivingFamily::inverted_dirichlet:
        case DrivingFamily::pareto_log:
            return -g.beta;
        case DrivingFamily::tabulated: {
            const std::size_t n = g.knot_u.size();
            return (g.knot_v[n - 1] - g.knot_v[n - 2]) / (g.knot_u[n - 1] - g.knot_u[n - 2]);
        }
        case DrivingFamily::exponential:
            return std::nullopt;  // faster than any power
    }
    return std::nullopt;
}

}  // namespace detail

inline double eval_driving(const DrivingFunction& g, double t) {
    if (!(t >= 0.0) || !std::isfinite(t))
        throw std::domain_error("eval_driving: argument must be nonnegative and finite");
    const double s = g.shift + t;
    double base;
    switch (g.family) {
        case DrivingFamily::inverted_dirichlet:
            base = std::pow(1.0 + s, -g.beta);
            break;
        case DrivingFamily::pareto_log:
            base = std::pow(1.0 + s, -g.beta) *
                   std::pow(std::log(std::exp(1.0) + s), g.delta);
            break;
        case DrivingFamily::exponential:
            base = std::exp(-g.rate * s);
            break;
        case DrivingFamily::tabulated:
            base = std::exp(detail::tabulated_log_eval(g, s));
            break;
        default:
            throw std::logic_error("eval_driving: unknown family");
    }
    return g.scale * base;
}

/// g(t x) / g(t); tends to x^rv_index for regularly varying families.
inline double rv_ratio(const DrivingFunction& g, double t, double x) {
    if (!(t > 0.0) || !(x > 0.0))
        throw std::domain_error("rv_ratio: t and x must be positive");
    return eval_driving(g, t * x) / eval_driving(g, t);
}

// ---------------------------------------------------------------------------
// Integrability
// ---------------------------------------------------------------------------

struct IntegrabilityResult {
    bool finite = false;
    double value = 0.0;       // +inf when divergent
    double abs_error = 0.0;
};

/// Decides finiteness of int_0^inf t^(a_sum-1) g(t) dt analytically from the
/// tail exponent, then evaluates the finite case by adaptive quadrature.
/// Power-tail families are finite iff beta > a_sum (boundary counts as
/// divergent); the t -> 0 endpoint uses the w = t^a_sum substitution when
/// a_sum < 1 so the singular factor is integrated exactly.
inline IntegrabilityResult integrability_check(const DrivingFunction& g, double a_sum) {
    if (!(a_sum > 0.0) || !std::isfinite(a_sum))
        throw std::invalid_argument("integrability_check: a_sum must be positive");

    bool finite;
    if (g.family == DrivingFamily::exponential) {
        finite = true;
    } else if (g.family == DrivingFamily::inverted_dirichlet ||
               g.family == DrivingFamily::pareto_log) {
        finite = g.beta > a_sum;
    } else {
        const double sigma = *detail::tail_exponent(g);
        finite = sigma + a_sum < 0.0;
    }
    if (!finite)
        return {false, std::numeric_limits<double>::infinity(), 0.0};

    IntegrabilityResult res;
    res.finite = true;
    if (a_sum < 1.0) {
        // int_0^1 t^(a-1) g dt = (1/a) int_0^1 g(w^(1/a)) dw, plus the tail
        auto head = integrate([&](double w) {
            return eval_driving(g, std::pow(w, 1.0 / a_sum)) / a_sum;
        }, 0.0, 1.0, 1e-11, 1e-15);
        auto tail = integrate_upper([&](double t) {
            return std::pow(t, a_sum - 1.0) * eval_driving(g, t);
        }, 1.0, 1e-11, 1e-15);
        if (!head.converged || !tail.converged)
            throw numerical_error("integrability_check: quadrature did not converge");
        res.value = head.value + tail.value;
        res.abs_error = head.abs_error + tail.abs_error;
    } else {
        auto r = integrate_zero_to_inf([&](double t) {
            return std::pow(t, a_sum - 1.0) * eval_driving(g, t);
        }, 1e-11, 1e-15);
        if (!r.converged)
            throw numerical_error("integrability_check: quadrature did not converge");
        res.value = r.value;
        res.abs_error = r.abs_error;
    }
    return res;
}

// ---------------------------------------------------------------------------
// Weyl fractional integrals
// ---------------------------------------------------------------------------

struct WeylResult {
    double order = 0.0;
    double at = 0.0;
    double value = 0.0;
    double abs_error_estimate = 0.0;
};

/// Limiting constant W^alpha g(t) / (t^alpha g(t)) -> Gamma(beta-alpha)/Gamma(beta)
/// for power tails with index -beta; requires alpha < beta.
inline double weyl_limit_constant(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw std::invalid_argument("weyl_limit_constant: orders must be positive");
    if (!(alpha < beta))
        throw std::domain_error("weyl_limit_constant: requires alpha < beta");
    return std::exp(std::lgamma(beta - alpha) - std::lgamma(beta));
}

namespace detail {

inline void check_weyl_exists(const DrivingFunction& g, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("weyl_integral: order must be positive");
    const auto sigma = tail_exponent(g);
    if (sigma && !(alpha + *sigma < 0.0))
        throw std::domain_error("weyl_integral: diverges, order must be below the tail index");
}

/// int_t^inf (s-t)^(alpha-1) phi(s) ds with the scale-aware substitutions:
/// s = t + c v with c = max(t,1), and w = v^alpha first when alpha < 1 so the
/// endpoint singularity is removed exactly.
inline IntegralResult tail_power_integral(double alpha, double t,
                                          const std::function<double(double)>& phi,
                                          double rel_tol = 1e-10) {
    const double c = std::max(t, 1.0);
    const double calpha = std::pow(c, alpha);
    if (alpha < 1.0) {
        auto r = integrate_zero_to_inf([&](double w) {
            return phi(t + c * std::pow(w, 1.0 / alpha));
        }, rel_tol, 1e-300);
        r.value *= calpha / alpha;
        r.abs_error *= calpha / alpha;
        return r;
    }
    auto r = integrate_zero_to_inf([&](double v) {
        return std::pow(v, alpha - 1.0) * phi(t + c * v);
    }, rel_tol, 1e-300);
    r.value *= calpha;
    r.abs_error *= calpha;
    return r;
}

}  // namespace detail

/// W^alpha g(t) evaluated by adaptive quadrature (any family).
inline WeylResult weyl_integral_numeric(const DrivingFunction& g, double alpha, double t,
                                        double rel_tol = 1e-10) {
    if (!(t >= 0.0)) throw std::domain_error("weyl_integral: t must be nonnegative");
    detail::check_weyl_exists(g, alpha);
    auto r = detail::tail_power_integral(alpha, t, [&](double s) { return eval_driving(g, s); },
                                         rel_tol);
    if (!r.converged) throw numerical_error("weyl_integral: quadrature did not converge");
    const double inv_gamma = std::exp(-std::lgamma(alpha));
    return {alpha, t, r.value * inv_gamma, r.abs_error * inv_gamma};
}

/// W^alpha g(t) = (1/Gamma(alpha)) int_t^inf (s-t)^(alpha-1) g(s) ds, using the
/// family closed form when one exists and quadrature otherwise.
inline WeylResult weyl_integral(const DrivingFunction& g, double alpha, double t) {
    if (!(t >= 0.0)) throw std::domain_error("weyl_integral: t must be nonnegative");
    detail::check_weyl_exists(g, alpha);
    switch (g.family) {
        case DrivingFamily::inverted_dirichlet: {
            const double v = g.scale * weyl_limit_constant(alpha, g.beta) *
                             std::pow(1.0 + g.shift + t, alpha - g.beta);
            return {alpha, t, v, 4e-16 * std::abs(v)};
        }
        case DrivingFamily::exponential: {
            const double v = g.scale * std::exp(-g.rate * (g.shift + t)) *
                             std::pow(g.rate, -alpha);
            return {alpha, t, v, 4e-16 * std::abs(v)};
        }
        default:
            return weyl_integral_numeric(g, alpha, t);
    }
}

/// Whether weyl_integral uses a closed form for this family.
inline bool weyl_has_closed_form(const DrivingFunction& g) {
    return g.family == DrivingFamily::inverted_dirichlet ||
           g.family == DrivingFamily::exponential;
}

}  // namespace orv
