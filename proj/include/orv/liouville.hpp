#pragma once

// Multivariate Liouville models X = R * Y with Y Dirichlet on the simplex and
// R the radial part with density proportional to t^(a_sum - 1) g(t).  This
// header holds the model (shape vector + driving function + normalizer), the
// joint density, exact or spline-based radial sampling, marginalization, and
// conditioning on leading components.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "orv/driving.hpp"
#include "orv/matrix.hpp"
#include "orv/quadrature.hpp"
#include "orv/rng.hpp"

namespace orv {

struct LiouvilleModel {
    Vec shapes;
    DrivingFunction driving;
    double shape_sum = 0.0;
    double radial_mass = 0.0;     // int_0^inf t^(shape_sum - 1) g(t) dt
    double log_normalizer = 0.0;  // log of the density constant
    double normalizer = 0.0;

    std::size_t dim() const { return shapes.size(); }
};

inline LiouvilleModel make_liouville_model(Vec shapes, DrivingFunction driving) {
    if (shapes.empty())
        throw std::invalid_argument("liouville model: needs at least one component");
    double a_sum = 0.0;
    for (double a : shapes) {
        if (!(a > 0.0) || !std::isfinite(a))
            throw std::invalid_argument("liouville model: shape parameters must be positive");
        a_sum += a;
    }
    const auto mass = integrability_check(driving, a_sum);
    if (!mass.finite)
        throw std::invalid_argument(
            "liouville model: driving function is not integrable against the radial weight");

    LiouvilleModel m;
    m.shapes = std::move(shapes);
    m.driving = std::move(driving);
    m.shape_sum = a_sum;
    m.radial_mass = mass.value;
    double log_gammas = 0.0;
    for (double a : m.shapes) log_gammas += std::lgamma(a);
    m.log_normalizer = std::lgamma(a_sum) - log_gammas - std::log(mass.value);
    m.normalizer = std::exp(m.log_normalizer);
    return m;
}

/// Joint density at x.  Negative coordinates give 0.  On a boundary face
/// x_i = 0 the value is the continuous extension: 0 when a_i > 1, the g-term
/// alone when a_i = 1, and an error when a_i < 1 (the density is unbounded
/// there, so no finite value is faithful).
inline double density(const LiouvilleModel& m, const Vec& x) {
    if (x.size() != m.dim())
        throw std::invalid_argument("density: point dimension does not match the model");
    double total = 0.0;
    double log_prod = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        if (!std::isfinite(xi))
            throw std::invalid_argument("density: coordinates must be finite");
        if (xi < 0.0) return 0.0;
        const double ai = m.shapes[i];
        if (xi == 0.0) {
            if (ai > 1.0) return 0.0;
            if (ai < 1.0)
                throw std::domain_error(
                    "density: unbounded at a zero coordinate with shape below 1");
            // ai == 1: the power factor is identically 1
        } else {
            log_prod += (ai - 1.0) * std::log(xi);
        }
        total += xi;
    }
    return m.normalizer * eval_driving(m.driving, total) * std::exp(log_prod);
}

// ---------------------------------------------------------------------------
// Radial sampling
// ---------------------------------------------------------------------------

/// Inverse-CDF sampler for the radial part.  Families with an elementary
/// quantile use it directly; everything else gets a monotone cubic spline of
/// the CDF on the compactified axis u = r / (1 + r), with analytic inversion
/// of the first and last slices where a cubic has the wrong local shape.
class RadialSampler {
  public:
    explicit RadialSampler(const LiouvilleModel& m) : shape_sum_(m.shape_sum) {
        const DrivingFunction& g = m.driving;
        if (g.family == DrivingFamily::inverted_dirichlet) {
            stretch_ = 1.0 + g.shift;
            if (g.beta - shape_sum_ == 1.0) {
                mode_ = Mode::power_unit_tail;
                return;
            }
            if (shape_sum_ == 1.0) {
                mode_ = Mode::power_unit_shape;
                tail_order_ = g.beta - 1.0;
                return;
            }
        }
        if (g.family == DrivingFamily::exponential && shape_sum_ == 1.0) {
            mode_ = Mode::exponential_unit_shape;
            rate_ = g.rate;
            return;
        }
        mode_ = Mode::spline;
        build_spline(m);
    }

    /// Quantile of the radial law at probability p in [0, 1).
    double quantile(double p) const {
        if (!(p >= 0.0) || !(p < 1.0))
            throw std::domain_error("radial quantile: probability must lie in [0,1)");
        switch (mode_) {
            case Mode::power_unit_tail: {
                // F(r) = (v / (1+v))^A with v = r / stretch
                const double y = std::pow(p, 1.0 / shape_sum_);
                return stretch_ * y / (1.0 - y);
            }
            case Mode::power_unit_shape:
                // F(r) = 1 - (1 + v)^(-B)
                return stretch_ * std::expm1(-std::log1p(-p) / tail_order_);
            case Mode::exponential_unit_shape:
                return -std::log1p(-p) / rate_;
            case Mode::spline:
                return spline_quantile(p);
        }
        return 0.0;
    }

    double draw(Rng& rng) const { return quantile(rng.uniform01()); }

    bool uses_spline() const { return mode_ == Mode::spline; }

  private:
    enum class Mode { power_unit_tail, power_unit_shape, exponential_unit_shape, spline };
    enum class TailKind { power, exponential };

    static constexpr std::size_t kKnots = 2048;

    void build_spline(const LiouvilleModel& m) {
        const DrivingFunction& g = m.driving;
        const double a = shape_sum_;
        const double mass = m.radial_mass;
        auto phi = [&](double t) { return std::pow(t, a - 1.0) * eval_driving(g, t); };

        us_.resize(kKnots);
        rs_.resize(kKnots);
        cdf_.resize(kKnots);
        deriv_.resize(kKnots);
        for (std::size_t k = 0; k < kKnots; ++k) {
            us_[k] = static_cast<double>(k) / kKnots;
            rs_[k] = us_[k] / (1.0 - us_[k]);
        }

        // cumulative masses; the first slice integrates the t^(a-1) factor
        // exactly via w = t^a when it is singular at the origin
        cdf_[0] = 0.0;
        double acc;
        if (a < 1.0) {
            auto head = integrate([&](double w) {
                return eval_driving(g, std::pow(w, 1.0 / a)) / a;
            }, 0.0, std::pow(rs_[1], a), 1e-9, 1e-280 * mass);
            acc = head.value;
        } else {
            acc = integrate(phi, 0.0, rs_[1], 1e-9, 1e-280 * mass).value;
        }
        cdf_[1] = std::min(acc / mass, 1.0);
        for (std::size_t k = 2; k < kKnots; ++k) {
            acc += integrate(phi, rs_[k - 1], rs_[k], 1e-9, 1e-280 * mass).value;
            cdf_[k] = std::max(cdf_[k - 1], std::min(acc / mass, 1.0));
        }

        // exact dF/du at the knots, clipped into the monotone region of the
        // cubic interpolant (Fritsch-Carlson circle criterion); knot 0 is
        // never interpolated through, the head slice is inverted analytically
        deriv_[0] = (a == 1.0) ? eval_driving(g, 0.0) / mass : 0.0;
        for (std::size_t k = 1; k < kKnots; ++k) {
            const double grow = (1.0 + rs_[k]) * (1.0 + rs_[k]);
            deriv_[k] = phi(rs_[k]) * grow / mass;
        }
        const double h = 1.0 / kKnots;
        for (std::size_t k = 1; k + 1 < kKnots; ++k) {
            const double secant = (cdf_[k + 1] - cdf_[k]) / h;
            if (secant <= 0.0) {
                deriv_[k] = 0.0;
                deriv_[k + 1] = 0.0;
                continue;
            }
            const double al = deriv_[k] / secant;
            const double be = deriv_[k + 1] / secant;
            const double rad = al * al + be * be;
            if (rad > 9.0) {
                const double shrink = 3.0 / std::sqrt(rad);
                deriv_[k] *= shrink;
                deriv_[k + 1] *= shrink;
            }
        }

        const auto sigma = detail::tail_exponent(g);
        if (sigma) {
            tail_kind_ = TailKind::power;
            tail_order_ = -(a + *sigma);
        } else {
            tail_kind_ = TailKind::exponential;
            rate_ = g.rate;
        }
    }

    double spline_quantile(double p) const {
        if (p <= 0.0) return 0.0;
        if (cdf_[1] > 0.0 && p < cdf_[1]) {
            // head slice: F grows like a constant times r^a
            return rs_[1] * std::pow(p / cdf_[1], 1.0 / shape_sum_);
        }
        if (p >= cdf_.back()) {
            // tail slice: invert the asymptotic tail calibrated at the last knot
            const double last = cdf_.back();
            const double log_ratio = std::log1p(-last) - std::log1p(-p);
            if (tail_kind_ == TailKind::exponential)
                return rs_.back() + log_ratio / rate_;
            return rs_.back() * std::exp(log_ratio / tail_order_);
        }

        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), p);
        std::size_t k = static_cast<std::size_t>(it - cdf_.begin()) - 1;
        k = std::min(k, kKnots - 2);
        const double lo = cdf_[k];
        const double hi = cdf_[k + 1];
        if (!(hi > lo)) return rs_[k];

        // safeguarded Newton on the monotone cubic over this knot interval
        const double h = 1.0 / kKnots;
        const double m0 = deriv_[k] * h;
        const double m1 = deriv_[k + 1] * h;
        const double gap = hi - lo;
        double s = (p - lo) / gap;
        double s_lo = 0.0;
        double s_hi = 1.0;
        for (int iter = 0; iter < 40; ++iter) {
            const double s2 = s * s;
            const double s3 = s2 * s;
            const double value = lo * (2.0 * s3 - 3.0 * s2 + 1.0) + m0 * (s3 - 2.0 * s2 + s) +
                                 hi * (-2.0 * s3 + 3.0 * s2) + m1 * (s3 - s2);
            const double slope = lo * (6.0 * s2 - 6.0 * s) + m0 * (3.0 * s2 - 4.0 * s + 1.0) +
                                 hi * (6.0 * s - 6.0 * s2) + m1 * (3.0 * s2 - 2.0 * s);
            const double miss = value - p;
            if (std::abs(miss) <= 1e-15 * gap) break;
            if (miss > 0.0) s_hi = s; else s_lo = s;
            double next = (slope > 0.0) ? s - miss / slope : 0.5 * (s_lo + s_hi);
            if (!(next > s_lo) || !(next < s_hi)) next = 0.5 * (s_lo + s_hi);
            s = next;
        }
        const double u = us_[k] + s * h;
        return u / (1.0 - u);
    }

    Mode mode_ = Mode::spline;
    TailKind tail_kind_ = TailKind::power;
    double shape_sum_ = 1.0;
    double stretch_ = 1.0;
    double tail_order_ = 1.0;
    double rate_ = 1.0;
    std::vector<double> us_;
    std::vector<double> rs_;
    std::vector<double> cdf_;
    std::vector<double> deriv_;
};

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

struct SampleBatch {
    std::size_t dim = 0;
    std::vector<double> data;  // row-major, size() rows of dim coordinates

    std::size_t size() const { return dim == 0 ? 0 : data.size() / dim; }
    const double* row(std::size_t i) const { return data.data() + i * dim; }
};

/// Draw n points X = R * Y.  Output depends only on (model, n, seed): work is
/// split into fixed-size chunks with per-chunk engines, so any worker count
/// produces identical bytes.
inline SampleBatch sample(const LiouvilleModel& m, std::size_t n, std::uint64_t seed,
                          unsigned workers = 0) {
    SampleBatch batch;
    batch.dim = m.dim();
    batch.data.resize(n * batch.dim);
    if (n == 0) return batch;

    const RadialSampler radial(m);
    const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
    std::size_t want = workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                    : workers;
    want = std::min(want, chunks);

    std::atomic<std::size_t> next{0};
    auto run = [&]() {
        Vec simplex(m.dim());
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) break;
            Rng rng = make_chunk_rng(seed, c);
            const std::size_t lo = c * kChunkSize;
            const std::size_t hi = std::min(n, lo + kChunkSize);
            for (std::size_t i = lo; i < hi; ++i) {
                rng.dirichlet(m.shapes, simplex);
                const double r = radial.draw(rng);
                double* row = batch.data.data() + i * batch.dim;
                for (std::size_t j = 0; j < batch.dim; ++j) row[j] = r * simplex[j];
            }
        }
    };

    if (want <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(want);
        for (std::size_t w = 0; w < want; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    return batch;
}

// ---------------------------------------------------------------------------
// Marginalization and conditioning
// ---------------------------------------------------------------------------

/// Model of the first `keep` components.  The marginal is again of this class,
/// with the driving function integrated to fractional order by the dropped
/// shape mass: closed form for the families that admit one, otherwise a
/// tabulated curve.
inline LiouvilleModel marginal(const LiouvilleModel& m, std::size_t keep) {
    if (keep < 1 || keep >= m.dim())
        throw std::invalid_argument("marginal: component count must be in [1, dim)");
    double dropped = 0.0;
    for (std::size_t i = keep; i < m.dim(); ++i) dropped += m.shapes[i];
    Vec sub(m.shapes.begin(), m.shapes.begin() + keep);

    const DrivingFunction& g = m.driving;
    DrivingFunction gm;
    switch (g.family) {
        case DrivingFamily::inverted_dirichlet:
            gm = inverted_dirichlet_driving(g.beta - dropped);
            if (g.shift > 0.0) gm = shifted_driving(gm, g.shift, 1.0);
            break;
        case DrivingFamily::exponential:
            gm = g;  // same rate; constants vanish in the normalizer
            break;
        default: {
            // tabulate the fractional integral on a log-spaced grid
            constexpr std::size_t kPoints = 513;
            const double span = std::log1p(1e8);
            std::vector<std::pair<double, double>> pts;
            pts.reserve(kPoints);
            for (std::size_t k = 0; k < kPoints; ++k) {
                const double t = std::expm1(span * static_cast<double>(k) / (kPoints - 1));
                pts.emplace_back(t, weyl_integral_numeric(g, dropped, t, 1e-9).value);
            }
            gm = tabulated_driving(pts);
            break;
        }
    }
    return make_liouville_model(std::move(sub), std::move(gm));
}

/// Conditional model of the trailing components given the leading ones fixed
/// at `given`.  The result is a Liouville model whose driving function is the
/// original translated by the fixed total and rescaled to unit radial weight,
/// so its normalizer reduces to the reciprocal product of shape Gammas.
inline LiouvilleModel condition(const LiouvilleModel& m, const Vec& given) {
    const std::size_t fixed = given.size();
    if (fixed < 1 || fixed >= m.dim())
        throw std::invalid_argument("condition: fixed component count must be in [1, dim)");
    double total = 0.0;
    for (double v : given) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("condition: fixed coordinates must be positive");
        total += v;
    }
    double remaining = 0.0;
    for (std::size_t i = fixed; i < m.dim(); ++i) remaining += m.shapes[i];

    const double weight = weyl_integral(m.driving, remaining, total).value;
    if (!(weight > 0.0))
        throw numerical_error("condition: degenerate conditioning weight");
    Vec sub(m.shapes.begin() + fixed, m.shapes.end());
    return make_liouville_model(std::move(sub),
                                shifted_driving(m.driving, total, 1.0 / weight));
}

/// E[(sum of free components)^order | fixed components with total t], as a
/// ratio of fractional integrals of the driving function.
inline double conditional_moment_ratio(const LiouvilleModel& m, std::size_t fixed,
                                       double order, double t) {
    if (fixed < 1 || fixed >= m.dim())
        throw std::invalid_argument("conditional moment: fixed count must be in [1, dim)");
    if (!(order > 0.0) || !std::isfinite(order))
        throw std::invalid_argument("conditional moment: order must be positive");
    double remaining = 0.0;
    for (std::size_t i = fixed; i < m.dim(); ++i) remaining += m.shapes[i];
    const double upper = weyl_integral(m.driving, remaining + order, t).value;
    const double lower = weyl_integral(m.driving, remaining, t).value;
    return std::exp(std::lgamma(remaining + order) - std::lgamma(remaining)) * upper / lower;
}

/// E[h(U) | fixed components with total t] where U is the free-part total and
/// h is given as a driving function.  Requires enough combined tail decay:
/// for power tails the free shape mass must stay below the sum of the two
/// tail orders.
inline double conditional_h_expectation(const LiouvilleModel& m, std::size_t fixed,
                                        const DrivingFunction& h, double t) {
    if (fixed < 1 || fixed >= m.dim())
        throw std::invalid_argument("conditional expectation: fixed count must be in [1, dim)");
    if (!(t >= 0.0)) throw std::domain_error("conditional expectation: t must be nonnegative");
    double remaining = 0.0;
    for (std::size_t i = fixed; i < m.dim(); ++i) remaining += m.shapes[i];

    const auto sg = detail::tail_exponent(m.driving);
    const auto sh = detail::tail_exponent(h);
    if (sg && sh && !(remaining + *sg + *sh < 0.0))
        throw std::domain_error("conditional expectation: does not exist, too little tail decay");

    auto numer = detail::tail_power_integral(remaining, t, [&](double s) {
        return eval_driving(h, s - t) * eval_driving(m.driving, s);
    });
    if (!numer.converged)
        throw numerical_error("conditional expectation: quadrature did not converge");
    const double denom = weyl_integral(m.driving, remaining, t).value;
    return numer.value * std::exp(-std::lgamma(remaining)) / denom;
}

}  // namespace orv
