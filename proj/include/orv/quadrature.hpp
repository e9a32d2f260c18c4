#pragma once

// Adaptive Gauss-Kronrod (G7,K15) integration with worst-interval-first
// refinement, plus the compactifying substitutions used for half-line and
// orthant integrals.  Nodes are strictly interior, so integrable endpoint
// singularities never get evaluated directly.

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace orv {

class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

struct IntegralResult {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = false;
    long evaluations = 0;
};

namespace detail {

// QUADPACK dqk15 abscissae and weights.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

inline Panel gk15(const std::function<double(double)>& f, double a, double b, long& evals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    const double fc = f(c);
    ++evals;
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(fc) * kWgk[7];
    fv[14] = fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        evals += 2;
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        resk += kWgk[j] * (f1 + f2);
        resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
    }
    const double mean = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
    resasc *= std::abs(h);
    resabs *= std::abs(h);

    Panel p;
    p.a = a;
    p.b = b;
    p.value = resk * h;
    double err = std::abs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(err, 50.0 * eps * resabs);
    p.error = err;
    return p;
}

}  // namespace detail

/// Adaptive integral of f over the finite interval [a, b].
inline IntegralResult integrate(const std::function<double(double)>& f, double a, double b,
                                double rel_tol = 1e-10, double abs_tol = 1e-14,
                                int max_panels = 4000) {
    IntegralResult res;
    if (a == b) { res.converged = true; return res; }
    std::priority_queue<detail::Panel> heap;
    heap.push(detail::gk15(f, a, b, res.evaluations));
    double total = heap.top().value;
    double total_err = heap.top().error;
    int panels = 1;
    const double eps = std::numeric_limits<double>::epsilon();
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) && panels < max_panels &&
           !heap.empty()) {
        detail::Panel worst = heap.top();
        heap.pop();
        // refuse to split panels so narrow that quadrature nodes would round
        // onto an endpoint; their contribution stays in the running totals
        const double scale = std::max(std::abs(worst.a), std::abs(worst.b));
        if (worst.b - worst.a <= 256.0 * eps * scale) continue;
        const double mid = 0.5 * (worst.a + worst.b);
        detail::Panel left = detail::gk15(f, worst.a, mid, res.evaluations);
        detail::Panel right = detail::gk15(f, mid, worst.b, res.evaluations);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
    }
    res.value = total;
    res.abs_error = total_err;
    res.converged = total_err <= std::max(abs_tol, rel_tol * std::abs(total));
    return res;
}

/// Integral of f over [0, inf) via the substitution u = 1/(1+t).
inline IntegralResult integrate_zero_to_inf(const std::function<double(double)>& f,
                                            double rel_tol = 1e-10, double abs_tol = 1e-14,
                                            int max_panels = 4000) {
    auto mapped = [&f](double u) {
        const double t = (1.0 - u) / u;
        return f(t) / (u * u);
    };
    return integrate(mapped, 0.0, 1.0, rel_tol, abs_tol, max_panels);
}

/// Integral of f over [a, inf); the tail is compactified with scale max(1,|a|).
inline IntegralResult integrate_upper(const std::function<double(double)>& f, double a,
                                      double rel_tol = 1e-10, double abs_tol = 1e-14,
                                      int max_panels = 4000) {
    const double s = std::max(1.0, std::abs(a));
    auto mapped = [&f, a, s](double u) {
        const double t = a + s * (1.0 - u) / u;
        return f(t) * s / (u * u);
    };
    return integrate(mapped, 0.0, 1.0, rel_tol, abs_tol, max_panels);
}

/// Integral of f over a box in dimension d <= 3; upper bounds may be +inf.
/// Inner dimensions run at tightened tolerance so the outer estimate is honest.
inline IntegralResult integrate_box(const std::function<double(const std::vector<double>&)>& f,
                                    const std::vector<double>& lower,
                                    const std::vector<double>& upper,
                                    double rel_tol = 1e-9, int max_panels = 2000) {
    const std::size_t d = lower.size();
    if (d == 0 || d > 3)
        throw std::invalid_argument("integrate_box: dimension must be between 1 and 3");
    if (upper.size() != d) throw std::invalid_argument("integrate_box: bound size mismatch");

    long evals = 0;
    std::vector<double> x(d, 0.0);

    std::function<IntegralResult(std::size_t, double)> level =
        [&](std::size_t dim, double tol) -> IntegralResult {
        std::function<double(double)> integrand = [&](double xi) {
            x[dim] = xi;
            if (dim + 1 == d) {
                ++evals;
                return f(x);
            }
            return level(dim + 1, tol * 0.1).value;
        };
        if (std::isinf(upper[dim]))
            return integrate_upper(integrand, lower[dim], tol, 0.0, max_panels);
        return integrate(integrand, lower[dim], upper[dim], tol, 0.0, max_panels);
    };

    IntegralResult res = level(0, rel_tol);
    res.evaluations = evals;
    return res;
}

}  // namespace orv
