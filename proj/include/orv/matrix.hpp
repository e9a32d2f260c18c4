#pragma once

// Dense square matrices, spectral decompositions of symmetric matrices, and
// the power-matrix machinery t^E = exp(E log t) used for operator scaling.
// Matrices here are tiny (typically 2x2 or 3x3), so the algorithms favor
// determinism and robustness over asymptotic speed: cyclic Jacobi for the
// eigenproblem, scaling-and-squaring Taylor for the general exponential.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace orv {

using Vec = std::vector<double>;

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

class Matrix {
public:
    Matrix() : n_(0) {}
    explicit Matrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}
    Matrix(std::size_t n, const Vec& entries) : n_(n), a_(entries) {
        if (entries.size() != n * n)
            throw std::invalid_argument("Matrix: entry count does not match dimension");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(const Vec& d) {
        Matrix m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t dim() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    const Vec& entries() const { return a_; }

    bool finite() const { return all_finite(a_); }

    double max_abs() const {
        double m = 0.0;
        for (double x : a_) m = std::max(m, std::abs(x));
        return m;
    }

    bool symmetric(double tol) const {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i + 1; j < n_; ++j)
                if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
        return true;
    }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

private:
    std::size_t n_;
    Vec a_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("matmul: dimension mismatch");
    const std::size_t n = a.dim();
    Matrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline Vec matvec(const Matrix& m, const Vec& x) {
    if (m.dim() != x.size()) throw std::invalid_argument("matvec: dimension mismatch");
    Vec y(x.size(), 0.0);
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) y[i] += m(i, j) * x[j];
    return y;
}

inline Matrix transpose(const Matrix& m) {
    Matrix t(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) t(j, i) = m(i, j);
    return t;
}

/// Determinant by LU with partial pivoting.
inline double determinant(Matrix m) {
    const std::size_t n = m.dim();
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
        if (m(piv, col) == 0.0) return 0.0;
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
            det = -det;
        }
        det *= m(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = m(r, col) / m(col, col);
            for (std::size_t j = col; j < n; ++j) m(r, j) -= f * m(col, j);
        }
    }
    return det;
}

// ---------------------------------------------------------------------------
// Spectral decomposition of symmetric matrices
// ---------------------------------------------------------------------------

/// Decomposition M = O^T * diag(eigenvalues) * O.  Rows of `orthogonal` are
/// the eigenvectors; eigenvalues are sorted ascending and each eigenvector's
/// first nonzero component is made positive so the output is deterministic.
struct SpectralDecomposition {
    Matrix orthogonal;
    Vec eigenvalues;
};

inline SpectralDecomposition spectral_decompose(const Matrix& m) {
    if (!m.finite()) throw std::invalid_argument("spectral_decompose: non-finite entries");
    if (!m.symmetric(1e-12)) throw std::invalid_argument("spectral_decompose: matrix not symmetric");
    const std::size_t n = m.dim();
    if (n == 0) throw std::invalid_argument("spectral_decompose: empty matrix");

    Matrix a = m;
    Matrix v = Matrix::identity(n);  // columns accumulate the eigenvectors

    const double scale = std::max(a.max_abs(), 1e-300);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (std::sqrt(off) <= 1e-15 * scale) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) <= 1e-18 * scale) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

    SpectralDecomposition dec;
    dec.eigenvalues.resize(n);
    dec.orthogonal = Matrix(n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t src = order[r];
        dec.eigenvalues[r] = a(src, src);
        double lead = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (std::abs(v(k, src)) > 1e-8) { lead = v(k, src); break; }
        }
        const double sign = (lead < 0.0) ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k) dec.orthogonal(r, k) = sign * v(k, src);
    }
    return dec;
}

// ---------------------------------------------------------------------------
// Matrix exponential
// ---------------------------------------------------------------------------

/// exp(A) = sum A^k / k!.  Symmetric input goes through the eigendecomposition;
/// anything else uses scaling-and-squaring with a Taylor series on A / 2^s.
inline Matrix matrix_exponential(const Matrix& a) {
    if (!a.finite()) throw std::invalid_argument("matrix_exponential: non-finite entries");
    const std::size_t n = a.dim();
    if (n == 0) throw std::invalid_argument("matrix_exponential: empty matrix");

    if (a.symmetric(1e-12)) {
        const SpectralDecomposition dec = spectral_decompose(a);
        Matrix d(n);
        for (std::size_t i = 0; i < n; ++i) d(i, i) = std::exp(dec.eigenvalues[i]);
        return matmul(transpose(dec.orthogonal), matmul(d, dec.orthogonal));
    }

    int s = 0;
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(a(i, j));
        norm = std::max(norm, row);
    }
    while (norm > 0.5) { norm *= 0.5; ++s; }

    Matrix t = a;
    const double inv = std::ldexp(1.0, -s);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t(i, j) *= inv;

    Matrix result = Matrix::identity(n);
    Matrix term = Matrix::identity(n);
    for (int k = 1; k <= 40; ++k) {
        term = matmul(term, t);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) term(i, j) /= static_cast<double>(k);
        double tmax = term.max_abs();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) result(i, j) += term(i, j);
        if (tmax < 1e-18 * std::max(1.0, result.max_abs())) break;
    }
    for (int i = 0; i < s; ++i) result = matmul(result, result);
    return result;
}

// ---------------------------------------------------------------------------
// Operator indices and power matrices
// ---------------------------------------------------------------------------

/// A symmetric positive-definite scaling operator E together with its
/// spectral decomposition.  Asymmetric or non-PD input is rejected here so
/// every downstream power matrix is well defined.
struct OperatorIndex {
    Matrix matrix;
    SpectralDecomposition decomposition;
    double trace = 0.0;
};

inline OperatorIndex make_operator_index(const Matrix& e) {
    if (!e.finite()) throw std::invalid_argument("operator index: non-finite entries");
    if (!e.symmetric(1e-12)) throw std::invalid_argument("operator index: matrix not symmetric");
    OperatorIndex idx;
    idx.matrix = e;
    idx.decomposition = spectral_decompose(e);
    for (double lam : idx.decomposition.eigenvalues)
        if (!(lam > 0.0))
            throw std::invalid_argument("operator index: eigenvalues must be strictly positive");
    idx.trace = e.trace();
    return idx;
}

inline double min_eigenvalue(const OperatorIndex& e) { return e.decomposition.eigenvalues.front(); }
inline double max_eigenvalue(const OperatorIndex& e) { return e.decomposition.eigenvalues.back(); }

/// t^E = exp(E log t) = O^T diag(t^lambda_i) O, for t > 0.
inline Matrix power_matrix(const OperatorIndex& e, double t) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::domain_error("power_matrix: scale must be positive and finite");
    const std::size_t n = e.matrix.dim();
    const Matrix& o = e.decomposition.orthogonal;
    Matrix d(n);
    for (std::size_t i = 0; i < n; ++i) d(i, i) = std::pow(t, e.decomposition.eigenvalues[i]);
    return matmul(transpose(o), matmul(d, o));
}

// ---------------------------------------------------------------------------
// Quasi-homogeneous gauges
// ---------------------------------------------------------------------------

/// Gauge [x] = sum_i |x_i|^(1/lambda_i); satisfies [t^E x] = t [x] when E is
/// diagonal with the same exponents.
struct Gauge {
    Vec exponents;
};

inline Gauge make_gauge(const Vec& exponents) {
    if (exponents.empty()) throw std::invalid_argument("gauge: empty exponent list");
    for (double lam : exponents)
        if (!(lam > 0.0) || !std::isfinite(lam))
            throw std::invalid_argument("gauge: exponents must be strictly positive");
    return Gauge{exponents};
}

inline double gauge_eval(const Gauge& g, const Vec& x) {
    if (x.size() != g.exponents.size())
        throw std::invalid_argument("gauge_eval: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), 1.0 / g.exponents[i]);
    return s;
}

}  // namespace orv
