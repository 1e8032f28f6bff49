#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "schmidt/core.hpp"

namespace schmidt {

struct EigResult {
    std::vector<double> values;  // descending
    Matrix vectors;              // column i is the eigenvector for values[i]
};

namespace detail {

// Householder reduction of a real symmetric matrix (row-major, n x n) to
// tridiagonal form; eigenvalue-only variant, no transform accumulation.
// On return d holds the diagonal and e the subdiagonal (e[0] unused).
inline void tridiagonalize_sym(std::vector<double>& a, std::size_t n,
                               std::vector<double>& d, std::vector<double>& e) {
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (std::size_t i = n - 1; i >= 1; --i) {
        const std::size_t l = i - 1;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a[i * n + k]);
            if (scale == 0.0) {
                e[i] = a[i * n + l];
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                double f = a[i * n + l];
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += a[j * n + k] * a[i * n + k];
                    for (std::size_t k = j + 1; k <= l; ++k) g += a[k * n + j] * a[i * n + k];
                    e[j] = g / h;
                    f += e[j] * a[i * n + j];
                }
                const double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = a[i * n + j];
                    g = e[j] - hh * f;
                    e[j] = g;
                    for (std::size_t k = 0; k <= j; ++k)
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i * n + i];
    e[0] = 0.0;
}

// QL iteration with implicit shifts on a symmetric tridiagonal matrix;
// eigenvalues land in d, unsorted.
inline void tridiag_eigvals(std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = d.size();
    if (n == 0) return;
    for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    double anorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) anorm = std::max(anorm, std::abs(d[i]) + std::abs(e[i]));
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                // deflating at eps * anorm perturbs eigenvalues by O(eps * ||A||)
                if (std::abs(e[m]) <= eps * std::max(dd, anorm)) break;
            }
            if (m != l) {
                if (iter++ == 64)
                    throw std::runtime_error("eigvals_hermitian: QL iteration did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

inline double offdiag_frobenius(const Matrix& a) {
    double s = 0.0;
    for (std::size_t r = 0; r < a.rows; ++r)
        for (std::size_t c = 0; c < a.cols; ++c)
            if (r != c) s += std::norm(a(r, c));
    return std::sqrt(s);
}

}  // namespace detail

/// Cyclic Jacobi sweeps for a dense Hermitian matrix.
/// Off-diagonal phases are folded into each plane rotation so the algorithm
/// handles the complex case directly; sweeps run until the off-diagonal
/// Frobenius norm drops below 1e-12 * ||m||_F.
inline EigResult eig_hermitian(const Matrix& m) {
    if (m.rows != m.cols) throw std::invalid_argument("eig_hermitian: matrix not square");
    const std::size_t n = m.rows;
    const double fro = frobenius(m);
    {
        double herm_err = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                herm_err += std::norm(m(r, c) - std::conj(m(c, r)));
        if (std::sqrt(herm_err) > 1e-10 * std::max(fro, 1.0))
            throw std::invalid_argument("eig_hermitian: matrix is not Hermitian");
    }

    Matrix a = m;
    Matrix v = Matrix::identity(n);
    const double stop = 1e-12 * fro;
    const int max_sweeps = 64;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (detail::offdiag_frobenius(a) <= stop) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag <= stop / static_cast<double>(n)) continue;

                const cplx phase = apq / mag;  // e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // J(p,p)=c, J(p,q)=s, J(q,p)=-s*conj(phase), J(q,q)=c*conj(phase)
                // A <- J^dag A J, V <- V J
                const cplx se_m = s * std::conj(phase);
                const cplx ce_m = c * std::conj(phase);

                // column update: A <- A J
                for (std::size_t r = 0; r < n; ++r) {
                    const cplx arp = a(r, p), arq = a(r, q);
                    a(r, p) = c * arp - se_m * arq;
                    a(r, q) = s * arp + ce_m * arq;
                }
                // row update: A <- J^dag A
                const cplx se_p = s * phase;
                const cplx ce_p = c * phase;
                cplx* rp = &a.data[p * n];
                cplx* rq = &a.data[q * n];
                for (std::size_t col = 0; col < n; ++col) {
                    const cplx x = rp[col], y = rq[col];
                    rp[col] = c * x - se_p * y;
                    rq[col] = s * x + ce_p * y;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const cplx vrp = v(r, p), vrq = v(r, q);
                    v(r, p) = c * vrp - se_m * vrq;
                    v(r, q) = s * vrp + ce_m * vrq;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

    EigResult out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = a(order[i], order[i]).real();
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, i) = v(r, order[i]);
    }
    return out;
}

/// Eigenvalues only (descending), without eigenvectors. The Hermitian matrix
/// is embedded as the real symmetric [[Re, -Im], [Im, Re]], whose spectrum is
/// that of the input with every eigenvalue doubled; Householder reduction
/// plus tridiagonal QL then costs O(n^3), far cheaper than Jacobi sweeps for
/// the large spectrum comparisons.
inline std::vector<double> eigvals_hermitian(const Matrix& m) {
    if (m.rows != m.cols) throw std::invalid_argument("eigvals_hermitian: matrix not square");
    const std::size_t n = m.rows;
    {
        const double fro = frobenius(m);
        double herm_err = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                herm_err += std::norm(m(r, c) - std::conj(m(c, r)));
        if (std::sqrt(herm_err) > 1e-10 * std::max(fro, 1.0))
            throw std::invalid_argument("eigvals_hermitian: matrix is not Hermitian");
    }

    const std::size_t n2 = 2 * n;
    std::vector<double> a(n2 * n2);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            const double re = m(r, c).real();
            const double im = m(r, c).imag();
            a[r * n2 + c] = re;
            a[r * n2 + n + c] = -im;
            a[(n + r) * n2 + c] = im;
            a[(n + r) * n2 + n + c] = re;
        }

    std::vector<double> d, e;
    detail::tridiagonalize_sym(a, n2, d, e);
    detail::tridiag_eigvals(d, e);
    std::sort(d.begin(), d.end(), std::greater<>());

    // every eigenvalue appears twice in the embedding; keep one per pair
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (d[2 * i] + d[2 * i + 1]);
    return out;
}

}  // namespace schmidt
