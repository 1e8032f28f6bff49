#pragma once

#include <array>
#include <stdexcept>

#include "schmidt/core.hpp"
#include "schmidt/eig.hpp"

namespace schmidt {

/// Sigma below this is treated as an exact zero of the split.
inline constexpr double kSigmaZeroTol = 1e-13;

/// SVD of a 2xM or 4xM matrix, m = sum_i sigma_i * left_i * right_i^T
/// (plain transpose: right_i = (left_i^dag m) / sigma_i, which is the
/// conjugate of the usual right singular vector and exactly the child
/// vector the Schmidt recursion descends into).
struct SmallSvd {
    std::vector<double> sigmas;        // descending, size = rows
    std::vector<cvector> left;         // orthonormal, dim = rows
    std::vector<cvector> right;        // unit rows of length cols; empty when absent
    std::vector<bool> has_right;       // false for sigma below the zero tolerance
};

namespace detail {

inline void fix_phase(cvector& u) {
    for (auto& z : u) {
        const double mag = std::abs(z);
        if (mag > 1e-12) {
            const cplx p = std::conj(z) / mag;
            for (auto& w : u) w *= p;
            return;
        }
    }
}

inline void normalize(cvector& u) {
    const double n = norm2(u);
    if (n > 0.0)
        for (auto& z : u) z /= n;
}

// Gram eigenvectors for the 2-row case; closed form on B = m m^dag.
inline void gram2_eigvecs(const Matrix& m, std::vector<double>& lambdas,
                          std::vector<cvector>& vecs) {
    cplx b00 = 0, b01 = 0, b11 = 0;
    for (std::size_t c = 0; c < m.cols; ++c) {
        b00 += m(0, c) * std::conj(m(0, c));
        b01 += m(0, c) * std::conj(m(1, c));
        b11 += m(1, c) * std::conj(m(1, c));
    }
    const double t = b00.real() + b11.real();
    const double d = b00.real() * b11.real() - std::norm(b01);
    const double disc = std::sqrt(std::max(t * t - 4.0 * d, 0.0));
    const double l1 = (t + disc) / 2.0;
    const double l2 = std::max((t - disc) / 2.0, 0.0);
    lambdas = {l1, std::min(l2, l1)};

    cvector v1;
    if (t <= 0.0) {
        v1 = {1.0, 0.0};
    } else {
        // two algebraically equivalent candidates; keep the better-conditioned one
        cvector ca = {b01, cplx(l1 - b00.real(), 0.0)};
        cvector cb = {cplx(l1 - b11.real(), 0.0), std::conj(b01)};
        v1 = (norm2(ca) >= norm2(cb)) ? ca : cb;
        if (norm2(v1) == 0.0) v1 = {1.0, 0.0};
        normalize(v1);
    }
    // second eigenvector of a 2x2 Hermitian is the orthogonal complement
    cvector v2 = {-std::conj(v1[1]), std::conj(v1[0])};
    vecs = {v1, v2};
}

inline bool lex_less(const cvector& a, const cvector& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
}

}  // namespace detail

inline SmallSvd small_row_svd(const Matrix& m) {
    if (m.rows != 2 && m.rows != 4)
        throw std::invalid_argument("small_row_svd: rows must be 2 or 4");
    if (m.cols < 1) throw std::invalid_argument("small_row_svd: empty matrix");

    const std::size_t k = m.rows;
    std::vector<double> lambdas;
    std::vector<cvector> lefts;

    if (k == 2) {
        detail::gram2_eigvecs(m, lambdas, lefts);
    } else {
        Matrix gram(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i; j < 4; ++j) {
                cplx s = 0;
                for (std::size_t c = 0; c < m.cols; ++c) s += m(i, c) * std::conj(m(j, c));
                gram(i, j) = s;
                gram(j, i) = std::conj(s);
            }
        // keep the Gram exactly Hermitian for the Jacobi pre-check
        for (std::size_t i = 0; i < 4; ++i) gram(i, i) = cplx(gram(i, i).real(), 0.0);
        const EigResult e = eig_hermitian(gram);
        lambdas = e.values;
        lefts.resize(4);
        for (std::size_t i = 0; i < 4; ++i) {
            lefts[i].resize(4);
            for (std::size_t r = 0; r < 4; ++r) lefts[i][r] = e.vectors(r, i);
        }
    }

    SmallSvd out;
    out.sigmas.resize(k);
    for (std::size_t i = 0; i < k; ++i) out.sigmas[i] = std::sqrt(std::max(lambdas[i], 0.0));

    for (auto& u : lefts) detail::fix_phase(u);

    // deterministic order under degeneracy
    for (std::size_t i = 0; i + 1 < k; ++i) {
        if (std::abs(out.sigmas[i] - out.sigmas[i + 1]) <= 1e-12) {
            const double fa = std::abs(lefts[i][0]), fb = std::abs(lefts[i + 1][0]);
            const bool swap_them =
                (fb > fa + 1e-15) ||
                (std::abs(fb - fa) <= 1e-15 && detail::lex_less(lefts[i + 1], lefts[i]));
            if (swap_them) {
                std::swap(lefts[i], lefts[i + 1]);
                std::swap(out.sigmas[i], out.sigmas[i + 1]);
            }
        }
    }

    out.left = std::move(lefts);
    out.right.resize(k);
    out.has_right.assign(k, false);
    for (std::size_t i = 0; i < k; ++i) {
        if (out.sigmas[i] <= kSigmaZeroTol) continue;
        cvector r(m.cols);
        for (std::size_t c = 0; c < m.cols; ++c) {
            cplx s = 0;
            for (std::size_t row = 0; row < k; ++row)
                s += std::conj(out.left[i][row]) * m(row, c);
            r[c] = s / out.sigmas[i];
        }
        out.right[i] = std::move(r);
        out.has_right[i] = true;
    }
    return out;
}

}  // namespace schmidt
