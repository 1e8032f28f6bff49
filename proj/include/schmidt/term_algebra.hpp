#pragma once

#include <stdexcept>
#include <string>

#include "schmidt/tree.hpp"

namespace schmidt {

/// beta * |p_1> x ... x |p_n| with unit-norm dim-2 factors.
struct TensorTermVector {
    cplx beta = 1.0;
    std::vector<cvector> factors;
};

/// alpha * Q_1 x ... x Q_n with 2x2 factor matrices.
struct TensorTermOperator {
    cplx alpha = 1.0;
    std::vector<Matrix> factors;
};

template <typename Term>
struct TermSum {
    std::vector<Term> terms;
};

using OperatorSum = TermSum<TensorTermOperator>;

inline TensorTermVector basis_term(std::size_t n, std::size_t index) {
    TensorTermVector t;
    t.factors.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t bit = (index >> (n - 1 - k)) & 1u;
        t.factors[k] = bit ? cvector{0.0, 1.0} : cvector{1.0, 0.0};
    }
    return t;
}

/// Vector path term over a vectorized 2^n x 2^n matrix -> operator term.
/// Factors f_1..f_n carry the row bits and f_{n+1}..f_{2n} the column bits,
/// so under row-major vectorization Q_i = f_i * f_{n+i}^T with a plain
/// transpose: vec(u v^T) = u x v, no conjugation involved.
inline TensorTermOperator vec_term_to_operator(const PathTerm& t) {
    if (t.factors.size() % 2 != 0)
        throw std::invalid_argument("vec_term_to_operator: odd factor count");
    const std::size_t n = t.factors.size() / 2;
    TensorTermOperator out;
    out.alpha = t.coefficient;
    out.factors.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const cvector& u = t.factors[i];
        const cvector& v = t.factors[n + i];
        Matrix q(2, 2);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c) q(r, c) = u[r] * v[c];
        out.factors.push_back(std::move(q));
    }
    return out;
}

/// OPERATOR-mode path term -> operator term: each dim-4 factor unvecs
/// row-major into one 2x2 matrix.
inline TensorTermOperator operator_term_from_path(const PathTerm& t) {
    TensorTermOperator out;
    out.alpha = t.coefficient;
    out.factors.reserve(t.factors.size());
    for (const auto& f : t.factors) {
        if (f.size() != 4)
            throw std::invalid_argument("operator_term_from_path: factors must have dim 4");
        out.factors.push_back(Matrix(2, 2, f));
    }
    return out;
}

inline OperatorSum to_operator_sum(const Decomposition& d) {
    OperatorSum s;
    s.terms.reserve(d.terms.size());
    for (const auto& t : d.terms) {
        TensorTermOperator op = (d.mode == DecompositionMode::OPERATOR)
                                    ? operator_term_from_path(t)
                                    : vec_term_to_operator(t);
        op.alpha *= d.input_norm;
        s.terms.push_back(std::move(op));
    }
    return s;
}

/// Dense alpha * Q_1 x ... x Q_n; verification-path only.
inline Matrix operator_term_to_dense(const TensorTermOperator& t) {
    if (t.factors.size() > 13)
        throw GuardError("operator_term_to_dense: factor count exceeds size guard");
    Matrix acc(1, 1, {t.alpha});
    for (const auto& q : t.factors) acc = kron(acc, q);
    return acc;
}

inline cvector term_vector_to_dense(const TensorTermVector& t) {
    cvector acc = {t.beta};
    for (const auto& f : t.factors) acc = tensor(acc, f);
    return acc;
}

/// A_i |psi_j> = alpha beta Q_1|p_1> x ... x Q_n|p_n>, four multiply-adds per
/// factor; each product is re-normalized and the norm folded into beta.
inline TensorTermVector apply(const TensorTermOperator& a, const TensorTermVector& psi) {
    if (a.factors.size() != psi.factors.size())
        throw std::invalid_argument("apply: factor count mismatch");
    TensorTermVector out;
    out.beta = a.alpha * psi.beta;
    out.factors.resize(a.factors.size());
    for (std::size_t k = 0; k < a.factors.size(); ++k) {
        const Matrix& q = a.factors[k];
        const cvector& p = psi.factors[k];
        cvector w = {q(0, 0) * p[0] + q(0, 1) * p[1], q(1, 0) * p[0] + q(1, 1) * p[1]};
        const double nrm = norm2(w);
        if (nrm <= 1e-300) {
            out.beta = 0.0;
            for (auto& f : out.factors) f = {1.0, 0.0};
            return out;
        }
        w[0] /= nrm;
        w[1] /= nrm;
        out.beta *= nrm;
        out.factors[k] = std::move(w);
    }
    return out;
}

/// Single entry of (sum_i A_i)|psi> in O(r n) arithmetic; flops counts the
/// complex multiply-adds actually performed when a counter is supplied.
inline cplx entry(const OperatorSum& a, const TensorTermVector& psi, std::size_t index,
                  std::size_t* flops = nullptr) {
    const std::size_t n = psi.factors.size();
    if (index >= (std::size_t{1} << n)) throw std::invalid_argument("entry: index out of range");
    cplx total = 0.0;
    for (const auto& term : a.terms) {
        if (term.factors.size() != n)
            throw std::invalid_argument("entry: factor count mismatch");
        cplx prod = term.alpha * psi.beta;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t b = (index >> (n - 1 - k)) & 1u;
            const Matrix& q = term.factors[k];
            prod *= q(b, 0) * psi.factors[k][0] + q(b, 1) * psi.factors[k][1];
            if (flops != nullptr) *flops += 3;
        }
        total += prod;
    }
    return total;
}

namespace detail {

// in-place contraction of the 2x2 factor acting on qubit k (MSB first)
inline void contract_factor(cvector& v, const Matrix& q, std::size_t k, std::size_t n) {
    const std::size_t stride = std::size_t{1} << (n - 1 - k);
    for (std::size_t base = 0; base < v.size(); base += 2 * stride) {
        for (std::size_t off = 0; off < stride; ++off) {
            const cplx a = v[base + off];
            const cplx b = v[base + off + stride];
            v[base + off] = q(0, 0) * a + q(0, 1) * b;
            v[base + off + stride] = q(1, 0) * a + q(1, 1) * b;
        }
    }
}

}  // namespace detail

/// Dense (sum_i A_i) psi via successive 2x2 contractions, O(r n 2^n);
/// the dense operator matrix is never formed.
inline cvector sum_apply(const OperatorSum& a, const cvector& psi) {
    const std::size_t dim = psi.size();
    if (!is_power_of(dim, 2)) throw std::invalid_argument("sum_apply: dim not a power of 2");
    const std::size_t n = ilog2(dim);
    cvector out(dim, cplx{});
    for (const auto& term : a.terms) {
        if (term.factors.size() != n)
            throw std::invalid_argument("sum_apply: factor count mismatch");
        cvector cur = psi;
        for (std::size_t k = 0; k < n; ++k) detail::contract_factor(cur, term.factors[k], k, n);
        for (std::size_t i = 0; i < dim; ++i) out[i] += term.alpha * cur[i];
    }
    return out;
}

inline cplx det2(const Matrix& q) { return q(0, 0) * q(1, 1) - q(0, 1) * q(1, 0); }

/// (alpha Q_1 x ... x Q_n)^-1 = alpha^-1 Q_1^-1 x ... x Q_n^-1, adjugate
/// closed form per factor.  Rank-1 factors (every VECTOR-mode path) fail here.
inline TensorTermOperator invert_single_term(const TensorTermOperator& a) {
    if (std::abs(a.alpha) <= 1e-12)
        throw std::invalid_argument("invert_single_term: coefficient is (near) zero");
    TensorTermOperator out;
    out.alpha = 1.0 / a.alpha;
    out.factors.reserve(a.factors.size());
    for (std::size_t k = 0; k < a.factors.size(); ++k) {
        const Matrix& q = a.factors[k];
        const cplx d = det2(q);
        if (std::abs(d) <= 1e-12)
            throw std::invalid_argument("invert_single_term: singular factor at index " +
                                        std::to_string(k));
        Matrix inv(2, 2);
        inv(0, 0) = q(1, 1) / d;
        inv(0, 1) = -q(0, 1) / d;
        inv(1, 0) = -q(1, 0) / d;
        inv(1, 1) = q(0, 0) / d;
        out.factors.push_back(std::move(inv));
    }
    return out;
}

struct UnitaryPair {
    Matrix u_plus;
    Matrix u_minus;
    double scale = 0.0;  // largest singular value; q = scale*(u_plus+u_minus)/2
};

/// q = scale (U+ + U-)/2 with both U unitary: SVD q = V S W^dag, divide the
/// singular values by the largest, and lift each s' to s' +- i sqrt(1-s'^2).
inline UnitaryPair split_into_unitaries(const Matrix& q) {
    if (q.rows != 2 || q.cols != 2) throw std::invalid_argument("split_into_unitaries: need 2x2");
    if (frobenius(q) == 0.0) throw std::invalid_argument("split_into_unitaries: zero matrix");

    const SmallSvd svd = small_row_svd(q);
    // rows of W^dag; complete the basis when rank deficient
    cvector w0 = svd.has_right[0] ? svd.right[0] : cvector{1.0, 0.0};
    cvector w1 = svd.has_right[1] ? svd.right[1]
                                  : cvector{-std::conj(w0[1]), std::conj(w0[0])};

    UnitaryPair out;
    out.scale = svd.sigmas[0];
    const double s0 = 1.0;
    const double s1 = svd.sigmas[1] / out.scale;
    const cplx d0p(s0, std::sqrt(std::max(0.0, 1.0 - s0 * s0)));
    const cplx d1p(s1, std::sqrt(std::max(0.0, 1.0 - s1 * s1)));

    auto build = [&](cplx e0, cplx e1) {
        Matrix u(2, 2);
        for (std::size_t r = 0; r < 2; ++r)
            for (std::size_t c = 0; c < 2; ++c)
                u(r, c) = svd.left[0][r] * e0 * w0[c] + svd.left[1][r] * e1 * w1[c];
        return u;
    };
    out.u_plus = build(d0p, d1p);
    out.u_minus = build(std::conj(d0p), std::conj(d1p));
    return out;
}

/// Rewrite a term sum so every factor is unitary: each non-unitary Q becomes
/// scale*(U+ + U-)/2, doubling the term count per affected factor.
inline OperatorSum expand_to_unitaries(const OperatorSum& sum, double tol = 1e-10) {
    auto is_unitary = [tol](const Matrix& q) {
        const Matrix p = matmul(dagger(q), q);
        return std::abs(p(0, 0) - 1.0) <= tol && std::abs(p(0, 1)) <= tol &&
               std::abs(p(1, 1) - 1.0) <= tol;
    };
    OperatorSum out;
    for (const auto& term : sum.terms) {
        std::vector<TensorTermOperator> pending = {term};
        for (std::size_t k = 0; k < term.factors.size(); ++k) {
            if (is_unitary(term.factors[k])) continue;
            const UnitaryPair pair = split_into_unitaries(term.factors[k]);
            std::vector<TensorTermOperator> next;
            next.reserve(pending.size() * 2);
            for (const auto& p : pending) {
                TensorTermOperator a = p, b = p;
                a.alpha *= pair.scale / 2.0;
                b.alpha *= pair.scale / 2.0;
                a.factors[k] = pair.u_plus;
                b.factors[k] = pair.u_minus;
                next.push_back(std::move(a));
                next.push_back(std::move(b));
            }
            pending = std::move(next);
        }
        for (auto& p : pending) out.terms.push_back(std::move(p));
    }
    return out;
}

}  // namespace schmidt
