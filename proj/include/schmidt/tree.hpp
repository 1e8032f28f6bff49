#pragma once

#include <algorithm>
#include <atomic>
#include <future>
#include <string>
#include <thread>

#include "schmidt/svd.hpp"

namespace schmidt {

/// VECTOR peels one qubit per level (binary tree).  OPERATOR works on a
/// vectorized square matrix whose index bits are interleaved to
/// (r1 c1 r2 c2 ...) and peels a (row-bit, column-bit) pair per level
/// (4-way tree), so leaf factors unvec to full-rank 2x2 matrices.
enum class DecompositionMode { VECTOR, OPERATOR };

enum class ThresholdKind { COEFFICIENT, PROBABILITY };

struct ThresholdSpec {
    ThresholdKind kind = ThresholdKind::PROBABILITY;
    double value = 0.0;  // in [0,1]

    bool passes(double coefficient) const {
        if (kind == ThresholdKind::PROBABILITY) return coefficient * coefficient >= value;
        return coefficient >= value;
    }
};

/// One root-to-leaf path: the product of sigmas along the path and the
/// unit-norm dim-2 (VECTOR) or dim-4 (OPERATOR) factor at each level.
struct PathTerm {
    double coefficient = 0.0;
    std::vector<cvector> factors;
    std::string path_id;  // child digits from root to leaf
};

struct Decomposition {
    DecompositionMode mode = DecompositionMode::VECTOR;
    std::size_t input_dim = 0;
    double input_norm = 0.0;
    std::vector<PathTerm> terms;  // descending coefficient, ties by path_id
    double kept_mass = 0.0;
    double pruned_mass = 0.0;
    ThresholdSpec threshold;
};

namespace detail {

// (r1..rn c1..cn) -> (r1 c1 r2 c2 ... rn cn), r1 most significant
inline std::size_t interleave_index(std::size_t o, std::size_t n) {
    std::size_t p = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t rk = (o >> (2 * n - k)) & 1u;
        const std::size_t ck = (o >> (n - k)) & 1u;
        p |= rk << (2 * n - (2 * k - 1));
        p |= ck << (2 * n - 2 * k);
    }
    return p;
}

struct TreeTask {
    cvector vec;
    double coeff;
    std::string path;
    std::vector<cvector> prefix;
};

inline void expand_node(const cvector& cur, double coeff, std::string& path,
                        std::vector<cvector>& prefix, std::size_t radix,
                        const ThresholdSpec& thr, std::vector<PathTerm>& out,
                        std::vector<TreeTask>* frontier, std::size_t frontier_depth) {
    if (cur.size() == radix) {
        out.push_back({coeff, prefix, path});
        out.back().factors.push_back(cur);
        return;
    }
    if (frontier != nullptr && path.size() >= frontier_depth) {
        frontier->push_back({cur, coeff, path, prefix});
        return;
    }
    const Matrix reshaped(radix, cur.size() / radix, cur);
    const SmallSvd svd = small_row_svd(reshaped);
    for (std::size_t i = 0; i < radix; ++i) {
        if (svd.sigmas[i] <= kSigmaZeroTol || !svd.has_right[i]) continue;
        const double child = coeff * svd.sigmas[i];
        if (!thr.passes(child)) continue;
        prefix.push_back(svd.left[i]);
        path.push_back(static_cast<char>('0' + i));
        expand_node(svd.right[i], child, path, prefix, radix, thr, out, frontier,
                    frontier_depth);
        path.pop_back();
        prefix.pop_back();
    }
}

}  // namespace detail

/// Successive Schmidt decomposition with branch pruning.  Pruning during the
/// recursion is exact: every split of a unit vector has sigma <= 1, so the
/// accumulated coefficient never increases along a path.
inline Decomposition decompose(const cvector& v, DecompositionMode mode,
                               ThresholdSpec threshold, unsigned threads = 1) {
    const std::size_t radix = (mode == DecompositionMode::VECTOR) ? 2 : 4;
    if (v.size() < radix || !is_power_of(v.size(), radix))
        throw std::invalid_argument("decompose: dimension is not a power of the mode radix");
    for (const auto& z : v)
        if (!is_finite(z)) throw std::invalid_argument("decompose: non-finite entry");

    const double nrm = norm2(v);
    if (nrm == 0.0) throw std::invalid_argument("decompose: zero vector");

    cvector w(v.size());
    if (mode == DecompositionMode::OPERATOR) {
        const std::size_t n = ilog2(v.size()) / 2;
        for (std::size_t o = 0; o < v.size(); ++o)
            w[detail::interleave_index(o, n)] = v[o] / nrm;
    } else {
        for (std::size_t o = 0; o < v.size(); ++o) w[o] = v[o] / nrm;
    }

    Decomposition d;
    d.mode = mode;
    d.input_dim = v.size();
    d.input_norm = nrm;
    d.threshold = threshold;

    std::string path;
    std::vector<cvector> prefix;
    if (threads <= 1 || v.size() <= 4 * radix) {
        detail::expand_node(w, 1.0, path, prefix, radix, threshold, d.terms, nullptr, 0);
    } else {
        // serial expansion to a shallow frontier, then independent subtrees in
        // parallel; per-path arithmetic is identical either way, and the final
        // canonical sort makes the merged list thread-count independent
        const std::size_t levels = ilog2(v.size()) / ilog2(radix);
        std::size_t depth = 1;
        while ((std::size_t{1} << (depth * ilog2(radix))) < 4 * threads && depth + 1 < levels)
            ++depth;
        std::vector<detail::TreeTask> frontier;
        detail::expand_node(w, 1.0, path, prefix, radix, threshold, d.terms, &frontier, depth);

        std::vector<std::vector<PathTerm>> partial(frontier.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= frontier.size()) return;
                detail::TreeTask& t = frontier[i];
                detail::expand_node(t.vec, t.coeff, t.path, t.prefix, radix, threshold,
                                    partial[i], nullptr, 0);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        for (auto& p : partial)
            for (auto& term : p) d.terms.push_back(std::move(term));
    }

    std::sort(d.terms.begin(), d.terms.end(), [](const PathTerm& a, const PathTerm& b) {
        if (a.coefficient != b.coefficient) return a.coefficient > b.coefficient;
        return a.path_id < b.path_id;
    });
    double mass = 0.0;
    for (const auto& t : d.terms) mass += t.coefficient * t.coefficient;
    d.kept_mass = mass;
    d.pruned_mass = std::max(0.0, 1.0 - mass);
    return d;
}

/// Full tensor of one path term (in the decomposition's internal bit order),
/// expanded in place into `buf` (resized to the term's full dimension).
inline void term_tensor_into(const PathTerm& t, cvector& buf) {
    std::size_t dim = 1;
    for (const auto& f : t.factors) dim *= f.size();
    buf.resize(dim);
    buf[0] = cplx(t.coefficient, 0.0);
    std::size_t cur = 1;
    for (const auto& f : t.factors) {
        const std::size_t k = f.size();
        for (std::size_t i = cur; i-- > 0;) {
            const cplx v = buf[i];
            for (std::size_t j = k; j-- > 0;) buf[i * k + j] = v * f[j];
        }
        cur *= k;
    }
}

inline cvector term_tensor(const PathTerm& t) {
    cvector buf;
    term_tensor_into(t, buf);
    return buf;
}

/// input_norm * sum of kept terms; OPERATOR mode restores the caller's
/// (r1..rn c1..cn) index order.
inline cvector reconstruct(const Decomposition& d) {
    cvector acc(d.input_dim, cplx{});
    cvector scratch;
    for (const auto& t : d.terms) {
        term_tensor_into(t, scratch);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += scratch[i];
    }
    cvector out(d.input_dim);
    if (d.mode == DecompositionMode::OPERATOR) {
        const std::size_t n = ilog2(d.input_dim) / 2;
        for (std::size_t o = 0; o < out.size(); ++o)
            out[o] = d.input_norm * acc[detail::interleave_index(o, n)];
    } else {
        for (std::size_t o = 0; o < out.size(); ++o) out[o] = d.input_norm * acc[o];
    }
    return out;
}

struct ApproxError {
    double l2 = 0.0;
    double mse = 0.0;
};

/// Error between the normalized original and the (unnormalized) sum of kept
/// terms of the normalized decomposition.
inline ApproxError approx_error(const Decomposition& d, const cvector& original) {
    if (original.size() != d.input_dim)
        throw std::invalid_argument("approx_error: dimension mismatch");
    const double nrm = norm2(original);
    const cvector rec = reconstruct(d);
    double s = 0.0;
    for (std::size_t i = 0; i < original.size(); ++i)
        s += std::norm(original[i] / nrm - rec[i] / d.input_norm);
    ApproxError e;
    e.l2 = std::sqrt(s);
    e.mse = s / static_cast<double>(original.size());
    return e;
}

struct HistogramRow {
    double bin_low = 0.0;   // log10 coefficient
    double bin_high = 0.0;
    std::size_t count = 0;
};

struct CoefficientHistogram {
    std::vector<HistogramRow> rows;
    std::size_t zero_count = 0;
    std::vector<double> coefficients;  // descending, zeros excluded
};

inline CoefficientHistogram coefficient_histogram(const Decomposition& d, std::size_t bins) {
    if (bins == 0) throw std::invalid_argument("coefficient_histogram: bins must be positive");
    if (d.terms.empty()) throw std::invalid_argument("coefficient_histogram: no terms");

    CoefficientHistogram h;
    for (const auto& t : d.terms) {
        if (t.coefficient > 0.0)
            h.coefficients.push_back(t.coefficient);
        else
            ++h.zero_count;
    }
    std::sort(h.coefficients.begin(), h.coefficients.end(), std::greater<>());
    if (h.coefficients.empty()) return h;

    const double hi = std::log10(h.coefficients.front());
    const double lo = std::log10(h.coefficients.back());
    if (hi - lo < 1e-300) {
        h.rows.push_back({lo, hi, h.coefficients.size()});
        return h;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    h.rows.resize(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        h.rows[b].bin_low = lo + width * static_cast<double>(b);
        h.rows[b].bin_high = lo + width * static_cast<double>(b + 1);
    }
    for (double c : h.coefficients) {
        auto idx = static_cast<std::size_t>((std::log10(c) - lo) / width);
        if (idx >= bins) idx = bins - 1;
        ++h.rows[idx].count;
    }
    return h;
}

enum class CutoffPolicy { LARGEST_GAP, MIDPOINT };

/// Geometric midpoint of the largest log10 gap between adjacent distinct
/// coefficients (LARGEST_GAP), or the geometric mean of the extreme nonzero
/// coefficients (MIDPOINT).
inline double suggest_cutoff(const std::vector<double>& sorted_desc,
                             CutoffPolicy policy = CutoffPolicy::LARGEST_GAP) {
    std::vector<double> distinct;
    for (double c : sorted_desc) {
        if (c <= 0.0) continue;
        if (distinct.empty() || c < distinct.back() * (1.0 - 1e-14)) distinct.push_back(c);
    }
    if (distinct.size() < 2)
        throw std::invalid_argument("suggest_cutoff: need at least 2 distinct nonzero values");

    if (policy == CutoffPolicy::MIDPOINT)
        return std::sqrt(distinct.front() * distinct.back());

    // Values far below the largest coefficient are numerical debris; a gap
    // inside that tail would otherwise win every search. Look for the gap
    // among values above a relative floor, and when those all coincide fall
    // back to the gap where the list crosses the floor.
    const double sig_floor = distinct.front() * 1e-3;
    std::size_t n_sig = 0;
    while (n_sig < distinct.size() && distinct[n_sig] >= sig_floor) ++n_sig;

    double best_gap = -1.0;
    double mid = 0.0;
    for (std::size_t i = 0; i + 1 < n_sig; ++i) {
        const double la = std::log10(distinct[i]);
        const double lb = std::log10(distinct[i + 1]);
        if (la - lb > best_gap) {
            best_gap = la - lb;
            mid = std::pow(10.0, (la + lb) / 2.0);
        }
    }
    if (best_gap < 0.0) {
        const double la = std::log10(distinct[n_sig - 1]);
        const double lb = std::log10(distinct[n_sig]);
        mid = std::pow(10.0, (la + lb) / 2.0);
    }
    return mid;
}

/// Largest adjacent log10 gap over distinct nonzero coefficients; the
/// "clear cut-off exists" statistic used in the ring / Gram comparisons.
inline double largest_log_gap(const std::vector<double>& sorted_desc) {
    std::vector<double> distinct;
    for (double c : sorted_desc) {
        if (c <= 0.0) continue;
        if (distinct.empty() || c < distinct.back() * (1.0 - 1e-14)) distinct.push_back(c);
    }
    if (distinct.size() < 2) return 0.0;
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
        best = std::max(best, std::log10(distinct[i]) - std::log10(distinct[i + 1]));
    return best;
}

}  // namespace schmidt
