#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>

#include "schmidt/circuit.hpp"

namespace schmidt {

/// SplitMix64: fixed, platform-independent 64-bit PRNG.  Same seed gives the
/// same stream everywhere; stream order is part of every generator contract.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// uniform on [0,1), 53-bit mantissa
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// standard normal via Box-Muller (one draw per call, pair cached)
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * M_PI * u2);
        have_cached_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    /// exponential, scale 1, inverse CDF
    double exponential() {
        double u = uniform();
        while (u >= 1.0) u = uniform();
        return -std::log(1.0 - u);
    }

    /// Poisson, lambda = 1, Knuth multiplication method
    double poisson() {
        const double limit = std::exp(-1.0);
        double p = 1.0;
        std::uint64_t k = 0;
        do {
            ++k;
            p *= uniform();
        } while (p > limit);
        return static_cast<double>(k - 1);
    }

private:
    bool have_cached_ = false;
    double cached_ = 0.0;
};

enum class DistributionKind { UNIFORM, NORMAL, EXPONENTIAL, POISSON };

inline double draw(Rng& rng, DistributionKind kind) {
    switch (kind) {
        case DistributionKind::UNIFORM: return rng.uniform();
        case DistributionKind::NORMAL: return rng.normal();
        case DistributionKind::EXPONENTIAL: return rng.exponential();
        case DistributionKind::POISSON: return rng.poisson();
    }
    return 0.0;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, DistributionKind kind,
                            Rng& rng) {
    Matrix m(rows, cols);
    for (auto& z : m.data) z = draw(rng, kind);  // row-major draw order
    return m;
}

/// G = X^dag X (plain X^T X for real data); Hermitian positive semi-definite.
inline Matrix gram(const Matrix& x) {
    Matrix g(x.cols, x.cols);
    for (std::size_t i = 0; i < x.cols; ++i)
        for (std::size_t j = i; j < x.cols; ++j) {
            cplx s = 0;
            for (std::size_t r = 0; r < x.rows; ++r) s += std::conj(x(r, i)) * x(r, j);
            g(i, j) = s;
            g(j, i) = std::conj(s);
        }
    for (std::size_t i = 0; i < x.cols; ++i) g(i, i) = cplx(g(i, i).real(), 0.0);
    return g;
}

inline Matrix symmetrize(const Matrix& x) {
    if (x.rows != x.cols) throw std::invalid_argument("symmetrize: matrix not square");
    Matrix out(x.rows, x.cols);
    for (std::size_t r = 0; r < x.rows; ++r)
        for (std::size_t c = 0; c < x.cols; ++c) out(r, c) = x(r, c) + x(c, r);
    return out;
}

/// QFT(j,k) = omega^{jk} / sqrt(N), omega = e^{2 pi i / N}, N = 2^n.
inline Matrix qft_matrix(std::size_t n_qubits) {
    if (n_qubits < 1 || n_qubits > 12)
        throw GuardError("qft_matrix: qubit count out of [1,12]");
    const std::size_t dim = std::size_t{1} << n_qubits;
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(dim));
    Matrix m(dim, dim);
    for (std::size_t j = 0; j < dim; ++j)
        for (std::size_t k = 0; k < dim; ++k) {
            // reduce the exponent mod N before evaluating the phase
            const std::size_t e = (j * k) % dim;
            const double ang = 2.0 * M_PI * static_cast<double>(e) / static_cast<double>(dim);
            m(j, k) = inv_sqrt * cplx(std::cos(ang), std::sin(ang));
        }
    return m;
}

struct RingSpec {
    double inner = 0.0;  // radii as fractions of side/2
    double outer = 0.0;
};

/// Concentric-rings test image: pixel = 1 + noise inside any annulus, 0
/// outside.  Distances measured from the image center in units of side/2.
inline Matrix rings_image(std::size_t side, const std::vector<RingSpec>& radii,
                          double noise_std, Rng& rng) {
    if (side < 8 || !is_power_of(side, 2))
        throw std::invalid_argument("rings_image: side must be a power of two >= 8");
    if (radii.empty()) throw std::invalid_argument("rings_image: empty radii");
    const double half = static_cast<double>(side) / 2.0;
    const double cx = (static_cast<double>(side) - 1.0) / 2.0;
    Matrix img(side, side);
    for (std::size_t r = 0; r < side; ++r)
        for (std::size_t c = 0; c < side; ++c) {
            const double noise = rng.normal() * noise_std;  // one draw per pixel
            const double dr = (static_cast<double>(r) - cx) / half;
            const double dc = (static_cast<double>(c) - cx) / half;
            const double dist = std::sqrt(dr * dr + dc * dc);
            bool inside = false;
            for (const auto& ring : radii)
                if (dist >= ring.inner && dist <= ring.outer) { inside = true; break; }
            img(r, c) = inside ? 1.0 + noise : 0.0;
        }
    return img;
}

inline std::vector<RingSpec> default_rings() { return {{0.35, 0.45}, {0.75, 0.85}}; }

struct TfimSpec {
    std::size_t n = 2;       // qubit count
    double h = 0.1;          // transverse field, applied on every site
    double j = 0.5;          // coupling
    std::size_t c = 2;       // open chain over the first c qubits: c-1 bonds
    bool ring = false;       // close the chain: bond (c-1, 0) added when c >= 3
    bool random_fields = false;  // per-site h_i, per-bond J_i from NORMAL
    std::uint64_t seed = 0;
};

/// H = h sum_i sigma_x^i + J sum_bonds sigma_z^i sigma_z^j, dense Kronecker
/// assembly of Pauli strings. Bonds run over the open chain 0-1, ..., (c-2)-(c-1);
/// with ring set and c >= 3 the closing bond (c-1)-0 is added as well.
inline Matrix tfim_hamiltonian(const TfimSpec& spec) {
    if (spec.n < 1 || spec.n > 10) throw GuardError("tfim: n out of [1,10]");
    if (spec.c < 1 || spec.c > spec.n) throw std::invalid_argument("tfim: c out of [1,n]");
    const std::size_t dim = std::size_t{1} << spec.n;
    Matrix h(dim, dim);
    Rng rng(spec.seed);

    // sigma_x^i flips bit i; sigma_z^i sigma_z^{i+1} is diagonal
    for (std::size_t site = 0; site < spec.n; ++site) {
        const double hi = spec.random_fields ? spec.h * rng.normal() : spec.h;
        const std::size_t bit = std::size_t{1} << (spec.n - 1 - site);
        for (std::size_t idx = 0; idx < dim; ++idx) h(idx, idx ^ bit) += hi;
    }
    const std::size_t n_bonds = (spec.c >= 2) ? (spec.ring && spec.c >= 3 ? spec.c : spec.c - 1) : 0;
    for (std::size_t bond = 0; bond < n_bonds; ++bond) {
        const double ji = spec.random_fields ? spec.j * rng.normal() : spec.j;
        const std::size_t s1 = bond;
        const std::size_t s2 = (bond + 1) % spec.c;  // wraps only for the closing bond
        const std::size_t b1 = std::size_t{1} << (spec.n - 1 - s1);
        const std::size_t b2 = std::size_t{1} << (spec.n - 1 - s2);
        for (std::size_t idx = 0; idx < dim; ++idx) {
            const double z1 = (idx & b1) ? -1.0 : 1.0;
            const double z2 = (idx & b2) ? -1.0 : 1.0;
            h(idx, idx) += ji * z1 * z2;
        }
    }
    return h;
}

struct VqcSpec {
    std::size_t n = 4;       // even qubit count
    std::size_t depth = 4;   // multiple of 4
    std::uint64_t seed = 0;
};

/// Layered Ry / controlled-Ry circuit; one depth-4 block is
/// [Ry all] [CRy 2k->2k+1] [Ry all] [CRy 2k+1->2k+2], angles drawn NORMAL.
inline CircuitDescription vqc_build(const VqcSpec& spec) {
    if (spec.n < 2 || spec.n % 2 != 0)
        throw std::invalid_argument("vqc_build: qubit count must be even and >= 2");
    if (spec.depth == 0 || spec.depth % 4 != 0)
        throw std::invalid_argument("vqc_build: depth must be a positive multiple of 4");

    CircuitDescription c;
    c.n_qubits = spec.n;
    Rng rng(spec.seed);
    auto ry = [&](std::size_t q) {
        Gate g;
        g.kind = GateKind::RY;
        g.target = q;
        g.theta = rng.normal();
        c.gates.push_back(g);
    };
    auto cry = [&](std::size_t ctrl, std::size_t tgt) {
        Gate g;
        g.kind = GateKind::CRY;
        g.target = tgt;
        g.theta = rng.normal();
        g.controls.push_back({ctrl, 1});
        c.gates.push_back(g);
    };
    const std::size_t blocks = spec.depth / 4;
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t q = 0; q < spec.n; ++q) ry(q);
        for (std::size_t k = 0; 2 * k + 1 < spec.n; ++k) cry(2 * k, 2 * k + 1);
        for (std::size_t q = 0; q < spec.n; ++q) ry(q);
        for (std::size_t k = 0; 2 * k + 2 < spec.n; ++k) cry(2 * k + 1, 2 * k + 2);
    }
    return c;
}

struct CsvOptions {
    bool has_header = false;
    std::size_t take_rows = 0;  // 0 = all
    bool normalize = false;     // scale entries by the largest |entry|
};

inline Matrix load_csv_matrix(std::istream& is, const CsvOptions& opt = {}) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t ln = 0;
    bool skipped_header = !opt.has_header;
    while (std::getline(is, line)) {
        ++ln;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (!skipped_header) {
            skipped_header = true;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                row.push_back(v);
            } catch (const std::exception&) {
                throw std::runtime_error("CSV parse error at line " + std::to_string(ln) +
                                         ": bad cell '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("CSV parse error at line " + std::to_string(ln) +
                                     ": ragged row");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("CSV parse error: empty file");
    if (opt.take_rows > rows.size())
        throw std::runtime_error("CSV: take_rows exceeds available rows (" +
                                 std::to_string(rows.size()) + ")");
    const std::size_t nrows = opt.take_rows == 0 ? rows.size() : opt.take_rows;

    Matrix m(nrows, rows.front().size());
    for (std::size_t r = 0; r < nrows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = rows[r][c];
    if (opt.normalize) {
        double peak = 0.0;
        for (const auto& z : m.data) peak = std::max(peak, std::abs(z));
        if (peak > 0.0)
            for (auto& z : m.data) z /= peak;
    }
    return m;
}

inline Matrix load_csv_matrix(const std::string& path, const CsvOptions& opt = {}) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_csv_matrix: cannot open " + path);
    return load_csv_matrix(is, opt);
}

}  // namespace schmidt
