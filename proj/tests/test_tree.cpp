#include <catch_amalgamated.hpp>

#include "schmidt/generators.hpp"
#include "schmidt/tree.hpp"

using namespace schmidt;

namespace {

cvector random_state(std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    cvector v(dim);
    for (auto& z : v) z = rng.normal();
    const double n = norm2(v);
    for (auto& z : v) z /= n;
    return v;
}

const ThresholdSpec kNoPrune{ThresholdKind::PROBABILITY, 0.0};

}  // namespace

TEST_CASE("ghz state decomposes into its two branches") {
    const double s = 1.0 / std::sqrt(2.0);
    cvector ghz(8, cplx{});
    ghz[0] = s;
    ghz[7] = s;
    const Decomposition d = decompose(ghz, DecompositionMode::VECTOR, kNoPrune);
    REQUIRE(d.terms.size() == 2);
    for (const auto& t : d.terms) {
        REQUIRE(t.coefficient == Catch::Approx(s));
        REQUIRE(t.factors.size() == 3);
        // each factor is e0 or e1 across the whole path
        const bool is_zero = std::abs(t.factors[0][0]) > 0.5;
        for (const auto& f : t.factors) {
            REQUIRE(std::abs(f[is_zero ? 0 : 1]) == Catch::Approx(1.0));
            REQUIRE(std::abs(f[is_zero ? 1 : 0]) == Catch::Approx(0.0).margin(1e-14));
        }
    }
    REQUIRE(norm2_diff(reconstruct(d), ghz) < 1e-12);
}

TEST_CASE("product state collapses to one term") {
    cvector uniform(16, cplx(0.25, 0.0));
    const Decomposition d = decompose(uniform, DecompositionMode::VECTOR, kNoPrune);
    REQUIRE(d.terms.size() == 1);
    REQUIRE(d.terms[0].coefficient == Catch::Approx(1.0));
    const double s = 1.0 / std::sqrt(2.0);
    for (const auto& f : d.terms[0].factors) {
        REQUIRE(f[0].real() == Catch::Approx(s));
        REQUIRE(f[1].real() == Catch::Approx(s));
    }
    REQUIRE(norm2_diff(reconstruct(d), uniform) < 1e-12);
}

TEST_CASE("hadamard vector splits into two equal terms") {
    const cvector h = {0.5, 0.5, 0.5, -0.5};
    const Decomposition d = decompose(h, DecompositionMode::VECTOR, kNoPrune);
    REQUIRE(d.terms.size() == 2);
    REQUIRE(d.terms[0].coefficient == Catch::Approx(1.0 / std::sqrt(2.0)));
    REQUIRE(d.terms[1].coefficient == Catch::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("invalid inputs") {
    REQUIRE_THROWS_AS(decompose(cvector(8, cplx{}), DecompositionMode::VECTOR, kNoPrune),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(decompose(cvector(6, cplx(1.0)), DecompositionMode::VECTOR, kNoPrune),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(decompose(cvector(8, cplx(1.0)), DecompositionMode::OPERATOR, kNoPrune),
                      std::invalid_argument);
}

TEST_CASE("parseval and leaf count without pruning") {
    for (std::size_t n : {4u, 8u, 14u}) {
        const cvector v = random_state(std::size_t{1} << n, n);
        const Decomposition d = decompose(v, DecompositionMode::VECTOR, kNoPrune);
        REQUIRE(std::abs(d.kept_mass - 1.0) <= 1e-10);
        REQUIRE(d.terms.size() == (std::size_t{1} << (n - 1)));  // dim/2 leaves
        REQUIRE(norm2_diff(reconstruct(d), v) <= 1e-10);
    }
}

TEST_CASE("pruned reconstruction error equals sqrt of pruned mass") {
    const cvector v = random_state(8, 42);
    const Decomposition d =
        decompose(v, DecompositionMode::VECTOR, {ThresholdKind::PROBABILITY, 0.1});
    REQUIRE(d.pruned_mass > 0.0);
    // direct subtraction oracle
    REQUIRE(norm2_diff(reconstruct(d), v) ==
            Catch::Approx(std::sqrt(d.pruned_mass)).margin(1e-9));
}

TEST_CASE("error identity across seeds at n=10") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const cvector v = random_state(1 << 10, seed);
        const Decomposition d =
            decompose(v, DecompositionMode::VECTOR, {ThresholdKind::COEFFICIENT, 0.05});
        const ApproxError e = approx_error(d, v);
        REQUIRE(e.l2 == Catch::Approx(std::sqrt(1.0 - d.kept_mass)).margin(1e-9));
        REQUIRE(e.l2 == Catch::Approx(norm2_diff(reconstruct(d), v)).margin(1e-9));
        REQUIRE(e.mse == Catch::Approx(e.l2 * e.l2 / 1024.0));
    }
}

TEST_CASE("approx_error of the one-term hadamard keeps half the mass") {
    const cvector h = {0.5, 0.5, 0.5, -0.5};
    // prune everything but the largest term (equal sigmas: threshold above 1/sqrt2
    // keeps nothing, so post-filter the full decomposition instead)
    Decomposition d = decompose(h, DecompositionMode::VECTOR, kNoPrune);
    d.terms.resize(1);
    d.kept_mass = d.terms[0].coefficient * d.terms[0].coefficient;
    d.pruned_mass = 1.0 - d.kept_mass;
    const ApproxError e = approx_error(d, h);
    REQUIRE(e.l2 == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
}

TEST_CASE("branch pruning matches full enumeration plus filter") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const cvector v = random_state(1 << 12, seed + 31);
        for (ThresholdKind kind : {ThresholdKind::PROBABILITY, ThresholdKind::COEFFICIENT}) {
            const ThresholdSpec thr{kind, 0.01};
            const Decomposition pruned = decompose(v, DecompositionMode::VECTOR, thr);
            const Decomposition full = decompose(v, DecompositionMode::VECTOR, kNoPrune);
            std::vector<std::pair<std::string, double>> expected;
            for (const auto& t : full.terms)
                if (thr.passes(t.coefficient)) expected.push_back({t.path_id, t.coefficient});
            REQUIRE(pruned.terms.size() == expected.size());
            for (std::size_t i = 0; i < expected.size(); ++i) {
                REQUIRE(pruned.terms[i].path_id == expected[i].first);
                REQUIRE(pruned.terms[i].coefficient == expected[i].second);
            }
        }
    }
}

TEST_CASE("kept path tensors are mutually orthogonal") {
    const cvector v = random_state(64, 5);
    const Decomposition d = decompose(v, DecompositionMode::VECTOR, kNoPrune);
    for (std::size_t i = 0; i < d.terms.size(); ++i)
        for (std::size_t j = i + 1; j < d.terms.size(); ++j) {
            cvector a = term_tensor(d.terms[i]);
            cvector b = term_tensor(d.terms[j]);
            const double na = norm2(a), nb = norm2(b);
            if (na == 0.0 || nb == 0.0) continue;
            REQUIRE(std::abs(inner(a, b)) / (na * nb) <= 1e-10);
        }
}

TEST_CASE("coefficients never increase along a path") {
    // accumulated coefficient at every prefix >= the leaf coefficient
    const cvector v = random_state(256, 77);
    const Decomposition full = decompose(v, DecompositionMode::VECTOR, kNoPrune);
    for (double cut : {0.3, 0.1, 0.02}) {
        const Decomposition p =
            decompose(v, DecompositionMode::VECTOR, {ThresholdKind::COEFFICIENT, cut});
        std::size_t count = 0;
        for (const auto& t : full.terms)
            if (t.coefficient >= cut) ++count;
        REQUIRE(p.terms.size() == count);
    }
}

TEST_CASE("operator mode round trips a vectorized matrix") {
    Rng rng(9);
    Matrix m(8, 8);
    for (auto& z : m.data) z = cplx(rng.normal(), rng.normal());
    const Decomposition d = decompose(vec(m), DecompositionMode::OPERATOR, kNoPrune);
    REQUIRE(std::abs(d.kept_mass - 1.0) <= 1e-10);
    for (const auto& t : d.terms) REQUIRE(t.factors.size() == 3);
    REQUIRE(norm2_diff(reconstruct(d), vec(m)) <= 1e-10 * frobenius(m));
}

TEST_CASE("threaded decomposition is identical to serial") {
    const cvector v = random_state(1 << 12, 13);
    const Decomposition serial =
        decompose(v, DecompositionMode::VECTOR, {ThresholdKind::PROBABILITY, 1e-6}, 1);
    const Decomposition par =
        decompose(v, DecompositionMode::VECTOR, {ThresholdKind::PROBABILITY, 1e-6}, 8);
    REQUIRE(serial.terms.size() == par.terms.size());
    for (std::size_t i = 0; i < serial.terms.size(); ++i) {
        REQUIRE(serial.terms[i].coefficient == par.terms[i].coefficient);
        REQUIRE(serial.terms[i].path_id == par.terms[i].path_id);
        REQUIRE(serial.terms[i].factors == par.terms[i].factors);
    }
}

TEST_CASE("coefficient histogram") {
    cvector uniform(16, cplx(0.25, 0.0));
    const Decomposition one = decompose(uniform, DecompositionMode::VECTOR, kNoPrune);
    const auto h1 = coefficient_histogram(one, 4);
    std::size_t nonzero_bins = 0, total = 0;
    for (const auto& row : h1.rows) {
        if (row.count > 0) ++nonzero_bins;
        total += row.count;
    }
    REQUIRE(nonzero_bins == 1);
    REQUIRE(total == 1);

    const double s = 1.0 / std::sqrt(2.0);
    cvector ghz(8, cplx{});
    ghz[0] = s;
    ghz[7] = s;
    const auto h2 = coefficient_histogram(decompose(ghz, DecompositionMode::VECTOR, kNoPrune), 4);
    REQUIRE(h2.rows.size() == 1);  // all coefficients equal: single collapsed bin
    REQUIRE(h2.rows[0].count == 2);
    REQUIRE(h2.rows[0].bin_low == Catch::Approx(std::log10(s)));

    REQUIRE_THROWS_AS(coefficient_histogram(one, 0), std::invalid_argument);
}

TEST_CASE("qft coefficients show a separated large cluster") {
    const Matrix q = qft_matrix(4);  // vec dim 2^8
    const Decomposition d = decompose(vec(q), DecompositionMode::VECTOR, kNoPrune);
    const auto h = coefficient_histogram(d, 40);
    std::vector<double> logs;
    for (double c : h.coefficients) logs.push_back(std::log10(c));
    std::vector<double> gaps;
    for (std::size_t i = 0; i + 1 < logs.size(); ++i) gaps.push_back(logs[i] - logs[i + 1]);
    std::vector<double> sorted_gaps = gaps;
    std::sort(sorted_gaps.begin(), sorted_gaps.end());
    const double median = sorted_gaps[sorted_gaps.size() / 2];
    const double largest = sorted_gaps.back();
    REQUIRE(largest >= 5.0 * median);
}

TEST_CASE("suggest_cutoff") {
    const double expected = std::pow(10.0, (std::log10(0.8) + std::log10(0.001)) / 2.0);
    REQUIRE(suggest_cutoff({0.9, 0.8, 0.001}) == Catch::Approx(expected));
    REQUIRE_THROWS_AS(suggest_cutoff({0.5, 0.5, 0.5}), std::invalid_argument);
    REQUIRE(suggest_cutoff({0.9, 0.1, 0.09}, CutoffPolicy::MIDPOINT) ==
            Catch::Approx(std::sqrt(0.9 * 0.09)));

    // gaps inside the numerical-noise tail (below largest * 1e-3) are ignored
    const double mid_half = std::pow(10.0, (std::log10(1.0) + std::log10(0.5)) / 2.0);
    REQUIRE(suggest_cutoff({1.0, 0.5, 1e-9, 1e-13}) == Catch::Approx(mid_half));
    // all significant values equal: fall back to the gap crossing the floor
    REQUIRE(suggest_cutoff({1.0, 1.0, 1e-8}) == Catch::Approx(1e-4));
}
