#include <catch_amalgamated.hpp>

#include "schmidt/circuit.hpp"
#include "schmidt/generators.hpp"

using namespace schmidt;

namespace {

const Matrix kI = Matrix::identity(2);
const Matrix kX(2, 2, {0.0, 1.0, 1.0, 0.0});

cvector dense_matvec(const Matrix& m, const cvector& v) {
    cvector out(m.rows, cplx{});
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) out[r] += m(r, c) * v[c];
    return out;
}

Matrix sum_dense(const OperatorSum& s) {
    Matrix acc = operator_term_to_dense(s.terms.at(0));
    for (std::size_t i = 1; i < s.terms.size(); ++i)
        acc = acc + operator_term_to_dense(s.terms[i]);
    return acc;
}

// postselected LCU output should be proportional to (sum alpha_i A_i) psi
void check_lcu(const OperatorSum& sum, const cvector& psi, double tol = 1e-8) {
    const LcuCircuit lcu = lcu_synthesize(sum);
    cvector full(std::size_t{1} << lcu.circuit.n_qubits, cplx{});
    for (std::size_t i = 0; i < psi.size(); ++i) full[i] = psi[i];
    const cvector out = simulate(lcu.circuit, full);
    const cvector post = postselect_zero_ancilla(lcu, out);

    const cvector expect = dense_matvec(sum_dense(sum), psi);
    double total = 0.0;
    for (const auto& t : sum.terms) total += std::abs(t.alpha);
    cvector scaled(expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) scaled[i] = expect[i] / total;
    REQUIRE(norm2_diff(post, scaled) <= tol);
}

}  // namespace

TEST_CASE("simulate basics") {
    {
        CircuitDescription c;
        c.n_qubits = 2;
        const cvector psi = {0.5, 0.5, 0.5, -0.5};
        REQUIRE(simulate(c, psi) == psi);
    }
    {
        CircuitDescription c;
        c.n_qubits = 1;
        Gate g;
        g.kind = GateKind::RY;
        g.target = 0;
        g.theta = M_PI;
        c.gates.push_back(g);
        const cvector out = simulate(c, {1.0, 0.0});
        REQUIRE(std::abs(out[0]) < 1e-14);
        REQUIRE(std::abs(out[1] + 1.0) < 1e-14);
    }
    {
        // open control on a qubit in |0>: gate fires; filled control: it does not
        CircuitDescription c;
        c.n_qubits = 2;
        Gate g;
        g.kind = GateKind::CRY;
        g.target = 1;
        g.theta = M_PI;
        g.controls.push_back({0, 1});
        c.gates.push_back(g);
        const cvector out = simulate(c, {1.0, 0.0, 0.0, 0.0});
        REQUIRE(std::abs(out[0] - 1.0) < 1e-14);  // control in |0>, polarity 1: no-op
        c.gates[0].controls[0].polarity = 0;
        const cvector out2 = simulate(c, {1.0, 0.0, 0.0, 0.0});
        REQUIRE(std::abs(out2[1] + 1.0) < 1e-14);
    }
    REQUIRE_THROWS_AS(simulate(CircuitDescription{1, {}}, cvector(4)), std::invalid_argument);
    {
        CircuitDescription big;
        big.n_qubits = 15;
        REQUIRE_THROWS_AS(simulate(big, cvector(1 << 15)), GuardError);
    }
}

TEST_CASE("non-unitary G1 rejected unless flagged") {
    CircuitDescription c;
    c.n_qubits = 1;
    Gate g;
    g.kind = GateKind::G1;
    g.target = 0;
    g.mat = {cplx(2.0), cplx(0.0), cplx(0.0), cplx(2.0)};
    c.gates.push_back(g);
    REQUIRE_THROWS_AS(simulate(c, {1.0, 0.0}), std::invalid_argument);
    const cvector out = simulate(c, {1.0, 0.0}, true);
    REQUIRE(std::abs(out[0] - 2.0) < 1e-14);
}

TEST_CASE("norm preservation on random unitary circuits") {
    Rng rng(3);
    for (std::size_t n : {4u, 8u, 12u}) {
        CircuitDescription c = vqc_build({n, 8, n});
        cvector psi(std::size_t{1} << n);
        for (auto& z : psi) z = cplx(rng.normal(), rng.normal());
        const double nrm = norm2(psi);
        for (auto& z : psi) z /= nrm;
        const cvector out = simulate(c, psi);
        REQUIRE(norm2(out) == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("circuit_unitary basics") {
    {
        CircuitDescription c;
        c.n_qubits = 1;
        Gate g;
        g.kind = GateKind::RY;
        g.target = 0;
        g.theta = M_PI / 2.0;
        c.gates.push_back(g);
        const Matrix u = circuit_unitary(c);
        const double v = std::cos(M_PI / 4.0);
        REQUIRE(std::abs(u(0, 0) - v) < 1e-14);
        REQUIRE(std::abs(u(0, 1) - v) < 1e-14);
        REQUIRE(std::abs(u(1, 0) + v) < 1e-14);
        REQUIRE(std::abs(u(1, 1) - v) < 1e-14);
    }
    {
        const Matrix u = circuit_unitary(vqc_build({4, 4, 5}));
        const Matrix p = matmul(transpose(u), u);
        REQUIRE(norm2_diff(vec(p), vec(Matrix::identity(16))) < 1e-10);
    }
    {
        CircuitDescription big;
        big.n_qubits = 11;
        REQUIRE_THROWS_AS(circuit_unitary(big), GuardError);
    }
}

TEST_CASE("export and parse round trip") {
    const CircuitDescription c = vqc_build({4, 8, 1});
    std::stringstream ss;
    export_circuit(c, ss);
    const CircuitDescription back = parse_circuit(ss);
    REQUIRE(back == c);
}

TEST_CASE("parse single gates and errors") {
    {
        std::istringstream is("CIRCUIT n=2\nRY 0 3.14159\n");
        const CircuitDescription c = parse_circuit(is);
        REQUIRE(c.gates.size() == 1);
        REQUIRE(c.gates[0].kind == GateKind::RY);
        REQUIRE(c.gates[0].theta == Catch::Approx(3.14159));
    }
    {
        std::istringstream is("CIRCUIT n=2\nCG1 1 0:0 1 0 0 0 0 0 1 0\n");
        const CircuitDescription c = parse_circuit(is);
        REQUIRE(c.gates[0].kind == GateKind::CG1);
        REQUIRE(c.gates[0].controls.size() == 1);
        REQUIRE(c.gates[0].controls[0].polarity == 0);
        REQUIRE(c.gates[0].mat[0] == cplx(1.0));
    }
    {
        std::istringstream is("CIRCUIT n=4\nRY 9 1.0\n");
        REQUIRE_THROWS_AS(parse_circuit(is), CircuitParseError);
    }
    {
        std::istringstream is("RY 0 1.0\n");
        REQUIRE_THROWS_AS(parse_circuit(is), CircuitParseError);
    }
    {
        std::istringstream is("CIRCUIT n=2\nFOO 0\n");
        try {
            parse_circuit(is);
            FAIL("expected parse error");
        } catch (const CircuitParseError& e) {
            REQUIRE(e.line == 2);
        }
    }
}

TEST_CASE("lcu single identity term") {
    OperatorSum sum;
    sum.terms.push_back({1.0, {kI, kI}});
    Rng rng(8);
    cvector psi(4);
    for (auto& z : psi) z = cplx(rng.normal(), rng.normal());
    const double nrm = norm2(psi);
    for (auto& z : psi) z /= nrm;
    check_lcu(sum, psi);
}

TEST_CASE("lcu bell pair from half identity plus half xx") {
    OperatorSum sum;
    sum.terms.push_back({0.5, {kI, kI}});
    sum.terms.push_back({0.5, {kX, kX}});
    const LcuCircuit lcu = lcu_synthesize(sum);
    REQUIRE(lcu.n_ancilla == 1);
    cvector full(8, cplx{});
    full[0] = 1.0;  // ancilla |0>, system |00>
    const cvector post = postselect_zero_ancilla(lcu, simulate(lcu.circuit, full));
    const double s = 0.5;  // (|00>+|11>)/2 before renormalization
    REQUIRE(std::abs(post[0] - s) < 1e-8);
    REQUIRE(std::abs(post[3] - s) < 1e-8);
    REQUIRE(std::abs(post[1]) + std::abs(post[2]) < 1e-8);
}

TEST_CASE("lcu reproduces the hadamard from its decomposition") {
    const double s = 1.0 / std::sqrt(2.0);
    const Matrix h(2, 2, {s, s, s, -s});
    const Decomposition d =
        decompose(vec(h), DecompositionMode::VECTOR, {ThresholdKind::PROBABILITY, 0.0});
    const OperatorSum raw = to_operator_sum(d);
    const OperatorSum sum = expand_to_unitaries(raw);  // rank-1 factors get split
    cvector psi = {0.8, 0.6};
    const LcuCircuit lcu = lcu_synthesize(sum);
    cvector full(std::size_t{1} << lcu.circuit.n_qubits, cplx{});
    full[0] = psi[0];
    full[1] = psi[1];
    const cvector post = postselect_zero_ancilla(lcu, simulate(lcu.circuit, full));
    const cvector expect = dense_matvec(h, psi);
    double total = 0.0;
    for (const auto& t : sum.terms) total += std::abs(t.alpha);
    for (std::size_t i = 0; i < 2; ++i)
        REQUIRE(std::abs(post[i] - expect[i] / total) < 1e-8);
}

TEST_CASE("lcu random unitary-factor sums") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed + 70);
        const std::size_t r = 1 + seed % 4;
        const std::size_t n = 1 + seed % 3;
        OperatorSum sum;
        for (std::size_t i = 0; i < r; ++i) {
            TensorTermOperator t;
            t.alpha = cplx(rng.normal(), rng.normal());
            for (std::size_t k = 0; k < n; ++k) {
                const double th = rng.normal();
                const auto m = ry_matrix(th);
                t.factors.push_back(Matrix(2, 2, {m[0], m[1], m[2], m[3]}));
            }
            sum.terms.push_back(std::move(t));
        }
        cvector psi(std::size_t{1} << n);
        for (auto& z : psi) z = cplx(rng.normal(), rng.normal());
        const double nrm = norm2(psi);
        for (auto& z : psi) z /= nrm;
        check_lcu(sum, psi);
    }
}

TEST_CASE("lcu rejects non-unitary factors and empty sums") {
    OperatorSum bad;
    bad.terms.push_back({1.0, {Matrix(2, 2, {1.0, 0.0, 0.0, 0.0})}});
    REQUIRE_THROWS_WITH(lcu_synthesize(bad),
                        Catch::Matchers::ContainsSubstring("split_into_unitaries"));
    REQUIRE_THROWS_AS(lcu_synthesize(OperatorSum{}), std::invalid_argument);
}

TEST_CASE("lcu with a pre-split non-unitary factor") {
    Rng rng(14);
    OperatorSum sum;
    TensorTermOperator t;
    t.alpha = cplx(0.9, 0.2);
    Matrix q(2, 2);
    for (auto& z : q.data) z = cplx(rng.normal(), rng.normal());
    const auto m = ry_matrix(0.7);
    t.factors.push_back(q);  // non-unitary
    t.factors.push_back(Matrix(2, 2, {m[0], m[1], m[2], m[3]}));
    sum.terms.push_back(t);

    const OperatorSum expanded = expand_to_unitaries(sum);
    REQUIRE(expanded.terms.size() == 2);

    cvector psi(4);
    for (auto& z : psi) z = cplx(rng.normal(), rng.normal());
    const double nrm = norm2(psi);
    for (auto& z : psi) z /= nrm;

    const LcuCircuit lcu = lcu_synthesize(expanded);
    cvector full(std::size_t{1} << lcu.circuit.n_qubits, cplx{});
    for (std::size_t i = 0; i < 4; ++i) full[i] = psi[i];
    const cvector post = postselect_zero_ancilla(lcu, simulate(lcu.circuit, full));

    // compare against the original non-unitary term acting densely
    const cvector expect = dense_matvec(sum_dense(sum), psi);
    double total = 0.0;
    for (const auto& e : expanded.terms) total += std::abs(e.alpha);
    cvector scaled(4);
    for (std::size_t i = 0; i < 4; ++i) scaled[i] = expect[i] / total;
    REQUIRE(norm2_diff(post, scaled) <= 1e-8);
}
