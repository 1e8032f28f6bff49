#pragma once

#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "schmidt/term_algebra.hpp"

namespace schmidt {

enum class GateKind { RY, CRY, G1, CG1 };

struct Control {
    std::size_t qubit = 0;
    int polarity = 1;  // 1 = filled control, 0 = open control
    friend bool operator==(const Control&, const Control&) = default;
};

struct Gate {
    GateKind kind = GateKind::RY;
    std::size_t target = 0;
    std::vector<Control> controls;
    double theta = 0.0;               // RY / CRY
    std::array<cplx, 4> mat{};        // G1 / CG1, row-major

    friend bool operator==(const Gate&, const Gate&) = default;
};

struct CircuitDescription {
    std::size_t n_qubits = 0;
    std::vector<Gate> gates;

    friend bool operator==(const CircuitDescription&, const CircuitDescription&) = default;
};

// R_y(theta) = [[cos t/2, sin t/2], [-sin t/2, cos t/2]]
inline std::array<cplx, 4> ry_matrix(double theta) {
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    return {cplx(c, 0), cplx(s, 0), cplx(-s, 0), cplx(c, 0)};
}

namespace detail {

inline bool unitary2_within(const std::array<cplx, 4>& u, double tol) {
    // U^dag U == I
    const cplx a = std::conj(u[0]) * u[0] + std::conj(u[2]) * u[2];
    const cplx b = std::conj(u[0]) * u[1] + std::conj(u[2]) * u[3];
    const cplx d = std::conj(u[1]) * u[1] + std::conj(u[3]) * u[3];
    return std::abs(a - 1.0) <= tol && std::abs(b) <= tol && std::abs(d - 1.0) <= tol;
}

}  // namespace detail

/// Applies gates in list order to a state vector; qubit 0 is the most
/// significant bit of the basis index.
inline cvector simulate(const CircuitDescription& c, const cvector& initial,
                        bool allow_nonunitary = false) {
    if (c.n_qubits > 14) throw GuardError("simulate: qubit count exceeds guard");
    if (initial.size() != (std::size_t{1} << c.n_qubits))
        throw std::invalid_argument("simulate: state dimension mismatch");

    cvector state = initial;
    const std::size_t n = c.n_qubits;
    for (const auto& g : c.gates) {
        if (g.target >= n) throw std::invalid_argument("simulate: target out of range");
        std::array<cplx, 4> u;
        if (g.kind == GateKind::RY || g.kind == GateKind::CRY) {
            u = ry_matrix(g.theta);
        } else {
            u = g.mat;
            if (!allow_nonunitary && !detail::unitary2_within(u, 1e-10))
                throw std::invalid_argument("simulate: non-unitary G1 gate");
        }
        std::vector<Control> controls = g.controls;
        if (g.kind == GateKind::CRY && controls.empty())
            throw std::invalid_argument("simulate: CRY without control");
        for (const auto& ctl : controls) {
            if (ctl.qubit >= n || ctl.qubit == g.target)
                throw std::invalid_argument("simulate: bad control qubit");
        }

        const std::size_t tbit = std::size_t{1} << (n - 1 - g.target);
        for (std::size_t idx = 0; idx < state.size(); ++idx) {
            if (idx & tbit) continue;  // visit each pair once, via the target=0 member
            bool active = true;
            for (const auto& ctl : controls) {
                const std::size_t cb = (idx >> (n - 1 - ctl.qubit)) & 1u;
                if (static_cast<int>(cb) != ctl.polarity) { active = false; break; }
            }
            if (!active) continue;
            const cplx a = state[idx], b = state[idx | tbit];
            state[idx] = u[0] * a + u[1] * b;
            state[idx | tbit] = u[2] * a + u[3] * b;
        }
    }
    return state;
}

/// Full unitary, column j = circuit applied to basis state j.
inline Matrix circuit_unitary(const CircuitDescription& c, bool allow_nonunitary = false) {
    if (c.n_qubits > 10) throw GuardError("circuit_unitary: qubit count exceeds guard");
    const std::size_t dim = std::size_t{1} << c.n_qubits;
    Matrix u(dim, dim);
    for (std::size_t j = 0; j < dim; ++j) {
        cvector e(dim, cplx{});
        e[j] = 1.0;
        const cvector col = simulate(c, e, allow_nonunitary);
        for (std::size_t r = 0; r < dim; ++r) u(r, j) = col[r];
    }
    return u;
}

struct LcuCircuit {
    CircuitDescription circuit;        // ancilla qubits first, then system qubits
    std::size_t n_ancilla = 0;
    std::vector<double> prepare_amplitudes;  // length 2^n_ancilla, normalized
    // postselect: ancilla outcome all-zeros
};

/// Sum of unitary tensor terms as an ancilla-controlled circuit: prepare the
/// coefficient amplitudes on the ancillas, control each term's n factors on
/// its ancilla bit pattern, un-prepare, postselect ancilla zeros.
inline LcuCircuit lcu_synthesize(const OperatorSum& sum) {
    const std::size_t r = sum.terms.size();
    if (r == 0) throw std::invalid_argument("lcu_synthesize: empty term sum");
    const std::size_t n = sum.terms[0].factors.size();
    for (const auto& t : sum.terms) {
        if (t.factors.size() != n)
            throw std::invalid_argument("lcu_synthesize: ragged factor counts");
        for (const auto& q : t.factors) {
            std::array<cplx, 4> m{q(0, 0), q(0, 1), q(1, 0), q(1, 1)};
            if (!detail::unitary2_within(m, 1e-10))
                throw std::invalid_argument(
                    "lcu_synthesize: non-unitary factor; pre-split via split_into_unitaries");
        }
    }

    std::size_t n_anc = 0;
    while ((std::size_t{1} << n_anc) < r) ++n_anc;
    const std::size_t slots = std::size_t{1} << n_anc;

    double total = 0.0;
    for (const auto& t : sum.terms) total += std::abs(t.alpha);
    if (total <= 0.0) throw std::invalid_argument("lcu_synthesize: all coefficients zero");

    std::vector<double> amp(slots, 0.0);
    for (std::size_t i = 0; i < r; ++i) amp[i] = std::sqrt(std::abs(sum.terms[i].alpha) / total);

    LcuCircuit out;
    out.n_ancilla = n_anc;
    out.prepare_amplitudes = amp;
    out.circuit.n_qubits = n_anc + n;

    // binary-tree prepare cascade: a real rotation per ancilla, controlled on
    // the pattern of the ancillas above it
    std::vector<Gate> prepare;
    for (std::size_t k = 0; k < n_anc; ++k) {
        const std::size_t patterns = std::size_t{1} << k;
        for (std::size_t p = 0; p < patterns; ++p) {
            double m0 = 0.0, m1 = 0.0;
            const std::size_t block = slots >> (k + 1);
            for (std::size_t j = 0; j < block; ++j) {
                m0 += amp[(2 * p) * block + j] * amp[(2 * p) * block + j];
                m1 += amp[(2 * p + 1) * block + j] * amp[(2 * p + 1) * block + j];
            }
            const double mass = m0 + m1;
            if (mass <= 0.0) continue;
            const double c = std::sqrt(m0 / mass), s = std::sqrt(m1 / mass);
            Gate g;
            g.kind = (k == 0) ? GateKind::G1 : GateKind::CG1;
            g.target = k;
            g.mat = {cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0)};
            for (std::size_t j = 0; j < k; ++j)
                g.controls.push_back({j, static_cast<int>((p >> (k - 1 - j)) & 1u)});
            prepare.push_back(g);
        }
    }
    for (const auto& g : prepare) out.circuit.gates.push_back(g);

    for (std::size_t i = 0; i < r; ++i) {
        const auto& t = sum.terms[i];
        const double mag = std::abs(t.alpha);
        if (mag <= 0.0) continue;
        const cplx phase = t.alpha / mag;
        for (std::size_t k = 0; k < n; ++k) {
            Gate g;
            g.kind = (n_anc == 0) ? GateKind::G1 : GateKind::CG1;
            g.target = n_anc + k;
            const cplx scale = (k == 0) ? phase : cplx(1.0, 0.0);
            const Matrix& q = t.factors[k];
            g.mat = {scale * q(0, 0), scale * q(0, 1), scale * q(1, 0), scale * q(1, 1)};
            for (std::size_t j = 0; j < n_anc; ++j)
                g.controls.push_back({j, static_cast<int>((i >> (n_anc - 1 - j)) & 1u)});
            out.circuit.gates.push_back(g);
        }
    }

    // un-prepare: conjugate-transposed cascade in reverse order
    for (auto it = prepare.rbegin(); it != prepare.rend(); ++it) {
        Gate g = *it;
        g.mat = {std::conj(g.mat[0]), std::conj(g.mat[2]), std::conj(g.mat[1]),
                 std::conj(g.mat[3])};
        out.circuit.gates.push_back(g);
    }
    return out;
}

/// Postselect the all-zero ancilla outcome of an LCU run (no renormalization).
inline cvector postselect_zero_ancilla(const LcuCircuit& lcu, const cvector& full_state) {
    const std::size_t n_sys = lcu.circuit.n_qubits - lcu.n_ancilla;
    const std::size_t dim = std::size_t{1} << n_sys;
    cvector out(dim);
    for (std::size_t j = 0; j < dim; ++j) out[j] = full_state[j];
    return out;
}

// ---- text format: one gate per line, '#' comments ----

inline void export_circuit(const CircuitDescription& c, std::ostream& os) {
    os.precision(17);
    os << "CIRCUIT n=" << c.n_qubits << "\n";
    for (const auto& g : c.gates) {
        switch (g.kind) {
            case GateKind::RY:
                os << "RY " << g.target << " " << g.theta << "\n";
                break;
            case GateKind::CRY:
                os << "CRY " << g.controls.at(0).qubit << " " << g.target << " " << g.theta
                   << "\n";
                break;
            case GateKind::G1:
                os << "G1 " << g.target;
                for (const auto& z : g.mat) os << " " << z.real() << " " << z.imag();
                os << "\n";
                break;
            case GateKind::CG1:
                os << "CG1 " << g.target;
                for (const auto& ctl : g.controls)
                    os << " " << ctl.qubit << ":" << ctl.polarity;
                for (const auto& z : g.mat) os << " " << z.real() << " " << z.imag();
                os << "\n";
                break;
        }
    }
}

inline void export_circuit(const CircuitDescription& c, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("export_circuit: cannot open " + path);
    export_circuit(c, os);
}

struct CircuitParseError : std::runtime_error {
    std::size_t line;
    CircuitParseError(std::size_t ln, const std::string& what)
        : std::runtime_error("circuit parse error at line " + std::to_string(ln) + ": " + what),
          line(ln) {}
};

inline CircuitDescription parse_circuit(std::istream& is) {
    CircuitDescription c;
    std::string line;
    std::size_t ln = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++ln;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string tok;
        if (!(ss >> tok)) continue;

        if (!have_header) {
            if (tok != "CIRCUIT") throw CircuitParseError(ln, "expected CIRCUIT header");
            std::string nspec;
            if (!(ss >> nspec) || nspec.rfind("n=", 0) != 0)
                throw CircuitParseError(ln, "expected n=<qubits>");
            c.n_qubits = std::stoul(nspec.substr(2));
            if (c.n_qubits == 0) throw CircuitParseError(ln, "qubit count must be positive");
            have_header = true;
            continue;
        }

        Gate g;
        auto check_qubit = [&](std::size_t q) {
            if (q >= c.n_qubits) throw CircuitParseError(ln, "qubit index out of range");
        };
        auto read_mat = [&]() {
            for (auto& z : g.mat) {
                double re, im;
                if (!(ss >> re >> im)) throw CircuitParseError(ln, "expected 8 matrix floats");
                z = cplx(re, im);
            }
        };
        if (tok == "RY") {
            g.kind = GateKind::RY;
            if (!(ss >> g.target >> g.theta)) throw CircuitParseError(ln, "malformed RY");
            check_qubit(g.target);
        } else if (tok == "CRY") {
            g.kind = GateKind::CRY;
            std::size_t ctrl;
            if (!(ss >> ctrl >> g.target >> g.theta)) throw CircuitParseError(ln, "malformed CRY");
            check_qubit(ctrl);
            check_qubit(g.target);
            if (ctrl == g.target) throw CircuitParseError(ln, "control equals target");
            g.controls.push_back({ctrl, 1});
        } else if (tok == "G1") {
            g.kind = GateKind::G1;
            if (!(ss >> g.target)) throw CircuitParseError(ln, "malformed G1");
            check_qubit(g.target);
            read_mat();
        } else if (tok == "CG1") {
            g.kind = GateKind::CG1;
            if (!(ss >> g.target)) throw CircuitParseError(ln, "malformed CG1");
            check_qubit(g.target);
            std::string ctl;
            while (ss >> ctl) {
                const auto colon = ctl.find(':');
                if (colon == std::string::npos) {
                    // first matrix float; push back and read the rest
                    std::size_t pos = static_cast<std::size_t>(ss.tellg());
                    (void)pos;
                    double re = std::stod(ctl), im;
                    if (!(ss >> im)) throw CircuitParseError(ln, "expected 8 matrix floats");
                    g.mat[0] = cplx(re, im);
                    for (std::size_t i = 1; i < 4; ++i) {
                        double re2, im2;
                        if (!(ss >> re2 >> im2))
                            throw CircuitParseError(ln, "expected 8 matrix floats");
                        g.mat[i] = cplx(re2, im2);
                    }
                    break;
                }
                const std::size_t q = std::stoul(ctl.substr(0, colon));
                const int pol = std::stoi(ctl.substr(colon + 1));
                check_qubit(q);
                if (q == g.target) throw CircuitParseError(ln, "control equals target");
                if (pol != 0 && pol != 1) throw CircuitParseError(ln, "bad control polarity");
                g.controls.push_back({q, pol});
            }
        } else {
            throw CircuitParseError(ln, "unknown gate '" + tok + "'");
        }
        c.gates.push_back(std::move(g));
    }
    if (!have_header) throw CircuitParseError(ln == 0 ? 1 : ln, "missing CIRCUIT header");
    return c;
}

inline CircuitDescription parse_circuit(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("parse_circuit: cannot open " + path);
    return parse_circuit(is);
}

}  // namespace schmidt
