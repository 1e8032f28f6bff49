#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "schmidt/circuit.hpp"
#include "schmidt/eig.hpp"
#include "schmidt/generators.hpp"
#include "schmidt/io.hpp"
#include "schmidt/report.hpp"
#include "schmidt/term_algebra.hpp"
#include "schmidt/tree.hpp"

namespace {

using namespace schmidt;

DistributionKind parse_dist(const std::string& s) {
    if (s == "uniform") return DistributionKind::UNIFORM;
    if (s == "normal") return DistributionKind::NORMAL;
    if (s == "exponential") return DistributionKind::EXPONENTIAL;
    if (s == "poisson") return DistributionKind::POISSON;
    throw CLI::ValidationError("--dist", "unknown distribution '" + s + "'");
}

void write_matrix_file(const Matrix& m, const std::string& path, bool binary) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw std::runtime_error("cannot open " + path);
    if (binary)
        io::write_matrix_binary(m, os);
    else
        io::write_matrix_text(m, os);
}

cvector load_vector(const std::string& path, std::size_t* rows = nullptr,
                    std::size_t* cols = nullptr) {
    const io::LoadedData data = io::read_data(path);
    if (data.vector) {
        if (rows) *rows = 0;
        return *data.vector;
    }
    if (rows) *rows = data.matrix->rows;
    if (cols) *cols = data.matrix->cols;
    return vec(*data.matrix);
}

int run(int argc, char** argv) {
    CLI::App app{"Tensor-term approximation of vectors and operators via successive "
                 "Schmidt decompositions"};
    app.require_subcommand(1);
    // long-form help only; the short -h would collide with the tfim field flag
    app.set_help_flag("--help", "print help");

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "generate an input matrix");
    gen->set_help_flag("--help", "print help");
    std::string gen_kind, gen_out = "out.mat", gen_dist = "uniform", gen_circuit_out;
    std::size_t gen_qubits = 3, gen_rows = 16, gen_cols = 16, gen_side = 128;
    std::size_t gen_n = 4, gen_depth = 4, gen_c = 0;
    double gen_h = 0.1, gen_J = 0.5, gen_noise = 0.05;
    std::uint64_t gen_seed = 0;
    bool gen_binary = false, gen_ring = false, gen_random_fields = false, gen_gram = false;
    gen->add_option("kind", gen_kind, "qft|tfim|vqc|gram|rings|random")->required();
    gen->add_option("--out", gen_out, "output matrix file");
    gen->add_flag("--binary", gen_binary, "write the CMATB binary format");
    gen->add_option("--qubits", gen_qubits, "qft: matrix qubit count");
    gen->add_option("--rows", gen_rows, "random/gram: data rows");
    gen->add_option("--cols", gen_cols, "random/gram: data cols");
    gen->add_option("--dist", gen_dist, "uniform|normal|exponential|poisson");
    gen->add_option("--seed", gen_seed, "PRNG seed");
    gen->add_option("--n", gen_n, "tfim/vqc: qubit count");
    gen->add_option("--h", gen_h, "tfim: transverse field");
    gen->add_option("--J", gen_J, "tfim: coupling");
    gen->add_option("--c", gen_c, "tfim: number of coupled qubits (default n)");
    gen->add_flag("--ring", gen_ring, "tfim: close the coupling chain into a ring");
    gen->add_flag("--random-fields", gen_random_fields, "tfim: draw per-site/bond parameters");
    gen->add_option("--depth", gen_depth, "vqc: circuit depth (multiple of 4)");
    gen->add_option("--circuit-out", gen_circuit_out, "vqc: also export the gate list");
    gen->add_option("--side", gen_side, "rings: image side (power of 2)");
    gen->add_option("--noise", gen_noise, "rings: noise std");
    gen->add_flag("--gram", gen_gram, "random: emit the Gram matrix of the sample");

    // ---- decompose ----
    auto* dec = app.add_subcommand("decompose", "run the Schmidt recursion tree");
    std::string dec_in, dec_mode = "vector", dec_out = "decomp";
    double dec_prob = -1.0, dec_coeff = -1.0;
    bool dec_gap = false, dec_midpoint = false;
    std::size_t dec_bins = 40;
    unsigned dec_threads = 1;
    dec->add_option("input", dec_in, "matrix or vector file")->required();
    dec->add_option("--mode", dec_mode, "vector|operator");
    dec->add_option("--cutoff-prob", dec_prob, "prune when coefficient^2 < value");
    dec->add_option("--cutoff-coeff", dec_coeff, "prune when coefficient < value");
    dec->add_flag("--gap-cutoff", dec_gap, "pick the cutoff at the largest log10 gap");
    dec->add_flag("--midpoint-cutoff", dec_midpoint,
                  "pick the geometric mean of the extreme coefficients");
    dec->add_option("--bins", dec_bins, "histogram bins");
    dec->add_option("--threads", dec_threads, "worker threads");
    dec->add_option("--out", dec_out, "output path prefix");

    // ---- reconstruct ----
    auto* rec = app.add_subcommand("reconstruct", "sum the kept terms back into a dense object");
    std::string rec_in, rec_out = "reconstructed.mat";
    bool rec_binary = false;
    rec->add_option("terms", rec_in, "TERMS file")->required();
    rec->add_option("--out", rec_out, "output file");
    rec->add_flag("--binary", rec_binary, "write CMATB");

    // ---- apply ----
    auto* app_cmd = app.add_subcommand("apply", "apply an operator term sum to a vector");
    std::string apply_terms, apply_vec, apply_out = "applied.mat";
    app_cmd->add_option("terms", apply_terms, "operator TERMS file")->required();
    app_cmd->add_option("vector", apply_vec, "vector file (CVEC or 1-column CMAT)")->required();
    app_cmd->add_option("--out", apply_out, "output vector file");

    // ---- entry ----
    auto* ent = app.add_subcommand("entry", "single entry of (sum A_i)|psi> in O(rn)");
    std::string entry_terms;
    std::size_t entry_index = 0, entry_basis = 0;
    ent->add_option("terms", entry_terms, "operator TERMS file")->required();
    ent->add_option("--index", entry_index, "output entry index")->required();
    ent->add_option("--psi-basis", entry_basis, "basis-state index for |psi>");

    // ---- invert ----
    auto* inv = app.add_subcommand("invert", "invert a single tensor term");
    std::string inv_terms, inv_out = "inverse.terms";
    inv->add_option("terms", inv_terms, "one-term operator TERMS file")->required();
    inv->add_option("--out", inv_out, "output TERMS file");

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "synthesize an LCU circuit from a term sum");
    std::string synth_terms, synth_out = "lcu.circuit";
    bool synth_split = false;
    synth->add_option("terms", synth_terms, "operator TERMS file")->required();
    synth->add_option("--out", synth_out, "output circuit file");
    synth->add_flag("--split", synth_split, "pre-split non-unitary factors into unitary pairs");

    // ---- spectrum ----
    auto* spec = app.add_subcommand("spectrum", "true vs reconstructed eigenvalue spectrum");
    std::string spec_matrix, spec_terms, spec_out = "spectrum.csv";
    spec->add_option("matrix", spec_matrix, "original Hermitian matrix file")->required();
    spec->add_option("terms", spec_terms, "TERMS file of its decomposition")->required();
    spec->add_option("--out", spec_out, "output CSV");

    // ---- report ----
    auto* rep = app.add_subcommand("report", "replay a named experiment recipe");
    std::string rep_name, rep_out = "report_out", rep_data = "data/iris.csv";
    unsigned rep_threads = 1;
    rep->add_option("name", rep_name,
                    "gram-distributions|qft-growth|vqc-depth|tfim|rings|iris")
        ->required();
    rep->add_option("--out", rep_out, "artifact output directory");
    rep->add_option("--threads", rep_threads, "worker threads");
    rep->add_option("--data", rep_data, "iris: CSV path");

    CLI11_PARSE(app, argc, argv);

    if (*gen) {
        Matrix m;
        if (gen_kind == "qft") {
            m = qft_matrix(gen_qubits);
        } else if (gen_kind == "tfim") {
            TfimSpec s{gen_n, gen_h, gen_J, gen_c == 0 ? gen_n : gen_c, gen_ring,
                       gen_random_fields, gen_seed};
            m = tfim_hamiltonian(s);
        } else if (gen_kind == "vqc") {
            const CircuitDescription c = vqc_build({gen_n, gen_depth, gen_seed});
            if (!gen_circuit_out.empty()) export_circuit(c, gen_circuit_out);
            m = circuit_unitary(c);
        } else if (gen_kind == "gram") {
            Rng rng(gen_seed);
            m = gram(random_matrix(gen_rows, gen_cols, parse_dist(gen_dist), rng));
        } else if (gen_kind == "rings") {
            Rng rng(gen_seed);
            m = rings_image(gen_side, default_rings(), gen_noise, rng);
        } else if (gen_kind == "random") {
            Rng rng(gen_seed);
            m = random_matrix(gen_rows, gen_cols, parse_dist(gen_dist), rng);
            if (gen_gram) m = gram(m);
        } else {
            throw CLI::ValidationError("kind", "unknown generator '" + gen_kind + "'");
        }
        write_matrix_file(m, gen_out, gen_binary);
        std::cout << "wrote " << gen_out << " (" << m.rows << "x" << m.cols << ")\n";
        return 0;
    }

    if (*dec) {
        const DecompositionMode mode =
            dec_mode == "operator" ? DecompositionMode::OPERATOR : DecompositionMode::VECTOR;
        if (dec_mode != "operator" && dec_mode != "vector")
            throw CLI::ValidationError("--mode", "must be vector or operator");
        if (dec_prob >= 0.0 && dec_coeff >= 0.0)
            throw CLI::ValidationError("--cutoff-prob", "mutually exclusive with --cutoff-coeff");

        const cvector v = load_vector(dec_in);
        ThresholdSpec thr{ThresholdKind::PROBABILITY, 0.0};
        if (dec_prob >= 0.0) thr = {ThresholdKind::PROBABILITY, dec_prob};
        if (dec_coeff >= 0.0) thr = {ThresholdKind::COEFFICIENT, dec_coeff};

        const auto t0 = std::chrono::steady_clock::now();
        if (dec_gap || dec_midpoint) {
            const Decomposition full =
                decompose(v, mode, {ThresholdKind::PROBABILITY, 0.0}, dec_threads);
            const auto hist = coefficient_histogram(full, dec_bins);
            const double cutoff = suggest_cutoff(
                hist.coefficients, dec_gap ? CutoffPolicy::LARGEST_GAP : CutoffPolicy::MIDPOINT);
            thr = {ThresholdKind::COEFFICIENT, cutoff};
            std::cout << "selected cutoff coefficient " << cutoff << "\n";
        }
        const Decomposition d = decompose(v, mode, thr, dec_threads);
        const auto t1 = std::chrono::steady_clock::now();

        const DecompositionReport report = make_report(dec_in, d, v, dec_bins);
        write_report_artifacts(report, dec_out);
        io::write_terms(d, dec_out + ".terms");
        write_report(report, std::cout);
        std::cout << "wall_time_ms (non-deterministic, not part of artifacts): "
                  << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
                  << "\n";
        return 0;
    }

    if (*rec) {
        const Decomposition d = io::read_terms(rec_in);
        const cvector out = reconstruct(d);
        std::ofstream os(rec_out, rec_binary ? std::ios::binary : std::ios::out);
        if (!os) throw std::runtime_error("cannot open " + rec_out);
        if (d.mode == DecompositionMode::OPERATOR) {
            const std::size_t side = std::size_t{1} << (ilog2(out.size()) / 2);
            const Matrix m = unvec(out, side, side);
            if (rec_binary)
                io::write_matrix_binary(m, os);
            else
                io::write_matrix_text(m, os);
        } else {
            io::write_vector_text(out, os);
        }
        std::cout << "wrote " << rec_out << "\n";
        return 0;
    }

    if (*app_cmd) {
        const Decomposition d = io::read_terms(apply_terms);
        const OperatorSum sum = to_operator_sum(d);
        const cvector psi = load_vector(apply_vec);
        const cvector out = sum_apply(sum, psi);
        std::ofstream os(apply_out);
        if (!os) throw std::runtime_error("cannot open " + apply_out);
        io::write_vector_text(out, os);
        std::cout << "wrote " << apply_out << "\n";
        return 0;
    }

    if (*ent) {
        const Decomposition d = io::read_terms(entry_terms);
        const OperatorSum sum = to_operator_sum(d);
        const std::size_t n = sum.terms.empty() ? 0 : sum.terms.front().factors.size();
        const cplx z = entry(sum, basis_term(n, entry_basis), entry_index);
        std::cout << io::format_complex(z) << "\n";
        return 0;
    }

    if (*inv) {
        const Decomposition d = io::read_terms(inv_terms);
        if (d.terms.size() != 1)
            throw std::runtime_error("invert: TERMS file must contain exactly one term");
        OperatorSum sum = to_operator_sum(d);
        const TensorTermOperator inverse = invert_single_term(sum.terms[0]);
        // serialize the inverse as a one-term operator file
        Decomposition out;
        out.mode = DecompositionMode::OPERATOR;
        out.input_dim = d.input_dim;
        out.input_norm = 1.0;
        PathTerm t;
        t.coefficient = std::abs(inverse.alpha);
        const cplx phase =
            t.coefficient > 0 ? inverse.alpha / t.coefficient : cplx(1.0, 0.0);
        for (std::size_t k = 0; k < inverse.factors.size(); ++k) {
            cvector f = inverse.factors[k].data;
            if (k == 0)
                for (auto& z : f) z *= phase;
            t.factors.push_back(std::move(f));
        }
        out.kept_mass = t.coefficient * t.coefficient;
        out.terms.push_back(std::move(t));
        io::write_terms(out, inv_out);
        std::cout << "wrote " << inv_out << "\n";
        return 0;
    }

    if (*synth) {
        const Decomposition d = io::read_terms(synth_terms);
        OperatorSum sum = to_operator_sum(d);
        if (synth_split) sum = expand_to_unitaries(sum);
        const LcuCircuit lcu = lcu_synthesize(sum);
        export_circuit(lcu.circuit, synth_out);
        std::cout << "wrote " << synth_out << " (ancillas=" << lcu.n_ancilla
                  << ", gates=" << lcu.circuit.gates.size()
                  << "); postselect ancilla all-zeros\n";
        return 0;
    }

    if (*spec) {
        const io::LoadedData data = io::read_data(spec_matrix);
        if (!data.matrix) throw std::runtime_error("spectrum: input must be a matrix");
        const Matrix& h = *data.matrix;
        const Decomposition d = io::read_terms(spec_terms);
        const cvector recv = reconstruct(d);
        Matrix approx = unvec(recv, h.rows, h.cols);
        // the pruned sum of a Hermitian input is only approximately Hermitian;
        // project back before diagonalizing
        const Matrix sym = 0.5 * (approx + dagger(approx));
        const std::vector<double> true_vals = eigvals_hermitian(h);
        const std::vector<double> approx_vals = eigvals_hermitian(sym);
        std::ofstream os(spec_out);
        if (!os) throw std::runtime_error("cannot open " + spec_out);
        os << "index,lambda_true,lambda_approx\n" << std::setprecision(17);
        for (std::size_t i = 0; i < true_vals.size(); ++i)
            os << i << "," << true_vals[i] << "," << approx_vals[i] << "\n";
        std::cout << "wrote " << spec_out << "\n";
        return 0;
    }

    if (*rep) {
        if (rep_name == "gram-distributions")
            recipes::gram_distributions(rep_out, rep_threads, std::cout);
        else if (rep_name == "qft-growth")
            recipes::qft_growth(rep_out, rep_threads, std::cout);
        else if (rep_name == "vqc-depth")
            recipes::vqc_depth(rep_out, rep_threads, std::cout);
        else if (rep_name == "tfim")
            recipes::tfim(rep_out, rep_threads, std::cout);
        else if (rep_name == "rings")
            recipes::rings(rep_out, rep_threads, std::cout);
        else if (rep_name == "iris")
            recipes::iris(rep_data, rep_out, rep_threads, std::cout);
        else
            throw CLI::ValidationError("name", "unknown recipe '" + rep_name + "'");
        return 0;
    }

    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const schmidt::GuardError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
