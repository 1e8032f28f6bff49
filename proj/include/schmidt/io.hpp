#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "schmidt/tree.hpp"

namespace schmidt {
namespace io {

// complex token: `a`, `a+bi`, `a-bi`
inline std::string format_complex(cplx z) {
    std::ostringstream os;
    os << std::setprecision(17) << z.real();
    if (z.imag() != 0.0) {
        os << (z.imag() < 0.0 ? "-" : "+") << std::setprecision(17) << std::abs(z.imag()) << "i";
    }
    return os.str();
}

inline cplx parse_complex(const std::string& tok) {
    if (tok.empty()) throw std::runtime_error("empty complex token");
    if (tok.back() != 'i') {
        std::size_t used = 0;
        const double re = std::stod(tok, &used);
        if (used != tok.size()) throw std::runtime_error("bad complex token '" + tok + "'");
        return {re, 0.0};
    }
    // find the sign separating re and im (skip a leading sign and exponent signs)
    const std::string body = tok.substr(0, tok.size() - 1);
    for (std::size_t i = body.size(); i-- > 1;) {
        const char ch = body[i];
        if ((ch == '+' || ch == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            const double re = std::stod(body.substr(0, i));
            const double im = std::stod(body.substr(i));
            return {re, im};
        }
    }
    // pure imaginary `bi`
    return {0.0, std::stod(body)};
}

inline void write_matrix_text(const Matrix& m, std::ostream& os) {
    os << "CMAT " << m.rows << " " << m.cols << "\n";
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c)
            os << (c ? " " : "") << format_complex(m(r, c));
        os << "\n";
    }
}

inline void write_vector_text(const cvector& v, std::ostream& os) {
    os << "CVEC " << v.size() << "\n";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << format_complex(v[i]);
    os << "\n";
}

inline void write_matrix_binary(const Matrix& m, std::ostream& os) {
    os.write("CMATB", 5);
    const std::uint64_t r = m.rows, c = m.cols;
    os.write(reinterpret_cast<const char*>(&r), 8);
    os.write(reinterpret_cast<const char*>(&c), 8);
    for (const auto& z : m.data) {
        const double re = z.real(), im = z.imag();
        os.write(reinterpret_cast<const char*>(&re), 8);
        os.write(reinterpret_cast<const char*>(&im), 8);
    }
}

/// Either a matrix or a bare vector, depending on the file header.
struct LoadedData {
    std::optional<Matrix> matrix;
    std::optional<cvector> vector;
};

inline LoadedData read_data(std::istream& is) {
    char magic[5] = {};
    is.read(magic, 5);
    if (is.gcount() != 5) throw std::runtime_error("data file too short");
    LoadedData out;
    if (std::memcmp(magic, "CMATB", 5) == 0) {
        std::uint64_t r = 0, c = 0;
        is.read(reinterpret_cast<char*>(&r), 8);
        is.read(reinterpret_cast<char*>(&c), 8);
        if (!is) throw std::runtime_error("CMATB: truncated header");
        Matrix m(r, c);
        for (auto& z : m.data) {
            double re, im;
            is.read(reinterpret_cast<char*>(&re), 8);
            is.read(reinterpret_cast<char*>(&im), 8);
            if (!is) throw std::runtime_error("CMATB: truncated payload");
            z = cplx(re, im);
        }
        out.matrix = std::move(m);
        return out;
    }
    std::string head(magic, 5);
    if (head == "CMAT ") {
        std::size_t rows, cols;
        if (!(is >> rows >> cols)) throw std::runtime_error("CMAT: bad header");
        Matrix m(rows, cols);
        std::string tok;
        for (auto& z : m.data) {
            if (!(is >> tok)) throw std::runtime_error("CMAT: truncated payload");
            z = parse_complex(tok);
        }
        out.matrix = std::move(m);
        return out;
    }
    if (head == "CVEC ") {
        std::size_t dim;
        if (!(is >> dim)) throw std::runtime_error("CVEC: bad header");
        cvector v(dim);
        std::string tok;
        for (auto& z : v) {
            if (!(is >> tok)) throw std::runtime_error("CVEC: truncated payload");
            z = parse_complex(tok);
        }
        out.vector = std::move(v);
        return out;
    }
    throw std::runtime_error("unrecognized data file header");
}

inline LoadedData read_data(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_data(is);
}

inline void write_terms(const Decomposition& d, std::ostream& os) {
    os << "SCHMIDT-TERMS mode="
       << (d.mode == DecompositionMode::VECTOR ? "vector" : "operator")
       << " factors=" << (d.terms.empty() ? 0 : d.terms.front().factors.size())
       << " terms=" << d.terms.size() << " norm=" << std::setprecision(17) << d.input_norm
       << "\n";
    for (const auto& t : d.terms) {
        os << format_complex(t.coefficient);
        for (const auto& f : t.factors)
            for (const auto& z : f) os << " " << format_complex(z);
        os << " # " << t.path_id << "\n";
    }
}

inline void write_terms(const Decomposition& d, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_terms(d, os);
}

inline Decomposition read_terms(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("TERMS: empty file");
    std::istringstream hs(line);
    std::string tag;
    hs >> tag;
    if (tag != "SCHMIDT-TERMS") throw std::runtime_error("TERMS: bad header");
    Decomposition d;
    std::size_t factors = 0, terms = 0;
    std::string kv;
    while (hs >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::runtime_error("TERMS: bad header field " + kv);
        const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
        if (key == "mode")
            d.mode = (val == "operator") ? DecompositionMode::OPERATOR
                                         : DecompositionMode::VECTOR;
        else if (key == "factors")
            factors = std::stoul(val);
        else if (key == "terms")
            terms = std::stoul(val);
        else if (key == "norm")
            d.input_norm = std::stod(val);
    }
    const std::size_t fdim = d.mode == DecompositionMode::VECTOR ? 2 : 4;
    d.input_dim = 1;
    for (std::size_t i = 0; i < factors; ++i) d.input_dim *= fdim;

    std::size_t ln = 1;
    while (std::getline(is, line)) {
        ++ln;
        std::string payload = line;
        std::string path_id;
        const auto hash = payload.find('#');
        if (hash != std::string::npos) {
            std::istringstream ps(payload.substr(hash + 1));
            ps >> path_id;
            payload.erase(hash);
        }
        std::istringstream ss(payload);
        std::string tok;
        if (!(ss >> tok)) continue;
        PathTerm t;
        t.coefficient = parse_complex(tok).real();
        t.path_id = path_id;
        t.factors.resize(factors);
        for (auto& f : t.factors) {
            f.resize(fdim);
            for (auto& z : f) {
                if (!(ss >> tok))
                    throw std::runtime_error("TERMS: truncated term at line " +
                                             std::to_string(ln));
                z = parse_complex(tok);
            }
        }
        d.terms.push_back(std::move(t));
    }
    if (d.terms.size() != terms)
        throw std::runtime_error("TERMS: term count mismatch with header");
    for (const auto& t : d.terms) d.kept_mass += t.coefficient * t.coefficient;
    d.pruned_mass = std::max(0.0, 1.0 - d.kept_mass);
    return d;
}

inline Decomposition read_terms(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_terms(is);
}

inline void write_histogram_csv(const CoefficientHistogram& h, std::ostream& os) {
    os << "bin_low,bin_high,count\n";
    os << std::setprecision(17);
    for (const auto& row : h.rows)
        os << row.bin_low << "," << row.bin_high << "," << row.count << "\n";
}

inline void write_coefficients_csv(const CoefficientHistogram& h, std::ostream& os) {
    os << "coefficient\n";
    os << std::setprecision(17);
    for (double c : h.coefficients) os << c << "\n";
}

}  // namespace io
}  // namespace schmidt
