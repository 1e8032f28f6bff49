#pragma once

#include <complex>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace schmidt {

using cplx = std::complex<double>;
using cvector = std::vector<cplx>;

/// Thrown when a documented size guard is exceeded (CLI exit code 3).
struct GuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool is_finite(cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Dense row-major complex matrix. Carrier for operators, states and datasets.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    cvector data;  // length rows*cols, entry(r,c) = data[r*cols + c]

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
    Matrix(std::size_t r, std::size_t c, cvector d) : rows(r), cols(c), data(std::move(d)) {
        if (data.size() != rows * cols)
            throw std::invalid_argument("Matrix: data length != rows*cols");
    }

    cplx& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    cplx operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Matrix dagger(const Matrix& m) {
    Matrix out(m.cols, m.rows);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c)
            out(c, r) = std::conj(m(r, c));
    return out;
}

inline Matrix transpose(const Matrix& m) {
    Matrix out(m.cols, m.rows);
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c)
            out(c, r) = m(r, c);
    return out;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: inner dimensions differ");
    Matrix out(a.rows, b.cols);
    for (std::size_t r = 0; r < a.rows; ++r)
        for (std::size_t k = 0; k < a.cols; ++k) {
            const cplx arc = a(r, k);
            if (arc == cplx{}) continue;
            for (std::size_t c = 0; c < b.cols; ++c) out(r, c) += arc * b(k, c);
        }
    return out;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows * b.rows, a.cols * b.cols);
    for (std::size_t ra = 0; ra < a.rows; ++ra)
        for (std::size_t ca = 0; ca < a.cols; ++ca) {
            const cplx v = a(ra, ca);
            if (v == cplx{}) continue;
            for (std::size_t rb = 0; rb < b.rows; ++rb)
                for (std::size_t cb = 0; cb < b.cols; ++cb)
                    out(ra * b.rows + rb, ca * b.cols + cb) = v * b(rb, cb);
        }
    return out;
}

inline Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows != b.rows || a.cols != b.cols)
        throw std::invalid_argument("Matrix+: shapes differ");
    Matrix out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
    return out;
}

inline Matrix operator*(cplx s, const Matrix& m) {
    Matrix out = m;
    for (auto& z : out.data) z *= s;
    return out;
}

/// Row-based vectorization: vec(A)[r*cols + c] = A(r,c).
inline cvector vec(const Matrix& m) { return m.data; }

inline Matrix unvec(const cvector& v, std::size_t rows, std::size_t cols) {
    if (v.size() != rows * cols)
        throw std::invalid_argument("unvec: dim " + std::to_string(v.size()) +
                                    " != " + std::to_string(rows) + "x" + std::to_string(cols));
    return Matrix(rows, cols, v);
}

inline double norm2(const cvector& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

inline double norm2_diff(const cvector& a, const cvector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("norm2_diff: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s);
}

/// Mean-squared variant of the difference norm: eps^2 / dim.
inline double mse_diff(const cvector& a, const cvector& b) {
    const double e = norm2_diff(a, b);
    return e * e / static_cast<double>(a.size());
}

inline double frobenius(const Matrix& m) { return norm2(m.data); }

inline cplx inner(const cvector& a, const cvector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("inner: dimension mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline cvector tensor(const cvector& a, const cvector& b) {
    cvector out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
    return out;
}

inline bool is_power_of(std::size_t x, std::size_t radix) {
    if (x == 0) return false;
    while (x % radix == 0) x /= radix;
    return x == 1;
}

inline std::size_t ilog2(std::size_t x) {
    std::size_t n = 0;
    while (x > 1) { x >>= 1; ++n; }
    return n;
}

}  // namespace schmidt
