#include <catch_amalgamated.hpp>

#include "schmidt/core.hpp"

using namespace schmidt;

TEST_CASE("vec flattens row-major") {
    Matrix m(2, 2, {1.0, 2.0, 3.0, 4.0});
    REQUIRE(vec(m) == cvector{1.0, 2.0, 3.0, 4.0});
    REQUIRE(vec(Matrix::identity(2)) == cvector{1.0, 0.0, 0.0, 1.0});

    Matrix ket0bra1(2, 2, {0.0, 1.0, 0.0, 0.0});
    REQUIRE(vec(ket0bra1) == cvector{0.0, 1.0, 0.0, 0.0});
}

TEST_CASE("unvec inverts vec") {
    const Matrix m = unvec({1.0, 2.0, 3.0, 4.0}, 2, 2);
    REQUIRE(m(0, 0) == cplx(1.0));
    REQUIRE(m(1, 0) == cplx(3.0));
    REQUIRE(vec(unvec({1.0, 0.0, 0.0, 1.0}, 2, 2)) == vec(Matrix::identity(2)));
    REQUIRE_THROWS_AS(unvec(cvector(6), 2, 2), std::invalid_argument);
}

TEST_CASE("vec/unvec round trip property") {
    for (std::size_t rows : {1u, 3u, 4u}) {
        for (std::size_t cols : {1u, 2u, 5u}) {
            Matrix m(rows, cols);
            for (std::size_t i = 0; i < m.data.size(); ++i)
                m.data[i] = cplx(static_cast<double>(i), -static_cast<double>(i) / 3.0);
            REQUIRE(vec(unvec(vec(m), rows, cols)) == vec(m));
        }
    }
}

TEST_CASE("norm2_diff") {
    const cvector a = {1.0, 0.0};
    REQUIRE(norm2_diff(a, a) == 0.0);
    REQUIRE(norm2_diff({1.0, 0.0}, {0.0, 1.0}) == Catch::Approx(std::sqrt(2.0)));

    // elementwise oracle: (1-1/2)^2 + 3*(1/2)^2 = 1
    const cvector x = {1.0, 0.0, 0.0, 0.0};
    const cvector y = {0.5, 0.5, 0.5, 0.5};
    double oracle = 0.0;
    for (std::size_t i = 0; i < 4; ++i) oracle += std::norm(x[i] - y[i]);
    REQUIRE(norm2_diff(x, y) == Catch::Approx(std::sqrt(oracle)));
    REQUIRE(norm2_diff(x, y) == Catch::Approx(1.0));
    REQUIRE(mse_diff(x, y) == Catch::Approx(0.25));

    REQUIRE_THROWS_AS(norm2_diff({1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("kron and matmul basics") {
    const Matrix x(2, 2, {0.0, 1.0, 1.0, 0.0});
    const Matrix k = kron(x, Matrix::identity(2));
    REQUIRE(k.rows == 4);
    REQUIRE(k(0, 2) == cplx(1.0));
    REQUIRE(k(1, 3) == cplx(1.0));
    const Matrix p = matmul(x, x);
    REQUIRE(norm2_diff(vec(p), vec(Matrix::identity(2))) == 0.0);
}
