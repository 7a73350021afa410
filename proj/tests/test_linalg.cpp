#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "lqot/error.hpp"
#include "lqot/linalg.hpp"
#include "lqot/matrix.hpp"
#include "lqot/rng.hpp"

using namespace lqot;

namespace {

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c,
                     double scale = 1.0) {
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            m(i, j) = scale * rng.uniform(-1.0, 1.0);
    return m;
}

Matrix random_spd_matrix(Rng& rng, std::size_t n) {
    const Matrix g = random_matrix(rng, n, n);
    return g * g.transpose() + 0.3 * Matrix::identity(n);
}

// Cofactor-expansion determinant, exact recursion for n <= 4.
double det_cofactor(const Matrix& a) {
    const std::size_t n = a.rows();
    if (n == 1) return a(0, 0);
    double acc = 0.0;
    double sign = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        Matrix minor(n - 1, n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::size_t cc = 0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, cc++) = a(r, c);
            }
        }
        acc += sign * a(0, j) * det_cofactor(minor);
        sign = -sign;
    }
    return acc;
}

// Truncated Taylor series; accurate for small-norm inputs.
Matrix exp_taylor(const Matrix& a, int terms = 30) {
    Matrix acc = Matrix::identity(a.rows());
    Matrix power = Matrix::identity(a.rows());
    double factorial = 1.0;
    for (int k = 1; k <= terms; ++k) {
        power = power * a;
        factorial *= k;
        acc += (1.0 / factorial) * power;
    }
    return acc;
}

}  // namespace

TEST_CASE("lu solve and inverse") {
    Rng rng(41);
    for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{6},
                          std::size_t{12}}) {
        const Matrix a = random_matrix(rng, n, n) + 2.0 * Matrix::identity(n);
        Vec b(n);
        for (double& x : b) x = rng.normal();

        const Vec x = solve(a, b);
        const Vec r = a.apply(x) - b;
        CHECK(norm2(r) <= 1e-10 * (1.0 + norm2(b)));

        const Matrix ai = inverse(a);
        CHECK((a * ai - Matrix::identity(n)).max_abs() <= 1e-10);
        CHECK((ai * a - Matrix::identity(n)).max_abs() <= 1e-10);

        const Matrix bm = random_matrix(rng, n, 3);
        const Matrix xm = solve(a, bm);
        CHECK((a * xm - bm).max_abs() <= 1e-10);
    }

    Matrix singular(2, 2);
    singular(0, 0) = 1.0;
    singular(0, 1) = 2.0;
    singular(1, 0) = 2.0;
    singular(1, 1) = 4.0;
    CHECK_THROWS_AS((void)inverse(singular), Error);
}

TEST_CASE("determinant matches cofactor expansion") {
    Rng rng(42);
    for (std::size_t n = 1; n <= 4; ++n) {
        for (int rep = 0; rep < 25; ++rep) {
            const Matrix a = random_matrix(rng, n, n, 1.5);
            const double reference = det_cofactor(a);
            CHECK(det(a) ==
                  doctest::Approx(reference).epsilon(1e-10).scale(1.0));

            const DetLog dl = log_abs_det_sign(a);
            if (std::abs(reference) > 1e-6) {
                CHECK(dl.sign == (reference > 0 ? 1 : -1));
                CHECK(dl.log_abs ==
                      doctest::Approx(std::log(std::abs(reference)))
                          .epsilon(1e-9));
            }
        }
    }
    // Exactly singular input reports sign 0.
    Matrix z(3, 3);
    z(0, 0) = 1.0;
    CHECK(log_abs_det_sign(z).sign == 0);
    CHECK(det(Matrix::identity(5)) == doctest::Approx(1.0));
}

TEST_CASE("singular values and rank") {
    Rng rng(43);
    // Known singular values: diag matrix padded into a rectangle.
    Matrix d(3, 5);
    d(0, 0) = 4.0;
    d(1, 1) = 2.5;
    d(2, 2) = 0.5;
    const auto sv = singular_values(d);
    REQUIRE(sv.size() == 3);
    CHECK(sv[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(sv[1] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(sv[2] == doctest::Approx(0.5).epsilon(1e-12));

    // Orthogonal transforms preserve singular values.
    const Matrix a = random_matrix(rng, 4, 4);
    const double theta = 0.7;
    Matrix rot = Matrix::identity(4);
    rot(0, 0) = std::cos(theta);
    rot(0, 1) = -std::sin(theta);
    rot(1, 0) = std::sin(theta);
    rot(1, 1) = std::cos(theta);
    const auto s1 = singular_values(a);
    const auto s2 = singular_values(rot * a);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(s1[i] == doctest::Approx(s2[i]).epsilon(1e-11));

    // Rank-deficient product has rank min(inner dims).
    const Matrix low = random_matrix(rng, 5, 2) * random_matrix(rng, 2, 5);
    CHECK(rank_with_tolerance(low) == 2);
    CHECK(rank_with_tolerance(Matrix::identity(6)) == 6);
}

TEST_CASE("symmetric eigendecomposition") {
    Rng rng(44);
    for (std::size_t n : {std::size_t{2}, std::size_t{5}, std::size_t{9}}) {
        const Matrix a = random_spd_matrix(rng, n);
        const SymEigen eg = sym_eigen(a);
        REQUIRE(eg.values.size() == n);
        for (std::size_t i = 0; i + 1 < n; ++i)
            CHECK(eg.values[i] <= eg.values[i + 1]);
        const Matrix reconstructed =
            eg.vectors * Matrix::diag(eg.values) * eg.vectors.transpose();
        CHECK((reconstructed - a).max_abs() <= 1e-10 * (1.0 + a.max_abs()));
        CHECK((eg.vectors.transpose() * eg.vectors - Matrix::identity(n))
                  .max_abs() <= 1e-11);
        CHECK(eg.values[0] > 0.0);
    }

    // Fixed 2x2 with known spectrum {1, 3}.
    Matrix m(2, 2);
    m(0, 0) = 2.0;
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    m(1, 1) = 2.0;
    const SymEigen eg = sym_eigen(m);
    CHECK(eg.values[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(eg.values[1] == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("matrix exponential") {
    Rng rng(45);

    // Nilpotent: exp(tau N) = I + tau N when N^2 = 0.
    Matrix nil(2, 2);
    nil(0, 1) = 3.0;
    for (double tau : {0.1, 1.0, -2.5}) {
        const Matrix e = mat_exp(tau * nil);
        CHECK(e(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(e(0, 1) == doctest::Approx(3.0 * tau).epsilon(1e-14));
        CHECK(e(1, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
        CHECK(e(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
    }

    // Rotation generator: exp maps to (cos, sin) blocks.
    Matrix rot(2, 2);
    rot(0, 1) = -1.0;
    rot(1, 0) = 1.0;
    const Matrix e = mat_exp(0.5 * rot);
    CHECK(e(0, 0) == doctest::Approx(std::cos(0.5)).epsilon(1e-14));
    CHECK(e(1, 0) == doctest::Approx(std::sin(0.5)).epsilon(1e-14));

    // Taylor-series oracle on random small-norm matrices.
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 2 + rng.index(5);
        const Matrix a = random_matrix(rng, n, n, 0.4);
        const Matrix diff = mat_exp(a) - exp_taylor(a);
        CHECK(diff.max_abs() <= 1e-12);
    }

    // Group property for commuting exponents: e^{(s+t)A} = e^{sA} e^{tA}.
    const Matrix a = random_matrix(rng, 4, 4, 0.8);
    const Matrix lhs = mat_exp(1.7 * a);
    const Matrix rhs = mat_exp(0.9 * a) * mat_exp(0.8 * a);
    CHECK((lhs - rhs).max_abs() <= 1e-11 * (1.0 + lhs.max_abs()));

    // Inverse: e^{A} e^{-A} = I.
    CHECK((mat_exp(a) * mat_exp(-a) - Matrix::identity(4)).max_abs() <= 1e-11);

    CHECK((mat_exp(Matrix(3, 3)) - Matrix::identity(3)).max_abs() == 0.0);
}

TEST_CASE("cholesky and spd square root") {
    Rng rng(46);
    for (std::size_t n : {std::size_t{2}, std::size_t{4}, std::size_t{8}}) {
        const Matrix a = random_spd_matrix(rng, n);
        const Matrix l = cholesky(a);
        CHECK((l * l.transpose() - a).max_abs() <= 1e-11 * (1.0 + a.max_abs()));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) CHECK(l(i, j) == 0.0);

        const Matrix r = spd_sqrt(a);
        CHECK(sym_residual(r) <= 1e-12);
        CHECK((r * r - a).max_abs() <= 1e-10 * (1.0 + a.max_abs()));
    }

    Matrix indef(2, 2);
    indef(0, 0) = 1.0;
    indef(1, 1) = -1.0;
    CHECK_THROWS_AS((void)cholesky(indef), Error);
    CHECK_THROWS_AS((void)spd_sqrt(indef), Error);
    CHECK_THROWS_AS((void)SpdMatrix(indef), Error);

    Matrix asym(2, 2);
    asym(0, 0) = 1.0;
    asym(0, 1) = 0.5;
    asym(1, 1) = 1.0;
    CHECK_THROWS_AS((void)SpdMatrix(asym), Error);
    CHECK(SpdMatrix(Matrix::identity(3)).dim() == 3);
}
