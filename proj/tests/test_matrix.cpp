#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include "weylstrip/rng.hpp"

using namespace weylstrip;
using namespace weylstrip::testing;

TEST_CASE("block split validation") {
    const BlockSplit s = BlockSplit::make(2, 1);
    CHECK(s.dim() == 3);
    CHECK_THROWS_AS(BlockSplit::make(0, 1), DimensionMismatch);
    const CMatrix j = signature_matrix(s);
    CHECK(j(0, 0) == Complex(1, 0));
    CHECK(j(2, 2) == Complex(-1, 0));
    CHECK(diff_norm(CMatrix(j * j), identity(3)) == doctest::Approx(0.0));
}

TEST_CASE("herm_sqrt on identity and diagonals") {
    CHECK(diff_norm(herm_sqrt(identity(2)), identity(2)) < 1e-14);

    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    const CMatrix s = herm_sqrt(d);
    CHECK(std::abs(s(0, 0) - Complex(2, 0)) < 1e-13);
    CHECK(std::abs(s(1, 1) - Complex(3, 0)) < 1e-13);
    CHECK(std::abs(s(0, 1)) < 1e-13);
}

TEST_CASE("herm_sqrt squares back to the input") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2 + int(rng.next() % 4);
        const CMatrix x = rng.matrix(n, n);
        const CMatrix root = x * x.adjoint();  // Hermitian PSD by construction
        const CMatrix a = root * root;
        const CMatrix s = herm_sqrt(a);
        CHECK(is_hermitian(s, 1e-10));
        CHECK(min_hermitian_eigenvalue(s) > -1e-10 * frobenius_norm(s));
        CHECK(diff_norm(CMatrix(s * s), a) <= 1e-10 * std::max(1.0, frobenius_norm(a)));
    }
}

TEST_CASE("herm_sqrt rejects bad inputs") {
    Rng rng(12);
    CMatrix skew = rng.matrix(3, 3);
    skew = CMatrix(skew - skew.adjoint());  // anti-Hermitian, not Hermitian
    skew(0, 1) += Complex(0.5, 0);
    CHECK_THROWS_AS(herm_sqrt(skew), NotHermitian);

    CMatrix neg = identity(2);
    neg(1, 1) = Complex(-0.5, 0);
    CHECK_THROWS_AS(herm_sqrt(neg), NegativeEigenvalue);
}

TEST_CASE("expm basics") {
    CHECK(diff_norm(expm(CMatrix(CMatrix::Zero(3, 3))), identity(3)) < 1e-14);

    const CMatrix nil = mat2(0, 1, 0, 0);
    CHECK(diff_norm(expm(nil), mat2(1, 1, 0, 1)) < 1e-14);

    // A = [[0, i], [-i, 0]] squares to I, so expm(A) = cosh(1) I + sinh(1) A
    const CMatrix a = mat2(0, iu, -iu, 0);
    const CMatrix e = expm(a);
    CHECK(std::abs(e(0, 0) - Complex(1.5430806348152437, 0)) < 1e-12);
    CHECK(std::abs(e(0, 1) - Complex(0, 1.1752011936438014)) < 1e-12);
    CHECK(std::abs(e(1, 0) - Complex(0, -1.1752011936438014)) < 1e-12);
    CHECK(std::abs(e(1, 1) - Complex(1.5430806348152437, 0)) < 1e-12);
}

TEST_CASE("expm inverse and Liouville properties") {
    Rng rng(21);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 2 + int(rng.next() % 3);
        CMatrix a = rng.matrix(n, n, 1.5);
        const double norm = spectral_norm(a);
        if (norm > 10.0) a *= 10.0 / norm;
        const CMatrix e = expm(a);
        const CMatrix einv = expm(CMatrix(-a));
        CHECK(diff_norm(CMatrix(e * einv), identity(n)) < 1e-10);

        const Complex det = Eigen::MatrixXcd(e).determinant();
        const Complex lhs = std::exp(a.trace());
        CHECK(std::abs(det - lhs) < 1e-8 * std::abs(lhs));
    }
}

TEST_CASE("solve guards the conditioning") {
    CMatrix a = identity(2);
    a(1, 1) = Complex(1e-15, 0);
    CHECK_THROWS_AS(solve(a, identity(2)), SingularDenominator);

    Rng rng(31);
    const CMatrix m = rng.matrix(3, 3) + 3.0 * identity(3);
    const CMatrix b = rng.matrix(3, 2);
    const CMatrix x = solve(m, b);
    CHECK(diff_norm(CMatrix(m * x), b) < 1e-12);
    const CMatrix y = solve_right(b.transpose(), m);
    CHECK(diff_norm(CMatrix(y * m), b.transpose()) < 1e-12);
}
