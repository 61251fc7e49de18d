#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include "weylstrip/dirac.hpp"
#include "weylstrip/ode.hpp"
#include "weylstrip/rng.hpp"

using namespace weylstrip;
using namespace weylstrip::testing;

TEST_CASE("coefficient matrix G") {
    // free case, z = i: G = i*i*j = -j
    const auto zero = DiracPotential::zero(BlockSplit::make(1, 1));
    CHECK(diff_norm(build_G(zero, 0.3, iu), mat2(-1, 0, 0, 1)) < 1e-15);

    // constant real v = 2 at z = 0: pure off-diagonal coupling
    const auto two = DiracPotential::constant(scalar(2.0));
    CHECK(diff_norm(build_G(two, 1.0, Complex(0, 0)),
                    mat2(0, 2.0 * iu, -2.0 * iu, 0)) < 1e-15);

    // v = 1, z = 1: direct substitution
    const auto one = DiracPotential::constant(scalar(1.0));
    CHECK(diff_norm(build_G(one, 0.0, Complex(1, 0)),
                    mat2(iu, iu, -iu, -iu)) < 1e-15);
}

TEST_CASE("coefficient matrix F") {
    const auto zero = DiracPotential::zero(BlockSplit::make(1, 1));
    CHECK(diff_norm(build_F(zero, 0.0, Complex(1, 0)), mat2(-iu, 0, 0, iu)) <
          1e-15);

    // constant real scalar A at z = 0: F = -(i/2) A^2 j
    const double a = 1.7;
    const auto pot = DiracPotential::constant(scalar(a));
    CHECK(diff_norm(build_F(pot, 2.0, Complex(0, 0)),
                    mat2(-iu * a * a / 2.0, 0, 0, iu * a * a / 2.0)) < 1e-14);

    const auto no_deriv = DiracPotential{
        BlockSplit::make(1, 1), [](double) { return scalar(1.0); },
        nullptr, 1.0};
    CHECK_THROWS_AS(build_F(no_deriv, 0.0, iu), MissingDerivative);
}

TEST_CASE("free propagation has the diagonal closed form") {
    const auto zero = DiracPotential::zero(BlockSplit::make(1, 1));
    const Propagation p = propagate_u(zero, 1.0, iu, 1e-12);
    CHECK(std::abs(p.u(0, 0) - std::exp(Complex(-1, 0))) < 1e-11);
    CHECK(std::abs(p.u(1, 1) - std::exp(Complex(1, 0))) < 1e-11);
    CHECK(std::abs(p.u(0, 1)) < 1e-13);
}

TEST_CASE("constant potential matches the exponential oracle") {
    const auto pot = DiracPotential::constant(scalar(1.0));
    const Propagation p = propagate_u(pot, 1.0, Complex(0, 0), 1e-12);
    // G is constant, so u(1) = expm(G); the two routes are independent
    const CMatrix oracle = expm(build_G(pot, 0.0, Complex(0, 0)));
    CHECK(diff_norm(p.u, oracle) < 1e-10);
    CHECK(std::abs(p.u(0, 0) - Complex(1.5430806348152437, 0)) < 1e-10);
    CHECK(std::abs(p.u(0, 1) - Complex(0, 1.1752011936438014)) < 1e-10);
}

TEST_CASE("signature form is conserved on the real axis") {
    Rng rng(7);
    const BlockSplit split = BlockSplit::make(1, 1);
    const CMatrix j = signature_matrix(split);
    for (double z : {0.7, -0.7, 2.0}) {
        auto pot = DiracPotential::random_smooth(rng, split, 2.0);
        const Propagation p = propagate_u(pot, 5.0, Complex(z, 0), 1e-12);
        CHECK(diff_norm(CMatrix(p.u.adjoint() * j * p.u), j) < 1e-8);
    }
}

TEST_CASE("signature form is monotone in the upper half plane") {
    Rng rng(8);
    const BlockSplit split = BlockSplit::make(1, 1);
    const CMatrix j = signature_matrix(split);
    auto pot = DiracPotential::random_smooth(rng, split, 1.5);
    const Complex z(0.4, 0.8);
    Propagation p = propagate_u(pot, 0.5, z, 1e-12);
    CMatrix prev = p.u.adjoint() * j * p.u;
    for (double x : {1.0, 2.0, 4.0}) {
        p = extend_u(pot, p, x, 1e-12);
        const CMatrix cur = p.u.adjoint() * j * p.u;
        // A(x2) <= A(x1) + slack
        CHECK(max_hermitian_eigenvalue(CMatrix(cur - prev)) < 1e-10);
        prev = cur;
    }
}

TEST_CASE("2x1 block systems keep the Liouville determinant") {
    Rng rng(9);
    const BlockSplit split = BlockSplit::make(2, 1);
    auto pot = DiracPotential::random_smooth(rng, split, 1.0);
    const Complex z(0.3, 0.6);
    const Propagation p = propagate_u(pot, 3.0, z, 1e-12);
    const Complex det = Eigen::MatrixXcd(p.u).determinant();
    // trace G = i z (m1 - m2), so |det u| = e^{-Im z (m1 - m2) x}
    CHECK(std::log(std::abs(det)) ==
          doctest::Approx(-z.imag() * 1.0 * 3.0).epsilon(1e-8));
}

TEST_CASE("halving the tolerance improves the free-case accuracy") {
    const auto pot = DiracPotential::constant(scalar(0.8));
    const CMatrix oracle = expm(CMatrix(4.0 * build_G(pot, 0.0, Complex(0.5, 0))));
    double prev_err = -1.0;
    int improvements = 0;
    for (double tol : {1e-6, 1e-7, 1e-8, 1e-9}) {
        const Propagation p = propagate_u(pot, 4.0, Complex(0.5, 0), tol);
        const double err = diff_norm(p.u, oracle);
        if (prev_err > 0.0 && err < prev_err / 2.0) improvements++;
        prev_err = err;
    }
    CHECK(improvements >= 2);  // 10x tolerance steps must at least halve twice
}

TEST_CASE("overflow guard rejects runaway growth") {
    const auto zero = DiracPotential::zero(BlockSplit::make(1, 1));
    CHECK_THROWS_AS(propagate_u(zero, 100.0, iu, 1e-10), OverflowGuard);
}

TEST_CASE("sampled potentials interpolate and bound-check") {
    std::vector<double> xs;
    std::vector<CMatrix> vals;
    for (int i = 0; i <= 64; ++i) {
        const double x = i * 0.125;
        xs.push_back(x);
        vals.push_back(scalar(std::sin(x) * Complex(0.5, 0.25)));
    }
    auto pot = DiracPotential::sampled(BlockSplit::make(1, 1), xs, vals);
    CHECK(std::abs(pot.value(1.03)(0, 0) -
                   std::sin(1.03) * Complex(0.5, 0.25)) < 1e-5);
    CHECK(std::abs(pot.deriv(1.03)(0, 0) -
                   std::cos(1.03) * Complex(0.5, 0.25)) < 1e-3);
    CHECK_THROWS_AS(pot.value(9.0), EvalOutOfRange);

    // same data drives a propagation without surprises
    const Propagation p = propagate_u(pot, 4.0, Complex(0.9, 0), 1e-10);
    const CMatrix j = signature_matrix(pot.split);
    CHECK(diff_norm(CMatrix(p.u.adjoint() * j * p.u), j) < 1e-7);
}

TEST_CASE("spectral point regime tags") {
    CHECK_NOTHROW(SpectralPoint::dirac_upper(Complex(1, 2)));
    CHECK_THROWS_AS(SpectralPoint::dirac_upper(Complex(1, 0)), Error);
    CHECK_NOTHROW(SpectralPoint::dirac_real(0.5));
    CHECK_NOTHROW(SpectralPoint::nwave_lower(Complex(0, -3), 2.0));
    CHECK_THROWS_AS(SpectralPoint::nwave_lower(Complex(0, -1), 2.0), Error);
}
