#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include <Eigen/Eigenvalues>

#include "weylstrip/rng.hpp"
#include "weylstrip/weyl_disks.hpp"

using namespace weylstrip;
using namespace weylstrip::testing;

namespace {

// Oracle: for a constant scalar potential the Weyl function is the slope
// v2/v1 of the decaying eigenvector of the (constant) coefficient matrix.
Complex decaying_slope(const CMatrix& g) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(g)};
    int idx = 0;
    for (int i = 1; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i).real() < es.eigenvalues()(idx).real()) idx = i;
    const auto vec = es.eigenvectors().col(idx);
    return vec(1) / vec(0);
}

Complex constant_weyl_oracle(Complex amp, Complex z) {
    const auto pot = DiracPotential::constant(scalar(amp));
    return decaying_slope(build_G(pot, 0.0, z));
}

// Oracle: a plane-wave slice amp e^{ikx} reduces by the diagonal gauge
// e^{i k x j / 2} to the constant system at the shifted parameter z - k/2.
Complex cw_weyl_oracle(Complex amp, double k, Complex z) {
    return constant_weyl_oracle(amp, z - k / 2.0);
}

}  // namespace

TEST_CASE("mobius transform basics") {
    const BlockSplit split = BlockSplit::make(1, 1);
    const auto w = PairParam::contraction(scalar(Complex(0.3, -0.4)));
    CHECK(std::abs(mobius_apply(identity(2), w, split)(0, 0) -
                   Complex(0.3, -0.4)) < 1e-14);

    CMatrix u = CMatrix::Zero(2, 2);
    u(0, 0) = std::exp(Complex(-1, 0));
    u(1, 1) = std::exp(Complex(1, 0));
    const auto one = PairParam::contraction(scalar(1.0));
    CHECK(std::abs(mobius_apply(u, one, split)(0, 0) -
                   std::exp(Complex(-2, 0))) < 1e-14);

    const CMatrix swap = mat2(0, 1, 1, 0);
    CHECK_THROWS_AS(mobius_apply(swap, PairParam::contraction(scalar(0.0)), split),
                    SingularDenominator);
    CHECK_THROWS_AS(PairParam::contraction(scalar(1.5)), Error);
}

TEST_CASE("disk from the identity is the unit ball") {
    const BlockSplit split = BlockSplit::make(1, 1);
    const WeylDisk disk = disk_from_u(identity(2), split, 0.0, iu);
    CHECK(std::abs(disk.center(0, 0)) < 1e-14);
    CHECK(std::abs(disk.r_left(0, 0) - Complex(1, 0)) < 1e-14);
    CHECK(std::abs(disk.r_right(0, 0) - Complex(1, 0)) < 1e-14);
}

TEST_CASE("free disk at x = 1 shrinks to radius e^{-2}") {
    const BlockSplit split = BlockSplit::make(1, 1);
    CMatrix u = CMatrix::Zero(2, 2);
    u(0, 0) = std::exp(Complex(-1, 0));
    u(1, 1) = std::exp(Complex(1, 0));
    const WeylDisk disk = disk_from_u(u, split, 1.0, iu);
    CHECK(std::abs(disk.center(0, 0)) < 1e-14);
    CHECK(std::abs(disk.r_left(0, 0) - std::exp(-1.0)) < 1e-12);
    CHECK(std::abs(disk.r_right(0, 0) - std::exp(-1.0)) < 1e-12);

    // every Moebius image of a contraction sits inside the ball
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto p = PairParam::contraction(rng.contraction(1, 1, rng.uniform()));
        const Complex phi = mobius_apply(u, p, split)(0, 0);
        CHECK(std::abs(phi) <= std::exp(-2.0) + 1e-12);
        CHECK(disk.membership_margin(scalar(phi)) > -1e-10);
    }

    const CMatrix bad = mat2(0, 1, 1, 0);
    CHECK_THROWS_AS(disk_from_u(bad, split, 0.0, iu), NotNegativeDefinite);
}

TEST_CASE("ball points satisfy the membership form by brute force") {
    Rng rng(17);
    const BlockSplit split = BlockSplit::make(2, 2);
    auto pot = DiracPotential::random_smooth(rng, split, 1.0);
    const Complex z(0.3, 1.1);
    const Propagation p = propagate_u(pot, 2.0, z, 1e-11);
    const WeylDisk disk = disk_from_u(p.u, split, 2.0, z);
    for (int i = 0; i < 500; ++i) {
        const CMatrix u_param = rng.contraction(2, 2, rng.uniform());
        const CMatrix phi = disk.point(u_param);
        CHECK(disk.membership_margin(phi) >= -1e-8);
    }
    // moebius images land in the same ball
    for (int i = 0; i < 40; ++i) {
        const auto param =
            PairParam::contraction(rng.contraction(2, 2, rng.uniform()));
        const CMatrix phi = mobius_apply(p.u, param, split);
        CHECK(disk.membership_margin(phi) >= -1e-10);
    }
}

TEST_CASE("nesting and left semi-radius decay") {
    const auto pot = DiracPotential::cw_slice(0.5, 1.0);
    const Complex z = iu;
    Propagation p = propagate_u(pot, 1.0, z, 1e-12);
    std::vector<WeylDisk> disks;
    disks.push_back(disk_from_u(p.u, pot.split, 1.0, z));
    for (double x : {2.0, 4.0, 8.0}) {
        p = extend_u(pot, p, x, 1e-12);
        disks.push_back(disk_from_u(p.u, pot.split, x, z));
    }
    Rng rng(23);
    for (size_t d = 0; d + 1 < disks.size(); ++d) {
        CHECK(spectral_norm(disks[d + 1].r_left) <=
              spectral_norm(disks[d].r_left) + 1e-12);
        for (int i = 0; i < 120; ++i) {
            const CMatrix phi =
                disks[d + 1].point(rng.contraction(1, 1, rng.uniform()));
            CHECK(disks[d].membership_margin(phi) >= -1e-8);
        }
    }

    // free case: both semi-radii decay exactly like e^{-Im z * x}
    const auto zero = DiracPotential::zero(BlockSplit::make(1, 1));
    for (double x : {1.0, 2.0, 4.0, 8.0}) {
        const Propagation q = propagate_u(zero, x, z, 1e-12);
        const WeylDisk disk = disk_from_u(q.u, zero.split, x, z);
        CHECK(std::abs(disk.r_left(0, 0) - std::exp(-x)) < 1e-8);
        CHECK(std::abs(disk.r_right(0, 0) - std::exp(-x)) < 1e-8);
    }
}

TEST_CASE("free estimate is exact with the closed-form bound") {
    const auto zero = DiracPotential::zero(BlockSplit::make(1, 1));
    const WeylEstimate est =
        estimate_weyl(zero, iu, {.tol = 1e-10, .with_integral = true});
    CHECK(std::abs(est.value(0, 0)) < 1e-12);
    CHECK(est.error_bound == doctest::Approx(std::exp(-2.0 * est.x_used))
                                 .epsilon(1e-6));
    CHECK(est.error_bound <= 1e-10);
    // truncated square-integrability integral: (1 - e^{-2x})/2 -> 1/2
    CHECK(est.weyl_integral == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("constant potential estimate matches the eigenvector oracle") {
    const auto pot = DiracPotential::constant(scalar(1.0));
    const WeylEstimate est = estimate_weyl(pot, iu, {.tol = 1e-12, .x_max = 15.0});
    const Complex oracle = constant_weyl_oracle(1.0, iu);
    CHECK(std::abs(oracle - iu * (std::sqrt(2.0) - 1.0)) < 1e-12);
    CHECK(std::abs(est.value(0, 0) - oracle) <=
          std::max(1e-6, 2.0 * est.error_bound));
    CHECK(std::abs(est.value(0, 0)) < 1.0 + est.error_bound);
}

TEST_CASE("plane-wave slice estimate matches the gauge oracle") {
    const auto pot = DiracPotential::cw_slice(0.5, 1.0);
    const Complex z(0, 2);
    const WeylEstimate est = estimate_weyl(pot, z, {.tol = 1e-12});
    const Complex oracle = cw_weyl_oracle(0.5, 1.0, z);
    CHECK(std::abs(est.value(0, 0) - oracle) <=
          std::max(1e-9, 2.0 * est.error_bound));
}

TEST_CASE("estimates are insensitive to the truncation parameter") {
    const auto pot = DiracPotential::cw_slice(Complex(0.4, 0.2), 0.7);
    const Complex z(0.2, 1.0);
    const WeylEstimate est = estimate_weyl(pot, z, {.tol = 1e-9});
    const Propagation p = propagate_u(pot, est.x_used, z, 1e-11);
    const Complex phi_a =
        mobius_apply(p.u, PairParam::contraction(scalar(0.0)), pot.split)(0, 0);
    const Complex phi_b =
        mobius_apply(p.u, PairParam::contraction(scalar(1.0)), pot.split)(0, 0);
    CHECK(std::abs(phi_a - phi_b) <= 2.0 * est.error_bound);
    CHECK(std::abs(phi_a - est.value(0, 0)) <= est.error_bound * (1.0 + 1e-6));
}

TEST_CASE("estimates stay contractive") {
    Rng rng(29);
    for (int trial = 0; trial < 6; ++trial) {
        auto pot = DiracPotential::random_smooth(rng, BlockSplit::make(1, 1), 1.2);
        const Complex z(rng.uniform(-0.5, 0.5), rng.uniform(0.7, 1.6));
        const WeylEstimate est = estimate_weyl(pot, z, {.tol = 1e-9});
        CHECK(spectral_norm(est.value) <= 1.0 + est.error_bound);
    }
}

TEST_CASE("estimate rejects the closed half plane") {
    const auto zero = DiracPotential::zero(BlockSplit::make(1, 1));
    CHECK_THROWS_AS(estimate_weyl(zero, Complex(1.0, 0.0), {}), Error);
    CHECK_THROWS_AS(estimate_weyl(zero, Complex(0.0, -1.0), {}), Error);
}
