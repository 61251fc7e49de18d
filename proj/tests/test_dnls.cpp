#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_util.hpp"

#include "weylstrip/dnls.hpp"
#include "weylstrip/ode.hpp"
#include "weylstrip/rng.hpp"

using namespace weylstrip;
using namespace weylstrip::testing;

namespace {

std::vector<std::pair<double, double>> random_points(Rng& rng, int n,
                                                     double x_hi, double t_hi) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(size_t(n));
    for (int i = 0; i < n; ++i)
        pts.emplace_back(rng.uniform(0.0, x_hi), rng.uniform(0.0, t_hi));
    return pts;
}

}  // namespace

TEST_CASE("plane-wave family solves the equation to machine precision") {
    Rng rng(41);
    const auto pts = random_points(rng, 100, 8.0, 3.0);

    const auto zero = Field2D::from_cw(CWSolution::make(0.0, 1.0));
    CHECK(dnls_residual(zero, pts) == 0.0);

    const CWSolution cw = CWSolution::make(0.5, 1.0);
    CHECK(cw.frequency == doctest::Approx(0.75));
    CHECK(dnls_residual(Field2D::from_cw(cw), pts) < 1e-12);

    // matrix variant with a unitary factor keeps the cubic term aligned
    CMatrix q(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    q << Complex(s, 0), Complex(0, s), Complex(0, s), Complex(s, 0);
    CHECK(spectral_norm(CMatrix(q * q.adjoint() - identity(2))) < 1e-14);
    CHECK(dnls_residual(Field2D::from_cw_matrix(cw, q), pts) < 1e-12);

    CHECK(dnls_residual(Field2D::product_xt(), pts) > 1e-3);
}

TEST_CASE("residual falls back to finite differences") {
    const CWSolution cw = CWSolution::make(0.4, 0.8);
    Field2D field = Field2D::from_cw(cw);
    field.vt = nullptr;
    field.vxx = nullptr;
    Rng rng(43);
    const auto pts = random_points(rng, 20, 4.0, 2.0);
    CHECK(dnls_residual(field, pts) < 1e-5);  // FD floor, not machine zero
}

TEST_CASE("free boundary propagator is the diagonal exponential") {
    const auto bd = BoundaryData::zero(BlockSplit::make(1, 1), 4.0);
    for (const Complex z : {Complex(0, 1), Complex(0.7, 0.4), Complex(-1, 2)}) {
        const EvolutionOperator op = propagate_R(bd, 1.0, z, 1e-12);
        const Complex w = std::exp(-iu * z * z);
        CHECK(std::abs(op.r(0, 0) - w) < 1e-10 * std::abs(w));
        CHECK(std::abs(op.r(1, 1) - 1.0 / w) < 1e-10 / std::abs(w));
        CHECK(std::abs(op.r(0, 1)) < 1e-10);
        CHECK(std::abs(op.r(1, 0)) < 1e-10);
    }
}

TEST_CASE("boundary propagator inverts under reverse integration") {
    const CWSolution cw = CWSolution::make(0.5, 1.0);
    const auto bd = BoundaryData::from_cw(cw, 4.0);
    const double t = 1.0;
    const Complex z(0.3, 0.9);
    const EvolutionOperator op = propagate_R(bd, t, z, 1e-11);

    // reverse route: Y'(s) = -F(t - s) Y gives Y(t) = R(t)^{-1}
    auto rhs = [&](double s, const CMatrix& y) {
        const CMatrix f =
            build_F_from(bd.v0(t - s), bd.vx0(t - s), bd.split, z);
        return CMatrix(-f * y);
    };
    const CMatrix inv =
        integrate_ode(rhs, identity(2), 0.0, t, OdeOptions{.tol = 1e-11});
    CHECK(diff_norm(CMatrix(inv * op.r), identity(2)) < 1e-8);
}

TEST_CASE("boundary propagator obeys the trace quadrature") {
    // 2x1 block case with generic (non-solution) boundary data
    const BlockSplit split = BlockSplit::make(2, 1);
    BoundaryData bd;
    bd.a = 4.0;
    bd.split = split;
    bd.v0 = [](double t) {
        CMatrix v(2, 1);
        v << Complex(0.3 * std::sin(t), 0.1), Complex(0.2 * std::cos(t), 0.0);
        return v;
    };
    bd.vx0 = [](double t) {
        CMatrix v(2, 1);
        v << Complex(0.1, -0.2 * std::cos(t)), Complex(0.0, 0.15 * t);
        return v;
    };
    const Complex z(0.4, 0.5);
    const double t = 1.2;
    const EvolutionOperator op = propagate_R(bd, t, z, 1e-12);

    // Simpson quadrature of trace F along the boundary
    const int n = 256;
    Complex acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double s = t * i / n;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * build_F_from(bd.v0(s), bd.vx0(s), split, z).trace();
    }
    acc *= t / (3.0 * n);
    const Complex det = Eigen::MatrixXcd(op.r).determinant();
    CHECK(std::abs(det - std::exp(acc)) < 1e-8 * std::abs(std::exp(acc)));
}

TEST_CASE("propagator guards t and the growth cap") {
    const auto bd = BoundaryData::zero(BlockSplit::make(1, 1), 1.0);
    CHECK_THROWS_AS(propagate_R(bd, 1.5, iu, 1e-10), Error);
    CHECK_THROWS_AS(
        propagate_R(BoundaryData::zero(BlockSplit::make(1, 1), 100.0), 50.0,
                    Complex(10, 10), 1e-10),
        OverflowGuard);
}

TEST_CASE("linear-fractional action basics") {
    const BlockSplit split = BlockSplit::make(1, 1);
    EvolutionOperator op;
    op.t = 0.0;
    op.z = iu;
    op.split = split;
    op.r = identity(2);
    const CMatrix phi0 = scalar(Complex(0.2, 0.4));
    CHECK(diff_norm(evolve_weyl(phi0, op), phi0) < 1e-15);

    // diagonal propagator multiplies by e^{2 i z^2 t}
    const Complex z(0.5, 1.0);
    const double t = 0.7;
    op.z = z;
    op.t = t;
    op.r = CMatrix::Zero(2, 2);
    op.r(0, 0) = std::exp(-iu * z * z * t);
    op.r(1, 1) = std::exp(iu * z * z * t);
    const CMatrix evolved = evolve_weyl(phi0, op);
    CHECK(std::abs(evolved(0, 0) -
                   std::exp(2.0 * iu * z * z * t) * phi0(0, 0)) < 1e-14);

    // phi0 = 0 picks out R21 R11^{-1}
    Rng rng(47);
    op.r = rng.matrix(2, 2) + 2.0 * identity(2);
    const CMatrix at_zero = evolve_weyl(CMatrix(CMatrix::Zero(1, 1)), op);
    CHECK(std::abs(at_zero(0, 0) - op.r(1, 0) / op.r(0, 0)) < 1e-13);
}

TEST_CASE("linear-fractional evolution composes as a cocycle") {
    const CWSolution cw = CWSolution::make(0.5, 1.0);
    const auto bd = BoundaryData::from_cw(cw, 4.0);
    const Complex z(0.2, 0.8);
    const CMatrix phi0 = scalar(Complex(0.3, -0.2));

    const EvolutionOperator r1 = propagate_R(bd, 0.6, z, 1e-12);
    const EvolutionOperator r2 = propagate_R(bd, 1.4, z, 1e-12);
    EvolutionOperator rel;
    rel.t = 1.4;
    rel.z = z;
    rel.split = bd.split;
    rel.r = r2.r * lu_solve(r1.r, identity(2));

    const CMatrix direct = evolve_weyl(phi0, r2);
    const CMatrix chained = evolve_weyl(evolve_weyl(phi0, r1), rel);
    CHECK(diff_norm(direct, chained) < 1e-8);
}

TEST_CASE("factorization identity for the free and plane-wave fields") {
    const auto zero_field = Field2D::from_cw(CWSolution::make(0.0, 0.0));
    CHECK(factorization_residual(dirac_lax(zero_field), iu, 2.0, 1.0, 1e-10) <=
          1e-10);

    const auto cw_field = Field2D::from_cw(CWSolution::make(0.5, 1.0));
    CHECK(factorization_residual(dirac_lax(cw_field), iu, 2.0, 1.0, 1e-10) <=
          1e-7);

    // non-solutions keep a visible defect no matter the integrator quality
    const auto bad = Field2D::product_xt();
    const double loose = factorization_residual(dirac_lax(bad), iu, 2.0, 1.0, 1e-8);
    const double tight =
        factorization_residual(dirac_lax(bad), iu, 2.0, 1.0, 1e-11);
    CHECK(loose > 1e-3);
    CHECK(tight > 1e-3);
}

TEST_CASE("evolution consistency: trivial and plane-wave cases") {
    ConsistencyOptions opt;
    opt.ball_tol = 1e-9;
    opt.ode_tol = 1e-11;

    const ConsistencyReport trivial = evolution_consistency(
        CWSolution::make(0.0, 1.0), {Complex(0, 1), Complex(0.5, 1.5)}, 1.0, opt);
    CHECK(trivial.max_deviation <= 1e-10);

    const ConsistencyReport cw = evolution_consistency(
        CWSolution::make(0.5, 1.0), {Complex(0, 1), Complex(0, 2)}, 0.5, opt);
    CHECK(cw.max_deviation <= 1e-5);
}

TEST_CASE("evolved estimates stay contractive for bounded solutions") {
    const CWSolution cw = CWSolution::make(0.5, 1.0);
    const auto field = Field2D::from_cw(cw);
    const auto bd = BoundaryData::from_cw(cw, 4.0);
    for (const Complex z : {Complex(0, 1), Complex(1, 1), Complex(-1, 2)}) {
        const WeylEstimate phi0 =
            estimate_weyl(field.x_slice(0.0, 0.5), z, {.tol = 1e-10});
        const EvolutionOperator op = propagate_R(bd, 1.0, z, 1e-11);
        const CMatrix phi_t = evolve_weyl(phi0.value, op);
        CHECK(spectral_norm(phi_t) <= 1.0 + 1e-8);
    }
}
