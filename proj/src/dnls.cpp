#include "weylstrip/dnls.hpp"

#include <cmath>

#include "weylstrip/ode.hpp"
#include "weylstrip/parallel.hpp"

namespace weylstrip {

Field2D Field2D::from_cw(const CWSolution& cw) {
    return from_cw_matrix(cw, CMatrix::Identity(1, 1));
}

Field2D Field2D::from_cw_matrix(const CWSolution& cw, const CMatrix& q) {
    Field2D f;
    f.split = BlockSplit::make(int(q.rows()), int(q.cols()));
    const double a = cw.amplitude, k = cw.wavenumber, w = cw.frequency;
    auto phase = [a, k, w](double x, double t) {
        return a * std::exp(iu * (k * x - w * t));
    };
    f.v = [phase, q](double x, double t) { return CMatrix(phase(x, t) * q); };
    f.vx = [phase, q, k](double x, double t) {
        return CMatrix(iu * k * phase(x, t) * q);
    };
    f.vt = [phase, q, w](double x, double t) {
        return CMatrix(-iu * w * phase(x, t) * q);
    };
    f.vxx = [phase, q, k](double x, double t) {
        return CMatrix(-k * k * phase(x, t) * q);
    };
    return f;
}

Field2D Field2D::product_xt() {
    Field2D f;
    f.split = BlockSplit::make(1, 1);
    auto scalar = [](Complex c) {
        CMatrix m(1, 1);
        m(0, 0) = c;
        return m;
    };
    f.v = [scalar](double x, double t) { return scalar(Complex(x * t, 0)); };
    f.vx = [scalar](double, double t) { return scalar(Complex(t, 0)); };
    f.vt = [scalar](double x, double) { return scalar(Complex(x, 0)); };
    f.vxx = [scalar](double, double) { return scalar(Complex(0, 0)); };
    return f;
}

DiracPotential Field2D::x_slice(double t, double bound_hint) const {
    DiracPotential pot;
    pot.split = split;
    pot.v = [f = v, t](double x) { return f(x, t); };
    pot.vx = [f = vx, t](double x) { return f(x, t); };
    if (bound_hint > 0.0) {
        pot.bound = bound_hint;
    } else {
        double sup = 0.0;
        for (int i = 0; i <= 64; ++i)
            sup = std::max(sup, spectral_norm(v(i * 0.25, t)));
        pot.bound = sup * (1.0 + 1e-6) + 1e-12;
    }
    return pot;
}

BoundaryData BoundaryData::zero(BlockSplit split, double a) {
    BoundaryData bd;
    bd.a = a;
    bd.split = split;
    const int m1 = split.top, m2 = split.bottom;
    bd.v0 = [m1, m2](double) { return CMatrix(CMatrix::Zero(m1, m2)); };
    bd.vx0 = bd.v0;
    return bd;
}

BoundaryData BoundaryData::from_cw(const CWSolution& cw, double a) {
    return from_field(Field2D::from_cw(cw), a);
}

BoundaryData BoundaryData::from_field(const Field2D& field, double a) {
    BoundaryData bd;
    bd.a = a;
    bd.split = field.split;
    bd.v0 = [f = field.v](double t) { return f(0.0, t); };
    bd.vx0 = [f = field.vx](double t) { return f(0.0, t); };
    return bd;
}

double dnls_residual(const Field2D& field,
                     const std::vector<std::pair<double, double>>& points) {
    const double h = 1e-5;
    auto d_t = [&](double x, double t) {
        if (field.vt) return field.vt(x, t);
        return CMatrix((field.v(x, t + h) - field.v(x, t - h)) / (2.0 * h));
    };
    auto d_xx = [&](double x, double t) {
        if (field.vxx) return field.vxx(x, t);
        return CMatrix((field.v(x + h, t) - 2.0 * field.v(x, t) +
                        field.v(x - h, t)) /
                       (h * h));
    };
    double worst = 0.0;
    for (const auto& [x, t] : points) {
        const CMatrix v = field.v(x, t);
        const CMatrix defect =
            2.0 * d_t(x, t) -
            iu * (d_xx(x, t) - 2.0 * v * v.adjoint() * v);
        worst = std::max(worst, spectral_norm(defect));
    }
    return worst;
}

EvolutionOperator propagate_R(const BoundaryData& bd, double t, Complex z,
                              double tol) {
    if (t < 0.0 || t >= bd.a)
        throw Error("propagate_R: t must lie in [0, a)");
    if (std::abs((z * z).imag()) * t > kOverflowGuard)
        throw OverflowGuard("propagate_R: |Im z^2| * t beyond 60");
    auto rhs = [&bd, z](double s, const CMatrix& r) {
        const CMatrix f = build_F_from(bd.v0(s), bd.vx0(s), bd.split, z);
        return CMatrix(f * r);
    };
    EvolutionOperator op;
    op.t = t;
    op.z = z;
    op.split = bd.split;
    op.r = integrate_ode(rhs, identity(bd.split.dim()), 0.0, t,
                         OdeOptions{.tol = tol});
    if (!all_finite(op.r))
        throw Overflow("propagate_R: non-finite propagator");
    return op;
}

CMatrix evolve_weyl(const CMatrix& phi0, const EvolutionOperator& op) {
    const CMatrix num = op.r21() + op.r22() * phi0;
    const CMatrix den = op.r11() + op.r12() * phi0;
    return solve_right(num, den);  // guards the denominator conditioning
}

LaxPair dirac_lax(const Field2D& field) {
    LaxPair pair;
    pair.dim = field.split.dim();
    pair.G = [field](double x, double t, Complex z) {
        const CMatrix j = signature_matrix(field.split);
        const CMatrix V = build_V(field.v(x, t), field.split);
        return CMatrix(iu * (z * j + j * V));
    };
    pair.F = [field](double x, double t, Complex z) {
        return build_F_from(field.v(x, t), field.vx(x, t), field.split, z);
    };
    return pair;
}

double factorization_residual(const LaxPair& pair, Complex z, double x,
                              double t, double tol) {
    const CMatrix eye = identity(pair.dim);
    auto in_x = [&](double t_fixed) {
        auto rhs = [&, t_fixed](double s, const CMatrix& u) {
            return CMatrix(pair.G(s, t_fixed, z) * u);
        };
        return integrate_ode(rhs, eye, 0.0, x, OdeOptions{.tol = tol});
    };
    auto in_t = [&](double x_fixed) {
        auto rhs = [&, x_fixed](double s, const CMatrix& r) {
            return CMatrix(pair.F(x_fixed, s, z) * r);
        };
        return integrate_ode(rhs, eye, 0.0, t, OdeOptions{.tol = tol});
    };
    const CMatrix u_t = in_x(t);     // u(x, t, z)
    const CMatrix u_0 = in_x(0.0);   // u(x, 0, z)
    const CMatrix r_0 = in_t(0.0);   // R(t, z)
    const CMatrix r_x = in_t(x);     // R(x, t, z)
    const CMatrix lhs = u_t * r_0;
    const CMatrix rhs_ = r_x * u_0;
    const double scale =
        std::max({1.0, spectral_norm(lhs), spectral_norm(rhs_)});
    return spectral_norm(CMatrix(lhs - rhs_)) / scale;
}

ConsistencyReport evolution_consistency(const CWSolution& cw,
                                        const std::vector<Complex>& zgrid,
                                        double t,
                                        const ConsistencyOptions& opt) {
    if (t >= opt.strip_height)
        throw Error("evolution_consistency: t beyond the strip height");
    const Field2D field = Field2D::from_cw(cw);
    const BoundaryData bd = BoundaryData::from_cw(cw, opt.strip_height);
    const DiracPotential initial = field.x_slice(0.0, std::abs(cw.amplitude));
    const DiracPotential at_t = field.x_slice(t, std::abs(cw.amplitude));

    ConsistencyReport report;
    report.rows.resize(zgrid.size());
    parallel_for(int(zgrid.size()), opt.threads, [&](int i) {
        const Complex z = zgrid[size_t(i)];
        WeylEstimateOptions est{.tol = opt.ball_tol,
                                .x_max = opt.x_max,
                                .ode_tol = opt.ode_tol};
        const WeylEstimate phi0 = estimate_weyl(initial, z, est);
        const WeylEstimate direct = estimate_weyl(at_t, z, est);
        const EvolutionOperator op = propagate_R(bd, t, z, opt.ode_tol);
        const CMatrix evolved = evolve_weyl(phi0.value, op);
        ConsistencyRow row;
        row.z = z;
        row.deviation = spectral_norm(CMatrix(direct.value - evolved));
        row.bound_initial = phi0.error_bound;
        row.bound_direct = direct.error_bound;
        report.rows[size_t(i)] = row;
    });
    for (const auto& row : report.rows)
        report.max_deviation = std::max(report.max_deviation, row.deviation);
    return report;
}

}  // namespace weylstrip
