#include "weylstrip/dirac.hpp"

#include <cmath>

#include "weylstrip/ode.hpp"

namespace weylstrip {

SpectralPoint SpectralPoint::dirac_upper(Complex z) {
    if (!(z.imag() > 0.0))
        throw Error("SpectralPoint: Im z > 0 required for the Dirac regime");
    return {z, SpectralRegime::DiracUpper};
}

SpectralPoint SpectralPoint::dirac_real(double z) {
    return {Complex(z, 0.0), SpectralRegime::DiracReal};
}

SpectralPoint SpectralPoint::nwave_lower(Complex z, double threshold) {
    if (!(z.imag() < -threshold))
        throw Error("SpectralPoint: Im z < -M required for the N-wave regime");
    return {z, SpectralRegime::NWaveLower};
}

CMatrix DiracPotential::value(double x) const {
    if (x < x_lo || x > x_hi)
        throw EvalOutOfRange("DiracPotential: x outside sampled domain");
    CMatrix val = v(x);
    if (val.rows() != split.top || val.cols() != split.bottom)
        throw DimensionMismatch("DiracPotential: evaluator shape mismatch");
    if (spectral_norm(val) > bound * (1.0 + 1e-9) + 1e-12)
        throw Error("DiracPotential: value exceeds declared bound");
    return val;
}

CMatrix DiracPotential::deriv(double x) const {
    if (!vx) throw MissingDerivative("DiracPotential: no v_x evaluator");
    if (x < x_lo || x > x_hi)
        throw EvalOutOfRange("DiracPotential: x outside sampled domain");
    return vx(x);
}

DiracPotential DiracPotential::zero(BlockSplit split) {
    const int m1 = split.top, m2 = split.bottom;
    DiracPotential pot;
    pot.split = split;
    pot.v = [m1, m2](double) { return CMatrix(CMatrix::Zero(m1, m2)); };
    pot.vx = pot.v;
    pot.bound = 0.0;
    return pot;
}

DiracPotential DiracPotential::constant(const CMatrix& v0) {
    DiracPotential pot;
    pot.split = BlockSplit::make(int(v0.rows()), int(v0.cols()));
    pot.v = [v0](double) { return v0; };
    pot.vx = [r = v0.rows(), c = v0.cols()](double) {
        return CMatrix(CMatrix::Zero(r, c));
    };
    pot.bound = spectral_norm(v0);
    return pot;
}

DiracPotential DiracPotential::cw_slice(Complex amp, double k) {
    CMatrix one = CMatrix::Identity(1, 1);
    return cw_matrix_slice(amp, k, one);
}

DiracPotential DiracPotential::cw_matrix_slice(Complex amp, double k,
                                               const CMatrix& q) {
    DiracPotential pot;
    pot.split = BlockSplit::make(int(q.rows()), int(q.cols()));
    pot.v = [amp, k, q](double x) {
        return CMatrix(amp * std::exp(iu * k * x) * q);
    };
    pot.vx = [amp, k, q](double x) {
        return CMatrix(iu * k * amp * std::exp(iu * k * x) * q);
    };
    pot.bound = std::abs(amp) * spectral_norm(q);
    return pot;
}

DiracPotential DiracPotential::sampled(BlockSplit split, std::vector<double> xs,
                                       const std::vector<CMatrix>& values) {
    auto spline = std::make_shared<MatrixSpline>(std::move(xs), values);
    DiracPotential pot;
    pot.split = split;
    pot.x_lo = spline->x_min();
    pot.x_hi = spline->x_max();
    pot.v = [spline](double x) { return spline->value(x); };
    pot.vx = [spline](double x) { return spline->deriv(x); };
    double sup = 0.0;
    const int probes = 512;
    for (int i = 0; i <= probes; ++i) {
        const double x = pot.x_lo + (pot.x_hi - pot.x_lo) * i / probes;
        sup = std::max(sup, spectral_norm(spline->value(x)));
    }
    pot.bound = sup * (1.0 + 1e-6);
    return pot;
}

DiracPotential DiracPotential::random_smooth(Rng& rng, BlockSplit split,
                                             double bound, int modes) {
    const int m1 = split.top, m2 = split.bottom;
    const double w0 = rng.uniform(0.4, 1.2);
    std::vector<CMatrix> coeff;
    coeff.push_back(rng.matrix(m1, m2));
    for (int n = 1; n <= modes; ++n) coeff.push_back(rng.matrix(m1, m2));

    auto raw = [coeff, w0](double x) {
        CMatrix acc = coeff[0];
        for (size_t n = 1; n < coeff.size(); ++n)
            acc += CMatrix(coeff[n] * std::exp(iu * (double(n) * w0) * x));
        return acc;
    };
    auto raw_dx = [coeff, w0](double x) {
        CMatrix acc = CMatrix::Zero(coeff[0].rows(), coeff[0].cols());
        for (size_t n = 1; n < coeff.size(); ++n)
            acc += CMatrix(coeff[n] * (iu * (double(n) * w0)) *
                           std::exp(iu * (double(n) * w0) * x));
        return acc;
    };

    // periodic, so a dense sample of one period bounds the sup norm
    double sup = 0.0;
    const double period = 2.0 * M_PI / w0;
    for (int i = 0; i <= 512; ++i)
        sup = std::max(sup, spectral_norm(raw(period * i / 512.0)));
    const double scale = sup > 0.0 ? 0.95 * bound / sup : 0.0;

    DiracPotential pot;
    pot.split = split;
    pot.v = [raw, scale](double x) { return CMatrix(scale * raw(x)); };
    pot.vx = [raw_dx, scale](double x) { return CMatrix(scale * raw_dx(x)); };
    pot.bound = bound;
    return pot;
}

CMatrix build_V(const CMatrix& v, const BlockSplit& split) {
    const int m = split.dim();
    CMatrix V = CMatrix::Zero(m, m);
    V.topRightCorner(split.top, split.bottom) = v;
    V.bottomLeftCorner(split.bottom, split.top) = v.adjoint();
    return V;
}

CMatrix build_G(const DiracPotential& pot, double x, Complex z) {
    const CMatrix j = signature_matrix(pot.split);
    const CMatrix V = build_V(pot.value(x), pot.split);
    return CMatrix(iu * (z * j + j * V));
}

CMatrix build_F_from(const CMatrix& v, const CMatrix& vx, const BlockSplit& split,
                     Complex z) {
    const CMatrix j = signature_matrix(split);
    const CMatrix V = build_V(v, split);
    const CMatrix Vx = build_V(vx, split);
    return CMatrix(-iu * (z * z * j + z * j * V -
                          (iu * Vx - j * V * V) / 2.0));
}

CMatrix build_F(const DiracPotential& pot, double x, Complex z) {
    return build_F_from(pot.value(x), pot.deriv(x), pot.split, z);
}

namespace {

// Liouville tripwire: log|det u| must match -Im(z) (m1 - m2) x. The check is
// only meaningful while cond(u) ~ e^{2|Im z| x} keeps the LU determinant
// accurate, so it is skipped once the predicted rounding floor passes 3e-7;
// the threshold widens with deliberately coarse integrator tolerances.
void check_liouville(const Propagation& p, const BlockSplit& split, double tol) {
    const double growth = 2.0 * std::abs(p.z.imag()) * p.x;
    if (growth > 21.0) return;
    const Complex det = CMatrix(p.u).determinant();
    const double logdet = std::log(std::abs(det));
    if (!std::isfinite(logdet))
        throw NumericalFailure("propagate_u", "det u vanished or overflowed");
    const double expected = -p.z.imag() * double(split.top - split.bottom) * p.x;
    if (std::abs(logdet - expected) > std::max(1e-6, 1e3 * tol))
        throw NumericalFailure("propagate_u", "Liouville determinant drift");
}

Propagation propagate_segment(const DiracPotential& pot, Propagation state,
                              double x_to, Complex z, double tol) {
    if (x_to < state.x) throw Error("propagate_u: x must not decrease");
    if (std::abs(z.imag()) * x_to > kOverflowGuard)
        throw OverflowGuard("propagate_u: |Im z| * x beyond 60");
    auto rhs = [&pot, z](double x, const CMatrix& u) {
        return CMatrix(build_G(pot, x, z) * u);
    };
    OdeStats stats;
    state.u = integrate_ode(rhs, state.u, state.x, x_to,
                            OdeOptions{.tol = tol}, &stats);
    state.x = x_to;
    state.error_estimate += stats.error_estimate;
    if (!all_finite(state.u))
        throw Overflow("propagate_u: non-finite fundamental solution");
    check_liouville(state, pot.split, tol);
    return state;
}

}  // namespace

Propagation propagate_u(const DiracPotential& pot, double x, Complex z,
                        double tol) {
    if (x < 0.0) throw Error("propagate_u: x >= 0 required");
    Propagation init{0.0, z, identity(pot.split.dim()), 0.0};
    return propagate_segment(pot, std::move(init), x, z, tol);
}

Propagation extend_u(const DiracPotential& pot, const Propagation& base,
                     double x, double tol) {
    return propagate_segment(pot, base, x, base.z, tol);
}

}  // namespace weylstrip
