#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "weylstrip/dirac.hpp"
#include "weylstrip/weyl_disks.hpp"

namespace weylstrip {

/// Plane-wave family v = A e^{i(kx - omega t)} with the frequency forced
/// by the cubic defocusing Schroedinger equation.
struct CWSolution {
    double amplitude = 0.0;
    double wavenumber = 0.0;
    double frequency = 0.0;

    static CWSolution make(double amplitude, double wavenumber) {
        CWSolution cw;
        cw.amplitude = amplitude;
        cw.wavenumber = wavenumber;
        cw.frequency = (wavenumber * wavenumber +
                        2.0 * amplitude * amplitude) / 2.0;
        return cw;
    }

    Complex value(double x, double t) const {
        return amplitude * std::exp(iu * (wavenumber * x - frequency * t));
    }
};

/// Two-variable potential with the derivative traces needed by the two
/// auxiliary systems; vt/vxx optional (closed-form families provide them).
struct Field2D {
    BlockSplit split;
    std::function<CMatrix(double, double)> v;
    std::function<CMatrix(double, double)> vx;
    std::function<CMatrix(double, double)> vt;   // may be empty
    std::function<CMatrix(double, double)> vxx;  // may be empty

    static Field2D from_cw(const CWSolution& cw);
    static Field2D from_cw_matrix(const CWSolution& cw, const CMatrix& q);
    /// v = x t, the stock non-solution control.
    static Field2D product_xt();

    DiracPotential x_slice(double t, double bound_hint = 0.0) const;
};

/// Boundary traces v(0, .) and v_x(0, .) on the strip [0, a).
struct BoundaryData {
    double a = 0.0;
    BlockSplit split;
    std::function<CMatrix(double)> v0;
    std::function<CMatrix(double)> vx0;

    static BoundaryData zero(BlockSplit split, double a);
    static BoundaryData from_cw(const CWSolution& cw, double a);
    static BoundaryData from_field(const Field2D& field, double a);
};

/// Max-norm defect of 2 v_t - i (v_xx - 2 v v* v) over the given points.
/// Missing derivative closures fall back to central differences.
double dnls_residual(const Field2D& field,
                     const std::vector<std::pair<double, double>>& points);

/// Boundary propagator R(t, z): R_t = F(0, t, z) R, R(0) = I.
struct EvolutionOperator {
    double t = 0.0;
    Complex z;
    BlockSplit split;
    CMatrix r;

    CMatrix r11() const { return r.topLeftCorner(split.top, split.top); }
    CMatrix r12() const { return r.topRightCorner(split.top, split.bottom); }
    CMatrix r21() const { return r.bottomLeftCorner(split.bottom, split.top); }
    CMatrix r22() const {
        return r.bottomRightCorner(split.bottom, split.bottom);
    }
};

EvolutionOperator propagate_R(const BoundaryData& bd, double t, Complex z,
                              double tol = 1e-10);

/// Linear-fractional action (R21 + R22 phi0)(R11 + R12 phi0)^{-1}.
CMatrix evolve_weyl(const CMatrix& phi0, const EvolutionOperator& op);

/// Zero-curvature pair; generic so the N-wave systems can reuse the
/// factorization check.
struct LaxPair {
    int dim = 0;
    std::function<CMatrix(double x, double t, Complex z)> G;
    std::function<CMatrix(double x, double t, Complex z)> F;
};

LaxPair dirac_lax(const Field2D& field);

/// || u(x,t,z) R(t,z) - R(x,t,z) u(x,0,z) || for the pair's two families
/// of normalized fundamental solutions, measured relative to
/// max(1, product norms): the products grow exponentially in |Im z|, so
/// only the normalized defect is scale-free.
double factorization_residual(const LaxPair& pair, Complex z, double x,
                              double t, double tol = 1e-10);

struct ConsistencyOptions {
    double ball_tol = 1e-9;
    double ode_tol = 1e-11;
    double x_max = 1e9;
    double strip_height = 4.0;
    int threads = 1;
};

struct ConsistencyRow {
    Complex z;
    double deviation = 0.0;
    double bound_initial = 0.0;  // ball radius of the t=0 estimate
    double bound_direct = 0.0;   // ball radius of the direct estimate
};

struct ConsistencyReport {
    std::vector<ConsistencyRow> rows;
    double max_deviation = 0.0;
};

/// Direct estimate at time t vs. evolved estimate from time 0, per z.
ConsistencyReport evolution_consistency(const CWSolution& cw,
                                        const std::vector<Complex>& zgrid,
                                        double t,
                                        const ConsistencyOptions& opt = {});

}  // namespace weylstrip
