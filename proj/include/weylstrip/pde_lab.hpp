#pragma once

#include <functional>
#include <vector>

#include "weylstrip/dnls.hpp"
#include "weylstrip/nwave.hpp"

namespace weylstrip {

/// Truncated strip [0, L] x [0, T] with nx space cells and nt output frames.
struct StripGrid {
    double length = 0.0;
    int nx = 0;
    double horizon = 0.0;
    int nt = 0;

    double dx() const { return length / nx; }
    double dt() const { return horizon / nt; }

    static StripGrid make(double length, int nx, double horizon, int nt);
};

/// Frames of matrix samples on the grid; frame j holds the profile at
/// t = j dt on the nx+1 space nodes.
struct FieldHistory {
    StripGrid grid;
    std::vector<std::vector<CMatrix>> frames;

    const CMatrix& at(int frame, int node) const {
        return frames[size_t(frame)][size_t(node)];
    }
    /// Bicubic (spline in x per frame, then spline across frames).
    CMatrix eval(double x, double t) const;
    /// Trace t -> value at x = 0 (the computed outflow boundary).
    std::function<CMatrix(double)> trace_x0() const;
    std::function<CMatrix(double, double)> field() const;

    double max_norm() const;
    /// Worst Hermiticity defect over all samples.
    double hermiticity_defect() const;
};

/// Cubic-defocusing Schroedinger integrator: second-order central
/// differences in space, adaptive explicit stepping in time, Dirichlet
/// closures at both ends.
FieldHistory integrate_dnls(
    const std::function<CMatrix(double)>& init,
    const std::function<CMatrix(double)>& left_bc,
    const std::function<CMatrix(double)>& right_bc, const StripGrid& grid,
    double ode_tol = 1e-8);

/// Resonant-interaction integrator in first-order form: each off-diagonal
/// entry rides its own characteristic with speed
/// (dhat_i - dhat_j)/(d_i - d_j) > 0 (leftward transport), coupled through
/// the commutator product; the diagonal is constant in t. Signals enter at
/// x = L, so the inflow closure lives there; the x = 0 trace is computed.
FieldHistory integrate_nwave(const std::function<CMatrix(double)>& init,
                             const std::function<CMatrix(double)>& inflow,
                             const NWaveConfig& cfg, const StripGrid& grid);

/// Max-norm zero-curvature defect G_t - F_x + [G, F] over interior grid
/// points, derivatives by central differences on the sampled fields.
double zero_curvature_residual(const std::vector<std::vector<CMatrix>>& g,
                               const std::vector<std::vector<CMatrix>>& f,
                               double dx, double dt);

/// Same defect with closed-form derivative fields, evaluated pointwise.
struct LaxPairDerivs {
    std::function<CMatrix(double, double, Complex)> G, F, Gt, Fx;
};
double zero_curvature_residual_exact(
    const LaxPairDerivs& pair, Complex z,
    const std::vector<std::pair<double, double>>& points);

/// Sample a Lax pair on the grid (helper for the discrete residual).
std::vector<std::vector<CMatrix>> sample_field(
    const std::function<CMatrix(double, double)>& fn, const StripGrid& grid);

/// Discrete mass integral of |v|^2 dx by the trapezoid rule at a frame.
double l2_mass(const FieldHistory& history, int frame);

}  // namespace weylstrip
