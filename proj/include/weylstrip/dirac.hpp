#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "weylstrip/interp.hpp"
#include "weylstrip/matrix.hpp"
#include "weylstrip/rng.hpp"

namespace weylstrip {

enum class SpectralRegime { DiracUpper, DiracReal, NWaveLower };

/// Spectral parameter together with the half-plane it is admissible in.
struct SpectralPoint {
    Complex z;
    SpectralRegime regime;

    static SpectralPoint dirac_upper(Complex z);
    static SpectralPoint dirac_real(double z);
    /// Im z < -threshold required.
    static SpectralPoint nwave_lower(Complex z, double threshold);
};

/// Potential of the selfadjoint Dirac (AKNS / Zakharov-Shabat) system:
/// an evaluator for the top-right block v(x), optionally its x-derivative,
/// and a declared sup-norm bound that is re-checked on every evaluation.
struct DiracPotential {
    BlockSplit split;
    std::function<CMatrix(double)> v;
    std::function<CMatrix(double)> vx;  // empty when unavailable
    double bound = 0.0;
    double x_lo = 0.0;
    double x_hi = std::numeric_limits<double>::infinity();

    CMatrix value(double x) const;
    CMatrix deriv(double x) const;
    bool has_deriv() const { return bool(vx); }

    static DiracPotential zero(BlockSplit split);
    static DiracPotential constant(const CMatrix& v0);
    /// v(x) = amp * e^{i k x} (scalar).
    static DiracPotential cw_slice(Complex amp, double k);
    /// v(x) = amp * e^{i k x} * Q for a fixed matrix Q (square systems).
    static DiracPotential cw_matrix_slice(Complex amp, double k, const CMatrix& q);
    /// Cubic interpolation through samples; derivative from the spline.
    static DiracPotential sampled(BlockSplit split, std::vector<double> xs,
                                  const std::vector<CMatrix>& values);
    /// Smooth random trigonometric potential with sup norm <= bound.
    static DiracPotential random_smooth(Rng& rng, BlockSplit split, double bound,
                                        int modes = 3);
};

/// V(x) = [[0, v],[v*, 0]], Hermitian by construction.
CMatrix build_V(const CMatrix& v, const BlockSplit& split);

/// G = i (z j + j V(x)).
CMatrix build_G(const DiracPotential& pot, double x, Complex z);

/// F = -i (z^2 j + z j V - (i V_x - j V^2)/2); needs the derivative trace.
CMatrix build_F(const DiracPotential& pot, double x, Complex z);
CMatrix build_F_from(const CMatrix& v, const CMatrix& vx, const BlockSplit& split,
                     Complex z);

/// Fundamental solution u(x, z) of u_x = G u, u(0) = I, with the
/// accumulated local-error estimate of the integrator.
struct Propagation {
    double x = 0.0;
    Complex z;
    CMatrix u;
    double error_estimate = 0.0;
};

inline constexpr double kOverflowGuard = 60.0;  // cap on |Im z| * x

Propagation propagate_u(const DiracPotential& pot, double x, Complex z,
                        double tol = 1e-10);

/// Continue an existing propagation to a larger x (same potential and z).
Propagation extend_u(const DiracPotential& pot, const Propagation& base,
                     double x, double tol = 1e-10);

}  // namespace weylstrip
