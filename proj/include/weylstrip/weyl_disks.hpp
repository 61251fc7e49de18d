#pragma once

#include "weylstrip/dirac.hpp"
#include "weylstrip/matrix.hpp"

namespace weylstrip {

/// Canonical nonsingular parameter with the signature-form property:
/// the stacked matrix [I; omega] with a contraction omega (m2 x m1).
struct PairParam {
    CMatrix omega;

    static PairParam contraction(const CMatrix& omega);
    /// [I_top; omega], (top+bottom) x top.
    CMatrix stacked(const BlockSplit& split) const;
};

/// Moebius image  [0 I] u^{-1} P ([I 0] u^{-1} P)^{-1}  of a parameter.
CMatrix mobius_apply(const CMatrix& u, const PairParam& p,
                     const BlockSplit& split);

/// Matrix ball {center + r_left U r_right : ||U|| <= 1} carved out of the
/// Hermitian form A = u* j u; equal to {phi : [I phi*] A [I; phi] >= 0}.
struct WeylDisk {
    double x = 0.0;
    Complex z;
    CMatrix center;    // m2 x m1
    CMatrix r_left;    // m2 x m2, Hermitian PSD
    CMatrix r_right;   // m1 x m1, Hermitian PSD
    CMatrix form;      // the defining Hermitian form A

    /// Smallest eigenvalue of [I phi*] A [I; phi]; >= -tol means membership.
    double membership_margin(const CMatrix& phi) const;
    bool contains(const CMatrix& phi, double tol = 1e-8) const {
        return membership_margin(phi) >= -tol;
    }
    /// Ball point for a contraction parameter.
    CMatrix point(const CMatrix& contraction) const;
    /// Product of semi-radius norms, the certified radius of the ball.
    double radius_bound() const;
};

WeylDisk disk_from_u(const CMatrix& u, const BlockSplit& split, double x,
                     Complex z);

/// Weyl function estimate: ball center at the truncation point, with the
/// certified radius as error bound and the truncated square-integrability
/// integral logged as a diagnostic.
struct WeylEstimate {
    Complex z;
    CMatrix value;
    double error_bound = 0.0;
    double x_used = 0.0;
    double weyl_integral = 0.0;
};

struct WeylEstimateOptions {
    double tol = 1e-9;       // stop once the ball radius is this small
    double x_max = 1e9;      // hard cap (also capped by the overflow guard)
    double ode_tol = 1e-11;
    bool with_integral = false;  // compute the (slower) diagnostic integral
};

WeylEstimate estimate_weyl(const DiracPotential& pot, Complex z,
                           const WeylEstimateOptions& opt = {});

}  // namespace weylstrip
