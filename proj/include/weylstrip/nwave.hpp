#pragma once

#include <functional>
#include <vector>

#include "weylstrip/dnls.hpp"
#include "weylstrip/matrix.hpp"

namespace weylstrip {

/// Diagonal data of the resonant-interaction auxiliary systems plus the
/// bounds that carve out the admissible spectral half-plane Im z < -M.
struct NWaveConfig {
    RVector d;       // strictly decreasing, positive
    RVector dhat;    // strictly decreasing, positive
    double m0 = 0.0;       // sup ||zeta||
    double m_bound = 0.0;  // admissibility threshold M > 2 m0 / min gap
    double mhat = 0.0;     // sup ||[Dhat, rho(0,.)]||

    int size() const { return int(d.size()); }
    double min_gap() const;

    static NWaveConfig make(RVector d, RVector dhat, double m0, double m_bound,
                            double mhat);
};

/// zeta = [D, rho]; skew-Hermitian with zero diagonal for Hermitian rho.
CMatrix build_zeta(const RVector& d, const CMatrix& rho);

/// Commutator-scaled fundamental solution: mfac solves
/// mfac_x = i z [D, mfac] - zeta mfac, mfac(0) = I, and w = mfac e^{i z x D}.
struct ScaledPropagation {
    double x = 0.0;
    Complex z;
    CMatrix mfac;
    double error_estimate = 0.0;
};

ScaledPropagation propagate_w_scaled(const NWaveConfig& cfg,
                                     const std::function<CMatrix(double)>& zeta,
                                     double x, Complex z, double tol = 1e-10);

ScaledPropagation extend_w_scaled(const NWaveConfig& cfg,
                                  const std::function<CMatrix(double)>& zeta,
                                  const ScaledPropagation& base, double x,
                                  double tol = 1e-10);

/// w(x, z) itself; only valid while |Im z| d_1 x stays under the guard.
CMatrix reassemble_w(const NWaveConfig& cfg, const ScaledPropagation& prop);

/// Contraction block psi_k extracted from a propagation (or a limit of
/// such); Weyl-data instances satisfy psi* psi <= I.
struct PsiMatrix {
    int k = 0;
    CMatrix value;  // k x (m - k)
    double x = 0.0;
    double t = 0.0;
    Complex z;
    bool is_limit = false;
    double limit_error = 0.0;
};

PsiMatrix psi_k(const NWaveConfig& cfg, const ScaledPropagation& prop, int k);

/// Truncation-doubling estimate of the x -> infinity limit of psi_k.
PsiMatrix psi_limit(const NWaveConfig& cfg,
                    const std::function<CMatrix(double)>& zeta, Complex z,
                    int k, double x0, double tol = 1e-10,
                    double ode_tol = 1e-11);

/// Assemble the normalized sample from the m-1 limit blocks: column k+1
/// holds psi_k e_1 above a unit diagonal, zeros below.
CMatrix weyl_columns(const std::vector<PsiMatrix>& psis);

/// Inverse transformation: the block ratio of the sample.
PsiMatrix psi_from_phi(const CMatrix& phi, int k, Complex z);

/// Nonsingular-with-signature-property check for tall parameters.
bool is_property_Jk(const CMatrix& q, int k, double tol = 1e-10);

/// Boundary propagator in scaled form: R(t, z) = mfac e^{i z t Dhat},
/// mfac_t = i z [Dhat, mfac] - [Dhat, rho_hat(t)] mfac.
struct NWaveEvolution {
    double t = 0.0;
    Complex z;
    CMatrix mfac;
    double error_estimate = 0.0;
};

NWaveEvolution propagate_Rhat(const NWaveConfig& cfg,
                              const std::function<CMatrix(double)>& rho_hat,
                              double t, Complex z, double tol = 1e-10);

/// R(t, z) itself; guarded like reassemble_w.
CMatrix reassemble_R(const NWaveConfig& cfg, const NWaveEvolution& evo);

/// Linear-fractional evolution of the sample, blockwise over k, using
/// exponential-factored arithmetic throughout.
CMatrix evolve_nwave(const NWaveConfig& cfg, const CMatrix& phi0,
                     const NWaveEvolution& evo);

/// Triangular normalization of a raw fundamental sample: lower-triangular
/// mhat built from trailing-block inverses, phi0 = raw * mhat.
CMatrix normalize_gw(const CMatrix& raw);

/// || R phi0 e^{-i z t Dhat} ||, the boundedness diagnostic.
double gw_boundedness_stat(const NWaveConfig& cfg, const NWaveEvolution& evo,
                           const CMatrix& phi0);

/// e^{-2 |Im z| dhat_{k+1} t - 4 mhat t} || R [psi; I] ||^2; at most 2 for
/// genuine Weyl data.
double evolution_growth_stat(const NWaveConfig& cfg, const NWaveEvolution& evo,
                             const PsiMatrix& psi0);

/// || w phi e^{-i z x D} || at the propagation point (defining bound of a
/// generalized Weyl function, reported not asserted).
double gw_defining_stat(const NWaveConfig& cfg, const ScaledPropagation& prop,
                        const CMatrix& phi);

/// Zero-curvature pair of the resonant-interaction equation.
LaxPair nwave_lax(const NWaveConfig& cfg,
                  const std::function<CMatrix(double, double)>& rho);

}  // namespace weylstrip
