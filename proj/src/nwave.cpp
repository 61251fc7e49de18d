#include "weylstrip/nwave.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "weylstrip/ode.hpp"

namespace weylstrip {

namespace {

void require_admissible(const NWaveConfig& cfg, Complex z, const char* who) {
    if (!(z.imag() < -cfg.m_bound))
        throw Error(std::string(who) + ": Im z < -M required");
}

CMatrix diag_commutator(const RVector& d, const CMatrix& a) {
    CMatrix out(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out(i, j) = (d(i) - d(j)) * a(i, j);
    return out;
}

}  // namespace

double NWaveConfig::min_gap() const {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i + 1 < d.size(); ++i)
        gap = std::min(gap, d(i) - d(i + 1));
    return gap;
}

NWaveConfig NWaveConfig::make(RVector d, RVector dhat, double m0,
                              double m_bound, double mhat) {
    if (d.size() < 2 || dhat.size() != d.size())
        throw BadConfig("NWaveConfig: need matching diagonals, m >= 2");
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!(d(i) > 0.0) || !(dhat(i) > 0.0))
            throw BadConfig("NWaveConfig: diagonal entries must be positive");
        if (i > 0 && !(d(i) < d(i - 1)))
            throw BadConfig("NWaveConfig: entries of D must strictly decrease");
        if (i > 0 && !(dhat(i) < dhat(i - 1)))
            throw BadConfig(
                "NWaveConfig: entries of Dhat must strictly decrease");
    }
    NWaveConfig cfg;
    cfg.d = std::move(d);
    cfg.dhat = std::move(dhat);
    cfg.m0 = m0;
    cfg.m_bound = m_bound;
    cfg.mhat = mhat;
    if (!(m_bound > 2.0 * m0 / cfg.min_gap()))
        throw BadConfig("NWaveConfig: M must exceed 2 M0 / min gap of D");
    return cfg;
}

CMatrix build_zeta(const RVector& d, const CMatrix& rho) {
    if (rho.rows() != d.size() || rho.cols() != d.size())
        throw DimensionMismatch("build_zeta: rho must be m x m");
    if (!is_hermitian(rho))
        throw NotHermitian("build_zeta: rho not Hermitian within 1e-12");
    return diag_commutator(d, rho);
}

namespace {

// det mfac = 1 (traceless generator); same conditioning caveat as the
// Dirac tripwire, so skip once the growth drowns the LU determinant.
void check_unit_det(const NWaveConfig& cfg, const ScaledPropagation& p,
                    const char* who) {
    const double spread = cfg.d(0) - cfg.d(cfg.size() - 1);
    if (2.0 * std::abs(p.z.imag()) * spread * p.x > 21.0) return;
    const Complex det = CMatrix(p.mfac).determinant();
    if (std::abs(det - Complex(1.0, 0.0)) > 1e-6)
        throw NumericalFailure(who, "unit-determinant drift");
}

ScaledPropagation advance_scaled(const NWaveConfig& cfg, const RVector& diag,
                                 const std::function<CMatrix(double)>& pot,
                                 ScaledPropagation state, double x_to,
                                 double tol, const char* who) {
    if (x_to < state.x) throw Error(std::string(who) + ": must not rewind");
    const double spread = diag(0) - diag(diag.size() - 1);
    if (std::abs(state.z.imag()) * spread * x_to > kOverflowGuard)
        throw OverflowGuard(std::string(who) + ": |Im z| (d_1 - d_m) x beyond 60");
    const Complex z = state.z;
    auto rhs = [&](double x, const CMatrix& m) {
        return CMatrix(iu * z * diag_commutator(diag, m) - pot(x) * m);
    };
    OdeStats stats;
    state.mfac = integrate_ode(rhs, state.mfac, state.x, x_to,
                               OdeOptions{.tol = tol}, &stats);
    state.x = x_to;
    state.error_estimate += stats.error_estimate;
    if (!all_finite(state.mfac))
        throw Overflow(std::string(who) + ": non-finite propagation");
    return state;
}

}  // namespace

ScaledPropagation propagate_w_scaled(const NWaveConfig& cfg,
                                     const std::function<CMatrix(double)>& zeta,
                                     double x, Complex z, double tol) {
    require_admissible(cfg, z, "propagate_w_scaled");
    if (x < 0.0) throw Error("propagate_w_scaled: x >= 0 required");
    ScaledPropagation init{0.0, z, identity(cfg.size()), 0.0};
    auto out = advance_scaled(cfg, cfg.d, zeta, std::move(init), x, tol,
                              "propagate_w_scaled");
    check_unit_det(cfg, out, "propagate_w_scaled");
    return out;
}

ScaledPropagation extend_w_scaled(const NWaveConfig& cfg,
                                  const std::function<CMatrix(double)>& zeta,
                                  const ScaledPropagation& base, double x,
                                  double tol) {
    auto out =
        advance_scaled(cfg, cfg.d, zeta, base, x, tol, "extend_w_scaled");
    check_unit_det(cfg, out, "extend_w_scaled");
    return out;
}

CMatrix reassemble_w(const NWaveConfig& cfg, const ScaledPropagation& prop) {
    if (std::abs(prop.z.imag()) * cfg.d(0) * prop.x > kOverflowGuard)
        throw OverflowGuard("reassemble_w: |Im z| d_1 x beyond 60");
    CMatrix w = prop.mfac;
    for (Eigen::Index j = 0; j < w.cols(); ++j)
        w.col(j) *= std::exp(iu * prop.z * prop.x * cfg.d(j));
    return w;
}

PsiMatrix psi_k(const NWaveConfig& cfg, const ScaledPropagation& prop, int k) {
    const int m = cfg.size();
    if (k < 1 || k >= m) throw BadK("psi_k: need 1 <= k < m");
    require_admissible(cfg, prop.z, "psi_k");

    CMatrix q = CMatrix::Zero(m, m - k);
    q.bottomRows(m - k) = CMatrix::Identity(m - k, m - k);
    const CMatrix x = lu_solve(prop.mfac, q);
    const CMatrix x1 = x.topRows(k);
    const CMatrix x2 = x.bottomRows(m - k);
    if (condition_number(x2) > 1e12)
        throw SingularX2("psi_k: lower block of the parameter frame singular");
    CMatrix ratio = lu_solve(CMatrix(x2.transpose()), CMatrix(x1.transpose()))
                        .transpose();

    // exponentials applied entrywise: every factor decays for i <= k < k+j
    PsiMatrix psi;
    psi.k = k;
    psi.z = prop.z;
    psi.x = prop.x;
    psi.value = CMatrix(k, m - k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < m - k; ++j)
            psi.value(i, j) =
                std::exp(iu * prop.z * prop.x * (cfg.d(k + j) - cfg.d(i))) *
                ratio(i, j);
    if (spectral_norm(psi.value) > 1.0 + 1e-8)
        throw NumericalFailure("psi_k", "contraction bound violated");
    return psi;
}

PsiMatrix psi_limit(const NWaveConfig& cfg,
                    const std::function<CMatrix(double)>& zeta, Complex z,
                    int k, double x0, double tol, double ode_tol) {
    const double spread = cfg.d(0) - cfg.d(cfg.size() - 1);
    const double x_cap = kOverflowGuard / (std::abs(z.imag()) * spread);

    double x = std::min(x0, x_cap);
    ScaledPropagation prop = propagate_w_scaled(cfg, zeta, x, z, ode_tol);
    PsiMatrix cur = psi_k(cfg, prop, k);
    for (;;) {
        const double x_next = std::min(2.0 * x, x_cap);
        if (x_next <= x * (1.0 + 1e-12)) break;
        prop = extend_w_scaled(cfg, zeta, prop, x_next, ode_tol);
        PsiMatrix next = psi_k(cfg, prop, k);
        next.limit_error = spectral_norm(CMatrix(next.value - cur.value));
        cur = next;
        x = x_next;
        if (cur.limit_error <= tol) break;
    }
    cur.is_limit = true;
    return cur;
}

CMatrix weyl_columns(const std::vector<PsiMatrix>& psis) {
    if (psis.empty()) throw DimensionMismatch("weyl_columns: no blocks");
    const int m = psis.front().k + int(psis.front().value.cols());
    if (int(psis.size()) != m - 1)
        throw DimensionMismatch("weyl_columns: need blocks for k = 1..m-1");
    CMatrix phi = CMatrix::Identity(m, m);
    std::vector<bool> seen(size_t(m), false);
    for (const auto& psi : psis) {
        const int k = psi.k;
        if (k < 1 || k >= m || psi.value.rows() != k ||
            psi.value.cols() != m - k || seen[size_t(k)])
            throw DimensionMismatch("weyl_columns: inconsistent block set");
        seen[size_t(k)] = true;
        phi.block(0, k, k, 1) = psi.value.col(0);
    }
    return phi;
}

PsiMatrix psi_from_phi(const CMatrix& phi, int k, Complex z) {
    const int m = int(phi.rows());
    if (phi.cols() != m) throw DimensionMismatch("psi_from_phi: square input");
    if (k < 1 || k >= m) throw BadK("psi_from_phi: need 1 <= k < m");
    const CMatrix num = phi.topRightCorner(k, m - k);
    const CMatrix den = phi.bottomRightCorner(m - k, m - k);
    if (condition_number(den) > 1e12)
        throw SingularBlock("psi_from_phi: trailing block singular");
    PsiMatrix psi;  // raw inverse-transform value, no contraction claim
    psi.k = k;
    psi.z = z;
    psi.is_limit = true;
    psi.value =
        lu_solve(CMatrix(den.transpose()), CMatrix(num.transpose())).transpose();
    return psi;
}

bool is_property_Jk(const CMatrix& q, int k, double tol) {
    const int m = int(q.rows());
    if (q.cols() != m - k || k < 1 || k >= m) return false;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd{Eigen::MatrixXcd(q)};
    if (svd.singularValues()(q.cols() - 1) <= tol) return false;  // singular
    CMatrix jk = CMatrix::Identity(m, m);
    jk.bottomRightCorner(m - k, m - k) *= Complex(-1.0, 0.0);
    return max_hermitian_eigenvalue(CMatrix(q.adjoint() * jk * q)) <= tol;
}

NWaveEvolution propagate_Rhat(const NWaveConfig& cfg,
                              const std::function<CMatrix(double)>& rho_hat,
                              double t, Complex z, double tol) {
    require_admissible(cfg, z, "propagate_Rhat");
    if (t < 0.0) throw Error("propagate_Rhat: t >= 0 required");
    auto zeta_hat = [&cfg, &rho_hat](double s) {
        return build_zeta(cfg.dhat, rho_hat(s));
    };
    ScaledPropagation init{0.0, z, identity(cfg.size()), 0.0};
    auto prop = advance_scaled(cfg, cfg.dhat, zeta_hat, std::move(init), t, tol,
                               "propagate_Rhat");
    NWaveEvolution evo;
    evo.t = prop.x;
    evo.z = z;
    evo.mfac = prop.mfac;
    evo.error_estimate = prop.error_estimate;
    return evo;
}

CMatrix reassemble_R(const NWaveConfig& cfg, const NWaveEvolution& evo) {
    if (std::abs(evo.z.imag()) * cfg.dhat(0) * evo.t > kOverflowGuard)
        throw OverflowGuard("reassemble_R: |Im z| dhat_1 t beyond 60");
    CMatrix r = evo.mfac;
    for (Eigen::Index j = 0; j < r.cols(); ++j)
        r.col(j) *= std::exp(iu * evo.z * evo.t * cfg.dhat(j));
    return r;
}

namespace {

// B = R phi0 e^{-i z t Dhat} = mfac (E o phi0), E_ij = e^{i z t (dh_i - dh_j)};
// the exponentials are attached entrywise so no stored factor outgrows B.
CMatrix evolved_frame(const NWaveConfig& cfg, const NWaveEvolution& evo,
                      const CMatrix& phi0) {
    const int m = cfg.size();
    if (phi0.rows() != m || phi0.cols() != m)
        throw DimensionMismatch("evolve_nwave: phi0 must be m x m");
    const double spread = cfg.dhat(0) - cfg.dhat(m - 1);
    if (std::abs(evo.z.imag()) * spread * evo.t > kOverflowGuard)
        throw OverflowGuard("evolve_nwave: |Im z| (dhat_1 - dhat_m) t beyond 60");
    CMatrix scaled(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            scaled(i, j) =
                std::exp(iu * evo.z * evo.t * (cfg.dhat(i) - cfg.dhat(j))) *
                phi0(i, j);
    return CMatrix(evo.mfac * scaled);
}

}  // namespace

CMatrix evolve_nwave(const NWaveConfig& cfg, const CMatrix& phi0,
                     const NWaveEvolution& evo) {
    const int m = cfg.size();
    const CMatrix frame = evolved_frame(cfg, evo, phi0);
    std::vector<PsiMatrix> blocks;
    blocks.reserve(size_t(m) - 1);
    for (int k = 1; k < m; ++k) {
        const CMatrix num = frame.topRightCorner(k, m - k);
        const CMatrix den = frame.bottomRightCorner(m - k, m - k);
        if (condition_number(den) > 1e12)
            throw SingularDenominator("evolve_nwave: block denominator singular");
        PsiMatrix psi;
        psi.k = k;
        psi.z = evo.z;
        psi.t = evo.t;
        psi.is_limit = true;
        psi.value = lu_solve(CMatrix(den.transpose()), CMatrix(num.transpose()))
                        .transpose();
        blocks.push_back(std::move(psi));
    }
    return weyl_columns(blocks);
}

CMatrix normalize_gw(const CMatrix& raw) {
    const int m = int(raw.rows());
    if (raw.cols() != m) throw DimensionMismatch("normalize_gw: square input");
    CMatrix mhat = CMatrix::Zero(m, m);
    for (int k = 1; k <= m; ++k) {
        const CMatrix pk = raw.bottomRightCorner(k, k);
        if (condition_number(pk) > 1e12)
            throw SingularTrailingBlock(
                k, "normalize_gw: trailing block " + std::to_string(k) +
                       " singular");
        CVector e1 = CVector::Zero(k);
        e1(0) = Complex(1.0, 0.0);
        mhat.block(m - k, m - k, k, 1) = lu_solve(pk, CMatrix(e1));
    }
    CMatrix phi0 = raw * mhat;
    // the construction pins the diagonal and the lower triangle; project
    // out the rounding dirt so the normalization holds exactly
    for (int i = 0; i < m; ++i) {
        phi0(i, i) = Complex(1.0, 0.0);
        for (int j = 0; j < i; ++j) phi0(i, j) = Complex(0.0, 0.0);
    }
    return phi0;
}

double gw_boundedness_stat(const NWaveConfig& cfg, const NWaveEvolution& evo,
                           const CMatrix& phi0) {
    return spectral_norm(evolved_frame(cfg, evo, phi0));
}

double evolution_growth_stat(const NWaveConfig& cfg, const NWaveEvolution& evo,
                             const PsiMatrix& psi0) {
    const int m = cfg.size();
    const int k = psi0.k;
    if (std::abs(evo.z.imag()) * cfg.dhat(0) * evo.t > kOverflowGuard)
        throw OverflowGuard("evolution_growth_stat: guard exceeded");
    CMatrix stack(m, m - k);
    stack.topRows(k) = psi0.value;
    stack.bottomRows(m - k) = CMatrix::Identity(m - k, m - k);
    for (int i = 0; i < m; ++i)
        stack.row(i) *= std::exp(iu * evo.z * evo.t * cfg.dhat(i));
    const double norm = spectral_norm(CMatrix(evo.mfac * stack));
    const double eta = std::abs(evo.z.imag());
    return std::exp(-2.0 * eta * cfg.dhat(k) * evo.t -
                    4.0 * cfg.mhat * evo.t) *
           norm * norm;
}

double gw_defining_stat(const NWaveConfig& cfg, const ScaledPropagation& prop,
                        const CMatrix& phi) {
    const int m = cfg.size();
    CMatrix scaled(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            scaled(i, j) =
                std::exp(iu * prop.z * prop.x * (cfg.d(i) - cfg.d(j))) *
                phi(i, j);
    return spectral_norm(CMatrix(prop.mfac * scaled));
}

LaxPair nwave_lax(const NWaveConfig& cfg,
                  const std::function<CMatrix(double, double)>& rho) {
    LaxPair pair;
    pair.dim = cfg.size();
    pair.G = [cfg, rho](double x, double t, Complex z) {
        CMatrix g = -build_zeta(cfg.d, rho(x, t));
        for (int i = 0; i < cfg.size(); ++i) g(i, i) += iu * z * cfg.d(i);
        return g;
    };
    pair.F = [cfg, rho](double x, double t, Complex z) {
        CMatrix f = -build_zeta(cfg.dhat, rho(x, t));
        for (int i = 0; i < cfg.size(); ++i) f(i, i) += iu * z * cfg.dhat(i);
        return f;
    };
    return pair;
}

}  // namespace weylstrip
