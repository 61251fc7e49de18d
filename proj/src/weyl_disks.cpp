#include "weylstrip/weyl_disks.hpp"

#include <cmath>
#include <limits>

namespace weylstrip {

PairParam PairParam::contraction(const CMatrix& omega) {
    if (spectral_norm(omega) > 1.0 + 1e-12)
        throw Error("PairParam: parameter must be a contraction");
    return PairParam{omega};
}

CMatrix PairParam::stacked(const BlockSplit& split) const {
    if (omega.rows() != split.bottom || omega.cols() != split.top)
        throw DimensionMismatch("PairParam: omega must be bottom x top");
    CMatrix p(split.dim(), split.top);
    p.topRows(split.top) = CMatrix::Identity(split.top, split.top);
    p.bottomRows(split.bottom) = omega;
    return p;
}

CMatrix mobius_apply(const CMatrix& u, const PairParam& p,
                     const BlockSplit& split) {
    const CMatrix x = lu_solve(u, p.stacked(split));
    const CMatrix den = x.topRows(split.top);
    const CMatrix num = x.bottomRows(split.bottom);
    if (condition_number(den) > 1e12)
        throw SingularDenominator("mobius_apply: denominator near singular");
    return solve_right(num, den);
}

double WeylDisk::membership_margin(const CMatrix& phi) const {
    const int m1 = int(center.cols());
    const int m2 = int(center.rows());
    CMatrix w(m1 + m2, m1);
    w.topRows(m1) = CMatrix::Identity(m1, m1);
    w.bottomRows(m2) = phi;
    const CMatrix q = w.adjoint() * form * w;
    return min_hermitian_eigenvalue(q);
}

CMatrix WeylDisk::point(const CMatrix& contraction) const {
    return CMatrix(center + r_left * contraction * r_right);
}

double WeylDisk::radius_bound() const {
    return spectral_norm(r_left) * spectral_norm(r_right);
}

WeylDisk disk_from_u(const CMatrix& u, const BlockSplit& split, double x,
                     Complex z) {
    const CMatrix j = signature_matrix(split);
    const CMatrix a = u.adjoint() * j * u;
    const int m1 = split.top, m2 = split.bottom;
    const CMatrix a11 = a.topLeftCorner(m1, m1);
    const CMatrix a12 = a.topRightCorner(m1, m2);
    const CMatrix a21 = a.bottomLeftCorner(m2, m1);
    const CMatrix a22 = a.bottomRightCorner(m2, m2);

    if (max_hermitian_eigenvalue(a22) >= -1e-12)
        throw NotNegativeDefinite(
            "disk_from_u: lower-right block of u* j u not negative definite");

    const CMatrix b = -a22;  // positive definite
    WeylDisk disk;
    disk.x = x;
    disk.z = z;
    disk.form = a;
    disk.center = lu_solve(b, a21);
    disk.r_left = herm_sqrt(lu_solve(b, identity(m2)));
    CMatrix schur = a11 + a12 * disk.center;
    schur = (schur + schur.adjoint()) / 2.0;
    // the completed square is a tiny difference of ||A||-sized terms, so
    // the PSD clamp must be measured against ||A||
    disk.r_right = herm_sqrt(schur, frobenius_norm(a));
    return disk;
}

namespace {

// Truncated square-integrability integral of the estimate, Simpson rule.
double weyl_integral_diag(const DiracPotential& pot, Complex z, double x_used,
                          const CMatrix& phi, double ode_tol) {
    const int m1 = pot.split.top;
    CMatrix w(pot.split.dim(), m1);
    w.topRows(m1) = CMatrix::Identity(m1, m1);
    w.bottomRows(pot.split.bottom) = phi;

    const int n = 128;  // even
    const double h = x_used / n;
    Propagation prop{0.0, z, identity(pot.split.dim()), 0.0};
    CMatrix acc = CMatrix::Zero(m1, m1);
    for (int i = 0; i <= n; ++i) {
        if (i > 0) prop = extend_u(pot, prop, i * h, ode_tol);
        const CMatrix col = prop.u * w;
        const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += CMatrix(wgt * (col.adjoint() * col));
    }
    return spectral_norm(CMatrix(acc * (h / 3.0)));
}

}  // namespace

WeylEstimate estimate_weyl(const DiracPotential& pot, Complex z,
                           const WeylEstimateOptions& opt) {
    SpectralPoint::dirac_upper(z);
    const double x_cap =
        std::min(opt.x_max, kOverflowGuard / std::abs(z.imag()));

    double x = std::min(1.0, x_cap);
    Propagation prop = propagate_u(pot, x, z, opt.ode_tol);
    WeylDisk disk = disk_from_u(prop.u, pot.split, x, z);
    while (disk.radius_bound() > opt.tol && x < x_cap * (1.0 - 1e-12)) {
        x = std::min(2.0 * x, x_cap);
        prop = extend_u(pot, prop, x, opt.ode_tol);
        disk = disk_from_u(prop.u, pot.split, x, z);
    }

    WeylEstimate est;
    est.z = z;
    est.value = disk.center;
    // nothing below the representation floor of the center is certifiable
    est.error_bound =
        std::max(disk.radius_bound(),
                 4.0 * std::numeric_limits<double>::epsilon() *
                     (1.0 + spectral_norm(disk.center)));
    est.x_used = x;
    if (opt.with_integral)
        est.weyl_integral =
            weyl_integral_diag(pot, z, x, est.value, opt.ode_tol);
    return est;
}

}  // namespace weylstrip
