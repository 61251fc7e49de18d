#pragma once

#include <complex>

#include <Eigen/Dense>

#include "weylstrip/errors.hpp"

namespace weylstrip {

using Complex = std::complex<double>;

/// Dense complex matrix, row-major, the carrier type for every matrix
/// quantity in the library (potentials, fundamental solutions, Weyl data).
using CMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr Complex iu{0.0, 1.0};  // imaginary unit

/// Partition of an m x m matrix into a (top, bottom) block structure,
/// top >= 1 and bottom >= 1.
struct BlockSplit {
    int top = 1;
    int bottom = 1;

    int dim() const { return top + bottom; }

    static BlockSplit make(int top, int bottom) {
        if (top < 1 || bottom < 1)
            throw DimensionMismatch("BlockSplit: both blocks must be >= 1");
        return BlockSplit{top, bottom};
    }
};

/// Signature matrix diag(I_top, -I_bottom) of a split.
CMatrix signature_matrix(const BlockSplit& split);

bool all_finite(const CMatrix& a);

double frobenius_norm(const CMatrix& a);

/// Largest singular value.
double spectral_norm(const CMatrix& a);

/// sigma_max / sigma_min; infinity when singular.
double condition_number(const CMatrix& a);

bool is_hermitian(const CMatrix& a, double rel_tol = 1e-12);

/// Extremal eigenvalues of a Hermitian matrix (symmetrized internally).
double min_hermitian_eigenvalue(const CMatrix& a);
double max_hermitian_eigenvalue(const CMatrix& a);

/// Hermitian PSD square root. Eigenvalues below -1e-12*||A|| are rejected,
/// tiny negatives are clamped to zero. An explicit reference scale widens
/// the clamp when A is a small difference of large quantities.
CMatrix herm_sqrt(const CMatrix& a, double reference_scale = 0.0);

/// Matrix exponential (scaling-and-squaring / Pade class).
CMatrix expm(const CMatrix& a);

/// a^{-1} b via LU; throws SingularDenominator when cond(a) > 1e12.
CMatrix solve(const CMatrix& a, const CMatrix& b);

/// a^{-1} b via LU with no conditioning guard (for well-understood callers
/// that check a different denominator).
CMatrix lu_solve(const CMatrix& a, const CMatrix& b);

/// b a^{-1} via LU on the transposed system; same conditioning guard.
CMatrix solve_right(const CMatrix& b, const CMatrix& a);

inline CMatrix identity(int n) { return CMatrix::Identity(n, n); }

}  // namespace weylstrip
