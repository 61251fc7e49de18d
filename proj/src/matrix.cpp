#include "weylstrip/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace weylstrip {

namespace {
// Column-major scratch type; some Eigen decompositions are happier with it.
using ColMatrix = Eigen::MatrixXcd;
constexpr double kCondLimit = 1e12;
}  // namespace

CMatrix signature_matrix(const BlockSplit& split) {
    CMatrix j = CMatrix::Identity(split.dim(), split.dim());
    j.bottomRightCorner(split.bottom, split.bottom) *=
        Complex(-1.0, 0.0);
    return j;
}

bool all_finite(const CMatrix& a) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const Complex v = a.reshaped()(i);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

double frobenius_norm(const CMatrix& a) { return a.norm(); }

double spectral_norm(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<ColMatrix> svd{ColMatrix(a)};
    return svd.singularValues()(0);
}

double condition_number(const CMatrix& a) {
    Eigen::JacobiSVD<ColMatrix> svd{ColMatrix(a)};
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

bool is_hermitian(const CMatrix& a, double rel_tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(1.0, frobenius_norm(a));
    return frobenius_norm(CMatrix(a - a.adjoint())) <= rel_tol * scale;
}

static Eigen::SelfAdjointEigenSolver<ColMatrix> herm_eig(const CMatrix& a) {
    ColMatrix h = (ColMatrix(a) + ColMatrix(a).adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<ColMatrix> es{h};
    if (es.info() != Eigen::Success)
        throw Error("hermitian eigendecomposition failed");
    return es;
}

double min_hermitian_eigenvalue(const CMatrix& a) {
    return herm_eig(a).eigenvalues().minCoeff();
}

double max_hermitian_eigenvalue(const CMatrix& a) {
    return herm_eig(a).eigenvalues().maxCoeff();
}

CMatrix herm_sqrt(const CMatrix& a, double reference_scale) {
    const double scale =
        std::max({1.0, frobenius_norm(a), reference_scale});
    if (!is_hermitian(a))
        throw NotHermitian("herm_sqrt: input not Hermitian within 1e-12");
    auto es = herm_eig(a);
    RVector lam = es.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) < -1e-12 * scale)
            throw NegativeEigenvalue("herm_sqrt: eigenvalue below -1e-12*||A||");
        lam(i) = std::sqrt(std::max(lam(i), 0.0));
    }
    ColMatrix s = es.eigenvectors() * lam.asDiagonal() *
                  es.eigenvectors().adjoint();
    return CMatrix(s);
}

CMatrix expm(const CMatrix& a) {
    if (a.rows() != a.cols())
        throw DimensionMismatch("expm: matrix must be square");
    ColMatrix e = ColMatrix(a).exp();
    CMatrix out(e);
    if (!all_finite(out))
        throw Overflow("expm: result exceeds double range");
    return out;
}

CMatrix solve(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != a.cols() || a.rows() != b.rows())
        throw DimensionMismatch("solve: incompatible shapes");
    if (condition_number(a) > kCondLimit)
        throw SingularDenominator("solve: condition number beyond 1e12");
    Eigen::PartialPivLU<ColMatrix> lu{ColMatrix(a)};
    return CMatrix(lu.solve(ColMatrix(b)));
}

CMatrix lu_solve(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != a.cols() || a.rows() != b.rows())
        throw DimensionMismatch("lu_solve: incompatible shapes");
    Eigen::PartialPivLU<ColMatrix> lu{ColMatrix(a)};
    return CMatrix(lu.solve(ColMatrix(b)));
}

CMatrix solve_right(const CMatrix& b, const CMatrix& a) {
    // b a^{-1}  ==  (a^T \ b^T)^T
    CMatrix at = a.transpose();
    CMatrix bt = b.transpose();
    return CMatrix(solve(at, bt).transpose());
}

}  // namespace weylstrip
