#pragma once

#include <optional>
#include <vector>

#include "weylstrip/matrix.hpp"

namespace weylstrip {

/// Truncated x-jet at 0: coefficient l holds the raw derivative
/// d^l/dx^l f(0) (not divided by l!). All coefficients share one shape.
struct XJet {
    std::vector<CMatrix> coeffs;

    int order() const { return int(coeffs.size()) - 1; }
    Eigen::Index rows() const { return coeffs.front().rows(); }
    Eigen::Index cols() const { return coeffs.front().cols(); }
    const CMatrix& coeff(int l) const { return coeffs[size_t(l)]; }

    static XJet constant(const CMatrix& value, int order);
    /// Jet of amp * e^{rate x} (scalar), coefficient l = amp * rate^l.
    static XJet scalar_exponential(Complex amp, Complex rate, int order);
};

/// Leibniz product with binomial weights; output order = min of inputs.
XJet jet_mul(const XJet& a, const XJet& b);
/// Entrywise conjugate transpose: jet of f(x)*.
XJet jet_adj(const XJet& a);
/// Coefficient shift by two: jet of f''; requires order >= 2.
XJet jet_d2(const XJet& a);
/// Coefficient shift by one: jet of f'; requires order >= 1.
XJet jet_dx(const XJet& a);

XJet jet_add(const XJet& a, const XJet& b);
XJet jet_sub(const XJet& a, const XJet& b);
XJet jet_scale(const XJet& a, Complex s);

/// t-derivatives of the solution and its x-derivative at the corner:
/// b_k = d^k/dt^k v(0,0), bx_k = d^k/dt^k v_x(0,0).
struct BoundaryJets {
    int r = 0;
    std::vector<CMatrix> b;
    std::vector<CMatrix> bx;
};

/// The jets T_k of d^k/dt^k v(., 0) produced by differentiating the
/// evolution equation in t; requires init.order >= 2r + 1.
std::vector<XJet> t_derivative_jets(const XJet& init, int r);

BoundaryJets t_derivatives(const XJet& init, int r);

/// Smoothness-class descriptor: weights M_k, either the Gevrey family
/// (k!)^s or an explicit finite sequence, plus the class constant c.
struct QuasiClass {
    std::optional<double> gevrey_s;
    std::vector<double> weights;
    double c = 1.0;

    static QuasiClass gevrey(double s, double c = 1.0);
    static QuasiClass explicit_weights(std::vector<double> weights,
                                       double c = 1.0);
    /// M_k; throws when an explicit sequence is too short.
    double weight(int k) const;
    /// log M_k, safe for weights far beyond double range.
    double log_weight(int k) const;
    int known_terms() const;
};

struct TaylorBoundary {
    CMatrix v;
    CMatrix vx;
    bool has_remainder = false;
    double remainder_bound = 0.0;
};

TaylorBoundary taylor_boundary(const BoundaryJets& jets, double t);
/// Adds the Lagrange-type bound c^{r+2} M_{r+1} t^{r+1} / (r+1)!.
TaylorBoundary taylor_boundary(const BoundaryJets& jets, double t,
                               const QuasiClass& qc);

enum class QaVerdict { QuasiAnalytic, NotQuasiAnalytic, Inconclusive };

struct QaResult {
    QaVerdict verdict = QaVerdict::Inconclusive;
    double partial_sum = 0.0;  // sum of 1/L_n over the inspected range
    int terms = 0;
};

/// Divergence-criterion classifier. Exact for the registered symbolic
/// families (Gevrey, constant); explicit finite data otherwise yields an
/// honest "inconclusive" with the partial sum as a diagnostic.
QaResult quasianalytic_check(const QuasiClass& qc);

}  // namespace weylstrip
