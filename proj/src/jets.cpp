#include "weylstrip/jets.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace weylstrip {

namespace {

void require_same_shape(const XJet& a, const XJet& b, const char* who) {
    if (a.coeffs.empty() || b.coeffs.empty())
        throw DimensionMismatch(std::string(who) + ": empty jet");
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch(std::string(who) + ": shape mismatch");
}

double binomial(int n, int k) {
    double out = 1.0;
    for (int i = 1; i <= k; ++i) out *= double(n - k + i) / double(i);
    return out;
}

double multinomial3(int k, int a, int b) {
    // k! / (a! b! (k-a-b)!)
    return binomial(k, a) * binomial(k - a, b);
}

}  // namespace

XJet XJet::constant(const CMatrix& value, int order) {
    XJet jet;
    jet.coeffs.assign(size_t(order) + 1,
                      CMatrix::Zero(value.rows(), value.cols()));
    jet.coeffs[0] = value;
    return jet;
}

XJet XJet::scalar_exponential(Complex amp, Complex rate, int order) {
    XJet jet;
    jet.coeffs.reserve(size_t(order) + 1);
    Complex c = amp;
    for (int l = 0; l <= order; ++l) {
        CMatrix m(1, 1);
        m(0, 0) = c;
        jet.coeffs.push_back(m);
        c *= rate;
    }
    return jet;
}

XJet jet_mul(const XJet& a, const XJet& b) {
    if (a.coeffs.empty() || b.coeffs.empty())
        throw DimensionMismatch("jet_mul: empty jet");
    if (a.cols() != b.rows())
        throw DimensionMismatch("jet_mul: inner dimensions disagree");
    const int order = std::min(a.order(), b.order());
    XJet out;
    out.coeffs.reserve(size_t(order) + 1);
    for (int l = 0; l <= order; ++l) {
        CMatrix c = CMatrix::Zero(a.rows(), b.cols());
        for (int p = 0; p <= l; ++p)
            c += CMatrix(binomial(l, p) * a.coeff(p) * b.coeff(l - p));
        out.coeffs.push_back(std::move(c));
    }
    return out;
}

XJet jet_adj(const XJet& a) {
    XJet out;
    out.coeffs.reserve(a.coeffs.size());
    for (const auto& c : a.coeffs) out.coeffs.push_back(CMatrix(c.adjoint()));
    return out;
}

XJet jet_d2(const XJet& a) {
    if (a.order() < 2) throw OrderUnderflow("jet_d2: order >= 2 required");
    XJet out;
    out.coeffs.assign(a.coeffs.begin() + 2, a.coeffs.end());
    return out;
}

XJet jet_dx(const XJet& a) {
    if (a.order() < 1) throw OrderUnderflow("jet_dx: order >= 1 required");
    XJet out;
    out.coeffs.assign(a.coeffs.begin() + 1, a.coeffs.end());
    return out;
}

XJet jet_add(const XJet& a, const XJet& b) {
    require_same_shape(a, b, "jet_add");
    const int order = std::min(a.order(), b.order());
    XJet out;
    for (int l = 0; l <= order; ++l)
        out.coeffs.push_back(CMatrix(a.coeff(l) + b.coeff(l)));
    return out;
}

XJet jet_sub(const XJet& a, const XJet& b) {
    require_same_shape(a, b, "jet_sub");
    const int order = std::min(a.order(), b.order());
    XJet out;
    for (int l = 0; l <= order; ++l)
        out.coeffs.push_back(CMatrix(a.coeff(l) - b.coeff(l)));
    return out;
}

XJet jet_scale(const XJet& a, Complex s) {
    XJet out;
    for (const auto& c : a.coeffs) out.coeffs.push_back(CMatrix(s * c));
    return out;
}

std::vector<XJet> t_derivative_jets(const XJet& init, int r) {
    if (init.order() < 2 * r + 1)
        throw InsufficientOrder(
            "t_derivative_jets: init.order must be >= 2r + 1");
    std::vector<XJet> T;
    T.reserve(size_t(r) + 1);
    T.push_back(init);
    for (int k = 0; k + 1 <= r; ++k) {
        // d^k/dt^k (v v* v) by the trinomial Leibniz rule
        XJet cubic = XJet::constant(
            CMatrix::Zero(init.rows(), init.cols()), T[size_t(k)].order());
        for (int a = 0; a <= k; ++a) {
            for (int b = 0; a + b <= k; ++b) {
                const int c = k - a - b;
                const XJet term = jet_mul(
                    T[size_t(a)], jet_mul(jet_adj(T[size_t(b)]), T[size_t(c)]));
                cubic = jet_add(cubic, jet_scale(term, multinomial3(k, a, b)));
            }
        }
        T.push_back(jet_scale(
            jet_sub(jet_d2(T[size_t(k)]), jet_scale(cubic, 2.0)), iu / 2.0));
    }
    return T;
}

BoundaryJets t_derivatives(const XJet& init, int r) {
    const std::vector<XJet> T = t_derivative_jets(init, r);
    BoundaryJets jets;
    jets.r = r;
    jets.b.reserve(size_t(r) + 1);
    jets.bx.reserve(size_t(r) + 1);
    for (int k = 0; k <= r; ++k) {
        jets.b.push_back(T[size_t(k)].coeff(0));
        jets.bx.push_back(T[size_t(k)].coeff(1));
    }
    return jets;
}

QuasiClass QuasiClass::gevrey(double s, double c) {
    QuasiClass qc;
    qc.gevrey_s = s;
    qc.c = c;
    return qc;
}

QuasiClass QuasiClass::explicit_weights(std::vector<double> weights, double c) {
    for (double w : weights)
        if (!(w > 0.0)) throw Error("QuasiClass: weights must be positive");
    QuasiClass qc;
    qc.weights = std::move(weights);
    qc.c = c;
    return qc;
}

double QuasiClass::weight(int k) const { return std::exp(log_weight(k)); }

double QuasiClass::log_weight(int k) const {
    if (gevrey_s) return *gevrey_s * std::lgamma(double(k) + 1.0);
    if (k < 0 || size_t(k) >= weights.size())
        throw Error("QuasiClass: weight index beyond the explicit sequence");
    return std::log(weights[size_t(k)]);
}

int QuasiClass::known_terms() const {
    return gevrey_s ? std::numeric_limits<int>::max() : int(weights.size());
}

TaylorBoundary taylor_boundary(const BoundaryJets& jets, double t) {
    TaylorBoundary out;
    out.v = CMatrix::Zero(jets.b.front().rows(), jets.b.front().cols());
    out.vx = out.v;
    double pow_over_fact = 1.0;  // t^k / k!
    for (int k = 0; k <= jets.r; ++k) {
        if (k > 0) pow_over_fact *= t / double(k);
        out.v += CMatrix(pow_over_fact * jets.b[size_t(k)]);
        out.vx += CMatrix(pow_over_fact * jets.bx[size_t(k)]);
    }
    return out;
}

TaylorBoundary taylor_boundary(const BoundaryJets& jets, double t,
                               const QuasiClass& qc) {
    TaylorBoundary out = taylor_boundary(jets, t);
    const int r = jets.r;
    const double log_bound = double(r + 2) * std::log(qc.c) +
                             qc.log_weight(r + 1) +
                             double(r + 1) * std::log(std::abs(t)) -
                             std::lgamma(double(r) + 2.0);
    out.has_remainder = true;
    out.remainder_bound = t == 0.0 ? 0.0 : std::exp(log_bound);
    return out;
}

namespace {

// L_n = inf over k >= n of M_k^{1/k}, from the available terms.
double l_lower(const QuasiClass& qc, int n, int highest) {
    double best = std::numeric_limits<double>::infinity();
    for (int k = n; k <= highest; ++k)
        best = std::min(best, std::exp(qc.log_weight(k) / double(k)));
    return best;
}

bool matches_gevrey(const std::vector<double>& w, double s) {
    for (size_t k = 0; k < w.size(); ++k) {
        const double model = std::exp(s * std::lgamma(double(k) + 1.0));
        if (std::abs(w[k] - model) > 1e-9 * std::max(1.0, model)) return false;
    }
    return true;
}

}  // namespace

QaResult quasianalytic_check(const QuasiClass& qc) {
    QaResult res;

    double s = 0.0;
    bool symbolic = false;
    if (qc.gevrey_s) {
        s = *qc.gevrey_s;
        symbolic = true;
    } else if (!qc.weights.empty()) {
        bool constant = true;
        for (double w : qc.weights)
            if (std::abs(w - qc.weights[0]) > 1e-12 * qc.weights[0])
                constant = false;
        if (constant) {
            // constant weights: L_n -> 1, harmonic-type divergence
            s = 0.0;
            symbolic = true;
        } else if (qc.weights.size() >= 3 && qc.weights[0] > 0.0) {
            const double fit = std::log(qc.weights[2]) / std::log(2.0);
            if (matches_gevrey(qc.weights, fit)) {
                s = fit;
                symbolic = true;
            }
        }
    }

    const int horizon = std::min(qc.known_terms() - 1, 400);
    for (int n = 1; n <= horizon; ++n) {
        res.partial_sum += 1.0 / l_lower(qc, n, horizon);
        res.terms++;
    }

    if (symbolic) {
        res.verdict =
            s <= 1.0 ? QaVerdict::QuasiAnalytic : QaVerdict::NotQuasiAnalytic;
    } else {
        res.verdict = QaVerdict::Inconclusive;
    }
    return res;
}

}  // namespace weylstrip
