#include "weylstrip/interp.hpp"

#include <algorithm>

namespace weylstrip {

CubicSpline::CubicSpline(std::vector<double> knots, std::vector<Complex> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
    const size_t n = knots_.size();
    if (n < 2 || values_.size() != n)
        throw DimensionMismatch("CubicSpline: need >= 2 matching samples");
    for (size_t i = 1; i < n; ++i)
        if (!(knots_[i] > knots_[i - 1]))
            throw DimensionMismatch("CubicSpline: knots must increase");

    // Thomas solve for the interior second derivatives, natural ends.
    second_.assign(n, Complex(0, 0));
    if (n == 2) return;
    std::vector<double> diag(n - 2), sub(n - 2), sup(n - 2);
    std::vector<Complex> rhs(n - 2);
    for (size_t i = 1; i + 1 <= n - 1; ++i) {
        const double h0 = knots_[i] - knots_[i - 1];
        const double h1 = knots_[i + 1] - knots_[i];
        sub[i - 1] = h0;
        diag[i - 1] = 2.0 * (h0 + h1);
        sup[i - 1] = h1;
        rhs[i - 1] = 6.0 * ((values_[i + 1] - values_[i]) / h1 -
                            (values_[i] - values_[i - 1]) / h0);
    }
    for (size_t i = 1; i < rhs.size(); ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    second_[n - 2] = rhs.back() / diag.back();
    for (size_t i = rhs.size() - 1; i-- > 0;)
        second_[i + 1] = (rhs[i] - sup[i] * second_[i + 2]) / diag[i];
}

int CubicSpline::segment(double x) const {
    if (x < knots_.front() || x > knots_.back())
        throw EvalOutOfRange("CubicSpline: query outside sampled domain");
    auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    int i = int(it - knots_.begin()) - 1;
    return std::clamp(i, 0, int(knots_.size()) - 2);
}

Complex CubicSpline::value(double x) const {
    const int i = segment(x);
    const double h = knots_[i + 1] - knots_[i];
    const double b = (x - knots_[i]) / h;
    const double a = 1.0 - b;
    return a * values_[i] + b * values_[i + 1] +
           (h * h / 6.0) *
               ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[i + 1]);
}

Complex CubicSpline::deriv(double x) const {
    const int i = segment(x);
    const double h = knots_[i + 1] - knots_[i];
    const double b = (x - knots_[i]) / h;
    const double a = 1.0 - b;
    return (values_[i + 1] - values_[i]) / h +
           (h / 6.0) *
               ((3.0 * b * b - 1.0) * second_[i + 1] -
                (3.0 * a * a - 1.0) * second_[i]);
}

MatrixSpline::MatrixSpline(std::vector<double> knots,
                           const std::vector<CMatrix>& samples) {
    if (samples.empty())
        throw DimensionMismatch("MatrixSpline: no samples");
    rows_ = samples.front().rows();
    cols_ = samples.front().cols();
    entries_.reserve(size_t(rows_ * cols_));
    for (Eigen::Index r = 0; r < rows_; ++r) {
        for (Eigen::Index c = 0; c < cols_; ++c) {
            std::vector<Complex> vals(samples.size());
            for (size_t s = 0; s < samples.size(); ++s) {
                if (samples[s].rows() != rows_ || samples[s].cols() != cols_)
                    throw DimensionMismatch("MatrixSpline: ragged samples");
                vals[s] = samples[s](r, c);
            }
            entries_.emplace_back(knots, std::move(vals));
        }
    }
}

CMatrix MatrixSpline::value(double x) const {
    CMatrix out(rows_, cols_);
    for (Eigen::Index r = 0; r < rows_; ++r)
        for (Eigen::Index c = 0; c < cols_; ++c)
            out(r, c) = entries_[size_t(r * cols_ + c)].value(x);
    return out;
}

CMatrix MatrixSpline::deriv(double x) const {
    CMatrix out(rows_, cols_);
    for (Eigen::Index r = 0; r < rows_; ++r)
        for (Eigen::Index c = 0; c < cols_; ++c)
            out(r, c) = entries_[size_t(r * cols_ + c)].deriv(x);
    return out;
}

}  // namespace weylstrip
