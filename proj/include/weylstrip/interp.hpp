#pragma once

#include <vector>

#include "weylstrip/errors.hpp"
#include "weylstrip/matrix.hpp"

namespace weylstrip {

/// Natural cubic spline through complex samples on strictly increasing knots.
class CubicSpline {
  public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> knots, std::vector<Complex> values);

    Complex value(double x) const;
    Complex deriv(double x) const;

    double x_min() const { return knots_.front(); }
    double x_max() const { return knots_.back(); }

  private:
    int segment(double x) const;

    std::vector<double> knots_;
    std::vector<Complex> values_;
    std::vector<Complex> second_;  // natural: zero at both ends
};

/// Entrywise spline through matrix samples; all samples share the knots.
class MatrixSpline {
  public:
    MatrixSpline() = default;
    MatrixSpline(std::vector<double> knots, const std::vector<CMatrix>& samples);

    CMatrix value(double x) const;
    CMatrix deriv(double x) const;

    double x_min() const { return entries_.front().x_min(); }
    double x_max() const { return entries_.front().x_max(); }

  private:
    Eigen::Index rows_ = 0, cols_ = 0;
    std::vector<CubicSpline> entries_;  // row-major
};

}  // namespace weylstrip
