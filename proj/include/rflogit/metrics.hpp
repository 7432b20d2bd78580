#pragma once

#include "rflogit/bspline.hpp"
#include "rflogit/types.hpp"

#include <functional>
#include <span>

namespace rflogit {

/// Integrated squared error between beta and the basis expansion `coefs`,
/// trapezoid rule on `grid_points` equally spaced points of the basis domain.
double imse(const std::function<double(double)>& beta, const BSplineBasis& basis, const Vector& coefs,
            Index grid_points = 1001);

/// Area under the ROC curve as the Mann-Whitney statistic, ties counted half.
double auc(const Vector& probs, const Vector& y);

struct Summary {
  double median = 0.0;
  double mad = 0.0;  // raw median absolute deviation, no consistency factor
};

Summary aggregate(std::span<const double> values);

}  // namespace rflogit
