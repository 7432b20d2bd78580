#pragma once

#include <Eigen/Dense>

namespace rflogit {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Matrix = Eigen::MatrixXd;
using IndexVector = Eigen::Matrix<Index, Eigen::Dynamic, 1>;

// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t <= hi; }
};

}  // namespace rflogit
