#pragma once

#include "rflogit/types.hpp"

#include <span>

namespace rflogit {

/// Clamped B-spline basis of fixed order on a closed interval, together with
/// its Gram matrix of pairwise L2 inner products.
///
/// Instances are immutable once built; share them freely between threads.
class BSplineBasis {
 public:
  static constexpr int kOrder = 3;  // quadratic pieces

  /// Builds a basis with `num_functions` members and equally spaced interior
  /// knots. Throws InvalidArgument for fewer than three functions or a
  /// non-finite / degenerate domain.
  BSplineBasis(Interval domain, int num_functions);

  const Interval& domain() const { return domain_; }
  int order() const { return kOrder; }
  int num_functions() const { return num_functions_; }
  const Vector& knots() const { return knots_; }

  /// Phi, with Phi(m, m') = integral of phi_m * phi_m' over the domain.
  const Matrix& gram() const { return gram_; }
  /// Symmetric square root of the Gram matrix and its inverse.
  const Matrix& gram_sqrt() const { return gram_sqrt_; }
  const Matrix& gram_inv_sqrt() const { return gram_inv_sqrt_; }

  /// Index of the knot span containing t, i.e. knots[s] <= t < knots[s+1]
  /// (the right endpoint belongs to the last non-empty span).
  Index find_span(double t) const;

  /// Writes the kOrder non-zero basis values at t (functions span-2 .. span)
  /// into `out` and returns the span index.
  Index eval_nonzero(double t, std::span<double, kOrder> out) const;

  bool operator==(const BSplineBasis& other) const {
    return num_functions_ == other.num_functions_ && domain_.lo == other.domain_.lo &&
           domain_.hi == other.domain_.hi;
  }

 private:
  Interval domain_;
  int num_functions_;
  Vector knots_;
  Matrix gram_;
  Matrix gram_sqrt_;
  Matrix gram_inv_sqrt_;
};

/// Collocation matrix: row i holds (phi_1(t_i), ..., phi_M(t_i)).
/// Throws OutOfDomainError if any point lies outside the domain.
Matrix eval_basis(const BSplineBasis& basis, const Eigen::Ref<const Vector>& t_grid);

/// Values of the expansion sum_m coefs(m) phi_m at each grid point.
Vector eval_expansion(const BSplineBasis& basis, const Eigen::Ref<const Vector>& coefs,
                      const Eigen::Ref<const Vector>& t_grid);

/// <f, g> = a' Phi b for expansions with coefficient vectors a and b.
double inner_product(const BSplineBasis& basis, const Eigen::Ref<const Vector>& coef_a,
                     const Eigen::Ref<const Vector>& coef_b);

}  // namespace rflogit
