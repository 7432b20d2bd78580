#include "rflogit/bspline.hpp"

#include "rflogit/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace rflogit {

namespace {

// 3-point Gauss-Legendre on [-1, 1]; exact for the degree-4 products of quadratic pieces.
constexpr std::array<double, 3> kGaussNodes = {-0.7745966692414833770, 0.0, 0.7745966692414833770};
constexpr std::array<double, 3> kGaussWeights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

}  // namespace

BSplineBasis::BSplineBasis(Interval domain, int num_functions)
    : domain_(domain), num_functions_(num_functions) {
  if (num_functions < kOrder) {
    throw InvalidArgument("B-spline basis needs at least " + std::to_string(kOrder) +
                          " functions, got " + std::to_string(num_functions));
  }
  if (!std::isfinite(domain.lo) || !std::isfinite(domain.hi) || !(domain.hi > domain.lo)) {
    throw InvalidArgument("B-spline domain must be a finite, non-degenerate interval");
  }

  const int m = num_functions;
  const int num_spans = m - kOrder + 1;
  knots_.resize(m + kOrder);
  for (int j = 0; j < kOrder; ++j) {
    knots_(j) = domain.lo;
    knots_(m + j) = domain.hi;
  }
  for (int j = 1; j < num_spans; ++j) {
    knots_(kOrder - 1 + j) = domain.lo + domain.length() * static_cast<double>(j) / num_spans;
  }

  gram_ = Matrix::Zero(m, m);
  std::array<double, kOrder> vals{};
  for (Index s = kOrder - 1; s < m; ++s) {
    const double a = knots_(s);
    const double b = knots_(s + 1);
    if (!(b > a)) continue;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
      const double t = mid + half * kGaussNodes[q];
      const Index span = eval_nonzero(t, vals);
      const Index first = span - (kOrder - 1);
      const double w = half * kGaussWeights[q];
      for (int r = 0; r < kOrder; ++r) {
        for (int c = 0; c < kOrder; ++c) {
          gram_(first + r, first + c) += w * vals[r] * vals[c];
        }
      }
    }
  }
  gram_ = 0.5 * (gram_ + gram_.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> es(gram_);
  const Vector root = es.eigenvalues().cwiseSqrt();
  gram_sqrt_ = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
  gram_inv_sqrt_ = es.eigenvectors() * root.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

Index BSplineBasis::find_span(double t) const {
  const Index last = num_functions_ - 1;
  if (t >= knots_(last + 1)) return last;
  // first knot strictly greater than t, minus one
  const auto begin = knots_.data() + (kOrder - 1);
  const auto end = knots_.data() + last + 1;
  const auto it = std::upper_bound(begin, end, t);
  return static_cast<Index>(it - knots_.data()) - 1;
}

Index BSplineBasis::eval_nonzero(double t, std::span<double, kOrder> out) const {
  // Cox-de Boor triangle (non-zero functions only).
  const Index span = find_span(t);
  std::array<double, kOrder> left{};
  std::array<double, kOrder> right{};
  out[0] = 1.0;
  for (int j = 1; j < kOrder; ++j) {
    left[j] = t - knots_(span + 1 - j);
    right[j] = knots_(span + j) - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double temp = out[r] / (right[r + 1] + left[j - r]);
      out[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out[j] = saved;
  }
  return span;
}

Matrix eval_basis(const BSplineBasis& basis, const Eigen::Ref<const Vector>& t_grid) {
  Matrix out = Matrix::Zero(t_grid.size(), basis.num_functions());
  std::array<double, BSplineBasis::kOrder> vals{};
  for (Index i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid(i);
    if (!basis.domain().contains(t)) {
      throw OutOfDomainError("evaluation point " + std::to_string(t) + " outside basis domain");
    }
    const Index first = basis.eval_nonzero(t, vals) - (BSplineBasis::kOrder - 1);
    for (int r = 0; r < BSplineBasis::kOrder; ++r) out(i, first + r) = vals[r];
  }
  return out;
}

Vector eval_expansion(const BSplineBasis& basis, const Eigen::Ref<const Vector>& coefs,
                      const Eigen::Ref<const Vector>& t_grid) {
  if (coefs.size() != basis.num_functions()) {
    throw DimensionError("coefficient vector length does not match basis size");
  }
  Vector out(t_grid.size());
  std::array<double, BSplineBasis::kOrder> vals{};
  for (Index i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid(i);
    if (!basis.domain().contains(t)) {
      throw OutOfDomainError("evaluation point " + std::to_string(t) + " outside basis domain");
    }
    const Index first = basis.eval_nonzero(t, vals) - (BSplineBasis::kOrder - 1);
    double acc = 0.0;
    for (int r = 0; r < BSplineBasis::kOrder; ++r) acc += vals[r] * coefs(first + r);
    out(i) = acc;
  }
  return out;
}

double inner_product(const BSplineBasis& basis, const Eigen::Ref<const Vector>& coef_a,
                     const Eigen::Ref<const Vector>& coef_b) {
  if (coef_a.size() != basis.num_functions() || coef_b.size() != basis.num_functions()) {
    throw DimensionError("inner_product: coefficient length does not match basis size");
  }
  return coef_a.dot(basis.gram() * coef_b);
}

}  // namespace rflogit
