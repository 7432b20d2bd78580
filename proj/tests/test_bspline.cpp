#include <doctest.h>

#include <rflogit/bspline.hpp>
#include <rflogit/errors.hpp>

#include <cmath>
#include <limits>
#include <random>

using namespace rflogit;

namespace {

// Textbook recursive definition on the basis's own knot vector; the right
// endpoint is assigned to the last non-empty span.
double cox_de_boor(const Vector& knots, Index i, int order, double t) {
  if (order == 1) {
    const double lo = knots(i);
    const double hi = knots(i + 1);
    const double last = knots(knots.size() - 1);
    if (lo < hi && lo <= t && (t < hi || (t == last && hi == last))) return 1.0;
    return 0.0;
  }
  double out = 0.0;
  const double d1 = knots(i + order - 1) - knots(i);
  const double d2 = knots(i + order) - knots(i + 1);
  if (d1 > 0.0) out += (t - knots(i)) / d1 * cox_de_boor(knots, i, order - 1, t);
  if (d2 > 0.0) out += (knots(i + order) - t) / d2 * cox_de_boor(knots, i + 1, order - 1, t);
  return out;
}

Matrix dense_gram(const BSplineBasis& basis, Index points) {
  const Index m = basis.num_functions();
  const Interval d = basis.domain();
  const double h = d.length() / static_cast<double>(points - 1);
  Matrix g = Matrix::Zero(m, m);
  Vector row(m);
  for (Index k = 0; k < points; ++k) {
    const double t = k == points - 1 ? d.hi : d.lo + h * static_cast<double>(k);
    for (Index j = 0; j < m; ++j) row(j) = cox_de_boor(basis.knots(), j, basis.order(), t);
    const double w = (k == 0 || k == points - 1) ? 0.5 * h : h;
    g.noalias() += w * row * row.transpose();
  }
  return g;
}

}  // namespace

TEST_CASE("knot vector is clamped with equally spaced interior knots") {
  const BSplineBasis basis({0.0, 1.0}, 7);
  const Vector& k = basis.knots();
  REQUIRE(k.size() == 7 + 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(k(j) == 0.0);
    CHECK(k(k.size() - 1 - j) == 1.0);
  }
  const double step = k(3) - k(2);
  for (Index j = 3; j < k.size() - 2; ++j) CHECK(k(j) - k(j - 1) == doctest::Approx(step).epsilon(1e-14));
}

TEST_CASE("partition of unity and non-negativity at random points") {
  std::mt19937_64 rng(11);
  for (const int m : {4, 10, 25}) {
    const BSplineBasis basis({-2.0, 3.0}, m);
    std::uniform_real_distribution<double> unif(-2.0, 3.0);
    Vector t(1000);
    for (Index i = 0; i < t.size(); ++i) t(i) = unif(rng);
    const Matrix b = eval_basis(basis, t);
    CHECK((b.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK(b.minCoeff() >= 0.0);
  }
  const BSplineBasis four({0.0, 1.0}, 4);
  Vector t(1);
  t << 0.37;
  CHECK(eval_basis(four, t).sum() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("endpoint rows are unit vectors") {
  const BSplineBasis basis({0.0, 1.0}, 9);
  Vector t(2);
  t << 0.0, 1.0;
  const Matrix b = eval_basis(basis, t);
  Vector first = Vector::Zero(9);
  first(0) = 1.0;
  Vector last = Vector::Zero(9);
  last(8) = 1.0;
  CHECK((b.row(0).transpose() - first).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((b.row(1).transpose() - last).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("evaluation matches the recursive reference") {
  std::mt19937_64 rng(5);
  for (const int m : {4, 6, 10, 25}) {
    const BSplineBasis basis({0.5, 2.5}, m);
    std::uniform_real_distribution<double> unif(0.5, 2.5);
    Vector t(100);
    for (Index i = 0; i < t.size(); ++i) t(i) = unif(rng);
    t(0) = 0.5;
    t(1) = 2.5;
    t(2) = basis.knots()(3);  // exactly on an interior knot
    const Matrix b = eval_basis(basis, t);
    double worst = 0.0;
    for (Index i = 0; i < t.size(); ++i) {
      for (Index j = 0; j < m; ++j) {
        worst = std::max(worst, std::abs(b(i, j) - cox_de_boor(basis.knots(), j, 3, t(i))));
      }
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("each function is supported on order + 1 consecutive knots") {
  const BSplineBasis basis({0.0, 1.0}, 8);
  const Vector t = Vector::LinSpaced(2001, 0.0, 1.0);
  const Matrix b = eval_basis(basis, t);
  const Vector& k = basis.knots();
  for (Index j = 0; j < 8; ++j) {
    for (Index i = 0; i < t.size(); ++i) {
      if (t(i) < k(j) || t(i) > k(j + 3)) CHECK(b(i, j) == 0.0);
    }
  }
}

TEST_CASE("Gram matrix matches dense trapezoid quadrature") {
  for (const int m : {4, 6, 10, 25}) {
    const BSplineBasis basis({0.0, 1.0}, m);
    // Richardson step on two trapezoid sums removes their h^2 error term.
    const Matrix oracle = (4.0 * dense_gram(basis, 100001) - dense_gram(basis, 50001)) / 3.0;
    const double rel = (basis.gram() - oracle).norm() / oracle.norm();
    CAPTURE(m);
    CHECK(rel < 1e-8);
    if (m == 6) CHECK(basis.gram()(0, 0) == doctest::Approx(oracle(0, 0)).epsilon(1e-8));
  }
}

TEST_CASE("Gram matrix is symmetric positive definite with a symmetric square root") {
  for (const int m : {4, 10, 25, 40}) {
    const BSplineBasis basis({0.0, 3.0}, m);
    const Matrix& g = basis.gram();
    CHECK((g - g.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    const Matrix& r = basis.gram_sqrt();
    CHECK((r - r.transpose()).norm() < 1e-14 * r.norm());
    CHECK((r * r - g).norm() / g.norm() < 1e-10);
    const Matrix eye = basis.gram_inv_sqrt() * r;
    CHECK((eye - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("inner products") {
  const BSplineBasis basis({0.0, 1.0}, 10);
  const Vector zero = Vector::Zero(10);
  CHECK(inner_product(basis, zero, zero) == 0.0);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  Vector a(10);
  Vector b(10);
  for (Index j = 0; j < 10; ++j) {
    a(j) = gauss(rng);
    b(j) = gauss(rng);
  }
  CHECK(inner_product(basis, a, a) > 0.0);
  CHECK(inner_product(basis, a, b) == doctest::Approx(inner_product(basis, b, a)).epsilon(1e-14));

  const Vector ones = Vector::Ones(10);
  CHECK(inner_product(basis, ones, ones) == doctest::Approx(1.0).epsilon(1e-10));
  const BSplineBasis wide({2.0, 5.0}, 7);
  CHECK(inner_product(wide, Vector::Ones(7), Vector::Ones(7)) == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("expansion evaluation agrees with the collocation matrix") {
  const BSplineBasis basis({0.0, 1.0}, 12);
  const Vector coefs = Vector::LinSpaced(12, -1.0, 2.0);
  const Vector t = Vector::LinSpaced(57, 0.0, 1.0);
  CHECK((eval_expansion(basis, coefs, t) - eval_basis(basis, t) * coefs).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("invalid input") {
  CHECK_THROWS_AS(BSplineBasis({0.0, 1.0}, 2), InvalidArgument);
  CHECK_THROWS_AS(BSplineBasis({1.0, 1.0}, 5), InvalidArgument);
  CHECK_THROWS_AS(BSplineBasis({0.0, std::numeric_limits<double>::infinity()}, 5), InvalidArgument);
  CHECK_THROWS_AS(BSplineBasis({std::nan(""), 1.0}, 5), InvalidArgument);

  const BSplineBasis basis({0.0, 1.0}, 5);
  Vector t(2);
  t << 0.5, 1.0 + 1e-9;
  CHECK_THROWS_AS(eval_basis(basis, t), OutOfDomainError);
  CHECK_THROWS_AS(inner_product(basis, Vector::Ones(5), Vector::Ones(4)), DimensionError);
  CHECK_THROWS_AS(eval_expansion(basis, Vector::Ones(6), Vector::Zero(1)), DimensionError);
}
