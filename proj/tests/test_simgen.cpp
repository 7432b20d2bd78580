#include <doctest.h>

#include <rflogit/errors.hpp>
#include <rflogit/simgen.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

using namespace rflogit;

namespace {

// Least-squares projection onto the five generating functions; exact when the
// curve lies in their span.
Matrix recover_zeta(const Matrix& values, const Vector& grid, bool outlier) {
  Matrix f(grid.size(), 5);
  for (Index i = 0; i < grid.size(); ++i) {
    for (int l = 1; l <= 5; ++l) {
      const double s = std::sin(l * std::numbers::pi * grid(i));
      f(i, l - 1) = outlier ? 1.25 * 2.0 * s : std::exp(-l * l * grid(i)) + s;
    }
  }
  const Matrix pinv = f.completeOrthogonalDecomposition().pseudoInverse();
  return values * pinv.transpose();
}

double variance(const Vector& v) {
  return (v.array() - v.mean()).square().sum() / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST_CASE("curves lie in the span of the generating functions with the stated variances") {
  SimConfig cfg;
  cfg.n = 100000;
  cfg.n_train = 1;
  Rng rng = make_stream(1, 0);
  const SimData d = generate(cfg, rng);
  REQUIRE(d.curves.num_curves() == cfg.n);
  REQUIRE(d.curves.num_points() == 201);
  CHECK(d.curves.grid(0) == 0.0);
  CHECK(d.curves.grid(200) == 1.0);

  const Matrix zeta = recover_zeta(d.curves.values, d.curves.grid, false);
  // X(0) = sum of the zetas since exp(0) = 1 and sin(0) = 0.
  CHECK((d.curves.values.col(0) - zeta.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-9);
  for (int l = 1; l <= 5; ++l) {
    CAPTURE(l);
    const double target = 4.0 * std::pow(l, -1.5);
    CHECK(std::abs(variance(zeta.col(l - 1)) / target - 1.0) < 0.02);
    CHECK(std::abs(zeta.col(l - 1).mean()) < 4.0 * std::sqrt(target / 1e5));
  }
  const double corr = (zeta.col(0).array() * zeta.col(1).array()).mean() /
                      std::sqrt(variance(zeta.col(0)) * variance(zeta.col(1)));
  CHECK(std::abs(corr) < 0.02);
}

TEST_CASE("responses follow the logistic model on the trapezoid linear predictor") {
  SimConfig cfg;
  cfg.n = 20000;
  cfg.n_train = 10;
  Rng rng = make_stream(2, 0);
  const SimData d = generate(cfg, rng);
  const Vector& t = d.curves.grid;
  const double h = t(1) - t(0);
  double worst = 0.0;
  double expected = 0.0;
  for (Index i = 0; i < cfg.n; ++i) {
    double acc = 0.0;
    for (Index k = 0; k < t.size(); ++k) {
      acc += (k == 0 || k == t.size() - 1 ? 0.5 : 1.0) * d.curves.values(i, k) * std::sin(std::numbers::pi * t(k));
    }
    worst = std::max(worst, std::abs(h * acc - d.linear_predictor(i)));
    expected += 1.0 / (1.0 + std::exp(-d.linear_predictor(i)));
    CHECK((d.y(i) == 0.0 || d.y(i) == 1.0));
  }
  expected /= static_cast<double>(cfg.n);
  CHECK(worst < 1e-12);
  const double se = std::sqrt(0.25 / static_cast<double>(cfg.n));
  CHECK(std::abs(d.y.mean() - expected) < 4.0 * se);

  cfg.signal = 0.0;
  Rng fair = make_stream(2, 1);
  const SimData coin = generate(cfg, fair);
  CHECK(std::abs(coin.y.mean() - 0.5) < 4.0 * se);
}

TEST_CASE("outlier curves are sine mixtures with the same zeta law") {
  Rng rng = make_stream(3, 0);
  const Vector grid = unit_grid(201);
  Matrix values(20000, 201);
  for (Index i = 0; i < values.rows(); ++i) values.row(i) = outlier_curve(grid, rng).transpose();
  CHECK(values.col(0).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(values.col(200).cwiseAbs().maxCoeff() < 1e-9);
  const Matrix zeta = recover_zeta(values, grid, true);
  for (int l = 1; l <= 5; ++l) {
    CAPTURE(l);
    CHECK(std::abs(variance(zeta.col(l - 1)) / (4.0 * std::pow(l, -1.5)) - 1.0) < 0.05);
  }
}

TEST_CASE("contamination replaces the requested training rows only") {
  SimConfig cfg;
  cfg.contamination = 0.01;
  CHECK(contamination_count(cfg) == 7);
  cfg.contamination = 0.1;
  CHECK(contamination_count(cfg) == 70);
  SimConfig half;
  half.n = 10;
  half.n_train = 7;
  half.contamination = 0.5;
  CHECK(contamination_count(half) == 4);  // 3.5 rounds up

  cfg.contamination = 0.01;
  Rng rng = make_stream(4, 0);
  SimData d = generate(cfg, rng);
  const SimData clean = d;
  const Split sp = split(cfg.n, cfg.n_train, rng);
  const std::vector<Index> hit = contaminate(d, sp.train, cfg, rng);
  REQUIRE(hit.size() == 7);
  const std::set<Index> hits(hit.begin(), hit.end());
  CHECK(hits.size() == 7);
  for (const Index i : hit) {
    CHECK(std::binary_search(sp.train.begin(), sp.train.end(), i));
    CHECK(d.y(i) == 1.0 - clean.y(i));
    CHECK(std::abs(d.curves.values(i, 0)) < 1e-12);
  }
  for (Index i = 0; i < cfg.n; ++i) {
    if (hits.count(i)) continue;
    CHECK(d.y(i) == clean.y(i));
    CHECK(d.curves.values.row(i) == clean.curves.values.row(i));
  }

  SimConfig heavy = cfg;
  heavy.contamination = 0.2;
  SimData big = clean;
  Rng r2 = make_stream(4, 1);
  const std::vector<Index> many = contaminate(big, sp.train, heavy, r2);
  CHECK(many.size() == 140);
  double sup_out = 0.0;
  double sup_clean = 0.0;
  for (const Index i : many) {
    sup_out += big.curves.values.row(i).cwiseAbs().maxCoeff();
    sup_clean += clean.curves.values.row(i).cwiseAbs().maxCoeff();
  }
  CHECK(sup_out > sup_clean);

  SimConfig too_many = cfg;
  too_many.contamination = 0.5;
  const std::vector<Index> few = {1, 2, 3};
  CHECK_THROWS_AS(contaminate(d, few, too_many, rng), InvalidArgument);
}

TEST_CASE("split is a partition of the requested sizes") {
  Rng rng = make_stream(5, 0);
  const Split s = split(1000, 700, rng);
  CHECK(s.train.size() == 700);
  CHECK(s.test.size() == 300);
  std::vector<Index> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  for (Index i = 0; i < 1000; ++i) CHECK(all[static_cast<std::size_t>(i)] == i);
  CHECK(std::is_sorted(s.train.begin(), s.train.end()));
  CHECK_THROWS_AS(split(10, 10, rng), InvalidArgument);
  CHECK_THROWS_AS(split(10, 0, rng), InvalidArgument);
}

TEST_CASE("streams are reproducible and distinct") {
  SimConfig cfg;
  cfg.n = 50;
  cfg.n_train = 35;
  Rng a = make_stream(9, 3);
  Rng b = make_stream(9, 3);
  const SimData da = generate(cfg, a);
  const SimData db = generate(cfg, b);
  CHECK(da.curves.values == db.curves.values);
  CHECK(da.y == db.y);
  CHECK(split(50, 35, a).train == split(50, 35, b).train);

  Rng c = make_stream(9, 4);
  Rng e = make_stream(9, 3, 1);
  Rng f = make_stream(10, 3);
  const Rng::result_type first = make_stream(9, 3)();
  CHECK(c() != first);
  CHECK(e() != first);
  CHECK(f() != first);
}

TEST_CASE("configuration validation") {
  SimConfig cfg;
  cfg.n_train = cfg.n;
  CHECK_THROWS_AS(validate(cfg), InvalidArgument);
  cfg = SimConfig{};
  cfg.contamination = 1.0;
  CHECK_THROWS_AS(validate(cfg), InvalidArgument);
  cfg.contamination = -0.1;
  CHECK_THROWS_AS(validate(cfg), InvalidArgument);
  cfg = SimConfig{};
  cfg.grid_points = 1;
  CHECK_THROWS_AS(validate(cfg), InvalidArgument);
  CHECK_NOTHROW(validate(SimConfig{}));
  CHECK(beta_true(0.5) == 1.0);
  CHECK(unit_grid(5)(1) == 0.25);
}
