#include "rflogit/simgen.hpp"

#include "rflogit/errors.hpp"
#include "rflogit/logitfit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace rflogit {

namespace {

constexpr int kTerms = 5;

double zeta_sd(int l) { return std::sqrt(4.0 * std::pow(static_cast<double>(l), -1.5)); }

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t run, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(run >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

void validate(const SimConfig& cfg) {
  if (cfg.n < 2) throw InvalidArgument("simulation needs n >= 2");
  if (cfg.grid_points < 2) throw InvalidArgument("simulation grid needs at least two points");
  if (cfg.n_train < 1 || cfg.n_train >= cfg.n) throw InvalidArgument("need 1 <= n_train < n");
  if (!(cfg.contamination >= 0.0 && cfg.contamination < 1.0)) {
    throw InvalidArgument("contamination level must lie in [0, 1)");
  }
}

Index contamination_count(const SimConfig& cfg) {
  return static_cast<Index>(std::floor(cfg.contamination * static_cast<double>(cfg.n_train) + 0.5));
}

double beta_true(double t) { return std::sin(M_PI * t); }

Vector unit_grid(Index points) { return Vector::LinSpaced(points, 0.0, 1.0); }

SimData generate(const SimConfig& cfg, Rng& rng) {
  validate(cfg);
  const Vector grid = unit_grid(cfg.grid_points);
  const Index j = grid.size();

  Matrix psi(kTerms, j);
  for (int l = 1; l <= kTerms; ++l) {
    for (Index k = 0; k < j; ++k) {
      psi(l - 1, k) = std::exp(-static_cast<double>(l * l) * grid(k)) + std::sin(l * M_PI * grid(k));
    }
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix zeta(cfg.n, kTerms);
  for (Index i = 0; i < cfg.n; ++i) {
    for (int l = 1; l <= kTerms; ++l) zeta(i, l - 1) = zeta_sd(l) * gauss(rng);
  }

  SimData data;
  data.curves = RawCurves{grid, zeta * psi};

  Vector w(j);  // trapezoid weights times beta
  const double h = 1.0 / static_cast<double>(j - 1);
  for (Index k = 0; k < j; ++k) w(k) = (k == 0 || k == j - 1 ? 0.5 * h : h) * beta_true(grid(k));
  data.linear_predictor = cfg.signal * (data.curves.values * w);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  data.y.resize(cfg.n);
  for (Index i = 0; i < cfg.n; ++i) data.y(i) = unif(rng) < logistic(data.linear_predictor(i)) ? 1.0 : 0.0;
  return data;
}

Vector outlier_curve(const Vector& grid, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector out = Vector::Zero(grid.size());
  for (int l = 1; l <= kTerms; ++l) {
    const double z = zeta_sd(l) * gauss(rng);
    for (Index k = 0; k < grid.size(); ++k) out(k) += 1.25 * z * 2.0 * std::sin(l * M_PI * grid(k));
  }
  return out;
}

std::vector<Index> contaminate(SimData& data, std::span<const Index> eligible, const SimConfig& cfg, Rng& rng) {
  const Index count = contamination_count(cfg);
  if (count > static_cast<Index>(eligible.size())) {
    throw InvalidArgument("contamination count " + std::to_string(count) + " exceeds the " +
                          std::to_string(eligible.size()) + " training rows");
  }
  std::vector<Index> pool(eligible.begin(), eligible.end());
  for (Index k = 0; k < count; ++k) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(k), pool.size() - 1);
    std::swap(pool[static_cast<std::size_t>(k)], pool[pick(rng)]);
  }
  pool.resize(static_cast<std::size_t>(count));
  for (const Index row : pool) {
    data.curves.values.row(row) = outlier_curve(data.curves.grid, rng).transpose();
    data.y(row) = 1.0 - data.y(row);
  }
  return pool;
}

Split split(Index n, Index n_train, Rng& rng) {
  if (n_train < 1 || n_train >= n) throw InvalidArgument("need 1 <= n_train < n");
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  Split out;
  out.train.assign(perm.begin(), perm.begin() + n_train);
  out.test.assign(perm.begin() + n_train, perm.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace rflogit
