#pragma once

#include "rflogit/funcsample.hpp"
#include "rflogit/types.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace rflogit {

using Rng = std::mt19937_64;

/// Independent generator for (seed, run, stream); runs never share state.
Rng make_stream(std::uint64_t seed, std::uint64_t run, std::uint64_t stream = 0);

struct SimConfig {
  Index n = 1000;
  Index grid_points = 201;
  Index n_train = 700;
  double contamination = 0.0;
  std::uint64_t seed = 1;
  int n_runs = 200;
  double signal = 1.0;  // multiplies the linear predictor; 0 gives fair coin responses
};

void validate(const SimConfig& cfg);

/// round-half-up(contamination * n_train)
Index contamination_count(const SimConfig& cfg);

struct SimData {
  RawCurves curves;
  Vector y;
  Vector linear_predictor;
};

/// The coefficient function sin(pi t).
double beta_true(double t);

/// Equally spaced grid on [0, 1].
Vector unit_grid(Index points);

/// X_i(t) = sum_{l=1..5} zeta_l (exp(-l^2 t) + sin(l pi t)), zeta_l ~ N(0, 4 l^{-3/2});
/// y_i ~ Bernoulli(F(int X_i beta)), the integral by the trapezoid rule.
SimData generate(const SimConfig& cfg, Rng& rng);

/// One outlying curve 1.25 sum_l zeta_l 2 sin(l pi t) with fresh zeta.
Vector outlier_curve(const Vector& grid, Rng& rng);

/// Replaces round(contamination * n_train) curves picked from `eligible`
/// (the training rows) by outlying curves and flips their responses.
/// Returns the replaced row indices.
std::vector<Index> contaminate(SimData& data, std::span<const Index> eligible, const SimConfig& cfg, Rng& rng);

struct Split {
  std::vector<Index> train;
  std::vector<Index> test;
};

Split split(Index n, Index n_train, Rng& rng);

}  // namespace rflogit
