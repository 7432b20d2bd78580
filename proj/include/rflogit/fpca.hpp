#pragma once

#include "rflogit/bspline.hpp"
#include "rflogit/funcsample.hpp"
#include "rflogit/robust_scale.hpp"
#include "rflogit/types.hpp"

#include <cstdint>

namespace rflogit {

enum class FpcaMethod { classical, robust };

/// Principal directions of a centered functional sample.
///
/// Row k of `directions` holds the basis coefficients of psi_k; the rows are
/// orthonormal in the Phi metric. `eigenvalues` and `scores` cover the K
/// retained components, `spectrum` every component that was extracted.
struct EigenSystem {
  BSplineBasis basis;
  Matrix directions;    // K x M
  Vector eigenvalues;   // K
  Matrix scores;        // n x K
  Vector explained;     // K, cumulative fractions
  Vector spectrum;      // K_max
  FpcaMethod method = FpcaMethod::classical;
  bool rank_exhausted = false;

  Index num_components() const { return directions.rows(); }
};

using RobustEigenSystem = EigenSystem;

struct RobustFpcaOptions {
  MScaleConfig scale{};
  double var_threshold = 0.99;
  int n_refine = 20;
  int refine_partners = 10;     // top remaining candidates mixed in per round
  int random_partners = 2;      // extra random directions per round
  std::uint64_t seed = 0x5eed;
};

/// Eigen-decomposition of (1/(n-1)) Phi^{1/2} A'A Phi^{1/2} for a mean-centered sample.
EigenSystem fpca_classical(const FunctionalSample& sample, double var_threshold = 0.99);

/// Sequential projection pursuit maximizing the M-scale of the projections,
/// for a sample centered at its L1-median.
EigenSystem fpca_robust(const FunctionalSample& sample, const RobustFpcaOptions& opts = {});

/// Scores <X - mu, psi_k> of already-centered coefficient rows.
Matrix project_scores(const EigenSystem& eigen, const Matrix& centered_coefs);

/// max |D Phi D' - I| over the direction matrix.
double orthonormality_error(const EigenSystem& eigen);

/// M-scale (median location) of the projections <X_i - mu, alpha> for a
/// coefficient-space direction alpha. This is the pursuit objective s_n.
double projection_scale(const FunctionalSample& sample, const Vector& alpha, const MScaleConfig& cfg = {});

/// Number of leading components whose cumulative share of `spectrum` reaches the threshold.
Index components_for_threshold(const Vector& spectrum, double var_threshold);

}  // namespace rflogit
