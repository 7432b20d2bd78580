#include "rflogit/fpca.hpp"

#include "rflogit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace rflogit {

namespace {

constexpr double kThresholdSlack = 1e-12;
constexpr double kDegenerateRow = 1e-10;  // relative to the largest undeflated row norm

void check_threshold(double var_threshold) {
  if (!(var_threshold > 0.0 && var_threshold <= 1.0)) {
    throw InvalidArgument("variance threshold must lie in (0, 1]");
  }
}

// Flip each row so that its largest-magnitude basis coefficient is positive.
void fix_signs(Matrix& directions, Matrix& transformed, Matrix& scores) {
  for (Index k = 0; k < directions.rows(); ++k) {
    Index arg = 0;
    directions.row(k).cwiseAbs().maxCoeff(&arg);
    if (directions(k, arg) < 0.0) {
      directions.row(k) *= -1.0;
      transformed.col(k) *= -1.0;
      scores.col(k) *= -1.0;
    }
  }
}

Vector cumulative_share(const Vector& spectrum, Index k) {
  const double total = spectrum.cwiseMax(0.0).sum();
  Vector out(k);
  double acc = 0.0;
  for (Index j = 0; j < k; ++j) {
    acc += std::max(spectrum(j), 0.0);
    out(j) = total > 0.0 ? acc / total : 1.0;
  }
  return out;
}

}  // namespace

Index components_for_threshold(const Vector& spectrum, double var_threshold) {
  check_threshold(var_threshold);
  const Index kmax = spectrum.size();
  if (kmax == 0) return 0;
  const Vector share = cumulative_share(spectrum, kmax);
  for (Index k = 0; k < kmax; ++k) {
    if (share(k) >= var_threshold - kThresholdSlack) return k + 1;
  }
  return kmax;
}

EigenSystem fpca_classical(const FunctionalSample& sample, double var_threshold) {
  check_threshold(var_threshold);
  const Index n = sample.size();
  if (n < 2) throw InvalidArgument("FPCA needs at least two curves");
  if (sample.centering != CenterMode::mean) throw InvalidArgument("classical FPCA expects a mean-centered sample");

  const BSplineBasis& basis = sample.basis;
  const Matrix transformed = sample.coefs * basis.gram_sqrt();  // n x M
  const Matrix cov = transformed.transpose() * transformed / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);

  const Index m = cov.rows();
  Vector spectrum = es.eigenvalues().reverse().cwiseMax(0.0);
  Matrix vecs = es.eigenvectors().rowwise().reverse();  // columns by decreasing eigenvalue

  Index positive = 0;
  while (positive < m && spectrum(positive) > 0.0) ++positive;
  const Index k = std::min(components_for_threshold(spectrum, var_threshold), positive);
  if (k == 0) throw DegenerateScoresError("classical FPCA: sample has no variation");

  Matrix directions = (basis.gram_inv_sqrt() * vecs.leftCols(k)).transpose();
  Matrix kept = vecs.leftCols(k);
  Matrix scores = transformed * kept;
  fix_signs(directions, kept, scores);

  EigenSystem out{basis, std::move(directions), spectrum.head(k), std::move(scores),
                  cumulative_share(spectrum, k), spectrum, FpcaMethod::classical, positive < m};
  return out;
}

double projection_scale(const FunctionalSample& sample, const Vector& alpha, const MScaleConfig& cfg) {
  if (alpha.size() != sample.basis.num_functions()) throw DimensionError("direction does not match basis size");
  const Vector proj = sample.coefs * (sample.basis.gram() * alpha);
  return mscale(proj, cfg);
}

EigenSystem fpca_robust(const FunctionalSample& sample, const RobustFpcaOptions& opts) {
  check_threshold(opts.var_threshold);
  const Index n = sample.size();
  if (n < 2) throw InvalidArgument("FPCA needs at least two curves");
  if (sample.centering != CenterMode::l1_median) {
    throw InvalidArgument("robust FPCA expects a sample centered at its L1-median");
  }

  const BSplineBasis& basis = sample.basis;
  const Index m = basis.num_functions();
  const Matrix z = sample.coefs * basis.gram_sqrt();  // rows live in the Euclidean image of the Phi metric
  const Index kmax = std::min<Index>(m, n - 1);

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double top = z.rowwise().norm().maxCoeff();
  Matrix found(m, 0);
  std::vector<double> lambdas;
  bool exhausted = false;

  auto scale_of = [&](const Matrix& data, const Vector& dir) {
    const Vector proj = data * dir;
    return mscale(proj, opts.scale);
  };
  auto deflate = [&](Vector v) {
    if (found.cols() > 0) v -= found * (found.transpose() * v);
    return v;
  };

  for (Index k = 0; k < kmax; ++k) {
    const Matrix zd = found.cols() > 0 ? Matrix(z - (z * found) * found.transpose()) : z;
    const Vector norms = zd.rowwise().norm();
    std::vector<Index> cand;
    for (Index i = 0; i < n; ++i) {
      if (top > 0.0 && norms(i) > kDegenerateRow * top) cand.push_back(i);
    }
    if (cand.empty()) {
      exhausted = true;
      break;
    }

    const Index nc = static_cast<Index>(cand.size());
    Matrix dirs(m, nc);
    for (Index j = 0; j < nc; ++j) dirs.col(j) = zd.row(cand[j]).transpose() / norms(cand[j]);
    const Matrix proj = zd * dirs;  // n x nc
    Vector s(nc);
    for (Index j = 0; j < nc; ++j) s(j) = mscale(proj.col(j), opts.scale);

    std::vector<Index> order(nc);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return s(a) > s(b); });
    if (!(s(order[0]) > 0.0)) {
      exhausted = true;
      break;
    }

    Vector alpha = dirs.col(order[0]);
    double best = s(order[0]);

    const Index n_top = std::min<Index>(opts.refine_partners, nc - 1);
    double angle = M_PI / 4.0;
    for (int round = 0; round < opts.n_refine; ++round) {
      std::vector<Vector> partners;
      partners.reserve(static_cast<std::size_t>(n_top + opts.random_partners));
      for (Index j = 1; j <= n_top; ++j) partners.push_back(dirs.col(order[j]));
      for (int j = 0; j < opts.random_partners; ++j) {
        Vector g(m);
        for (Index q = 0; q < m; ++q) g(q) = gauss(rng);
        partners.push_back(deflate(std::move(g)));
      }
      std::shuffle(partners.begin(), partners.end(), rng);

      const double ca = std::cos(angle);
      const double sa = std::sin(angle);
      for (Vector& w : partners) {
        w = deflate(w - w.dot(alpha) * alpha);
        const double wn = w.norm();
        if (!(wn > 1e-12)) continue;
        w /= wn;
        const Vector plus = ca * alpha + sa * w;
        const Vector minus = ca * alpha - sa * w;
        const double sp = scale_of(zd, plus);
        const double sm = scale_of(zd, minus);
        if (sp >= sm && sp > best) {
          alpha = plus;
          best = sp;
        } else if (sm > sp && sm > best) {
          alpha = minus;
          best = sm;
        }
      }
      angle *= 0.5;
    }

    if (found.cols() > 0) {
      // Twice is enough to keep the accepted directions orthonormal to working precision.
      alpha = deflate(deflate(alpha));
      alpha.normalize();
      best = scale_of(zd, alpha);
    }
    found.conservativeResize(Eigen::NoChange, found.cols() + 1);
    found.col(found.cols() - 1) = alpha;
    lambdas.push_back(best * best);
  }

  const Index found_count = found.cols();
  if (found_count == 0) throw DegenerateScoresError("robust FPCA: every projection has zero scale");

  // Greedy search is approximate; keep the eigenpairs in decreasing order.
  std::vector<Index> order(static_cast<std::size_t>(found_count));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return lambdas[a] > lambdas[b]; });
  Matrix sorted(m, found_count);
  Vector spectrum(found_count);
  for (Index j = 0; j < found_count; ++j) {
    sorted.col(j) = found.col(order[j]);
    spectrum(j) = lambdas[order[j]];
  }

  const Index k = components_for_threshold(spectrum, opts.var_threshold);
  Matrix kept = sorted.leftCols(k);
  Matrix directions = (basis.gram_inv_sqrt() * kept).transpose();
  Matrix scores = z * kept;
  fix_signs(directions, kept, scores);

  EigenSystem out{basis, std::move(directions), spectrum.head(k), std::move(scores),
                  cumulative_share(spectrum, k), spectrum, FpcaMethod::robust, exhausted};
  return out;
}

Matrix project_scores(const EigenSystem& eigen, const Matrix& centered_coefs) {
  if (centered_coefs.cols() != eigen.basis.num_functions()) {
    throw DimensionError("coefficient rows do not match the eigen system's basis");
  }
  return centered_coefs * (eigen.basis.gram() * eigen.directions.transpose());
}

double orthonormality_error(const EigenSystem& eigen) {
  const Matrix g = eigen.directions * eigen.basis.gram() * eigen.directions.transpose();
  return (g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace rflogit
