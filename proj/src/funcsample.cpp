#include "rflogit/funcsample.hpp"

#include "rflogit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rflogit {

namespace {

constexpr double kPlateauTol = 1e-6;
constexpr double kExactFitTol = 1e-12;  // relative to mean curve energy
constexpr int kMinBasis = 4;
constexpr int kMaxBasis = 40;

Vector trapezoid_weights(const Vector& grid) {
  const Index j = grid.size();
  Vector w = Vector::Zero(j);
  for (Index k = 0; k + 1 < j; ++k) {
    const double h = grid(k + 1) - grid(k);
    w(k) += 0.5 * h;
    w(k + 1) += 0.5 * h;
  }
  return w;
}

Eigen::ColPivHouseholderQR<Matrix> factor_design(const Matrix& design) {
  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  if (qr.rank() < design.cols()) {
    throw SingularDesignError("basis design matrix is rank deficient (rank " +
                              std::to_string(qr.rank()) + " < " + std::to_string(design.cols()) + ")");
  }
  return qr;
}

double phi_norm(const Eigen::Ref<const RowVector>& v, const Matrix& metric) {
  return std::sqrt(std::max(0.0, v.dot(v * metric)));
}

}  // namespace

void validate(const RawCurves& raw) {
  if (raw.grid.size() < 2) throw InvalidArgument("curve grid needs at least two points");
  if (raw.values.cols() != raw.grid.size()) {
    throw DimensionError("curve values have " + std::to_string(raw.values.cols()) +
                         " columns but the grid has " + std::to_string(raw.grid.size()) + " points");
  }
  for (Index k = 0; k + 1 < raw.grid.size(); ++k) {
    if (!(raw.grid(k + 1) > raw.grid(k))) throw InvalidArgument("curve grid must be strictly increasing");
  }
  if (!raw.values.allFinite() || !raw.grid.allFinite()) throw InvalidArgument("curve values must be finite");
}

RawCurves presmooth(const RawCurves& raw, int window) {
  validate(raw);
  if (window < 1 || window % 2 == 0) throw InvalidArgument("smoothing window must be an odd positive integer");
  const Index j = raw.num_points();
  const Index half = window / 2;
  RawCurves out{raw.grid, Matrix(raw.num_curves(), j)};
  for (Index k = 0; k < j; ++k) {
    const Index h = std::min({half, k, j - 1 - k});
    out.values.col(k) = raw.values.middleCols(k - h, 2 * h + 1).rowwise().mean();
  }
  return out;
}

RawCurves take_rows(const RawCurves& raw, const std::vector<Index>& rows) {
  RawCurves out{raw.grid, Matrix(static_cast<Index>(rows.size()), raw.values.cols())};
  for (std::size_t i = 0; i < rows.size(); ++i) out.values.row(static_cast<Index>(i)) = raw.values.row(rows[i]);
  return out;
}

FunctionalSample fit_coefficients(const RawCurves& raw, const BSplineBasis& basis) {
  validate(raw);
  const Index m = basis.num_functions();
  if (raw.num_points() < m + 1) {
    throw SingularDesignError("need at least M + 1 = " + std::to_string(m + 1) + " grid points, got " +
                              std::to_string(raw.num_points()));
  }
  const auto qr = factor_design(eval_basis(basis, raw.grid));
  Matrix coefs = qr.solve(raw.values.transpose()).transpose();
  return FunctionalSample{basis, std::move(coefs), Vector::Zero(m), CenterMode::none};
}

double residual_criterion(const RawCurves& raw, int num_functions) {
  validate(raw);
  const Index n = raw.num_curves();
  if (n <= num_functions) throw InvalidArgument("residual criterion needs n > M");
  const BSplineBasis basis(grid_domain(raw.grid), num_functions);
  const Matrix design = eval_basis(basis, raw.grid);
  const auto qr = factor_design(design);
  const Matrix coefs = qr.solve(raw.values.transpose());  // M x n
  const Matrix resid = raw.values - (design * coefs).transpose();
  const Vector w = trapezoid_weights(raw.grid);
  return (resid.array().square().matrix() * w).sum() / static_cast<double>(n - num_functions);
}

BasisSweep sweep_num_basis(const RawCurves& raw) {
  validate(raw);
  const Index n = raw.num_curves();
  const int upper = static_cast<int>(std::min<Index>(kMaxBasis, raw.num_points() / 4));
  if (upper < kMinBasis) {
    throw InvalidArgument("basis sweep needs at least 16 grid points, got " + std::to_string(raw.num_points()));
  }

  BasisSweep sweep;
  for (int m = kMinBasis; m <= upper; ++m) sweep.candidates.push_back(m);
  sweep.phi2.assign(sweep.candidates.size(), std::numeric_limits<double>::quiet_NaN());

  const Vector w = trapezoid_weights(raw.grid);
  const double energy = (raw.values.array().square().matrix() * w).sum() / static_cast<double>(n);
  const double exact_tol = kExactFitTol * std::max(energy, 1.0);

  for (std::size_t k = 0; k < sweep.candidates.size(); ++k) {
    const int m = sweep.candidates[k];
    if (n <= m) break;  // skipped, and so is every larger M
    sweep.phi2[k] = residual_criterion(raw, m);
    if (sweep.phi2[k] <= exact_tol) {
      sweep.selected = m;
      return sweep;
    }
    if (k > 0 && std::abs(sweep.phi2[k - 1] - sweep.phi2[k]) < kPlateauTol) {
      sweep.selected = sweep.candidates[k - 1];
      return sweep;
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sweep.candidates.size(); ++k) {
    if (!std::isnan(sweep.phi2[k]) && sweep.phi2[k] < best) {
      best = sweep.phi2[k];
      sweep.selected = sweep.candidates[k];
    }
  }
  if (sweep.selected == 0) throw InvalidArgument("basis sweep: every candidate has n <= M");
  return sweep;
}

int select_num_basis(const RawCurves& raw) { return sweep_num_basis(raw).selected; }

namespace {

Vector weiszfeld(const Matrix& points, const Matrix& metric, const WeiszfeldOptions& opts) {
  const Index n = points.rows();
  if (n == 0) throw InvalidArgument("geometric median of an empty sample");
  RowVector y = points.colwise().mean();
  for (int it = 0; it < opts.max_iter; ++it) {
    const Matrix diff = points.rowwise() - y;
    const Vector dist = (diff * metric).cwiseProduct(diff).rowwise().sum().cwiseMax(0.0).cwiseSqrt();
    const double coincide = 1e-12 * (1.0 + phi_norm(y, metric));

    double eta = 0.0;
    double wsum = 0.0;
    RowVector weighted = RowVector::Zero(points.cols());
    RowVector pull = RowVector::Zero(points.cols());
    for (Index i = 0; i < n; ++i) {
      if (dist(i) <= coincide) {
        eta += 1.0;
        continue;
      }
      const double wi = 1.0 / dist(i);
      wsum += wi;
      weighted += wi * points.row(i);
      pull += wi * diff.row(i);
    }
    if (wsum == 0.0) return y.transpose();

    RowVector next = weighted / wsum;
    if (eta > 0.0) {
      const double r = phi_norm(pull, metric);
      if (r <= eta) return y.transpose();  // y is a data point and already optimal
      const double frac = eta / r;
      next = (1.0 - frac) * next + frac * y;
    }
    const double step = phi_norm(next - y, metric);
    y = next;
    if (step <= opts.tol * (1.0 + phi_norm(y, metric))) return y.transpose();
  }
  throw ConvergenceError("Weiszfeld iteration did not converge in " + std::to_string(opts.max_iter) +
                             " iterations",
                         y.transpose());
}

}  // namespace

Vector geometric_median(const Matrix& points, const WeiszfeldOptions& opts) {
  return weiszfeld(points, Matrix::Identity(points.cols(), points.cols()), opts);
}

FunctionalSample center(const FunctionalSample& sample, CenterMode mode, const WeiszfeldOptions& opts) {
  if (sample.centered()) throw InvalidArgument("sample is already centered");
  if (sample.size() == 0) throw InvalidArgument("cannot center an empty sample");
  Vector c;
  switch (mode) {
    case CenterMode::none:
      return sample;
    case CenterMode::mean:
      c = sample.coefs.colwise().mean().transpose();
      break;
    case CenterMode::l1_median:
      c = weiszfeld(sample.coefs, sample.basis.gram(), opts);
      break;
  }
  Matrix coefs = sample.coefs.rowwise() - c.transpose();
  return FunctionalSample{sample.basis, std::move(coefs), std::move(c), mode};
}

Matrix centered_coefficients(const RawCurves& raw, const BSplineBasis& basis, const Vector& center) {
  if (center.size() != basis.num_functions()) throw DimensionError("center does not match basis size");
  return fit_coefficients(raw, basis).coefs.rowwise() - center.transpose();
}

}  // namespace rflogit
