#include "rflogit/logitfit.hpp"

#include "rflogit/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace rflogit {

namespace {

constexpr double kSeparationNorm = 1e3;

double lower_bias_integral(double u) {
  // integral over (0, u] of exp(-sqrt(-ln s)) ds; with s = exp(-w^2) and
  // v = w + 1/2 it reduces to e^{1/4} [exp(-a^2) - (sqrt(pi)/2) erfc(a)].
  const double a = std::sqrt(-std::log(u)) + 0.5;
  return std::exp(0.25) * (std::exp(-a * a) - 0.5 * std::sqrt(M_PI) * std::erfc(a));
}

void check_binary(const Vector& y) {
  for (Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) throw InvalidArgument("response must be 0/1");
  }
}

void check_fit_inputs(const Matrix& scores, const Vector& y, const EigenSystem& eigen) {
  if (scores.rows() != y.size()) throw DimensionError("scores and response have different lengths");
  if (scores.cols() < 1) throw InvalidArgument("need at least one principal component");
  if (scores.cols() != eigen.num_components()) {
    throw DimensionError("score columns do not match the number of eigen directions");
  }
  check_binary(y);
}

void check_two_classes(const Vector& y, const Vector& w) {
  double pos = 0.0;
  double neg = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    if (w(i) <= 0.0) continue;
    (y(i) == 1.0 ? pos : neg) += 1.0;
  }
  if (pos == 0.0 || neg == 0.0) throw SingleClassError("response has a single class among weighted observations");
}

}  // namespace

double bias_integral(double u, double c) {
  if (!(c > 0.0)) throw InvalidArgument("bias correction tuning constant must be positive");
  if (u <= 0.0) return 0.0;
  u = std::min(u, 1.0);
  const double knee = std::exp(-c);
  if (u < knee) return lower_bias_integral(u);
  return lower_bias_integral(knee) + (u - knee) * std::exp(-std::sqrt(c));
}

double bias_correction(double kappa, double c) {
  return bias_integral(logistic(kappa), c) + bias_integral(logistic(-kappa), c) + bias_integral(1.0, c);
}

double bias_correction_derivative(double kappa, double c) {
  const double f = logistic(kappa);
  const double g = logistic(-kappa);
  // D'(u) = rho2'(-ln u); -ln F(k) = softplus(-k), -ln(1 - F(k)) = softplus(k)
  const double d_f = rho2_derivative(softplus(-kappa), c);
  const double d_g = rho2_derivative(softplus(kappa), c);
  return f * g * (d_f - d_g);
}

Vector robust_weights(const Matrix& scores, const Vector& eigenvalues, double quantile) {
  if (!(quantile > 0.0 && quantile < 1.0)) throw InvalidArgument("weight quantile must lie in (0, 1)");
  const Index k = scores.cols();
  if (eigenvalues.size() != k) throw DimensionError("eigenvalue count does not match score columns");
  if (k == 0) throw InvalidArgument("robust weights need at least one score column");

  Vector loc(k);
  Vector spread(k);
  for (Index j = 0; j < k; ++j) {
    loc(j) = median(scores.col(j));
    const double mad = 1.4826 * median((scores.col(j).array() - loc(j)).abs().matrix());
    spread(j) = mad > 0.0 ? mad : (eigenvalues(j) > 0.0 ? std::sqrt(eigenvalues(j)) : 0.0);
  }
  if ((spread.array() > 0.0).count() == 0) throw DegenerateScoresError("score columns have zero dispersion");

  const boost::math::chi_squared dist(static_cast<double>(k));
  const double cut = boost::math::quantile(dist, quantile);

  Vector w(scores.rows());
  for (Index i = 0; i < scores.rows(); ++i) {
    double d2 = 0.0;
    for (Index j = 0; j < k; ++j) {
      if (spread(j) > 0.0) {
        const double r = (scores(i, j) - loc(j)) / spread(j);
        d2 += r * r;
      }
    }
    w(i) = d2 <= cut ? 1.0 : 0.0;
  }
  return w;
}

namespace detail {

Matrix with_intercept(const Matrix& scores) {
  Matrix z(scores.rows(), scores.cols() + 1);
  z.col(0).setOnes();
  z.rightCols(scores.cols()) = scores;
  return z;
}

double wby_objective(const WbyProblem& problem, const Vector& theta, Vector* gradient) {
  const Vector kappa = problem.design * theta;
  const double c = problem.c;
  double total = 0.0;
  Vector coef(kappa.size());
  for (Index i = 0; i < kappa.size(); ++i) {
    const double w = problem.weights(i);
    if (w == 0.0) {
      coef(i) = 0.0;
      continue;
    }
    const double k = kappa(i);
    const int yi = problem.y(i) == 1.0 ? 1 : 0;
    const double d = deviance(k, yi);
    const double dd = logistic(k) - yi;  // d'(kappa)
    double term;
    double slope;
    if (problem.loss == DevianceLoss::croux_haesbroeck) {
      term = rho2(d, c);
      slope = rho2_derivative(d, c) * dd;
    } else {
      term = d;
      slope = dd;
    }
    if (problem.bias_correction) {
      term += bias_correction(k, c);
      slope += bias_correction_derivative(k, c);
    }
    total += w * term;
    coef(i) = w * slope;
  }
  if (gradient != nullptr) *gradient = problem.design.transpose() * coef;
  return total;
}

MinimizeResult bfgs_minimize(const Objective& f, Vector x0, double grad_tol, int max_iter, double divergence_norm) {
  MinimizeResult res;
  const Index p = x0.size();
  Vector x = std::move(x0);
  Vector g(p);
  double fx = f(x, &g);
  if (!std::isfinite(fx)) throw InvalidArgument("objective is not finite at the starting point");
  Matrix h = Matrix::Identity(p, p);
  bool scaled = false;

  int it = 0;
  for (; it < max_iter; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= grad_tol) {
      res.converged = true;
      break;
    }
    Vector dir = -h * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      h.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
    }
    double step = scaled ? 1.0 : std::min(1.0, 1.0 / std::max(dir.norm(), 1e-300));

    bool accepted = false;
    Vector xn(p);
    Vector gn(p);
    double fn = 0.0;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + step * dir;
      fn = f(xn, &gn);
      if (std::isfinite(fn)) {
        const bool armijo = fn <= fx + 1e-4 * step * slope;
        // near the optimum the value is flat to roundoff; accept a gradient decrease
        const bool flat = fn <= fx + 1e-12 * (1.0 + std::abs(fx)) && gn.norm() < g.norm();
        if (armijo || flat) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.converged = g.lpNorm<Eigen::Infinity>() <= 1e-6 * std::max(1.0, std::abs(fx));
      break;
    }

    const Vector s = xn - x;
    const Vector yv = gn - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      if (!scaled) {
        h = Matrix::Identity(p, p) * (sy / yv.squaredNorm());
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Matrix left = Matrix::Identity(p, p) - rho * s * yv.transpose();
      h = left * h * left.transpose() + rho * s * s.transpose();
    }
    const bool descending = fn < fx;
    x = xn;
    g = gn;
    fx = fn;
    if (x.norm() > divergence_norm && descending) {
      res.diverged = true;
      ++it;
      break;
    }
  }
  res.x = std::move(x);
  res.value = fx;
  res.iterations = it;
  return res;
}

void newton_polish(const Objective& f, MinimizeResult& result, int max_steps) {
  const Index p = result.x.size();
  Vector g(p);
  double fx = f(result.x, &g);
  for (int step = 0; step < max_steps; ++step) {
    Matrix hess(p, p);
    Vector gp(p);
    Vector gm(p);
    for (Index j = 0; j < p; ++j) {
      const double h = 1e-5 * std::max(1.0, std::abs(result.x(j)));
      Vector xp = result.x;
      Vector xm = result.x;
      xp(j) += h;
      xm(j) -= h;
      f(xp, &gp);
      f(xm, &gm);
      hess.col(j) = (gp - gm) / (2.0 * h);
    }
    const Eigen::LDLT<Matrix> ldlt(0.5 * (hess + hess.transpose()));
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return;
    const Vector dx = -ldlt.solve(g);
    if (!dx.allFinite()) return;
    const Vector xn = result.x + dx;
    Vector gn(p);
    const double fn = f(xn, &gn);
    if (!(gn.norm() < g.norm()) || fn > fx + 1e-12 * (1.0 + std::abs(fx))) return;
    result.x = xn;
    g = gn;
    fx = fn;
    result.value = fn;
    if (dx.norm() <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + result.x.norm())) return;
  }
}

MinimizeResult irls_logistic(const Matrix& design, const Vector& y, const Vector& weights, const MlOptions& opts) {
  const Index p = design.cols();
  Vector theta = Vector::Zero(p);
  MinimizeResult res;
  auto weighted_deviance = [&](const Vector& eta) {
    double dev = 0.0;
    for (Index i = 0; i < eta.size(); ++i) {
      if (weights(i) != 0.0) dev += weights(i) * deviance(eta(i), y(i) == 1.0 ? 1 : 0);
    }
    return dev;
  };

  for (int it = 0; it < opts.max_iter; ++it) {
    const Vector eta = design * theta;
    const Vector mu = rflogit::logistic(eta.array()).matrix();
    const Vector var = weights.cwiseProduct(mu.cwiseProduct((1.0 - mu.array()).matrix()));
    const Matrix info = design.transpose() * var.asDiagonal() * design;
    const Vector score = design.transpose() * weights.cwiseProduct(y - mu);
    const Eigen::LDLT<Matrix> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 1e-300) {
      throw SeparationError("logistic information matrix is singular (separated or degenerate data)");
    }
    const Vector delta = ldlt.solve(score);
    theta += delta;
    if (!theta.allFinite() || theta.norm() > kSeparationNorm) {
      throw SeparationError("logistic coefficients diverge (complete or quasi-complete separation)");
    }
    if (delta.lpNorm<Eigen::Infinity>() <= opts.tol * (1.0 + theta.lpNorm<Eigen::Infinity>())) {
      res.converged = true;
      res.iterations = it + 1;
      break;
    }
    res.iterations = it + 1;
  }
  const double dev = weighted_deviance(design * theta);
  if (!res.converged) {
    if (dev < 1e-6) throw SeparationError("logistic deviance vanishes (complete separation)");
    throw ConvergenceError("IRLS did not converge in " + std::to_string(opts.max_iter) + " iterations", theta);
  }
  res.x = std::move(theta);
  res.value = dev;
  return res;
}

}  // namespace detail

LogitFit fit_ml(const Matrix& scores, const Vector& y, const EigenSystem& eigen, const MlOptions& opts) {
  check_fit_inputs(scores, y, eigen);
  const Vector w = Vector::Ones(y.size());
  check_two_classes(y, w);
  const Matrix design = detail::with_intercept(scores);
  const auto res = detail::irls_logistic(design, y, w, opts);

  LogitFit fit;
  fit.theta = res.x;
  fit.weights = w;
  fit.beta_coefs = eigen.directions.transpose() * fit.theta.tail(fit.theta.size() - 1);
  fit.estimator = Estimator::ml;
  fit.converged = res.converged;
  fit.objective_value = res.value;
  fit.iterations = res.iterations;
  return fit;
}

LogitFit fit_wby(const Matrix& scores, const Vector& y, const EigenSystem& eigen, const WbyOptions& opts) {
  check_fit_inputs(scores, y, eigen);
  const Vector w = robust_weights(scores, eigen.eigenvalues, opts.weight_quantile);
  check_two_classes(y, w);
  const Matrix design = detail::with_intercept(scores);

  const Vector start = detail::irls_logistic(design, y, w, MlOptions{}).x;
  const detail::WbyProblem problem{design, y, w, opts.c};
  const detail::Objective objective = [&](const Vector& theta, Vector* grad) {
    return detail::wby_objective(problem, theta, grad);
  };

  auto best = detail::bfgs_minimize(objective, start, opts.grad_tol, opts.max_iter, kSeparationNorm);
  if (best.diverged) throw SeparationError("weighted Bianco-Yohai estimate diverges (separated data)");

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double radius = 0.5 * start.norm();
  for (int r = 0; r < opts.restarts && radius > 0.0; ++r) {
    Vector dir(start.size());
    for (Index j = 0; j < dir.size(); ++j) dir(j) = gauss(rng);
    const Vector x0 = start + radius * dir.normalized();
    auto trial = detail::bfgs_minimize(objective, x0, opts.grad_tol, opts.max_iter, kSeparationNorm);
    if (!trial.diverged && trial.x.allFinite() && trial.value < best.value) best = std::move(trial);
  }

  detail::newton_polish(objective, best);

  LogitFit fit;
  fit.theta = best.x;
  fit.weights = w;
  fit.beta_coefs = eigen.directions.transpose() * fit.theta.tail(fit.theta.size() - 1);
  fit.estimator = Estimator::wby;
  fit.converged = best.converged;
  fit.objective_value = best.value;
  fit.iterations = best.iterations;
  return fit;
}

Vector predict_probabilities(const LogitFit& fit, const Matrix& scores) {
  if (scores.cols() + 1 != fit.theta.size()) throw DimensionError("score columns do not match the fitted model");
  const Vector kappa = (scores * fit.gamma()).array() + fit.intercept();
  return rflogit::logistic(kappa.array()).matrix();
}

std::vector<Prediction> predict(const LogitFit& fit, const EigenSystem& eigen, const FunctionalSample& centered) {
  if (!(centered.basis == eigen.basis)) throw DimensionError("sample basis differs from the training basis");
  const Vector prob = predict_probabilities(fit, project_scores(eigen, centered.coefs));
  std::vector<Prediction> out(static_cast<std::size_t>(prob.size()));
  for (Index i = 0; i < prob.size(); ++i) out[static_cast<std::size_t>(i)] = {prob(i), prob(i) >= 0.5 ? 1 : 0};
  return out;
}

Vector predict_function_path(const LogitFit& fit, const BSplineBasis& basis, const Matrix& centered_coefs) {
  if (centered_coefs.cols() != basis.num_functions() || fit.beta_coefs.size() != basis.num_functions()) {
    throw DimensionError("coefficients do not match the basis");
  }
  const Vector kappa = (centered_coefs * (basis.gram() * fit.beta_coefs)).array() + fit.intercept();
  return rflogit::logistic(kappa.array()).matrix();
}

}  // namespace rflogit
