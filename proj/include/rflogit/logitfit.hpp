#pragma once

// Logistic regression on principal component scores.
//
// Two estimators share one output type: plain maximum likelihood (IRLS) and
// the weighted Bianco-Yohai M-estimator, which bounds each observation's
// deviance with rho2, adds the Fisher-consistency correction C(kappa), and
// drops high-leverage score rows through 0/1 robust-distance weights.

#include "rflogit/fpca.hpp"
#include "rflogit/funcsample.hpp"
#include "rflogit/robust_scale.hpp"
#include "rflogit/types.hpp"

#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <vector>

namespace rflogit {

// ---------------------------------------------------------------------------
// Scalar kernels

template <std::floating_point Scalar>
Scalar logistic(Scalar u) {
  using std::exp;
  if (u >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-u));
  const Scalar e = exp(u);
  return e / (Scalar(1) + e);
}

/// log(1 + e^u) without overflow.
template <std::floating_point Scalar>
Scalar softplus(Scalar u) {
  using std::exp;
  using std::log1p;
  return u > Scalar(0) ? u + log1p(exp(-u)) : log1p(exp(u));
}

template <typename Derived>
auto logistic(const Eigen::ArrayBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  return u.unaryExpr([](Scalar v) { return logistic(v); });
}

/// Negative log-likelihood of one observation: -y ln F(k) - (1-y) ln(1-F(k)).
template <std::floating_point Scalar>
Scalar deviance(Scalar kappa, int y) {
  return y == 1 ? softplus(-kappa) : softplus(kappa);
}

/// D(u) = integral over (0, u] of rho2'(-ln s) ds, in closed form.
double bias_integral(double u, double c);

/// C(kappa) = D(F(kappa)) + D(1 - F(kappa)) + D(1).
double bias_correction(double kappa, double c);
double bias_correction_derivative(double kappa, double c);

// ---------------------------------------------------------------------------
// Fits

enum class Estimator { ml, wby };

struct LogitFit {
  Vector theta;        // (beta0, gamma')'
  Vector weights;      // 0/1 per observation
  Vector beta_coefs;   // basis coefficients of beta-hat(t) = sum_k gamma_k psi_k(t)
  Estimator estimator = Estimator::ml;
  bool converged = false;
  double objective_value = 0.0;
  int iterations = 0;

  double intercept() const { return theta(0); }
  auto gamma() const { return theta.tail(theta.size() - 1); }
};

struct WbyOptions {
  double c = 0.5;
  double weight_quantile = 0.975;
  double grad_tol = 1e-8;
  int max_iter = 500;
  int restarts = 10;
  std::uint64_t seed = 0xb1a5;
};

struct MlOptions {
  double tol = 1e-10;
  int max_iter = 100;
};

/// Hard-rejection weights from a coordinatewise median/MAD Mahalanobis distance
/// of the score rows, cut at the chi-square(K) quantile.
Vector robust_weights(const Matrix& scores, const Vector& eigenvalues, double quantile = 0.975);

LogitFit fit_ml(const Matrix& scores, const Vector& y, const EigenSystem& eigen, const MlOptions& opts = {});
LogitFit fit_wby(const Matrix& scores, const Vector& y, const EigenSystem& eigen, const WbyOptions& opts = {});

/// P(Y = 1) for rows of scores.
Vector predict_probabilities(const LogitFit& fit, const Matrix& scores);

struct Prediction {
  double probability;
  int label;
};

/// Predictions for a sample already centered at the training center.
std::vector<Prediction> predict(const LogitFit& fit, const EigenSystem& eigen, const FunctionalSample& centered);

/// Same probabilities through beta-hat directly: F(beta0 + <X - mu, beta-hat>).
Vector predict_function_path(const LogitFit& fit, const BSplineBasis& basis, const Matrix& centered_coefs);

namespace detail {

enum class DevianceLoss { croux_haesbroeck, identity };

/// Objective sum_i w_i { rho(d(z_i'theta; y_i)) + C(z_i'theta) } on a design with
/// a leading column of ones. The identity/no-correction variant exists for tests.
struct WbyProblem {
  const Matrix& design;
  const Vector& y;
  const Vector& weights;
  double c = 0.5;
  DevianceLoss loss = DevianceLoss::croux_haesbroeck;
  bool bias_correction = true;
};

double wby_objective(const WbyProblem& problem, const Vector& theta, Vector* gradient = nullptr);

struct MinimizeResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  bool diverged = false;  // norm exceeded the cap while still descending
};

using Objective = std::function<double(const Vector&, Vector*)>;

/// BFGS with backtracking line search.
MinimizeResult bfgs_minimize(const Objective& f, Vector x0, double grad_tol, int max_iter,
                             double divergence_norm = 1e3);

/// Newton steps on the gradient, with a Hessian from central differences of
/// it, to push a minimizer found by bfgs_minimize to working precision. A step
/// is kept only if it shrinks the gradient and does not raise the value.
void newton_polish(const Objective& f, MinimizeResult& result, int max_steps = 8);

/// Weighted IRLS maximum likelihood on a design with an intercept column.
MinimizeResult irls_logistic(const Matrix& design, const Vector& y, const Vector& weights, const MlOptions& opts);

Matrix with_intercept(const Matrix& scores);

}  // namespace detail

}  // namespace rflogit
