#pragma once

// Bounded loss functions and the M-estimator of scale.
//
// rho1 is the Beaton-Tukey biweight loss used for the scale; rho2 is the
// Croux-Haesbroeck loss applied to logistic deviances. Both come in a scalar
// form and an Eigen array form that stays a lazy expression.

#include "rflogit/errors.hpp"
#include "rflogit/types.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <concepts>
#include <string>
#include <vector>

namespace rflogit {

struct MScaleConfig {
  double c1 = 1.56;
  double delta = 0.5;
  double tol = 1e-9;
  int max_iter = 200;
};

template <std::floating_point Scalar>
Scalar rho1(Scalar u, Scalar c) {
  using std::abs;
  using std::min;
  const Scalar v = min(abs(u), c);
  const Scalar r = v * v / (c * c);
  return v * v / Scalar(2) * (Scalar(1) - r + r * r / Scalar(3));
}

template <std::floating_point Scalar>
Scalar rho1_derivative(Scalar u, Scalar c) {
  using std::abs;
  if (abs(u) > c) return Scalar(0);
  const Scalar r = u * u / (c * c);
  return u * (Scalar(1) - r) * (Scalar(1) - r);
}

/// rho1 divided by its supremum c^2/6, i.e. 1 - (1 - min(u^2/c^2, 1))^3.
template <std::floating_point Scalar>
Scalar rho1_normalized(Scalar u, Scalar c) {
  using std::min;
  const Scalar w = Scalar(1) - min(u * u / (c * c), Scalar(1));
  return Scalar(1) - w * w * w;
}

template <typename Derived>
auto rho1_normalized(const Eigen::ArrayBase<Derived>& u, typename Derived::Scalar c) {
  using Scalar = typename Derived::Scalar;
  const auto w = Scalar(1) - (u.square() / (c * c)).min(Scalar(1));
  return Scalar(1) - w.cube();
}

template <std::floating_point Scalar>
Scalar rho2(Scalar u, Scalar c) {
  using std::exp;
  using std::sqrt;
  if (u < Scalar(0)) throw InvalidArgument("rho2 is defined for non-negative arguments only");
  const Scalar sc = sqrt(c);
  if (u <= c) return u * exp(-sc);
  const Scalar su = sqrt(u);
  return Scalar(-2) * exp(-su) * (Scalar(1) + su) + exp(-sc) * (Scalar(2) * (Scalar(1) + sc) + c);
}

template <std::floating_point Scalar>
Scalar rho2_derivative(Scalar u, Scalar c) {
  using std::exp;
  using std::sqrt;
  return u <= c ? exp(-sqrt(c)) : exp(-sqrt(u));
}

namespace detail {

template <typename Derived>
typename Derived::Scalar median_of(const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  std::vector<Scalar> buf(values.size());
  for (Index i = 0; i < values.size(); ++i) buf[i] = values.derived().coeff(i);
  const std::size_t n = buf.size();
  const std::size_t mid = n / 2;
  std::nth_element(buf.begin(), buf.begin() + mid, buf.end());
  Scalar hi = buf[mid];
  if (n % 2 == 1) return hi;
  const Scalar lo = *std::max_element(buf.begin(), buf.begin() + mid);
  return (lo + hi) / Scalar(2);
}

}  // namespace detail

/// Sample median (average of the two middle order statistics for even size).
template <typename Derived>
typename Derived::Scalar median(const Eigen::DenseBase<Derived>& values) {
  if (values.size() == 0) throw InvalidArgument("median of an empty sample");
  return detail::median_of(values);
}

/// M-estimate of scale of `z` about the location `mu`.
///
/// Solves mean(rho1_normalized((z - mu) / s)) = delta, starting at
/// 1.4826 * median|z - mu|. The left side is monotone in log s, so the root is
/// kept bracketed: Newton steps in log s are taken when they land inside the
/// bracket, otherwise the fixed-point step s^2 <- s^2 * mean(rho) / delta (while
/// the bracket is open) or bisection. Returns zero when at least n(1 - delta)
/// residuals vanish (no positive root exists).
template <typename Derived>
typename Derived::Scalar mscale(const Eigen::DenseBase<Derived>& z, typename Derived::Scalar mu,
                                const MScaleConfig& cfg = {}) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  using std::exp;
  using std::log;
  const Index n = z.size();
  if (n == 0) throw InvalidArgument("mscale of an empty sample");
  if (!(cfg.c1 > 0) || !(cfg.delta > 0 && cfg.delta < 1)) {
    throw InvalidArgument("mscale: need c1 > 0 and delta in (0, 1)");
  }
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> resid = z.derived().array() - mu;
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> absres = resid.abs();
  if (!absres.allFinite()) throw InvalidArgument("mscale: non-finite input");

  const Index zeros = (absres == Scalar(0)).count();
  if (static_cast<Scalar>(zeros) >= static_cast<Scalar>(n) * (Scalar(1) - Scalar(cfg.delta))) {
    return Scalar(0);
  }

  Scalar s = Scalar(1.4826) * detail::median_of(absres);
  if (!(s > Scalar(0))) s = absres.mean();

  const Scalar inv_c2 = Scalar(1) / (Scalar(cfg.c1) * Scalar(cfg.c1));
  const Scalar delta = cfg.delta;
  const Scalar tol = std::max(Scalar(cfg.tol), Scalar(8) * std::numeric_limits<Scalar>::epsilon());
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> sq = resid.square() * inv_c2;

  Scalar tau = log(s);
  Scalar lo = -inf;  // f > 0 below the root
  Scalar hi = inf;
  for (int it = 0; it < cfg.max_iter; ++it) {
    const auto w = (sq * exp(Scalar(-2) * tau)).min(Scalar(1));
    const auto om = Scalar(1) - w;
    const Scalar m = (Scalar(1) - om.cube()).mean();
    const Scalar slope = (Scalar(6) * w * om.square()).mean();  // -d mean(rho) / d log s
    const Scalar f = m - delta;
    if (f == Scalar(0)) return exp(tau);
    (f > Scalar(0) ? lo : hi) = tau;

    const Scalar newton = slope > Scalar(0) ? f / slope : inf;
    // A small Newton step leaves an error of order step^2, so it ends the
    // iteration; small safeguard steps do not.
    if (abs(newton) <= tol) return exp(tau + newton);
    Scalar next = tau + newton;
    if (!(next > lo && next < hi)) {
      if (std::isfinite(lo) && std::isfinite(hi)) {
        next = Scalar(0.5) * (lo + hi);
      } else {
        const Scalar fixed = m > Scalar(0) ? Scalar(0.5) * log(m / delta) : Scalar(-1);
        next = tau + std::clamp(fixed, Scalar(-1), Scalar(1));
      }
    }
    tau = next;
    if (hi - lo <= Scalar(4) * std::numeric_limits<Scalar>::epsilon() * (Scalar(1) + abs(tau))) return exp(tau);
  }
  throw ConvergenceError("mscale: iteration did not converge in " + std::to_string(cfg.max_iter) + " iterations");
}

/// M-scale about the sample median of `z`.
template <typename Derived>
typename Derived::Scalar mscale(const Eigen::DenseBase<Derived>& z, const MScaleConfig& cfg = {}) {
  return mscale(z, median(z), cfg);
}

}  // namespace rflogit
