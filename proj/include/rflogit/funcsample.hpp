#pragma once

#include "rflogit/bspline.hpp"
#include "rflogit/types.hpp"

#include <optional>
#include <vector>

namespace rflogit {

/// Curves observed on a shared, strictly increasing grid; row i is curve i.
struct RawCurves {
  Vector grid;
  Matrix values;

  Index num_curves() const { return values.rows(); }
  Index num_points() const { return grid.size(); }
};

/// Validates shape, finiteness and grid monotonicity. Throws on violation.
void validate(const RawCurves& raw);

/// Centered moving average over `window` grid points (odd, >= 1). The window
/// shrinks symmetrically near the ends, so straight lines pass unchanged on an
/// equally spaced grid. A window of 1 returns the curves as they are.
RawCurves presmooth(const RawCurves& raw, int window);

/// Select rows of a curve set.
RawCurves take_rows(const RawCurves& raw, const std::vector<Index>& rows);

enum class CenterMode { none, mean, l1_median };

/// Curves expanded in a B-spline basis. Row i of `coefs` are the basis
/// coefficients of curve i minus `center` (when centered).
struct FunctionalSample {
  BSplineBasis basis;
  Matrix coefs;
  Vector center;
  CenterMode centering = CenterMode::none;

  Index size() const { return coefs.rows(); }
  bool centered() const { return centering != CenterMode::none; }
};

/// Least-squares basis coefficients of every curve (one shared QR factorization).
FunctionalSample fit_coefficients(const RawCurves& raw, const BSplineBasis& basis);

/// Domain spanned by the observation grid.
inline Interval grid_domain(const Vector& grid) { return {grid(0), grid(grid.size() - 1)}; }

/// Per-M record of the residual sweep.
struct BasisSweep {
  std::vector<int> candidates;
  std::vector<double> phi2;  // NaN for skipped candidates (n <= M)
  int selected = 0;
};

/// Residual criterion phi^2(M) = sum_i int (X_i - Xhat_i)^2 / (n - M), with the
/// integral taken by the trapezoid rule on the observation grid.
double residual_criterion(const RawCurves& raw, int num_functions);

/// Sweeps M = 4 .. min(40, floor(J/4)) and returns the first M at which the fit
/// is exact or phi^2 plateaus (|phi^2(M) - phi^2(M+1)| < 1e-6); falls back to
/// the argmin over the sweep.
BasisSweep sweep_num_basis(const RawCurves& raw);
int select_num_basis(const RawCurves& raw);

struct WeiszfeldOptions {
  double tol = 1e-10;
  int max_iter = 500;
};

/// Geometric (L1) median of the rows of `points` under the Euclidean norm.
/// Weiszfeld iteration with the Vardi-Zhang step at data points.
/// Throws ConvergenceError (carrying the last iterate) after max_iter steps.
Vector geometric_median(const Matrix& points, const WeiszfeldOptions& opts = {});

/// Center an uncentered sample by the coefficient mean or by the L1-median
/// taken in the Phi metric.
FunctionalSample center(const FunctionalSample& sample, CenterMode mode,
                        const WeiszfeldOptions& opts = {});

/// Coefficients of new curves relative to an existing center, on the same basis.
Matrix centered_coefficients(const RawCurves& raw, const BSplineBasis& basis, const Vector& center);

}  // namespace rflogit
