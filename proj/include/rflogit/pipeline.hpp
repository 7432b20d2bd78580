#pragma once

#include "rflogit/fpca.hpp"
#include "rflogit/funcsample.hpp"
#include "rflogit/logitfit.hpp"
#include "rflogit/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rflogit {

enum class Method { fpca_ml, rfpca_wby };

std::string to_string(Method m);
/// Accepts "fpca-ml" and "rfpca-wby"; throws InvalidArgument otherwise.
Method parse_method(const std::string& name);

struct PipelineOptions {
  Method method = Method::rfpca_wby;
  double var_threshold = 0.99;
  int num_basis = 0;  // 0 selects M with the residual sweep
  int presmooth_window = 1;  // moving-average width applied before the expansion; 1 is off
  std::uint64_t seed = 1;
  MScaleConfig scale{};
  int n_refine = 20;
  WbyOptions wby{};
  MlOptions ml{};
};

/// Everything needed to score new curves: basis, center, directions and coefficients.
struct Model {
  Method method = Method::rfpca_wby;
  Vector grid;
  CenterMode centering = CenterMode::none;
  Vector center;
  EigenSystem eigen;
  LogitFit fit;
  std::optional<BasisSweep> sweep;
  int presmooth_window = 1;

  const BSplineBasis& basis() const { return eigen.basis; }
};

/// Basis expansion, centering, FPCA and logistic fit in one pass.
Model fit_model(const RawCurves& curves, const Vector& y, const PipelineOptions& opts);

/// Expands `curves` on the model's basis and centers at the training center.
/// Throws DimensionError when the grid differs from the training grid.
FunctionalSample centered_sample(const Model& model, const RawCurves& curves);

std::vector<Prediction> predict(const Model& model, const RawCurves& curves);
Vector predict_probabilities(const Model& model, const RawCurves& curves);

}  // namespace rflogit
