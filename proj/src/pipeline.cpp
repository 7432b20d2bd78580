#include "rflogit/pipeline.hpp"

#include "rflogit/errors.hpp"

#include <cmath>

namespace rflogit {

std::string to_string(Method m) { return m == Method::fpca_ml ? "fpca-ml" : "rfpca-wby"; }

Method parse_method(const std::string& name) {
  if (name == "fpca-ml") return Method::fpca_ml;
  if (name == "rfpca-wby") return Method::rfpca_wby;
  throw InvalidArgument("unknown method '" + name + "' (expected fpca-ml or rfpca-wby)");
}

Model fit_model(const RawCurves& input, const Vector& y, const PipelineOptions& opts) {
  validate(input);
  if (input.num_curves() != y.size()) {
    throw DimensionError("curves file has " + std::to_string(input.num_curves()) + " rows but the response has " +
                         std::to_string(y.size()));
  }
  const RawCurves curves = presmooth(input, opts.presmooth_window);

  std::optional<BasisSweep> sweep;
  int m = opts.num_basis;
  if (m == 0) {
    sweep = sweep_num_basis(curves);
    m = sweep->selected;
  }
  const BSplineBasis basis(grid_domain(curves.grid), m);
  const FunctionalSample raw_sample = fit_coefficients(curves, basis);

  if (opts.method == Method::fpca_ml) {
    const FunctionalSample sample = center(raw_sample, CenterMode::mean);
    EigenSystem eigen = fpca_classical(sample, opts.var_threshold);
    LogitFit fit = fit_ml(eigen.scores, y, eigen, opts.ml);
    return Model{opts.method,     curves.grid,    sample.centering, sample.center,
                 std::move(eigen), std::move(fit), sweep,            opts.presmooth_window};
  }

  const FunctionalSample sample = center(raw_sample, CenterMode::l1_median);
  RobustFpcaOptions ro;
  ro.scale = opts.scale;
  ro.var_threshold = opts.var_threshold;
  ro.n_refine = opts.n_refine;
  ro.seed = opts.seed;
  EigenSystem eigen = fpca_robust(sample, ro);
  WbyOptions wo = opts.wby;
  wo.seed = opts.seed ^ 0x9e3779b97f4a7c15ULL;
  LogitFit fit = fit_wby(eigen.scores, y, eigen, wo);
  return Model{opts.method,     curves.grid,    sample.centering, sample.center,
               std::move(eigen), std::move(fit), sweep,            opts.presmooth_window};
}

FunctionalSample centered_sample(const Model& model, const RawCurves& curves) {
  if (curves.num_points() != model.grid.size()) {
    throw DimensionError("curves have " + std::to_string(curves.num_points()) + " grid points, the model expects " +
                         std::to_string(model.grid.size()));
  }
  for (Index k = 0; k < model.grid.size(); ++k) {
    if (std::abs(curves.grid(k) - model.grid(k)) > 1e-9 * (1.0 + std::abs(model.grid(k)))) {
      throw DimensionError("curve grid differs from the training grid at column " + std::to_string(k));
    }
  }
  Matrix coefs = centered_coefficients(presmooth(curves, model.presmooth_window), model.basis(), model.center);
  return FunctionalSample{model.basis(), std::move(coefs), model.center, model.centering};
}

std::vector<Prediction> predict(const Model& model, const RawCurves& curves) {
  return predict(model.fit, model.eigen, centered_sample(model, curves));
}

Vector predict_probabilities(const Model& model, const RawCurves& curves) {
  const FunctionalSample s = centered_sample(model, curves);
  return predict_probabilities(model.fit, project_scores(model.eigen, s.coefs));
}

}  // namespace rflogit
