#include "rflogit/model_io.hpp"

#include "rflogit/csv_io.hpp"
#include "rflogit/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace rflogit {

namespace {

using nlohmann::json;

json to_json_array(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json to_json_rows(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) rows.push_back(to_json_array(m.row(i).transpose()));
  return rows;
}

Vector vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

Matrix matrix_from(const json& j, Index cols) {
  Matrix m(static_cast<Index>(j.size()), cols);
  for (Index i = 0; i < m.rows(); ++i) {
    const Vector row = vector_from(j.at(static_cast<std::size_t>(i)));
    if (row.size() != cols) throw ParseError("model file: direction row has the wrong length", 0, 0);
    m.row(i) = row.transpose();
  }
  return m;
}

std::string centering_name(CenterMode mode) {
  switch (mode) {
    case CenterMode::mean:
      return "mean";
    case CenterMode::l1_median:
      return "l1_median";
    case CenterMode::none:
      break;
  }
  return "none";
}

CenterMode centering_from(const std::string& s) {
  if (s == "mean") return CenterMode::mean;
  if (s == "l1_median") return CenterMode::l1_median;
  if (s == "none") return CenterMode::none;
  throw ParseError("model file: unknown centering '" + s + "'", 0, 0);
}

}  // namespace

std::string model_to_json(const Model& model) {
  const BSplineBasis& basis = model.basis();
  const LogitFit& fit = model.fit;
  const double kept = fit.weights.sum();

  json j;
  j["schema"] = "rflogit-model";
  j["version"] = kModelSchemaVersion;
  j["method"] = to_string(model.method);
  j["grid"] = to_json_array(model.grid);
  j["presmooth_window"] = model.presmooth_window;
  j["basis"] = {{"domain", {basis.domain().lo, basis.domain().hi}},
                {"order", basis.order()},
                {"num_functions", basis.num_functions()},
                {"knots", to_json_array(basis.knots())}};
  j["centering"] = {{"mode", centering_name(model.centering)}, {"coefficients", to_json_array(model.center)}};
  j["eigen"] = {{"method", model.eigen.method == FpcaMethod::robust ? "robust" : "classical"},
                {"num_components", model.eigen.num_components()},
                {"directions", to_json_rows(model.eigen.directions)},
                {"eigenvalues", to_json_array(model.eigen.eigenvalues)},
                {"explained", to_json_array(model.eigen.explained)},
                {"spectrum", to_json_array(model.eigen.spectrum)},
                {"rank_exhausted", model.eigen.rank_exhausted}};
  j["theta"] = to_json_array(fit.theta);
  j["estimator"] = fit.estimator == Estimator::wby ? "wby" : "ml";
  j["diagnostics"] = {{"converged", fit.converged},
                      {"objective", fit.objective_value},
                      {"iterations", fit.iterations},
                      {"weights_kept", kept},
                      {"weights_rejected", static_cast<double>(fit.weights.size()) - kept},
                      {"weights", to_json_array(fit.weights)}};
  return j.dump(1);
}

Model model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what(), 0, 0);
  }
  try {
    if (j.at("schema").get<std::string>() != "rflogit-model") throw ParseError("not a model file", 0, 0);
    const int version = j.at("version").get<int>();
    if (version != kModelSchemaVersion) {
      throw ParseError("unsupported model schema version " + std::to_string(version), 0, 0);
    }
    const auto& jb = j.at("basis");
    const auto domain = jb.at("domain").get<std::vector<double>>();
    if (domain.size() != 2) throw ParseError("model file: basis domain needs two values", 0, 0);
    const BSplineBasis basis(Interval{domain[0], domain[1]}, jb.at("num_functions").get<int>());
    if (jb.at("order").get<int>() != basis.order()) throw ParseError("model file: unsupported spline order", 0, 0);
    if (vector_from(jb.at("knots")) != basis.knots()) throw ParseError("model file: knot vector mismatch", 0, 0);

    const Index m = basis.num_functions();
    const auto& je = j.at("eigen");
    EigenSystem eigen{basis,
                      matrix_from(je.at("directions"), m),
                      vector_from(je.at("eigenvalues")),
                      Matrix(0, 0),
                      vector_from(je.at("explained")),
                      vector_from(je.at("spectrum")),
                      je.at("method").get<std::string>() == "robust" ? FpcaMethod::robust : FpcaMethod::classical,
                      je.at("rank_exhausted").get<bool>()};
    const Index k = eigen.num_components();
    if (eigen.eigenvalues.size() != k || je.at("num_components").get<Index>() != k) {
      throw ParseError("model file: component count mismatch", 0, 0);
    }
    eigen.scores = Matrix(0, k);

    LogitFit fit;
    fit.theta = vector_from(j.at("theta"));
    if (fit.theta.size() != k + 1) throw ParseError("model file: theta length does not match components", 0, 0);
    fit.beta_coefs = eigen.directions.transpose() * fit.theta.tail(k);
    fit.estimator = j.at("estimator").get<std::string>() == "wby" ? Estimator::wby : Estimator::ml;
    const auto& jd = j.at("diagnostics");
    fit.converged = jd.at("converged").get<bool>();
    fit.objective_value = jd.at("objective").get<double>();
    fit.iterations = jd.at("iterations").get<int>();
    fit.weights = vector_from(jd.at("weights"));

    Vector center = vector_from(j.at("centering").at("coefficients"));
    if (center.size() != m) throw ParseError("model file: center length does not match basis", 0, 0);
    return Model{parse_method(j.at("method").get<std::string>()),
                 vector_from(j.at("grid")),
                 centering_from(j.at("centering").at("mode").get<std::string>()),
                 std::move(center),
                 std::move(eigen),
                 std::move(fit),
                 std::nullopt,
                 j.value("presmooth_window", 1)};
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model file: ") + e.what(), 0, 0);
  }
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path.string() + "'", 0, 0);
  out << model_to_json(model) << '\n';
}

Model load_model(const std::filesystem::path& path) { return model_from_json(read_text_file(path)); }

}  // namespace rflogit
