#include <doctest.h>

#include <rflogit/csv_io.hpp>
#include <rflogit/errors.hpp>
#include <rflogit/metrics.hpp>
#include <rflogit/model_io.hpp>
#include <rflogit/pipeline.hpp>
#include <rflogit/simgen.hpp>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include <unistd.h>

using namespace rflogit;

namespace {

std::size_t parse_error_row(std::string_view text, bool response, std::size_t* column = nullptr) {
  try {
    if (response) {
      parse_response_csv(text);
    } else {
      parse_curves_csv(text);
    }
  } catch (const ParseError& e) {
    if (column) *column = e.column();
    return e.row();
  }
  return 0;
}

SimData small_dataset(std::uint64_t seed, double contamination = 0.0) {
  SimConfig cfg;
  cfg.n = 300;
  cfg.n_train = 200;
  cfg.grid_points = 101;
  cfg.contamination = contamination;
  Rng rng = make_stream(seed, 0);
  SimData d = generate(cfg, rng);
  std::vector<Index> rows(static_cast<std::size_t>(cfg.n_train));
  for (Index i = 0; i < cfg.n_train; ++i) rows[static_cast<std::size_t>(i)] = i;
  contaminate(d, rows, cfg, rng);
  return d;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("rflogit_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("format_double round trips") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 10000) {
    const std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    ++checked;
  }
  for (const double v : {0.1, -0.0, 1e300, 5e-324, 1.0 / 3.0, -2.5}) {
    const double back = std::strtod(format_double(v).c_str(), nullptr);
    CHECK(back == v);
    CHECK(std::signbit(back) == std::signbit(v));
  }
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("curves CSV parsing") {
  const RawCurves c = parse_curves_csv("0,0.5,1\n1,2,3\n-1,0.25,4e2\n");
  CHECK(c.num_curves() == 2);
  CHECK(c.num_points() == 3);
  CHECK(c.grid(1) == 0.5);
  CHECK(c.values(1, 2) == 400.0);
  CHECK(parse_curves_csv("0,1\n1,2").num_curves() == 1);  // no trailing newline

  std::size_t col = 0;
  CHECK(parse_error_row("0,0.5,1\n1,2,3\n1,x,3\n", false, &col) == 3);
  CHECK(col == 2);
  CHECK(parse_error_row("0,0.5,1\n1,2,3\n1,2\n", false) == 3);
  CHECK(parse_error_row("0,0.5,1\n1,2,3,4\n", false) == 2);
  CHECK(parse_error_row("0,1,1\n1,2,3\n", false, &col) == 1);
  CHECK(col == 3);
  CHECK(parse_error_row("0,1\n1,inf\n", false) == 2);
  CHECK(parse_error_row("0,1\n1,\n", false) == 2);
  CHECK(parse_error_row("", false) == 1);
  CHECK(parse_error_row("0\n1\n", false) == 1);
}

TEST_CASE("response CSV parsing") {
  const Vector y = parse_response_csv("0\n1\n1\n");
  REQUIRE(y.size() == 3);
  CHECK(y(0) == 0.0);
  CHECK(y(2) == 1.0);
  std::size_t col = 0;
  CHECK(parse_error_row("0\n1\n2\n", true, &col) == 3);
  CHECK(col == 1);
  CHECK(parse_error_row("0\nyes\n", true) == 2);
  CHECK(parse_error_row("0.5\n", true) == 1);
}

TEST_CASE("CSV files round trip bit for bit") {
  const SimData d = small_dataset(2);
  const auto curves = temp_path("curves.csv");
  const auto resp = temp_path("response.csv");
  write_curves_csv(curves, d.curves);
  write_response_csv(resp, d.y);
  const RawCurves back = read_curves_csv(curves);
  CHECK(back.grid == d.curves.grid);
  CHECK(back.values == d.curves.values);
  CHECK(read_response_csv(resp) == d.y);
  std::filesystem::remove(curves);
  std::filesystem::remove(resp);
  CHECK_THROWS_AS(read_curves_csv(curves), ParseError);
}

TEST_CASE("fitted probabilities equal the logistic of a dense-grid integral") {
  const SimData d = small_dataset(3);
  for (const Method m : {Method::fpca_ml, Method::rfpca_wby}) {
    CAPTURE(to_string(m));
    PipelineOptions opts;
    opts.method = m;
    const Model model = fit_model(d.curves, d.y, opts);
    const Vector p = predict_probabilities(model, d.curves);
    const FunctionalSample centered = centered_sample(model, d.curves);

    const Index points = 20001;
    const Interval dom = model.basis().domain();
    const Vector t = Vector::LinSpaced(points, dom.lo, dom.hi);
    const Vector beta = eval_expansion(model.basis(), model.fit.beta_coefs, t);
    const double h = dom.length() / static_cast<double>(points - 1);
    double worst = 0.0;
    for (Index i = 0; i < 40; ++i) {
      const Vector x = eval_expansion(model.basis(), centered.coefs.row(i).transpose(), t);
      double acc = 0.0;
      for (Index k = 0; k < points; ++k) acc += (k == 0 || k == points - 1 ? 0.5 : 1.0) * x(k) * beta(k);
      const double oracle = 1.0 / (1.0 + std::exp(-(model.fit.intercept() + h * acc)));
      worst = std::max(worst, std::abs(oracle - p(i)));
    }
    CHECK(worst < 1e-6);

    const std::vector<Prediction> preds = predict(model, d.curves);
    for (Index i = 0; i < p.size(); ++i) CHECK(preds[static_cast<std::size_t>(i)].probability == p(i));
    CHECK(auc(p, d.y) > 0.7);
  }
}

TEST_CASE("model JSON round trip reproduces predictions exactly") {
  const SimData d = small_dataset(4, 0.1);
  for (const Method m : {Method::fpca_ml, Method::rfpca_wby}) {
    PipelineOptions opts;
    opts.method = m;
    const Model model = fit_model(d.curves, d.y, opts);
    const std::string json = model_to_json(model);
    const Model back = model_from_json(json);
    CHECK(model_to_json(back) == json);
    CHECK(back.method == m);
    CHECK(back.fit.theta == model.fit.theta);
    CHECK(back.eigen.directions == model.eigen.directions);
    CHECK(predict_probabilities(back, d.curves) == predict_probabilities(model, d.curves));

    const auto path = temp_path("model.json");
    save_model(path, model);
    CHECK(predict_probabilities(load_model(path), d.curves) == predict_probabilities(model, d.curves));
    std::filesystem::remove(path);
  }
  PipelineOptions smooth;
  smooth.presmooth_window = 5;
  const Model sm = fit_model(d.curves, d.y, smooth);
  const Model sm_back = model_from_json(model_to_json(sm));
  CHECK(sm_back.presmooth_window == 5);
  CHECK(predict_probabilities(sm_back, d.curves) == predict_probabilities(sm, d.curves));
  CHECK(predict_probabilities(sm, d.curves) != predict_probabilities(fit_model(d.curves, d.y, PipelineOptions{}), d.curves));

  CHECK_THROWS_AS(model_from_json("{\"schema_version\": 1"), ParseError);
  CHECK_THROWS_AS(model_from_json("{\"schema_version\": 99}"), ParseError);
}

TEST_CASE("prediction rejects a different grid") {
  const SimData d = small_dataset(5);
  const Model model = fit_model(d.curves, d.y, PipelineOptions{});
  RawCurves other = d.curves;
  other.grid = unit_grid(101).array() * 0.5;
  CHECK_THROWS_AS(predict_probabilities(model, other), DimensionError);
  RawCurves shorter{unit_grid(51), Matrix::Zero(3, 51)};
  CHECK_THROWS_AS(predict_probabilities(model, shorter), DimensionError);
}

TEST_CASE("method names") {
  CHECK(parse_method("fpca-ml") == Method::fpca_ml);
  CHECK(parse_method("rfpca-wby") == Method::rfpca_wby);
  CHECK(to_string(Method::rfpca_wby) == "rfpca-wby");
  CHECK_THROWS_AS(parse_method("wby"), InvalidArgument);
}
