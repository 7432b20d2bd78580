// rflogit: robust functional logistic regression from the command line.
//
//   rflogit simulate --n 1000 --contamination 0.1 --seed 7 --out data/sim
//   rflogit fit --curves data/sim.curves.csv --response data/sim.response.csv --out model.json
//   rflogit predict --model model.json --curves new.csv --out predictions.csv
//   rflogit mc --runs 50 --contamination-list 0,0.1 --methods fpca-ml,rfpca-wby --out summary.csv
//   rflogit bench --n 1000 --m-list 5,10,15,20,25,30

#include "rflogit/csv_io.hpp"
#include "rflogit/errors.hpp"
#include "rflogit/model_io.hpp"
#include "rflogit/montecarlo.hpp"
#include "rflogit/pipeline.hpp"
#include "rflogit/simgen.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace rflogit;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kParse = 3,
  kDimension = 4,
  kSingleClass = 5,
  kSeparation = 6,
  kConvergence = 7,
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  return out;
}

struct SimulateArgs {
  Index n = 1000;
  Index grid = 201;
  Index n_train = 700;
  double contamination = 0.0;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  if (!(a.contamination >= 0.0 && a.contamination < 0.5)) {
    throw InvalidArgument("--contamination must lie in [0, 0.5)");
  }
  constexpr std::array<double, 5> kStudied = {0.0, 0.01, 0.05, 0.10, 0.20};
  if (std::none_of(kStudied.begin(), kStudied.end(), [&](double v) { return std::abs(v - a.contamination) < 1e-12; })) {
    std::cerr << "warning: contamination " << a.contamination
              << " is outside the studied levels {0, 0.01, 0.05, 0.1, 0.2}\n";
  }
  SimConfig cfg;
  cfg.n = a.n;
  cfg.grid_points = a.grid;
  cfg.n_train = a.n_train;
  cfg.contamination = a.contamination;
  cfg.seed = a.seed;

  Rng rng = make_stream(a.seed, 0, 0);
  SimData data = generate(cfg, rng);
  std::vector<Index> training(static_cast<std::size_t>(cfg.n_train));
  for (Index i = 0; i < cfg.n_train; ++i) training[static_cast<std::size_t>(i)] = i;
  std::size_t replaced = 0;
  if (cfg.contamination > 0.0) {
    Rng noise = make_stream(a.seed, 0, 1);
    replaced = contaminate(data, training, cfg, noise).size();
  }
  write_curves_csv(a.out + ".curves.csv", data.curves);
  write_response_csv(a.out + ".response.csv", data.y);
  std::cout << "wrote " << cfg.n << " curves on " << cfg.grid_points << " points to " << a.out
            << ".curves.csv (" << replaced << " contaminated among the first " << cfg.n_train << " rows)\n";
  return kOk;
}

struct FitArgs {
  std::string curves;
  std::string response;
  std::string method = "rfpca-wby";
  double var_threshold = 0.99;
  int num_basis = 0;
  int presmooth_window = 1;
  std::uint64_t seed = 1;
  std::string out;
  std::string predictions_out;
};

void write_predictions(std::ostream& out, const std::vector<Prediction>& preds) {
  out << "index,probability,class\n";
  for (std::size_t i = 0; i < preds.size(); ++i) {
    out << i << ',' << format_double(preds[i].probability) << ',' << preds[i].label << '\n';
  }
}

int cmd_fit(const FitArgs& a) {
  const RawCurves curves = read_curves_csv(a.curves);
  const Vector y = read_response_csv(a.response);
  PipelineOptions opts;
  opts.method = parse_method(a.method);
  opts.var_threshold = a.var_threshold;
  opts.num_basis = a.num_basis;
  opts.presmooth_window = a.presmooth_window;
  opts.seed = a.seed;
  const Model model = fit_model(curves, y, opts);
  save_model(a.out, model);

  const double kept = model.fit.weights.sum();
  std::cout << "method " << to_string(model.method) << "\n"
            << "M " << model.basis().num_functions() << "\n"
            << "K " << model.eigen.num_components() << " (explained "
            << model.eigen.explained(model.eigen.num_components() - 1) << ")\n"
            << "weights rejected " << static_cast<Index>(model.fit.weights.size() - kept) << " of "
            << model.fit.weights.size() << "\n"
            << "objective " << format_double(model.fit.objective_value) << (model.fit.converged ? "" : " (not converged)")
            << "\n";
  if (!a.predictions_out.empty()) {
    auto out = open_output(a.predictions_out);
    write_predictions(out, predict(model, curves));
  }
  return kOk;
}

struct PredictArgs {
  std::string model;
  std::string curves;
  std::string out;
};

int cmd_predict(const PredictArgs& a) {
  const Model model = load_model(a.model);
  const RawCurves curves = read_curves_csv(a.curves);
  const auto preds = predict(model, curves);
  if (a.out.empty() || a.out == "-") {
    write_predictions(std::cout, preds);
  } else {
    auto out = open_output(a.out);
    write_predictions(out, preds);
  }
  return kOk;
}

struct McArgs {
  int runs = 50;
  std::vector<double> contamination{0.0};
  std::vector<std::string> methods{"fpca-ml", "rfpca-wby"};
  std::uint64_t seed = 1;
  int threads = 1;
  Index n = 1000;
  Index n_train = 700;
  Index grid = 201;
  int num_basis = 0;
  std::string out;
  std::string runs_out;
  std::string timing_out;
};

int cmd_mc(const McArgs& a) {
  McConfig cfg;
  cfg.runs = a.runs;
  cfg.contamination = a.contamination;
  cfg.methods.clear();
  for (const auto& m : a.methods) cfg.methods.push_back(parse_method(m));
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.sim.n = a.n;
  cfg.sim.n_train = a.n_train;
  cfg.sim.grid_points = a.grid;
  cfg.pipeline.num_basis = a.num_basis;
  const McResult result = run_monte_carlo(cfg);

  if (a.out.empty() || a.out == "-") {
    write_summary_csv(std::cout, result);
  } else {
    auto out = open_output(a.out);
    write_summary_csv(out, result);
  }
  if (!a.runs_out.empty()) {
    auto out = open_output(a.runs_out);
    write_runs_csv(out, result);
  }
  if (!a.timing_out.empty()) {
    auto out = open_output(a.timing_out);
    write_timing_csv(out, result);
  }
  int failed = 0;
  for (const auto& s : result.summary) failed += s.runs_failed;
  if (failed > 0) std::cerr << failed << " fit(s) failed and were excluded from the summary\n";
  return kOk;
}

struct BenchArgs {
  Index n = 1000;
  Index grid = 201;
  std::vector<int> m_list{5, 10, 15, 20, 25, 30};
  std::vector<std::string> methods{"fpca-ml", "rfpca-wby"};
  std::uint64_t seed = 1;
};

int cmd_bench(const BenchArgs& a) {
  SimConfig cfg;
  cfg.n = a.n + 1;  // generator needs a held-out row; only the first n are fitted
  cfg.n_train = a.n;
  cfg.grid_points = a.grid;
  Rng rng = make_stream(a.seed, 0, 0);
  const SimData data = generate(cfg, rng);
  RawCurves curves{data.curves.grid, data.curves.values.topRows(a.n)};
  const Vector y = data.y.head(a.n);

  std::cout << "method,n,M,seconds\n";
  for (const auto& name : a.methods) {
    for (const int m : a.m_list) {
      PipelineOptions opts;
      opts.method = parse_method(name);
      opts.num_basis = m;
      opts.seed = a.seed;
      const auto t0 = std::chrono::steady_clock::now();
      const Model model = fit_model(curves, y, opts);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cout << name << ',' << a.n << ',' << m << ',' << format_double(secs) << '\n';
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust functional logistic regression"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Generate a simulated curves/response dataset");
  c_sim->add_option("--n", sim.n, "Number of curves")->check(CLI::PositiveNumber);
  c_sim->add_option("--grid", sim.grid, "Grid points on [0, 1]")->check(CLI::Range(2, 1000000));
  c_sim->add_option("--n-train", sim.n_train, "Training rows (contamination is applied to the first n-train rows)");
  c_sim->add_option("--contamination", sim.contamination, "Fraction of training rows replaced by outliers");
  c_sim->add_option("--seed", sim.seed, "Random seed");
  c_sim->add_option("--out", sim.out, "Output prefix; writes PREFIX.curves.csv and PREFIX.response.csv")->required();

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Fit a model and write it as JSON");
  c_fit->add_option("--curves", fit.curves, "Curves CSV")->required();
  c_fit->add_option("--response", fit.response, "Response CSV")->required();
  c_fit->add_option("--method", fit.method, "fpca-ml or rfpca-wby")->check(CLI::IsMember({"fpca-ml", "rfpca-wby"}));
  c_fit->add_option("--var-threshold", fit.var_threshold, "Explained-variance threshold for K")
      ->check(CLI::Range(1e-9, 1.0));
  c_fit->add_option("--num-basis", fit.num_basis, "Number of B-spline functions (default: residual sweep)")
      ->check(CLI::Range(3, 100000));
  c_fit->add_option("--presmooth-window", fit.presmooth_window,
                    "Moving-average width applied to noisy curves before the expansion (odd; default 1, off)")
      ->check(CLI::PositiveNumber);
  c_fit->add_option("--seed", fit.seed, "Random seed for the pursuit refinement and restarts");
  c_fit->add_option("--out", fit.out, "Model file")->required();
  c_fit->add_option("--predictions-out", fit.predictions_out, "Also write in-sample predictions");

  PredictArgs pred;
  auto* c_pred = app.add_subcommand("predict", "Predict probabilities and classes for new curves");
  c_pred->add_option("--model", pred.model, "Model file")->required();
  c_pred->add_option("--curves", pred.curves, "Curves CSV")->required();
  c_pred->add_option("--out", pred.out, "Predictions CSV (default stdout)");

  McArgs mc;
  auto* c_mc = app.add_subcommand("mc", "Run the Monte-Carlo study");
  c_mc->add_option("--runs", mc.runs, "Monte-Carlo runs")->check(CLI::PositiveNumber);
  c_mc->add_option("--contamination-list", mc.contamination, "Contamination levels")->delimiter(',');
  c_mc->add_option("--methods", mc.methods, "Methods")->delimiter(',')->check(CLI::IsMember({"fpca-ml", "rfpca-wby"}));
  c_mc->add_option("--seed", mc.seed, "Master seed");
  c_mc->add_option("--threads", mc.threads, "Worker threads")->check(CLI::Range(1, 1024));
  c_mc->add_option("--n", mc.n, "Curves per dataset");
  c_mc->add_option("--n-train", mc.n_train, "Training rows per dataset");
  c_mc->add_option("--grid", mc.grid, "Grid points on [0, 1]");
  c_mc->add_option("--num-basis", mc.num_basis, "Fixed number of basis functions (default: residual sweep)");
  c_mc->add_option("--out", mc.out, "Summary CSV (default stdout)");
  c_mc->add_option("--runs-out", mc.runs_out, "Per-run CSV");
  c_mc->add_option("--timing-out", mc.timing_out, "Per-fit wall-clock CSV");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Time single fits across basis sizes");
  c_bench->add_option("--n", bench.n, "Curves");
  c_bench->add_option("--grid", bench.grid, "Grid points");
  c_bench->add_option("--m-list", bench.m_list, "Basis sizes")->delimiter(',');
  c_bench->add_option("--methods", bench.methods, "Methods")->delimiter(',');
  c_bench->add_option("--seed", bench.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*c_sim) return cmd_simulate(sim);
    if (*c_fit) return cmd_fit(fit);
    if (*c_pred) return cmd_predict(pred);
    if (*c_mc) return cmd_mc(mc);
    if (*c_bench) return cmd_bench(bench);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const SingleClassError& e) {
    std::cerr << "single-class response: " << e.what() << '\n';
    return kSingleClass;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << '\n';
    return kDimension;
  } catch (const SeparationError& e) {
    std::cerr << "separation: " << e.what() << '\n';
    return kSeparation;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << '\n';
    return kConvergence;
  } catch (const DegenerateScoresError& e) {
    std::cerr << "degenerate scores: " << e.what() << '\n';
    return kConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
