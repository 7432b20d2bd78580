#include "rflogit/montecarlo.hpp"

#include "rflogit/csv_io.hpp"
#include "rflogit/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ostream>
#include <thread>

namespace rflogit {

namespace {

struct Task {
  int run;
  std::size_t level;
};

void run_task(const McConfig& cfg, const Task& task, std::vector<RunRecord>& records) {
  const std::size_t n_methods = cfg.methods.size();
  const std::size_t n_runs = static_cast<std::size_t>(cfg.runs);
  const double cl = cfg.contamination[task.level];
  auto slot = [&](std::size_t method) -> RunRecord& {
    return records[(task.level * n_methods + method) * n_runs + static_cast<std::size_t>(task.run)];
  };
  for (std::size_t k = 0; k < n_methods; ++k) {
    RunRecord& r = slot(k);
    r.method = cfg.methods[k];
    r.contamination = cl;
    r.run = task.run;
  }

  try {
    SimConfig sim = cfg.sim;
    sim.contamination = cl;
    Rng gen = make_stream(cfg.seed, static_cast<std::uint64_t>(task.run), 0);
    SimData data = generate(sim, gen);
    const Split parts = split(sim.n, sim.n_train, gen);
    if (cl > 0.0) {
      Rng noise = make_stream(cfg.seed, static_cast<std::uint64_t>(task.run), 1 + task.level);
      contaminate(data, parts.train, sim, noise);
    }
    const RawCurves train = take_rows(data.curves, parts.train);
    const RawCurves test = take_rows(data.curves, parts.test);
    Vector y_train(static_cast<Index>(parts.train.size()));
    Vector y_test(static_cast<Index>(parts.test.size()));
    for (std::size_t i = 0; i < parts.train.size(); ++i) y_train(static_cast<Index>(i)) = data.y(parts.train[i]);
    for (std::size_t i = 0; i < parts.test.size(); ++i) y_test(static_cast<Index>(i)) = data.y(parts.test[i]);

    const int m = cfg.pipeline.num_basis > 0 ? cfg.pipeline.num_basis : select_num_basis(train);

    for (std::size_t k = 0; k < n_methods; ++k) {
      RunRecord& r = slot(k);
      r.num_basis = m;
      try {
        PipelineOptions opts = cfg.pipeline;
        opts.method = cfg.methods[k];
        opts.num_basis = m;
        opts.seed = make_stream(cfg.seed, static_cast<std::uint64_t>(task.run), 1000 + task.level)();
        const auto t0 = std::chrono::steady_clock::now();
        const Model model = fit_model(train, y_train, opts);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.num_components = model.eigen.num_components();
        r.orthonormality = orthonormality_error(model.eigen);
        r.rejected = static_cast<Index>(model.fit.weights.size() - model.fit.weights.sum());
        r.imse = imse(beta_true, model.basis(), model.fit.beta_coefs, cfg.imse_grid);
        r.auc = auc(predict_probabilities(model, test), y_test);
        r.ok = true;
      } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
      }
    }
  } catch (const std::exception& e) {
    for (std::size_t k = 0; k < n_methods; ++k) {
      slot(k).ok = false;
      slot(k).error = e.what();
    }
  }
}

std::string csv_text(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

McResult run_monte_carlo(const McConfig& cfg) {
  if (cfg.runs < 1) throw InvalidArgument("need at least one Monte-Carlo run");
  if (cfg.contamination.empty() || cfg.methods.empty()) {
    throw InvalidArgument("need at least one contamination level and one method");
  }
  for (const double cl : cfg.contamination) {
    SimConfig s = cfg.sim;
    s.contamination = cl;
    validate(s);
    if (contamination_count(s) > s.n_train) throw InvalidArgument("contamination exceeds the training sample");
  }

  std::vector<Task> tasks;
  for (std::size_t level = 0; level < cfg.contamination.size(); ++level) {
    for (int run = 0; run < cfg.runs; ++run) tasks.push_back({run, level});
  }
  McResult result;
  result.runs.resize(cfg.contamination.size() * cfg.methods.size() * static_cast<std::size_t>(cfg.runs));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) run_task(cfg, tasks[t], result.runs);
  };
  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  }

  const std::size_t n_runs = static_cast<std::size_t>(cfg.runs);
  for (std::size_t level = 0; level < cfg.contamination.size(); ++level) {
    for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
      McSummary s;
      s.method = cfg.methods[k];
      s.contamination = cfg.contamination[level];
      std::vector<double> imses;
      std::vector<double> aucs;
      std::vector<double> secs;
      for (std::size_t r = 0; r < n_runs; ++r) {
        const RunRecord& rec = result.runs[(level * cfg.methods.size() + k) * n_runs + r];
        if (!rec.ok) {
          ++s.runs_failed;
          continue;
        }
        ++s.runs_ok;
        imses.push_back(rec.imse);
        aucs.push_back(rec.auc);
        secs.push_back(rec.seconds);
      }
      if (s.runs_ok > 0) {
        s.imse = aggregate(imses);
        s.auc = aggregate(aucs);
        s.median_seconds = aggregate(secs).median;
      }
      result.summary.push_back(s);
    }
  }
  return result;
}

void write_summary_csv(std::ostream& out, const McResult& result) {
  out << "method,contamination,median_imse,mad_imse,median_auc,mad_auc,runs_ok,runs_failed\n";
  for (const auto& s : result.summary) {
    out << to_string(s.method) << ',' << format_double(s.contamination) << ',' << format_double(s.imse.median) << ','
        << format_double(s.imse.mad) << ',' << format_double(s.auc.median) << ',' << format_double(s.auc.mad) << ','
        << s.runs_ok << ',' << s.runs_failed << '\n';
  }
}

void write_runs_csv(std::ostream& out, const McResult& result) {
  out << "method,contamination,run,status,imse,auc,num_basis,num_components,rejected,error\n";
  for (const auto& r : result.runs) {
    out << to_string(r.method) << ',' << format_double(r.contamination) << ',' << r.run << ','
        << (r.ok ? "ok" : "failed") << ',' << format_double(r.imse) << ',' << format_double(r.auc) << ','
        << r.num_basis << ',' << r.num_components << ',' << r.rejected << ',' << csv_text(r.error) << '\n';
  }
}

void write_timing_csv(std::ostream& out, const McResult& result) {
  out << "method,contamination,run,seconds\n";
  for (const auto& r : result.runs) {
    if (!r.ok) continue;
    out << to_string(r.method) << ',' << format_double(r.contamination) << ',' << r.run << ','
        << format_double(r.seconds) << '\n';
  }
}

}  // namespace rflogit
