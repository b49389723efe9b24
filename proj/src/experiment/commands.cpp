#include "svam/experiment/commands.hpp"

#include "svam/baselines.hpp"
#include "svam/dataset_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <random>

namespace svam::experiment {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

// One entry per method column of the results; vam expands per beta.
struct MethodSlot {
  std::string label;
  std::string method;
  double vam_beta = 0.0;
};

std::vector<MethodSlot> expand_methods(const ExperimentConfig& config) {
  std::vector<MethodSlot> slots;
  for (const auto& m : config.methods) {
    if (m == "vam") {
      for (const double b : config.vam_betas) slots.push_back({"vam@" + short_fmt(b), m, b});
    } else {
      slots.push_back({m, m, 0.0});
    }
  }
  return slots;
}

double error_of(const Dataset& data, Task task, const Vector& model) {
  if (!data.w_true || !model.allFinite()) return kNaN;
  return model_error(task, model, *data.w_true);
}

void append_trace(std::vector<ResultRow>& rows, std::uint64_t seed, const std::string& label,
                  const RunTrace& run) {
  for (const auto& rec : run.records) {
    rows.push_back({seed, label, rec.t - 1, rec.beta, rec.dist.value_or(kNaN), rec.wall_ms, true});
  }
}

std::vector<ResultRow> run_slot(const ExperimentConfig& config, const MethodSlot& slot,
                                const Dataset& data, std::uint64_t seed) {
  const Task task = config.problem.task;
  std::vector<ResultRow> rows;
  baselines::MleOptions mle;
  mle.gamma_phi = config.problem.phi;
  mle.lr_ridge = config.svam.lr_ridge;
  try {
    if (slot.method == "svam") {
      const SvamConfig cfg = svam_config_for(config, data, seed);
      const RunTrace run = task == Task::gamma ? svam_gamma(data, cfg) : run_svam(data, task, cfg);
      append_trace(rows, seed, slot.label, run);
    } else if (slot.method == "vam") {
      SvamConfig cfg = svam_config_for(config, data, seed);
      const auto res = baselines::vam(data, task, slot.vam_beta, cfg.max_iters, cfg);
      append_trace(rows, seed, slot.label, *res.run);
    } else if (slot.method == "torrent" || slot.method == "tukey") {
      const auto res =
          slot.method == "torrent"
              ? baselines::torrent(data, config.problem.adversary.alpha, config.torrent_max_iters)
              : baselines::tukey_bisquare(data, config.tukey_c, config.tukey_max_iters);
      for (std::size_t k = 0; k < res.trace.size(); ++k) {
        const bool last = k + 1 == res.trace.size();
        rows.push_back({seed, slot.label, static_cast<int>(k) + 1, kNaN,
                        error_of(data, task, res.trace[k]), last ? res.wall_ms : kNaN,
                        res.converged});
      }
      if (res.trace.empty()) {
        rows.push_back({seed, slot.label, 0, kNaN, error_of(data, task, res.model), res.wall_ms,
                        res.converged});
      }
    } else {
      baselines::BaselineResult res;
      if (slot.method == "mle") res = baselines::mle_all(data, task, mle);
      else if (slot.method == "oracle") res = baselines::oracle(data, task, mle);
      else if (slot.method == "coord_median") res = baselines::coordinate_median(data);
      else res = baselines::geometric_median(data);
      rows.push_back({seed, slot.label, res.iterations, kNaN, error_of(data, task, res.model),
                      res.wall_ms, res.converged});
    }
  } catch (const Error&) {
    rows.clear();
    rows.push_back({seed, slot.label, 0, kNaN, kNaN, kNaN, false});
  }
  return rows;
}

std::vector<Dataset> make_datasets(const ExperimentConfig& config,
                                   const std::vector<std::uint64_t>& seeds) {
  std::vector<Dataset> data(seeds.size());
#pragma omp parallel for num_threads(config.jobs) schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(seeds.size()); ++k) {
    data[static_cast<std::size_t>(k)] =
        make_problem(config.problem, seeds[static_cast<std::size_t>(k)]);
  }
  return data;
}

}  // namespace

SvamConfig svam_config_for(const ExperimentConfig& config, const Dataset& data,
                           std::uint64_t seed) {
  const auto& s = config.svam;
  SvamConfig cfg;
  cfg.beta1 = s.beta1;
  cfg.xi = s.xi;
  cfg.max_iters = s.max_iters;
  cfg.beta_cap = s.beta_cap;
  cfg.lr_ridge = s.lr_ridge;
  cfg.gamma_phi = config.problem.phi;
  switch (s.init) {
    case InitKind::zero:
      break;
    case InitKind::adversarial:
      if (!data.w_adv) throw ParameterError("adversarial init needs an adversarial model");
      cfg.init_model = *data.w_adv;
      break;
    case InitKind::truth:
      if (!data.w_true) throw ParameterError("truth init needs the ground truth");
      cfg.init_model = *data.w_true;
      break;
    case InitKind::given:
      cfg.init_model = Eigen::Map<const Vector>(s.init_vector.data(),
                                                static_cast<Index>(s.init_vector.size()));
      break;
  }
  if (s.tune) {
    const auto best =
        tuning::tune(data, config.problem.task, config.tune_grid, derive_seed(seed, 7), cfg);
    cfg.beta1 = best.beta1;
    cfg.xi = best.xi;
    cfg.beta_cap = std::max(cfg.beta_cap, cfg.beta1);
  }
  return cfg;
}

std::vector<ResultRow> run_methods(const ExperimentConfig& config) {
  config.validate();
  const auto seeds = config.seeds();
  const auto slots = expand_methods(config);
  const auto data = make_datasets(config, seeds);
  const std::size_t tasks = seeds.size() * slots.size();
  std::vector<std::vector<ResultRow>> parts(tasks);
#pragma omp parallel for num_threads(config.jobs) schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(tasks); ++k) {
    const std::size_t si = static_cast<std::size_t>(k) / slots.size();
    const std::size_t mi = static_cast<std::size_t>(k) % slots.size();
    parts[static_cast<std::size_t>(k)] = run_slot(config, slots[mi], data[si], seeds[si]);
  }
  std::vector<ResultRow> rows;
  for (auto& p : parts) rows.insert(rows.end(), p.begin(), p.end());
  return rows;
}

std::vector<MethodSummary> summarize(const std::vector<ResultRow>& rows) {
  std::vector<std::string> order;
  // Last row per (method, seed).
  std::map<std::string, std::map<std::uint64_t, ResultRow>> last;
  for (const auto& r : rows) {
    if (!last.count(r.method)) order.push_back(r.method);
    last[r.method][r.seed] = r;
  }
  std::vector<MethodSummary> out;
  for (const auto& method : order) {
    MethodSummary s;
    s.method = method;
    std::vector<double> errors;
    double wall = 0.0;
    int timed = 0;
    int converged = 0;
    for (const auto& [seed, r] : last[method]) {
      ++s.runs;
      errors.push_back(r.converged && !std::isnan(r.l2_error)
                           ? r.l2_error
                           : std::numeric_limits<double>::infinity());
      if (std::isfinite(r.wall_ms)) {
        wall += r.wall_ms;
        ++timed;
      }
      if (r.converged) ++converged;
    }
    s.median_final_error = median(errors);
    s.mean_wall_ms = timed > 0 ? wall / timed : kNaN;
    s.convergence_rate = static_cast<double>(converged) / s.runs;
    out.push_back(s);
  }
  return out;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "seed,method,iteration,beta,l2_error,wall_ms,converged\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.method << ',' << r.iteration << ',' << fmt(r.beta) << ','
        << fmt(r.l2_error) << ',' << fmt(r.wall_ms) << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

void write_summary_json(std::ostream& out, const std::vector<MethodSummary>& summary) {
  nlohmann::json j = nlohmann::json::object();
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  for (const auto& s : summary) {
    j[s.method] = {{"median_final_error", num(s.median_final_error)},
                   {"mean_wall_ms", num(s.mean_wall_ms)},
                   {"convergence_rate", s.convergence_rate},
                   {"runs", s.runs}};
  }
  out << j.dump(2) << '\n';
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
  const std::string ext = ".csv";
  if (path.size() > ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0) {
    return path.substr(0, path.size() - ext.size()) + suffix;
  }
  return path + suffix;
}

GenReport cmd_gen(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const Dataset data = make_problem(config.problem, config.seed);
  save_dataset(config.out, data);
  GenReport rep{data.n(), data.d(), data.corrupted_count()};
  log << "n=" << rep.n << " d=" << rep.d << " k=" << rep.k << '\n';
  return rep;
}

std::vector<MethodSummary> cmd_run(const ExperimentConfig& config, std::ostream& log) {
  const auto rows = run_methods(config);
  const auto summary = summarize(rows);
  auto out = open_out(config.out);
  write_results_csv(out, rows);
  finish(out, config.out);
  const std::string summary_path = sibling_path(config.out, ".summary.json");
  auto js = open_out(summary_path);
  write_summary_json(js, summary);
  finish(js, summary_path);
  for (const auto& s : summary) {
    log << s.method << ": median_final_error=" << s.median_final_error
        << " mean_wall_ms=" << s.mean_wall_ms << " convergence_rate=" << s.convergence_rate
        << '\n';
  }
  return summary;
}

std::vector<SweepAggregate> cmd_sweep(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  if (config.sweep.values.empty()) throw ParameterError("sweep.values must be nonempty");
  const std::string& param = config.sweep.param;
  std::vector<SweepRow> all;
  std::vector<SweepAggregate> aggregates;
  for (const double v : config.sweep.values) {
    ExperimentConfig c = config;
    if (param == "alpha") {
      c.problem.adversary.alpha = v;
    } else if (param == "dim") {
      if (v < 1 || v != std::floor(v)) throw ParameterError("dim sweep values must be integers");
      c.problem.d = static_cast<Index>(v);
      if (c.svam.init == InitKind::given) throw ParameterError("dim sweep cannot use a given init");
    } else if (param == "beta1") {
      c.svam.beta1 = v;
      c.svam.beta_cap = std::max(c.svam.beta_cap, v);
    } else {
      c.svam.xi = v;
    }
    const auto rows = run_methods(c);
    for (const auto& r : rows) all.push_back({v, r});
    std::map<std::string, std::map<std::uint64_t, ResultRow>> last;
    std::vector<std::string> order;
    for (const auto& r : rows) {
      if (!last.count(r.method)) order.push_back(r.method);
      last[r.method][r.seed] = r;
    }
    for (const auto& m : order) {
      SweepAggregate a;
      a.value = v;
      a.method = m;
      std::vector<double> errs;
      int conv = 0;
      for (const auto& [seed, r] : last[m]) {
        errs.push_back(r.converged && !std::isnan(r.l2_error)
                           ? r.l2_error
                           : std::numeric_limits<double>::infinity());
        if (r.converged) ++conv;
      }
      double sum = 0.0;
      for (const double e : errs) sum += e;
      a.mean_final_error = sum / static_cast<double>(errs.size());
      a.median_final_error = median(errs);
      a.convergence_rate = static_cast<double>(conv) / static_cast<double>(errs.size());
      aggregates.push_back(a);
      log << param << '=' << short_fmt(v) << ' ' << m << ": mean_final_error="
          << a.mean_final_error << " median_final_error=" << a.median_final_error << '\n';
    }
  }
  auto out = open_out(config.out);
  out << "param,value,seed,method,iteration,beta,l2_error,wall_ms,converged\n";
  for (const auto& s : all) {
    const auto& r = s.row;
    out << param << ',' << fmt(s.value) << ',' << r.seed << ',' << r.method << ','
        << r.iteration << ',' << fmt(r.beta) << ',' << fmt(r.l2_error) << ',' << fmt(r.wall_ms)
        << ',' << (r.converged ? 1 : 0) << '\n';
  }
  finish(out, config.out);
  const std::string agg_path = sibling_path(config.out, ".summary.csv");
  auto agg = open_out(agg_path);
  agg << "param,value,method,mean_final_error,median_final_error,convergence_rate\n";
  for (const auto& a : aggregates) {
    agg << param << ',' << fmt(a.value) << ',' << a.method << ',' << fmt(a.mean_final_error)
        << ',' << fmt(a.median_final_error) << ',' << fmt(a.convergence_rate) << '\n';
  }
  finish(agg, agg_path);
  return aggregates;
}

std::vector<InitResult> cmd_grid_init(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const auto& g = config.grid_init;
  const Index d = config.problem.d;
  if (g.mode == "grid" && d != 2) throw ParameterError("grid mode needs d = 2");
  const Task task = config.problem.task;
  const auto seeds = config.seeds();
  const auto data = make_datasets(config, seeds);

  struct Job {
    std::size_t seed_index;
    int init_id;
    std::string kind;
    Vector init;
  };
  std::vector<Job> jobs;
  for (std::size_t si = 0; si < seeds.size(); ++si) {
    int id = 0;
    if (g.mode == "grid") {
      for (int a = 0; a < g.points; ++a) {
        for (int b = 0; b < g.points; ++b) {
          auto coord = [&](int k) {
            return g.points == 1 ? 0.5 * (g.lo + g.hi)
                                 : g.lo + (g.hi - g.lo) * k / (g.points - 1);
          };
          Vector w(2);
          w << coord(a), coord(b);
          jobs.push_back({si, id++, "grid", w});
        }
      }
    } else {
      std::mt19937_64 rng(derive_seed(seeds[si], 9));
      std::uniform_real_distribution<double> unif(g.lo, g.hi);
      for (int k = 0; k < g.count; ++k) {
        Vector w(d);
        for (Index j = 0; j < d; ++j) w(j) = unif(rng);
        jobs.push_back({si, id++, "random", w});
      }
      jobs.push_back({si, id++, "origin", Vector::Zero(d)});
      if (data[si].w_adv) jobs.push_back({si, id++, "adversarial", *data[si].w_adv});
      if (data[si].w_true) jobs.push_back({si, id++, "truth", *data[si].w_true});
    }
  }

  std::vector<InitResult> results(jobs.size());
#pragma omp parallel for num_threads(config.jobs) schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(jobs.size()); ++k) {
    const Job& job = jobs[static_cast<std::size_t>(k)];
    const Dataset& ds = data[job.seed_index];
    InitResult res;
    res.seed = seeds[job.seed_index];
    res.init_id = job.init_id;
    res.kind = job.kind;
    res.init = job.init;
    res.final_error = kNaN;
    try {
      SvamConfig cfg = svam_config_for(config, ds, res.seed);
      cfg.init_model = job.init;
      const RunTrace run = run_svam(ds, task, cfg);
      for (const auto& rec : run.records) {
        if (rec.dist && *rec.dist < g.success_tol) {
          res.iterations = rec.t - 1;
          break;
        }
      }
      res.final_error = run.final_dist().value_or(kNaN);
      res.success = res.iterations >= 0 && res.iterations <= g.max_success_iters &&
                    res.final_error < g.success_tol;
    } catch (const Error&) {
      res.success = false;
    }
    results[static_cast<std::size_t>(k)] = std::move(res);
  }

  auto out = open_out(config.out);
  out << "seed,init_id,kind";
  for (Index j = 0; j < d; ++j) out << ",w" << j;
  out << ",success,iterations,final_error\n";
  int successes = 0;
  for (const auto& r : results) {
    out << r.seed << ',' << r.init_id << ',' << r.kind;
    for (Index j = 0; j < d; ++j) out << ',' << fmt(r.init(j));
    out << ',' << (r.success ? 1 : 0) << ',' << r.iterations << ',' << fmt(r.final_error) << '\n';
    if (r.success) ++successes;
  }
  finish(out, config.out);
  log << "inits=" << results.size() << " successes=" << successes << " success_rate="
      << (results.empty() ? 0.0 : static_cast<double>(successes) / results.size()) << '\n';
  return results;
}

tuning::TuneResult cmd_tune(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  const Dataset data = make_problem(config.problem, config.seed);
  ExperimentConfig base = config;
  base.svam.tune = false;
  const SvamConfig cfg = svam_config_for(base, data, config.seed);
  const auto result = tuning::tune(data, config.problem.task, config.tune_grid,
                                   derive_seed(config.seed, 7), cfg);
  auto out = open_out(config.out);
  tuning::write_score_table(out, result.table);
  finish(out, config.out);
  log << "beta1=" << result.beta1 << " xi=" << result.xi << " alpha_trim=" << result.alpha_trim
      << " val_error=" << result.val_error;
  if (data.w_true) {
    log << " recovery_error=" << model_error(config.problem.task, result.model, *data.w_true);
  }
  log << '\n';
  return result;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust GLM estimation experiments"};
  app.name("svam-bench");
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> jobs;
    std::optional<std::string> task;
    std::optional<Index> n;
    std::optional<Index> d;
    std::optional<double> alpha;
    std::optional<int> num_seeds;
  } flags;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"gen", "Generate one dataset and write it as CSV"},
      {"run", "Run every configured method on every seed"},
      {"sweep", "Repeat run over values of one parameter"},
      {"grid-init", "SVAM success map over initial models"},
      {"tune", "Grid-search beta1, xi and alpha_trim on a validation split"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "JSON config file");
    sub->add_option("--seed", flags.seed, "Base seed");
    sub->add_option("--out", flags.out, "Output path");
    sub->add_option("--jobs", flags.jobs, "Concurrent runs");
    sub->add_option("--task", flags.task, "rr, me, gamma or lr");
    sub->add_option("--n", flags.n, "Samples");
    sub->add_option("--d", flags.d, "Dimension");
    sub->add_option("--alpha", flags.alpha, "Corruption rate");
    sub->add_option("--num-seeds", flags.num_seeds, "Seeds seed .. seed + k - 1");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    ExperimentConfig config = flags.config.empty() ? ExperimentConfig{} : load_config(flags.config);
    if (flags.seed) {
      config.seed = *flags.seed;
      config.seed_list.clear();
    }
    if (flags.num_seeds) {
      config.num_seeds = *flags.num_seeds;
      config.seed_list.clear();
    }
    if (flags.out) config.out = *flags.out;
    if (flags.jobs) config.jobs = *flags.jobs;
    if (flags.task) config.problem.task = parse_task(*flags.task);
    if (flags.n) config.problem.n = *flags.n;
    if (flags.d) config.problem.d = *flags.d;
    if (flags.alpha) config.problem.adversary.alpha = *flags.alpha;
    config.validate();

    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "gen") cmd_gen(config, out);
    else if (name == "run") cmd_run(config, out);
    else if (name == "sweep") cmd_sweep(config, out);
    else if (name == "grid-init") cmd_grid_init(config, out);
    else cmd_tune(config, out);
    return 0;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace svam::experiment
