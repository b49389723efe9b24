#include "svam/experiment/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace svam::experiment {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, std::initializer_list<std::string_view> keys,
                    const std::string& where) {
  for (const auto& item : obj.items()) {
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end()) {
      throw ParameterError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key) && !obj.at(key).is_null()) out = obj.at(key).get<T>();
}

std::string_view to_string(InitKind k) {
  switch (k) {
    case InitKind::zero: return "zero";
    case InitKind::adversarial: return "adversarial";
    case InitKind::truth: return "truth";
    case InitKind::given: return "given";
  }
  return "?";
}

void read_adversary(const json& j, AdversarySpec& a) {
  reject_unknown(j, {"alpha", "location", "kind", "constant", "mult_low", "mult_high",
                     "awareness"},
                 "adversary");
  read(j, "alpha", a.alpha);
  read(j, "constant", a.constant_value);
  read(j, "mult_low", a.mult_low);
  read(j, "mult_high", a.mult_high);
  if (j.contains("location")) a.location = parse_location(j.at("location").get<std::string>());
  if (j.contains("kind")) a.kind = parse_corruption_kind(j.at("kind").get<std::string>());
  if (j.contains("awareness")) {
    a.awareness = parse_awareness(j.at("awareness").get<std::string>());
  }
}

void read_svam(const json& j, SvamSettings& s) {
  reject_unknown(j, {"beta1", "xi", "max_iters", "beta_cap", "init", "tune", "lr_ridge"},
                 "svam");
  read(j, "beta1", s.beta1);
  read(j, "xi", s.xi);
  read(j, "max_iters", s.max_iters);
  read(j, "beta_cap", s.beta_cap);
  read(j, "tune", s.tune);
  read(j, "lr_ridge", s.lr_ridge);
  if (j.contains("init")) {
    const json& init = j.at("init");
    if (init.is_array()) {
      s.init = InitKind::given;
      s.init_vector = init.get<std::vector<double>>();
    } else {
      const auto name = init.get<std::string>();
      if (name == "zero") s.init = InitKind::zero;
      else if (name == "adversarial") s.init = InitKind::adversarial;
      else if (name == "truth") s.init = InitKind::truth;
      else throw ParameterError("unknown svam.init '" + name + "'");
    }
  }
}

}  // namespace

std::vector<std::uint64_t> ExperimentConfig::seeds() const {
  if (!seed_list.empty()) return seed_list;
  std::vector<std::uint64_t> out;
  for (int k = 0; k < num_seeds; ++k) out.push_back(seed + static_cast<std::uint64_t>(k));
  return out;
}

void ExperimentConfig::validate() const {
  if (problem.n < 1 || problem.d < 1) throw ParameterError("n and d must be >= 1");
  problem.adversary.validate();
  if (problem.noise_beta_star && !(*problem.noise_beta_star > 0.0)) {
    throw ParameterError("noise_beta_star must be > 0");
  }
  if (problem.task == Task::gamma && !(problem.phi > 0.0 && problem.phi < 1.0)) {
    throw ParameterError("phi must lie in (0, 1)");
  }
  if (methods.empty()) throw ParameterError("methods must be nonempty");
  std::set<std::string> seen;
  for (const auto& m : methods) {
    const auto& known = known_methods();
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      throw ParameterError("unknown method '" + m + "'");
    }
    if (!seen.insert(m).second) throw ParameterError("method '" + m + "' listed twice");
    const bool rr_only = m == "torrent" || m == "tukey";
    const bool me_only = m == "coord_median" || m == "geo_median";
    if (rr_only && problem.task != Task::rr) {
      throw ParameterError("method '" + m + "' needs task rr");
    }
    if (me_only && problem.task != Task::me) {
      throw ParameterError("method '" + m + "' needs task me");
    }
  }
  if (vam_betas.empty()) throw ParameterError("vam_betas must be nonempty");
  for (const double b : vam_betas) {
    if (!(b > 0.0)) throw ParameterError("vam_betas must be > 0");
  }
  if (!(svam.beta1 > 0.0)) throw ParameterError("svam.beta1 must be > 0");
  if (!(svam.xi >= 1.0)) throw ParameterError("svam.xi must be >= 1");
  if (svam.max_iters < 1) throw ParameterError("svam.max_iters must be >= 1");
  if (!(svam.beta_cap >= svam.beta1)) throw ParameterError("svam.beta_cap must be >= beta1");
  if (svam.init == InitKind::given &&
      static_cast<Index>(svam.init_vector.size()) != problem.d) {
    throw ParameterError("svam.init vector length must equal d");
  }
  tune_grid.validate();
  if (seed_list.empty() && num_seeds < 1) throw ParameterError("num_seeds must be >= 1");
  if (torrent_max_iters < 1 || tukey_max_iters < 1) {
    throw ParameterError("baseline iteration limits must be >= 1");
  }
  if (!(tukey_c > 0.0)) throw ParameterError("tukey_c must be > 0");
  if (jobs < 1) throw ParameterError("jobs must be >= 1");
  if (out.empty()) throw ParameterError("output path must be nonempty");
  const auto& p = sweep.param;
  if (p != "alpha" && p != "dim" && p != "beta1" && p != "xi") {
    throw ParameterError("sweep.param must be one of alpha, dim, beta1, xi");
  }
  if (grid_init.mode != "grid" && grid_init.mode != "random") {
    throw ParameterError("grid_init.mode must be grid or random");
  }
  if (!(grid_init.hi > grid_init.lo)) throw ParameterError("grid_init needs lo < hi");
  if (grid_init.points < 1 || grid_init.count < 0) {
    throw ParameterError("grid_init sizes must be positive");
  }
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParameterError("config must be a JSON object");
  ExperimentConfig c;
  try {
    reject_unknown(j,
                   {"task", "n", "d", "covariates", "noise", "noise_beta_star", "phi",
                    "mean_norm", "adv_mean_norm", "adversary", "methods", "vam_betas", "svam",
                    "tune_grid", "seed", "num_seeds", "seeds", "torrent_max_iters", "tukey_c",
                    "tukey_max_iters", "sweep", "grid_init", "out", "jobs"},
                   "config");
    if (j.contains("task")) c.problem.task = parse_task(j.at("task").get<std::string>());
    read(j, "n", c.problem.n);
    read(j, "d", c.problem.d);
    if (j.contains("covariates")) {
      c.problem.covariates = parse_covariate_dist(j.at("covariates").get<std::string>());
    }
    bool noise = false;
    read(j, "noise", noise);
    // Default hybrid noise has standard deviation 0.1.
    if (noise) c.problem.noise_beta_star = 100.0;
    if (j.contains("noise_beta_star") && !j.at("noise_beta_star").is_null()) {
      c.problem.noise_beta_star = j.at("noise_beta_star").get<double>();
    }
    read(j, "phi", c.problem.phi);
    read(j, "mean_norm", c.problem.mean_norm);
    read(j, "adv_mean_norm", c.problem.adv_mean_norm);
    if (j.contains("adversary")) read_adversary(j.at("adversary"), c.problem.adversary);
    read(j, "methods", c.methods);
    read(j, "vam_betas", c.vam_betas);
    if (j.contains("svam")) read_svam(j.at("svam"), c.svam);
    if (j.contains("tune_grid")) {
      const json& g = j.at("tune_grid");
      reject_unknown(g, {"beta1", "xi", "alpha_trim", "validation_fraction"}, "tune_grid");
      read(g, "beta1", c.tune_grid.beta1);
      read(g, "xi", c.tune_grid.xi);
      read(g, "alpha_trim", c.tune_grid.alpha_trim);
      read(g, "validation_fraction", c.tune_grid.validation_fraction);
    }
    read(j, "seed", c.seed);
    read(j, "num_seeds", c.num_seeds);
    read(j, "seeds", c.seed_list);
    read(j, "torrent_max_iters", c.torrent_max_iters);
    read(j, "tukey_c", c.tukey_c);
    read(j, "tukey_max_iters", c.tukey_max_iters);
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      reject_unknown(s, {"param", "values"}, "sweep");
      read(s, "param", c.sweep.param);
      read(s, "values", c.sweep.values);
    }
    if (j.contains("grid_init")) {
      const json& g = j.at("grid_init");
      reject_unknown(g, {"mode", "lo", "hi", "points", "count", "success_tol",
                         "max_success_iters"},
                     "grid_init");
      read(g, "mode", c.grid_init.mode);
      read(g, "lo", c.grid_init.lo);
      read(g, "hi", c.grid_init.hi);
      read(g, "points", c.grid_init.points);
      read(g, "count", c.grid_init.count);
      read(g, "success_tol", c.grid_init.success_tol);
      read(g, "max_success_iters", c.grid_init.max_success_iters);
    }
    read(j, "out", c.out);
    read(j, "jobs", c.jobs);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const ExperimentConfig& c) {
  const auto& a = c.problem.adversary;
  json j;
  j["task"] = std::string(to_string(c.problem.task));
  j["n"] = c.problem.n;
  j["d"] = c.problem.d;
  j["covariates"] = std::string(to_string(c.problem.covariates));
  j["noise_beta_star"] = c.problem.noise_beta_star ? json(*c.problem.noise_beta_star) : json();
  j["phi"] = c.problem.phi;
  j["mean_norm"] = c.problem.mean_norm;
  j["adv_mean_norm"] = c.problem.adv_mean_norm;
  j["adversary"] = {{"alpha", a.alpha},
                    {"location", std::string(to_string(a.location))},
                    {"kind", std::string(to_string(a.kind))},
                    {"constant", a.constant_value},
                    {"mult_low", a.mult_low},
                    {"mult_high", a.mult_high},
                    {"awareness", std::string(to_string(a.awareness))}};
  j["methods"] = c.methods;
  j["vam_betas"] = c.vam_betas;
  json svam = {{"beta1", c.svam.beta1},     {"xi", c.svam.xi},
               {"max_iters", c.svam.max_iters}, {"beta_cap", c.svam.beta_cap},
               {"tune", c.svam.tune},       {"lr_ridge", c.svam.lr_ridge}};
  svam["init"] = c.svam.init == InitKind::given ? json(c.svam.init_vector)
                                                : json(std::string(to_string(c.svam.init)));
  j["svam"] = svam;
  j["tune_grid"] = {{"beta1", c.tune_grid.beta1},
                    {"xi", c.tune_grid.xi},
                    {"alpha_trim", c.tune_grid.alpha_trim},
                    {"validation_fraction", c.tune_grid.validation_fraction}};
  j["seeds"] = c.seeds();
  j["torrent_max_iters"] = c.torrent_max_iters;
  j["tukey_c"] = c.tukey_c;
  j["tukey_max_iters"] = c.tukey_max_iters;
  j["sweep"] = {{"param", c.sweep.param}, {"values", c.sweep.values}};
  j["grid_init"] = {{"mode", c.grid_init.mode},
                    {"lo", c.grid_init.lo},
                    {"hi", c.grid_init.hi},
                    {"points", c.grid_init.points},
                    {"count", c.grid_init.count},
                    {"success_tol", c.grid_init.success_tol},
                    {"max_success_iters", c.grid_init.max_success_iters}};
  j["out"] = c.out;
  j["jobs"] = c.jobs;
  return j.dump(2);
}

}  // namespace svam::experiment
