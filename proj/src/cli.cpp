// Copyright 2026 The rwre Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rwre/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "rwre/chain.hpp"
#include "rwre/env_io.hpp"
#include "rwre/envgen.hpp"
#include "rwre/errors.hpp"
#include "rwre/experiments.hpp"
#include "rwre/hitting.hpp"
#include "rwre/mc.hpp"
#include "rwre/potential.hpp"

namespace rwre {
namespace {

using nlohmann::json;

struct DistOptions {
  std::vector<double> two_point;
  std::vector<double> beta;
  std::vector<double> discrete_values;
  std::vector<double> discrete_weights;
  std::string dist_file;
};

void add_dist_options(CLI::App* app, DistOptions& o) {
  app->add_option("--two-point", o.two_point, "TwoPoint law: P_HI P_LO BETA")->expected(3);
  app->add_option("--beta", o.beta, "Beta law of omega: A B")->expected(2);
  app->add_option("--discrete-values", o.discrete_values, "Discrete law support points")->delimiter(',');
  app->add_option("--discrete-weights", o.discrete_weights, "Discrete law weights")->delimiter(',');
  app->add_option("--dist", o.dist_file, "JSON file holding a distribution spec");
}

EnvDistribution resolve_dist(const DistOptions& o) {
  const int given = static_cast<int>(!o.two_point.empty()) + static_cast<int>(!o.beta.empty()) +
                    static_cast<int>(!o.discrete_values.empty()) + static_cast<int>(!o.dist_file.empty());
  if (given != 1) throw CLI::ValidationError("distribution", "give exactly one of --two-point, --beta, --discrete-values, --dist");
  if (!o.two_point.empty()) return EnvDistribution(TwoPoint{o.two_point[0], o.two_point[1], o.two_point[2]});
  if (!o.beta.empty()) return EnvDistribution(BetaLike{o.beta[0], o.beta[1]});
  if (!o.discrete_values.empty()) return EnvDistribution(Discrete{o.discrete_values, o.discrete_weights});
  std::ifstream in(o.dist_file);
  if (!in) throw PreconditionError("cannot read " + o.dist_file);
  json j;
  in >> j;
  return dist_from_json(j);
}

json run_config(const std::string& command, const std::vector<std::string>& args) {
  return json{{"command", command}, {"argv", args}};
}

void emit_json(const json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

class CsvWriter {
 public:
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) buf_ << ',';
      buf_ << csv_field(fields[i]);
    }
    buf_ << "\r\n";
  }
  // Writes to path plus a <path>.run.json provenance sidecar, or to out.
  void emit(const std::string& path, const json& config, std::ostream& out) const {
    if (path.empty()) {
      out << buf_.str();
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f << buf_.str();
    emit_json(json{{"run_config", config}}, path + ".run.json", out);
  }

 private:
  std::ostringstream buf_;
};

std::string num(double x) { return format_g17(x); }
std::string num(std::int64_t x) { return std::to_string(x); }

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

Environment reflected_for(const Environment& env, std::int64_t n) {
  if (env.reflected_at()) {
    if (*env.reflected_at() != n) throw PreconditionError("environment is reflected at a different n");
    return env;
  }
  return reflect(env, n);
}

json moments_json(const HittingMoments& m) {
  json j{{"n", m.n},
         {"E", nullable(m.expectation)},
         {"Var", nullable(m.variance)},
         {"E_lazy", nullable(m.lazy_expectation)},
         {"Var_lazy", nullable(m.lazy_variance)},
         {"log_E", m.log_expectation},
         {"log_Var", nullable(m.log_variance)}};
  if (m.truncation_bound) j["truncation_bound"] = nullable(*m.truncation_bound);
  return j;
}

json cutoff_json(const CutoffReport& r) {
  return json{{"n", r.n},         {"t", r.t},           {"f", r.f},
              {"c_grid", r.c_grid}, {"k_minus", r.k_minus}, {"k_plus", r.k_plus},
              {"d_minus", r.d_minus}, {"d_plus", r.d_plus}, {"clamped", r.clamped},
              {"k75", r.k75},     {"k25", r.k25},       {"t_mix", r.t_mix},
              {"window_ratio", r.window_ratio}};
}

json verdict_json(const Verdict& v) {
  return json{{"id", v.id},     {"measured", nullable(v.measured)}, {"target", v.target},
              {"lo", v.lo},     {"hi", v.hi},                       {"pass", v.pass},
              {"informational", v.informational}, {"runtime_seconds", v.runtime_seconds}, {"note", v.note}};
}

std::vector<std::uint64_t> parse_u64_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw CLI::ValidationError("list", "not a nonnegative integer: " + item);
    }
  }
  return out;
}

struct StudyConfig {
  json raw;
  EnvDistribution dist{TwoPoint{0.75, 0.25, 0.9}};
  std::vector<std::int64_t> n_grid;
  std::int64_t n = 0;
  std::size_t replicas = 10;
  std::uint64_t seed = 0;
  std::vector<double> c_grid{1.0, 2.0, 4.0};
  double eps = 0.25;
};

StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot read " + path);
  StudyConfig c;
  try {
    in >> c.raw;
    c.dist = dist_from_json(c.raw.at("dist"));
    if (!c.raw.contains("seed")) throw CLI::ValidationError("config", "study config needs a seed");
    c.seed = c.raw.at("seed").get<std::uint64_t>();
    if (c.raw.contains("n_grid")) c.n_grid = c.raw.at("n_grid").get<std::vector<std::int64_t>>();
    if (c.raw.contains("n")) c.n = c.raw.at("n").get<std::int64_t>();
    if (c.raw.contains("replicas")) c.replicas = c.raw.at("replicas").get<std::size_t>();
    if (c.raw.contains("c_grid")) c.c_grid = c.raw.at("c_grid").get<std::vector<double>>();
    if (c.raw.contains("eps")) c.eps = c.raw.at("eps").get<double>();
  } catch (const json::exception& e) {
    throw CLI::ValidationError("config", e.what());
  }
  return c;
}

void write_scaling(const ScalingStudy& s, const std::filesystem::path& dir, const json& config, std::ostream& out,
                   double lo, double hi) {
  CsvWriter csv;
  csv.row({"replica", "n", "log_value"});
  for (std::size_t r = 0; r < s.values.size(); ++r) {
    for (std::size_t g = 0; g < s.n_grid.size(); ++g) {
      csv.row({std::to_string(r), num(s.n_grid[g]), num(s.values[r][g])});
    }
  }
  csv.emit((dir / "raw.csv").string(), config, out);
  json verdicts = json::array();
  if (s.n_grid.size() >= 2) verdicts.push_back(verdict_json(scaling_verdict(s, lo, hi)));
  json j{{"run_config", config},
         {"quantity", to_string(s.quantity)},
         {"kappa", s.kappa},
         {"n_grid", s.n_grid},
         {"median_slope", s.median_slope},
         {"replica_slopes", s.replica_slopes},
         {"median_curve_slope", s.median_curve_fit.slope},
         {"median_curve_slope_ci", s.median_curve_fit.slope_ci},
         {"two_point_slope", s.two_point_slope},
         {"target", s.target},
         {"verdicts", verdicts}};
  if (!s.median_ratio.empty()) {
    j["median_ratio"] = s.median_ratio;
    j["ratio_target"] = s.ratio_target;
  }
  emit_json(j, (dir / "verdicts.json").string(), out);
}

int code_for(const std::exception_ptr& p, std::ostream& err) {
  try {
    std::rethrow_exception(p);
  } catch (const ResourceCapError& e) {
    err << "rwre: " << e.what() << "\n";
    return kExitResourceCap;
  } catch (const PreconditionError& e) {
    err << "rwre: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const DomainError& e) {
    err << "rwre: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "rwre: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random walks in random environment: moments, mixing and Monte Carlo", "rwre"};
  app.fallthrough();
  app.require_subcommand(1);
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  // gen-env
  DistOptions gen_dist;
  std::int64_t gen_left = 0;
  std::int64_t gen_right = 0;
  std::optional<std::uint64_t> gen_seed;
  std::optional<std::int64_t> gen_reflect;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-env", "Sample an environment on [-left, right]");
  add_dist_options(gen, gen_dist);
  gen->add_option("--left", gen_left, "Sites left of 0")->check(CLI::NonNegativeNumber);
  gen->add_option("--right", gen_right, "Rightmost site")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Master seed")->required();
  gen->add_option("--reflect", gen_reflect, "Reflect at 0 and at this n");
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  // kappa / assumptions
  DistOptions kappa_dist;
  auto* kap = app.add_subcommand("kappa", "Solve E rho^kappa = 1");
  add_dist_options(kap, kappa_dist);
  DistOptions assume_dist;
  auto* assume = app.add_subcommand("assumptions", "Check the standing assumptions of a law");
  add_dist_options(assume, assume_dist);

  // commands on an environment file
  std::string env_file;
  std::int64_t n = 0;
  std::string out_path;
  auto env_cmd = [&](const std::string& name, const std::string& help, bool needs_n) {
    auto* c = app.add_subcommand(name, help);
    c->add_option("--env", env_file, "Environment JSON file")->required();
    auto* opt = c->add_option("--n", n, "Target / reflection site")->check(CLI::PositiveNumber);
    if (needs_n) opt->required();
    c->add_option("--out", out_path, "Output file (default stdout)");
    return c;
  };

  std::optional<std::int64_t> upto;
  auto* pdump = env_cmd("potential-dump", "Potential, ladder points and block heights as CSV", false);
  pdump->add_option("--upto", upto, "Right end of the ladder scan");

  std::optional<std::int64_t> left_trunc;
  auto* mom = env_cmd("moments", "Closed-form quenched moments of T_n", true);
  mom->add_option("--left-trunc", left_trunc, "Full-line moments with the left tail cut here")
      ->check(CLI::NonNegativeNumber);

  bool lazy = false;
  std::uint64_t replicas = 10000;
  std::optional<std::uint64_t> mc_seed;
  std::string tail_at;
  auto* mch = env_cmd("mc-hitting", "Monte Carlo hitting times", true);
  mch->add_flag("--lazy", lazy, "Simulate the lazy walk");
  mch->add_option("--replicas", replicas, "Replica count")->check(CLI::Range(std::uint64_t{100}, std::uint64_t{1} << 40));
  mch->add_option("--seed", mc_seed, "Master seed")->required();
  mch->add_option("--tail-at", tail_at, "Comma separated k values for P(T > k)");

  std::string schedule;
  std::int64_t k_max = -1;
  std::int64_t stride = 1;
  bool exhaustive = false;
  auto* tvp = env_cmd("tv-profile", "Worst-case TV distance to stationarity as CSV", true);
  tvp->add_option("--schedule", schedule, "Comma separated increasing k values");
  tvp->add_option("--k-max", k_max, "Evaluate k = 0, stride, ... up to k-max");
  tvp->add_option("--stride", stride, "Stride for --k-max")->check(CLI::PositiveNumber);
  tvp->add_flag("--exhaustive", exhaustive, "Maximize over every start state");

  double eps = 0.25;
  auto* mix = env_cmd("mixing-time", "Exact mixing time of the lazy chain", true);
  mix->add_option("--eps", eps, "Threshold")->check(CLI::Range(0.0, 1.0));
  mix->add_flag("--exhaustive", exhaustive, "Maximize over every start state");

  std::vector<double> c_grid{1.0, 2.0, 4.0};
  auto* cut = env_cmd("cutoff-scan", "TV distance around t = 2E T_n on the scale sqrt(Var T_n)", true);
  cut->add_option("--c", c_grid, "Window multipliers")->delimiter(',');
  cut->add_flag("--exhaustive", exhaustive, "Maximize over every start state");

  std::string config_file;
  std::string study_out;
  double band_lo = -1e300;
  double band_hi = 1e300;
  auto* study = app.add_subcommand("study", "Run a reproduction study from a JSON config");
  study->require_subcommand(1);
  std::vector<CLI::App*> studies;
  const std::pair<const char*, const char*> study_kinds[] = {
      {"scaling-expectation", "Slope of ln E T_n against ln n"},
      {"scaling-variance", "Slope of ln Var T_n against ln n"},
      {"mixing-scaling", "Slope of ln t_mix against ln n, and t_mix / n"},
      {"cutoff-dichotomy", "Cutoff window checks across an n grid"},
      {"ergodic-check", "E T_n / n against the annealed E T_1"},
  };
  for (const auto& [name, help] : study_kinds) {
    auto* s = study->add_subcommand(name, help);
    s->add_option("--config", config_file, "Study configuration (JSON)")->required();
    s->add_option("--out", study_out, "Output directory")->required();
    if (std::string(name).rfind("scaling", 0) == 0 || std::string(name) == "mixing-scaling") {
      s->add_option("--band-lo", band_lo, "Lower end of the slope band");
      s->add_option("--band-hi", band_hi, "Upper end of the slope band");
    }
    studies.push_back(s);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "rwre: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const json config = run_config(command, args);

  try {
    if (*gen) {
      const EnvDistribution dist = resolve_dist(gen_dist);
      Environment env = sample_environment(dist, gen_left, gen_right, *gen_seed);
      if (gen_reflect) env = reflect(env, *gen_reflect);
      json j = json::parse(env_to_json(env));
      j["run_config"] = config;
      emit_json(j, gen_out, out);
    } else if (*kap) {
      const EnvDistribution dist = resolve_dist(kappa_dist);
      json j{{"kappa", solve_kappa(dist)}, {"mean_log_rho", mean_log_rho(dist)}, {"run_config", config}};
      emit_json(j, "", out);
    } else if (*assume) {
      const EnvDistribution dist = resolve_dist(assume_dist);
      const AssumptionReport r = check_assumptions(dist);
      json j{{"mean_log_rho", r.mean_log_rho},
             {"kappa", r.kappa ? json(*r.kappa) : json(nullptr)},
             {"kappa_moment_check", nullable(r.kappa_moment_check)},
             {"lattice_flag", to_string(r.lattice_flag)},
             {"ballistic", r.ballistic},
             {"run_config", config}};
      if (r.kappa && *r.kappa > 1.0) {
        j["annealed_ET1"] = annealed_ET1(dist);
        j["annealed_ET1_geometric_series"] = annealed_ET1_geometric_series(dist);
      }
      emit_json(j, "", out);
      if (!r.kappa) return kExitPrecondition;
    } else if (*pdump) {
      const Environment env = load_environment(env_file);
      const PotentialProfile v = potential(env);
      const std::int64_t right = upto.value_or(env.last_site());
      const BlockDecomposition b = ladder_blocks(v, right);
      CsvWriter csv;
      csv.row({"x", "V", "is_ladder", "block_index", "block_height"});
      for (std::int64_t x = v.first(); x <= std::min(right, v.last()); ++x) {
        const bool ladder = std::binary_search(b.nu.begin(), b.nu.end(), x) ||
                            std::find(b.nu_left.begin(), b.nu_left.end(), x) != b.nu_left.end();
        std::string idx;
        std::string height;
        if (x >= 0) {
          const std::size_t i = block_index(b, x);
          idx = std::to_string(i);
          height = num(b.heights[i]);
        }
        csv.row({num(x), num(v(x)), ladder ? "1" : "0", idx, height});
      }
      csv.emit(out_path, config, out);
    } else if (*mom) {
      const Environment env = load_environment(env_file);
      HittingMoments m = left_trunc ? quenched_moments_full_line(env, n, *left_trunc)
                                    : quenched_moments(reflected_for(env, n));
      json j = moments_json(m);
      j["run_config"] = config;
      emit_json(j, out_path, out);
    } else if (*mch) {
      const Environment env = reflected_for(load_environment(env_file), n);
      const std::vector<std::uint64_t> ks = parse_u64_list(tail_at);
      const HittingSampleSummary s = estimate_tail(env, lazy, ks, replicas, *mc_seed, threads);
      json tails = json::array();
      for (std::size_t i = 0; i < s.ks.size(); ++i) {
        tails.push_back(json{{"k", s.ks[i]}, {"p", s.tail[i]}, {"ci_lo", s.tail_ci[i].lo}, {"ci_hi", s.tail_ci[i].hi}});
      }
      json j{{"n", s.n},
             {"lazy", s.lazy},
             {"replicas", s.replicas},
             {"mean", s.moments.mean},
             {"variance", s.moments.variance},
             {"se_mean", s.moments.se_mean},
             {"se_variance", s.moments.se_variance},
             {"tails", tails},
             {"run_config", config}};
      emit_json(j, out_path, out);
    } else if (*tvp) {
      const Environment env = reflected_for(load_environment(env_file), n);
      std::vector<std::int64_t> ks;
      if (!schedule.empty()) {
        for (std::uint64_t k : parse_u64_list(schedule)) ks.push_back(static_cast<std::int64_t>(k));
      } else if (k_max >= 0) {
        for (std::int64_t k = 0; k <= k_max; k += stride) ks.push_back(k);
      } else {
        throw CLI::ValidationError("tv-profile", "give --schedule or --k-max");
      }
      const LazyKernel kernel = lazy_kernel(env);
      const DistVector pi = stationary(env);
      const TVProfile p = distance_profile(kernel, pi, start_states(n, exhaustive ? StartSet::exhaustive : StartSet::endpoints), ks);
      CsvWriter csv;
      csv.row({"k", "d_k"});
      for (std::size_t i = 0; i < ks.size(); ++i) csv.row({num(ks[i]), num(p.d[i])});
      csv.emit(out_path, config, out);
    } else if (*mix) {
      const Environment env = reflected_for(load_environment(env_file), n);
      const StartSet set = exhaustive ? StartSet::exhaustive : StartSet::endpoints;
      const std::int64_t t = mixing_time(lazy_kernel(env), stationary(env), eps, set);
      json j{{"n", n}, {"t_mix", t}, {"eps", eps}, {"starts", exhaustive ? "exhaustive" : "endpoints"}, {"run_config", config}};
      emit_json(j, out_path, out);
    } else if (*cut) {
      const Environment env = reflected_for(load_environment(env_file), n);
      json j = cutoff_json(cutoff_scan(env, c_grid, exhaustive ? StartSet::exhaustive : StartSet::endpoints));
      j["run_config"] = config;
      emit_json(j, out_path, out);
    } else if (*study) {
      const StudyConfig c = load_study_config(config_file);
      const std::filesystem::path dir(study_out);
      std::filesystem::create_directories(dir);
      json full{{"run_config", config}, {"study_config", c.raw}};
      const std::string which = study->get_subcommands().front()->get_name();
      if (which == "scaling-expectation") {
        write_scaling(scaling_expectation(c.dist, c.n_grid, c.replicas, c.seed, threads), dir, full, out, band_lo, band_hi);
      } else if (which == "scaling-variance") {
        write_scaling(scaling_variance(c.dist, c.n_grid, c.replicas, c.seed, threads), dir, full, out, band_lo, band_hi);
      } else if (which == "mixing-scaling") {
        write_scaling(mixing_scaling(c.dist, c.n_grid, c.replicas, c.seed, threads, c.eps), dir, full, out, band_lo, band_hi);
      } else if (which == "cutoff-dichotomy") {
        const CutoffStudy s = cutoff_dichotomy(c.dist, c.n_grid, c.c_grid, c.replicas, c.seed, threads);
        CsvWriter csv;
        csv.row({"replica", "n", "t", "f", "k75", "k25", "window_ratio", "c", "d_minus", "d_plus"});
        for (std::size_t r = 0; r < s.reports.size(); ++r) {
          for (const CutoffReport& rep : s.reports[r]) {
            for (std::size_t i = 0; i < rep.c_grid.size(); ++i) {
              csv.row({std::to_string(r), num(rep.n), num(rep.t), num(rep.f), num(rep.k75), num(rep.k25),
                       num(rep.window_ratio), num(rep.c_grid[i]), num(rep.d_minus[i]), num(rep.d_plus[i])});
            }
          }
        }
        csv.emit((dir / "raw.csv").string(), full, out);
        json verdicts = json::array();
        for (const Verdict& v : s.verdicts) verdicts.push_back(verdict_json(v));
        emit_json(json{{"run_config", full},
                       {"kappa", s.kappa},
                       {"n_grid", s.n_grid},
                       {"median_window_ratio", s.median_window_ratio},
                       {"verdicts", verdicts}},
                  (dir / "verdicts.json").string(), out);
      } else {
        const ErgodicStudy s = ergodic_check(c.dist, c.n, c.replicas, c.seed, threads);
        CsvWriter csv;
        csv.row({"replica", "E_over_n", "free_over_reflected", "Var_over_n"});
        for (std::size_t r = 0; r < s.e_over_n.size(); ++r) {
          csv.row({std::to_string(r), num(s.e_over_n[r]), num(s.free_over_reflected[r]), num(s.var_over_n[r])});
        }
        csv.emit((dir / "raw.csv").string(), full, out);
        json verdicts = json::array();
        for (const Verdict& v : s.verdicts) verdicts.push_back(verdict_json(v));
        emit_json(json{{"run_config", full}, {"kappa", s.kappa}, {"annealed_ET1", s.annealed_et1}, {"verdicts", verdicts}},
                  (dir / "verdicts.json").string(), out);
      }
    }
  } catch (const CLI::ValidationError& e) {
    err << "rwre: " << e.what() << "\n";
    return kExitUsage;
  } catch (...) {
    return code_for(std::current_exception(), err);
  }
  return kExitOk;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace rwre
