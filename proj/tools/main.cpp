// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 ucpce authors

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ucpce/bilevel.hpp"
#include "ucpce/instance.hpp"
#include "ucpce/pce.hpp"
#include "ucpce/reference.hpp"

namespace {

using ucpce::Instance;
using json = nlohmann::ordered_json;

// Common knobs shared by `run` and `sweep`; defaults mirror TrainConfig.
struct Options {
  std::string instance;
  std::string ansatz = "brickwork";
  int layers = 6;
  int steps = 200;
  int seeds = 10;
  int k = 2;
  double alpha = 0.0;
  double rho_bal = 1e4;
  double rho_ramp = 1e3;
  double lambda_res = 100.0;
  double lr = 0.05;
  int subset = 16;
  std::vector<double> thresholds;
  std::string out;
};

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt6_opt(const std::optional<double>& v) {
  return v ? fmt6(*v) : std::string();
}

const char* status_word(ucpce::QpStatus s) {
  switch (s) {
    case ucpce::QpStatus::Solved: return "solved";
    case ucpce::QpStatus::MaxIter: return "max_iter";
    case ucpce::QpStatus::InfeasibleDetected: return "infeasible";
  }
  return "unknown";
}

// A name naming an existing file loads it; anything else must be bundled.
Instance resolve_instance(const std::string& name) {
  if (std::filesystem::exists(name)) return ucpce::load_instance(name);
  try {
    return ucpce::builtin_instance(name);
  } catch (const std::out_of_range&) {
    std::string known;
    for (const auto& n : ucpce::builtin_names()) {
      known += known.empty() ? n : ", " + n;
    }
    throw std::runtime_error("unknown instance '" + name +
                             "' (not a file; bundled: " + known + ")");
  }
}

std::filesystem::path output_dir(const Options& opt) {
  std::string dir = opt.out;
  if (dir.empty()) {
    if (const char* env = std::getenv("UCPCE_OUT")) dir = env;
  }
  if (dir.empty()) dir = ".";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string sanitize(const std::string& s) {
  std::string r = s;
  for (char& c : r) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return r;
}

ucpce::TrainConfig make_config(const Options& opt) {
  ucpce::TrainConfig cfg;
  cfg.ansatz = opt.ansatz == "su2" ? ucpce::AnsatzKind::EfficientSU2
                                   : ucpce::AnsatzKind::Brickwork;
  cfg.layers = opt.layers;
  cfg.steps = opt.steps;
  cfg.k = opt.k;
  cfg.alpha = opt.alpha;
  cfg.rho_bal = opt.rho_bal;
  cfg.rho_ramp = opt.rho_ramp;
  cfg.lambda_res = opt.lambda_res;
  cfg.lr = opt.lr;
  cfg.subset_size = opt.subset;
  if (!opt.thresholds.empty()) cfg.thresholds = opt.thresholds;
  return cfg;
}

json config_json(const Instance& inst, const ucpce::TrainConfig& cfg) {
  json j;
  j["instance"] = inst.name;
  j["ansatz"] = cfg.ansatz == ucpce::AnsatzKind::Brickwork ? "brickwork" : "su2";
  j["layers"] = cfg.layers;
  j["steps"] = cfg.steps;
  j["k"] = cfg.k;
  j["alpha"] = cfg.alpha;
  j["rho_bal"] = cfg.rho_bal;
  j["rho_ramp"] = cfg.rho_ramp;
  j["lambda_res"] = cfg.lambda_res;
  j["lr"] = cfg.lr;
  j["subset"] = cfg.subset_size;
  j["thresholds"] = cfg.thresholds;
  j["seed"] = cfg.seed;
  return j;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index t = 0; t < m.cols(); ++t) row.push_back(m(i, t));
    rows.push_back(std::move(row));
  }
  return rows;
}

json schedule_json(const Eigen::MatrixXi& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index t = 0; t < m.cols(); ++t) row.push_back(m(i, t));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_run_record(const std::filesystem::path& path, const Instance& inst,
                      const ucpce::TrainConfig& cfg,
                      const ucpce::TrainResult& result) {
  json j;
  j["schema"] = "ucpce-run-v1";
  j["config"] = config_json(inst, cfg);
  j["n_qubits"] = result.n_qubits;
  j["n_params"] = result.n_params;
  json theta = json::array();
  for (Eigen::Index p = 0; p < result.theta.size(); ++p) {
    theta.push_back(result.theta[p]);
  }
  j["theta"] = std::move(theta);
  json history = json::array();
  for (const auto& rec : result.history) {
    history.push_back({{"objective", rec.objective},
                       {"cost_term", rec.cost_term},
                       {"reserve_term", rec.reserve_term},
                       {"dispatch", status_word(rec.dispatch_status)}});
  }
  j["history"] = std::move(history);
  const auto& post = result.post;
  j["post"] = {{"feasible", post.feasible},
               {"tau", post.tau},
               {"cost", post.cost},
               {"n_violations", post.report.violations.size()},
               {"violation_pct", ucpce::violation_percentage(post.report)},
               {"schedule", schedule_json(post.y.y)},
               {"power", matrix_json(post.p)}};
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

int cmd_run(const Options& opt) {
  const Instance inst = resolve_instance(opt.instance);
  const auto dir = output_dir(opt);
  const std::string prefix = sanitize(inst.name) + "_" + opt.ansatz + "_L" +
                             std::to_string(opt.layers) + "_S" +
                             std::to_string(opt.steps);

  std::vector<ucpce::RunOutcome> outcomes;
  std::string runs_csv = "seed,feasible,tau,cost,violation_pct\n";
  for (int seed = 0; seed < opt.seeds; ++seed) {
    ucpce::TrainConfig cfg = make_config(opt);
    cfg.seed = static_cast<std::uint64_t>(seed);
    const ucpce::TrainResult result = ucpce::train(inst, cfg);
    write_run_record(dir / (prefix + "_seed" + std::to_string(seed) + ".json"),
                     inst, cfg, result);
    const auto& post = result.post;
    outcomes.push_back({post.feasible, post.cost});
    runs_csv += std::to_string(seed) + "," + (post.feasible ? "1" : "0") + "," +
                fmt6(post.tau) + "," + fmt6(post.cost) + "," +
                fmt6(ucpce::violation_percentage(post.report)) + "\n";
    std::printf("seed %d: %s cost=%s tau=%s\n", seed,
                post.feasible ? "feasible" : "infeasible",
                fmt6(post.cost).c_str(), fmt6(post.tau).c_str());
  }
  write_text(dir / (prefix + "_runs.csv"), runs_csv);

  const ucpce::RunSummary s =
      ucpce::summarize(outcomes, ucpce::known_reference_cost(inst.name));
  std::string summary_csv =
      "instance,ansatz,layers,steps,seeds,feasibility_rate_pct,best_cost,"
      "mean_cost,stdev_cost,best_gap_pct\n";
  summary_csv += inst.name + "," + opt.ansatz + "," +
                 std::to_string(opt.layers) + "," + std::to_string(opt.steps) +
                 "," + std::to_string(opt.seeds) + "," +
                 fmt6(s.feasibility_rate_pct) + "," + fmt6_opt(s.best_cost) +
                 "," + fmt6_opt(s.mean_cost) + "," + fmt6_opt(s.stdev_cost) +
                 "," + fmt6_opt(s.best_gap_pct) + "\n";
  write_text(dir / (prefix + "_summary.csv"), summary_csv);

  std::printf("feasibility %s%% (%d/%d)", fmt6(s.feasibility_rate_pct).c_str(),
              s.n_feasible, s.n_runs);
  if (s.best_cost) std::printf(", best cost %s", fmt6(*s.best_cost).c_str());
  if (s.mean_cost) std::printf(", mean %s", fmt6(*s.mean_cost).c_str());
  if (s.best_gap_pct) std::printf(", best gap %s%%", fmt6(*s.best_gap_pct).c_str());
  std::printf("\nrecords in %s\n", dir.string().c_str());
  return 0;
}

int cmd_sweep(const Options& opt, const std::string& axis,
              std::vector<int> values) {
  if (values.empty()) throw std::runtime_error("sweep needs at least one value");
  for (int v : values) {
    if (v <= 0) throw std::runtime_error("sweep values must be positive");
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  const Instance inst = resolve_instance(opt.instance);
  const auto dir = output_dir(opt);
  std::string csv = axis + ",seed,feasible,cost\n";

  if (axis == "layers") {
    for (int v : values) {
      for (int seed = 0; seed < opt.seeds; ++seed) {
        ucpce::TrainConfig cfg = make_config(opt);
        cfg.layers = v;
        cfg.seed = static_cast<std::uint64_t>(seed);
        const ucpce::TrainResult result = ucpce::train(inst, cfg);
        csv += std::to_string(v) + "," + std::to_string(seed) + "," +
               (result.post.feasible ? "1" : "0") + "," +
               fmt6(result.post.cost) + "\n";
        std::printf("layers=%d seed=%d %s cost=%s\n", v, seed,
                    result.post.feasible ? "feasible" : "infeasible",
                    fmt6(result.post.cost).c_str());
      }
    }
  } else {
    // One run per seed at the largest step count; earlier values are
    // checkpoints of that run, reported best-so-far.
    for (int seed = 0; seed < opt.seeds; ++seed) {
      ucpce::TrainConfig cfg = make_config(opt);
      cfg.steps = values.back();
      cfg.checkpoints = values;
      cfg.seed = static_cast<std::uint64_t>(seed);
      const ucpce::TrainResult result = ucpce::train(inst, cfg);
      bool any_feasible = false;
      double best = 0.0;
      for (const auto& [step, soft] : result.checkpoints) {
        const ucpce::PostprocessResult post = ucpce::postprocess(
            inst, soft, cfg.thresholds, cfg.rho_bal, cfg.rho_ramp);
        if (post.feasible && (!any_feasible || post.cost < best)) {
          any_feasible = true;
          best = post.cost;
        }
        const double reported = any_feasible ? best : post.cost;
        csv += std::to_string(step) + "," + std::to_string(seed) + "," +
               (any_feasible ? "1" : "0") + "," + fmt6(reported) + "\n";
        std::printf("steps=%d seed=%d %s cost=%s\n", step, seed,
                    any_feasible ? "feasible" : "infeasible",
                    fmt6(reported).c_str());
      }
    }
  }

  const std::string name = "sweep_" + axis + "_" + sanitize(inst.name) + "_" +
                           opt.ansatz + ".csv";
  write_text(dir / name, csv);
  std::printf("wrote %s\n", (dir / name).string().c_str());
  return 0;
}

int cmd_reference(const std::string& instance) {
  const Instance inst = resolve_instance(instance);
  const ucpce::ExhaustiveResult r = ucpce::exhaustive_solve(inst);
  switch (r.status) {
    case ucpce::ExhaustiveResult::Status::Optimal:
      std::printf("%s reference cost %.2f (computed: exhaustive over %llu "
                  "schedules)\n",
                  inst.name.c_str(), r.cost,
                  static_cast<unsigned long long>(r.evaluated));
      for (int i = 0; i < r.y.n_units(); ++i) {
        std::printf("  unit %d:", i + 1);
        for (int t = 0; t < r.y.n_periods(); ++t) {
          std::printf(" %d", r.y.y(i, t));
        }
        std::printf("\n");
      }
      return 0;
    case ucpce::ExhaustiveResult::Status::NoFeasibleSchedule:
      std::printf("%s has no feasible schedule\n", inst.name.c_str());
      return 0;
    case ucpce::ExhaustiveResult::Status::BudgetExceeded:
      break;
  }
  if (const auto ref = ucpce::known_reference_cost(inst.name)) {
    std::printf("%s reference cost %.2f (published benchmark value; "
                "enumeration over budget)\n",
                inst.name.c_str(), *ref);
  } else {
    std::printf("%s: enumeration over budget and no published value "
                "embedded\n",
                inst.name.c_str());
  }
  return 0;
}

int cmd_inspect(const std::string& instance) {
  const Instance inst = resolve_instance(instance);
  std::fputs(ucpce::format_instance(inst).c_str(), stdout);
  const long n_vars = static_cast<long>(inst.n_units()) * inst.n_periods();
  double cap = 0.0, peak = 0.0;
  for (const auto& u : inst.units) cap += u.p_max;
  for (double load : inst.loads) peak = std::max(peak, load);
  std::printf("\ncommitment variables  %ld\n", n_vars);
  std::printf("constraint rows       %ld\n", ucpce::count_constraints(inst));
  std::printf("qubits at k=2         %d\n", ucpce::select_qubit_count(n_vars, 2));
  std::printf("qubits at k=3         %d\n", ucpce::select_qubit_count(n_vars, 3));
  std::printf("fleet capacity        %s MW\n", fmt6(cap).c_str());
  std::printf("peak load             %s MW\n", fmt6(peak).c_str());
  return 0;
}

void add_common(CLI::App* cmd, Options* opt) {
  cmd->set_config("--config", "", "options file, one key=value per line");
  cmd->add_option("--instance", opt->instance, "bundled name or instance file")
      ->required();
  cmd->add_option("--ansatz", opt->ansatz, "circuit family")
      ->check(CLI::IsMember({"brickwork", "su2"}))
      ->capture_default_str();
  cmd->add_option("--layers", opt->layers, "entangling layers")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--steps", opt->steps, "training steps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seeds", opt->seeds, "number of independent seeds (0..n-1)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--k", opt->k, "correlator body count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--alpha", opt->alpha,
                  "decode sharpness; 0 selects n_qubits^2")
      ->capture_default_str();
  cmd->add_option("--rho-bal", opt->rho_bal, "balance slack penalty")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--rho-ramp", opt->rho_ramp, "ramp slack penalty")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--lambda-res", opt->lambda_res, "reserve penalty weight")
      ->capture_default_str();
  cmd->add_option("--lr", opt->lr, "Adam learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--subset", opt->subset, "parameters updated per step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--thresholds", opt->thresholds,
                  "hardening thresholds (default 0.05..0.95)")
      ->delimiter(',');
  cmd->add_option("--out", opt->out,
                  "output directory (default $UCPCE_OUT, else .)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bilevel unit commitment with correlation-encoded circuits"};
  app.require_subcommand(1);

  Options run_opt;
  CLI::App* run = app.add_subcommand("run", "train and post-process per seed");
  add_common(run, &run_opt);

  Options sweep_opt;
  std::string axis;
  std::vector<int> values;
  CLI::App* sweep = app.add_subcommand("sweep", "campaign along one axis");
  add_common(sweep, &sweep_opt);
  sweep->add_option("--axis", axis, "swept quantity")
      ->check(CLI::IsMember({"layers", "steps"}))
      ->required();
  sweep->add_option("--values", values, "axis values")
      ->delimiter(',')
      ->required();

  std::string ref_instance;
  CLI::App* ref = app.add_subcommand("reference", "classical reference cost");
  ref->add_option("--instance", ref_instance, "bundled name or instance file")
      ->required();

  std::string inspect_instance;
  CLI::App* ins = app.add_subcommand("inspect", "print an instance");
  ins->add_option("--instance", inspect_instance,
                  "bundled name or instance file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opt);
    if (sweep->parsed()) return cmd_sweep(sweep_opt, axis, values);
    if (ref->parsed()) return cmd_reference(ref_instance);
    if (ins->parsed()) return cmd_inspect(inspect_instance);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
