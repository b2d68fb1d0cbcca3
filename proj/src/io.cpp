#include "selcon/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "selcon/errors.hpp"
#include "selcon/rng.hpp"

namespace selcon {

namespace {

std::string fmt10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string fmt_or_empty(double v) { return std::isnan(v) ? std::string() : fmt10(v); }

std::string join_coeffs(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += fmt10(values[i]);
  }
  return out;
}

std::vector<double> parse_coeffs(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw contract_violation("config: expected a boolean, got '" + v + "'");
}

}  // namespace

std::string experiment_name(Experiment experiment) {
  switch (experiment) {
    case Experiment::Testing: return "testing";
    case Experiment::Classify: return "classify";
    case Experiment::Regress: return "regress";
    case Experiment::SelectPredict: return "select_predict";
    case Experiment::PredictLb: return "predict_lb";
    case Experiment::Ar: return "ar";
  }
  return "unknown";
}

Experiment experiment_from_name(const std::string& name) {
  if (name == "testing") return Experiment::Testing;
  if (name == "classify") return Experiment::Classify;
  if (name == "regress") return Experiment::Regress;
  if (name == "select_predict") return Experiment::SelectPredict;
  if (name == "predict_lb") return Experiment::PredictLb;
  if (name == "ar") return Experiment::Ar;
  throw contract_violation("unknown experiment '" + name + "'");
}

std::string mode_name(StatisticMode mode) {
  switch (mode) {
    case StatisticMode::Adaptive: return "adaptive";
    case StatisticMode::Fixed: return "fixed";
    case StatisticMode::Oracle: return "oracle";
  }
  return "unknown";
}

namespace {

StatisticMode mode_from_name(const std::string& name) {
  if (name == "adaptive") return StatisticMode::Adaptive;
  if (name == "fixed") return StatisticMode::Fixed;
  if (name == "oracle") return StatisticMode::Oracle;
  throw contract_violation("unknown mode '" + name + "'");
}

std::string augment_name(AugmentRule rule) {
  switch (rule) {
    case AugmentRule::PerAlgorithm: return "per_algorithm";
    case AugmentRule::All: return "all";
    case AugmentRule::Unselected: return "unselected";
  }
  return "unknown";
}

AugmentRule augment_from_name(const std::string& name) {
  if (name == "per_algorithm") return AugmentRule::PerAlgorithm;
  if (name == "all") return AugmentRule::All;
  if (name == "unselected") return AugmentRule::Unselected;
  throw contract_violation("unknown augment rule '" + name + "'");
}

std::string select_name(RegressSelect select) {
  switch (select) {
    case RegressSelect::All: return "all";
    case RegressSelect::Region: return "region";
    case RegressSelect::AdaptiveMean: return "adaptive_mean";
  }
  return "unknown";
}

RegressSelect select_from_name(const std::string& name) {
  if (name == "all") return RegressSelect::All;
  if (name == "region") return RegressSelect::Region;
  if (name == "adaptive_mean") return RegressSelect::AdaptiveMean;
  throw contract_violation("unknown selection rule '" + name + "'");
}

}  // namespace

bool apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value) {
  if (key == "experiment") cfg.experiment = experiment_from_name(value);
  else if (key == "alpha") cfg.alpha = std::stod(value);
  else if (key == "q1") cfg.q1 = std::stod(value);
  else if (key == "c") cfg.schedule_c = std::stod(value);
  else if (key == "beta") cfg.schedule_beta = std::stod(value);
  else if (key == "horizon") cfg.horizon = std::stoll(value);
  else if (key == "holdout") cfg.holdout = std::stoi(value);
  else if (key == "mode") cfg.mode = mode_from_name(value);
  else if (key == "baseline") cfg.baseline = parse_bool(value);
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "reps") cfg.reps = std::stoi(value);
  else if (key == "ier_stride") cfg.ier_stride = std::stoi(value);
  else if (key == "ier_mc") cfg.ier_mc = std::stoi(value);
  else if (key == "mc_n") cfg.mc_n = std::stoi(value);
  else if (key == "restart") cfg.restart.enabled = parse_bool(value);
  else if (key == "restart_patience") cfg.restart.patience = std::stoi(value);
  else if (key == "restart_q1") cfg.restart.reset_q = std::stod(value);
  else if (key == "augment") cfg.augment = augment_from_name(value);
  else if (key == "y0") cfg.y0 = std::stod(value);
  else if (key == "weights") cfg.class_weights = parse_coeffs(value);
  else if (key == "phi") cfg.ar_coeffs = parse_coeffs(value);
  else if (key == "ridge") cfg.ridge = std::stod(value);
  else if (key == "refit_stride") cfg.refit_stride = std::stoi(value);
  else if (key == "select") cfg.regress_select = select_from_name(value);
  else if (key == "region_lo") cfg.region_lo = std::stod(value);
  else if (key == "region_hi") cfg.region_hi = std::stod(value);
  else if (key == "band") cfg.convergence_band = std::stod(value);
  else if (key == "threads") cfg.threads = std::stoi(value);
  else if (key == "out") cfg.out_dir = value;
  else return false;
  return true;
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!apply_config_entry(cfg, key, value)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
    }
  }
}

std::vector<std::pair<std::string, std::string>> config_entries(
    const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> entries;
  entries.emplace_back("experiment", experiment_name(cfg.experiment));
  entries.emplace_back("alpha", fmt10(cfg.alpha));
  entries.emplace_back("q1", fmt10(cfg.q1));
  entries.emplace_back("c", fmt10(cfg.schedule_c));
  entries.emplace_back("beta", fmt10(cfg.schedule_beta));
  entries.emplace_back("horizon", std::to_string(cfg.horizon));
  entries.emplace_back("holdout", std::to_string(cfg.holdout));
  entries.emplace_back("mode", mode_name(cfg.mode));
  entries.emplace_back("baseline", cfg.baseline ? "true" : "false");
  entries.emplace_back("seed", std::to_string(cfg.seed));
  entries.emplace_back("reps", std::to_string(cfg.reps));
  entries.emplace_back("ier_stride", std::to_string(cfg.ier_stride));
  entries.emplace_back("ier_mc", std::to_string(cfg.ier_mc));
  entries.emplace_back("mc_n", std::to_string(cfg.mc_n));
  entries.emplace_back("restart", cfg.restart.enabled ? "true" : "false");
  entries.emplace_back("restart_patience", std::to_string(cfg.restart.patience));
  if (!std::isnan(cfg.restart.reset_q)) {
    entries.emplace_back("restart_q1", fmt10(cfg.restart.reset_q));
  }
  entries.emplace_back("augment", augment_name(cfg.augment));
  entries.emplace_back("y0", fmt10(cfg.y0));
  if (!cfg.class_weights.empty()) {
    entries.emplace_back("weights", join_coeffs(cfg.class_weights));
  }
  entries.emplace_back("phi", join_coeffs(cfg.ar_coeffs));
  entries.emplace_back("ridge", fmt10(cfg.ridge));
  entries.emplace_back("refit_stride", std::to_string(cfg.refit_stride));
  entries.emplace_back("select", select_name(cfg.regress_select));
  entries.emplace_back("region_lo", fmt10(cfg.region_lo));
  entries.emplace_back("region_hi", fmt10(cfg.region_hi));
  entries.emplace_back("band", fmt10(cfg.convergence_band));
  entries.emplace_back("threads", std::to_string(cfg.threads));
  entries.emplace_back("out", cfg.out_dir);
  return entries;
}

void write_config_echo(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config echo: " + path);
  for (const auto& [key, value] : config_entries(cfg)) {
    out << key << "=" << value << "\n";
  }
}

void write_trace_csv(const std::vector<TraceRecord>& trace,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace: " + path);
  out << "t,selected,err,q,J,fcp,bound,ier,power\n";
  for (const auto& rec : trace) {
    out << rec.t << ',' << (rec.selected ? 1 : 0) << ',' << fmt_or_empty(rec.err)
        << ',' << fmt10(rec.q) << ',' << rec.j << ',' << fmt10(rec.fcp) << ','
        << fmt10(rec.bound) << ',' << fmt_or_empty(rec.ier) << ','
        << fmt_or_empty(rec.power) << '\n';
  }
}

void write_summary_csv(const std::vector<SummaryRow>& rows,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary: " + path);
  out << "rep,seed,final_fcp,final_q,selection_rate,restarts,t_converge\n";
  for (const auto& row : rows) {
    out << row.rep << ',' << row.seed << ',' << fmt10(row.final_fcp) << ','
        << fmt10(row.final_q) << ',' << fmt10(row.selection_rate) << ','
        << row.restarts << ',' << row.t_converge << '\n';
  }
}

void run_replications(const ExperimentConfig& cfg) {
  validate(cfg);
  require(!cfg.out_dir.empty(), "run_replications: output directory required");
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path out(cfg.out_dir);

  write_config_echo(cfg, (out / "config.txt").string());
  const double q0_ref = reference_threshold(cfg);

  std::vector<SummaryRow> rows(static_cast<std::size_t>(cfg.reps));
  auto run_one = [&](int rep) {
    const std::uint64_t rep_seed = split_seed(cfg.seed, static_cast<std::uint64_t>(rep));
    const RunResult result = run_experiment(cfg, rep_seed);
    const TraceSummary summary =
        summarize(result.trace, q0_ref, cfg.convergence_band);
    write_trace_csv(result.trace,
                    (out / ("trace_rep" + std::to_string(rep) + ".csv")).string());
    if (cfg.baseline && cfg.experiment == Experiment::Classify) {
      const RunResult aci = run_classify_aci_naive(cfg, rep_seed);
      write_trace_csv(aci.trace,
                      (out / ("trace_aci_rep" + std::to_string(rep) + ".csv")).string());
    }
    SummaryRow row;
    row.rep = rep;
    row.seed = rep_seed;
    row.final_fcp = summary.final_fcp;
    row.final_q = summary.final_q;
    row.selection_rate = summary.selection_rate;
    row.restarts = result.restarts;
    row.t_converge = summary.time_to_converge;
    rows[static_cast<std::size_t>(rep)] = row;
  };

  int workers = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, cfg.reps));
  if (workers == 1) {
    for (int rep = 0; rep < cfg.reps; ++rep) run_one(rep);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        for (int rep = w; rep < cfg.reps; rep += workers) run_one(rep);
      });
    }
    for (auto& th : pool) th.join();
  }

  write_summary_csv(rows, (out / "summary.csv").string());
}

}  // namespace selcon
