#pragma once

#include <string>
#include <utility>
#include <vector>

#include "selcon/metrics.hpp"
#include "selcon/runner.hpp"

// File surface of the harness: flat key=value config files, per-replication
// trace CSVs, and the cross-replication summary CSV.

namespace selcon {

std::string experiment_name(Experiment experiment);
Experiment experiment_from_name(const std::string& name);
std::string mode_name(StatisticMode mode);

// One key per line, '#' starts a comment. Unknown keys are rejected.
void apply_config_file(ExperimentConfig& config, const std::string& path);
bool apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

// The effective configuration, echoed as the same key=value format.
std::vector<std::pair<std::string, std::string>> config_entries(
    const ExperimentConfig& config);
void write_config_echo(const ExperimentConfig& config, const std::string& path);

// Header: t,selected,err,q,J,fcp,bound,ier,power. Values carry 10 significant
// digits; err is empty when not selected, ier/power outside logging strides.
void write_trace_csv(const std::vector<TraceRecord>& trace,
                     const std::string& path);

struct SummaryRow {
  int rep = 0;
  std::uint64_t seed = 0;
  double final_fcp = 0.0;
  double final_q = 0.0;
  double selection_rate = 0.0;
  int restarts = 0;
  std::int64_t t_converge = -1;
};

void write_summary_csv(const std::vector<SummaryRow>& rows,
                       const std::string& path);

// Runs all replications (concurrently when configured), writing
// trace_rep<k>.csv (+ trace_aci_rep<k>.csv when the baseline is on),
// summary.csv and config.txt under config.out_dir.
void run_replications(const ExperimentConfig& config);

}  // namespace selcon
