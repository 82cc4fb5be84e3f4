#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvshot/attacks.hpp"
#include "cvshot/estimator.hpp"
#include "cvshot/params.hpp"
#include "cvshot/schedule.hpp"

namespace cvshot {

/// A full run description as read from a config file. Physical quantities
/// carry explicit unit suffixes in the file (v_a_snu, v_el_snu, gain_mv2...).
struct RunConfig {
    SystemParams system;
    AttenuationSchedule schedule;
    AttackConfig attack;
    GateThresholds thresholds;
    std::string trace_path;   // optional defaults for the CLI
    std::string report_path;
};

RunConfig parse_run_config(const std::string& path);
RunConfig parse_run_config_text(const std::string& text, const std::string& origin = "<config>");
std::string run_config_to_json(const RunConfig& config);

/// Pulse trace CSV, header `index,quadrature,atten_index,alice_value,
/// bob_value_volts`, values at 17 significant digits so that write-then-read
/// is exact.
void write_trace_csv(const std::string& path, const std::vector<PulseRecord>& records);
std::vector<PulseRecord> read_trace_csv(const std::string& path);

/// Group summary CSV (per-group variances) for large runs:
/// `quadrature,atten_index,ratio,count,signal_var,noise_var,unit`.
void write_group_summary_csv(const std::string& path, const std::vector<GroupStats>& stats,
                             const AttenuationSchedule& schedule);
std::vector<GroupStats> read_group_summary_csv(const std::string& path,
                                               std::vector<double>* ratios_out = nullptr);

bool is_group_summary_csv(const std::string& path);

/// Gate report, JSON, field names mirroring GateVerdict.
void write_report_json(const std::string& path, const BlockVerdict& verdict,
                       const GateThresholds& thresholds);
BlockVerdict read_report_json(const std::string& path);

/// Run manifest: seed and a content hash of the config for reproducibility.
void write_manifest_json(const std::string& path, const RunConfig& config,
                         const std::string& trace_path);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace cvshot
