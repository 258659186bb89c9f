#pragma once

// File formats shared by the CLI and the tests: JSON configs, the
// DetectionReport/EvalResult documents, and the CSV sample/trace streams.

#include "iscdet/cell_model.hpp"
#include "iscdet/detector.hpp"
#include "iscdet/eval.hpp"
#include "iscdet/simulator.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace iscdet {

using json = nlohmann::json;

/// Reads and parses a JSON file. Unreadable or malformed files raise ConfigError.
json read_json_file(const std::filesystem::path& path);

// { "capacity_ah", "quantum_a", "resistance_table": [[soc, r0], ...], "ocv_table": [[soc, ocv], ...] }
CellParams parse_cell_params(const json& j);
json to_json(const CellParams& params);

struct SimSetup {
    SimConfig config;
    LoadSchedule schedule;
};

/// SimConfig fields plus "schedule", either {"dst_peak_a": A} or [[duration_s, current_a], ...].
/// Omitted fields keep their defaults; the default schedule is DST at a 1C peak.
SimSetup parse_sim_setup(const json& j, const CellParams& params);

/// [{"t_on_s", "t_off_s", "r_short_ohm"}, ...]; same layout for scripts and ground truth.
FaultScript parse_fault_script(const json& j);
json to_json(const FaultScript& faults);

struct DetectorSetup {
    DetectorConfig config;
    double initial_soc = 1.0;
};

DetectorSetup parse_detector_setup(const json& j);

json to_json(const DetectionReport& report);
/// Fault bounds from a report document.
std::vector<DetectedSpan> parse_report_faults(const json& j);

json to_json(const EvalResult& result);

/// Shortest decimal that round-trips; locale independent.
std::string format_number(double v);

// Header "t_s,current_a,voltage_v".
void write_samples_csv(std::ostream& os, std::span<const Sample> samples);
/// Columns are located by header name. Errors cite the 1-based line number.
std::vector<Sample> read_samples_csv(std::istream& is);

// Header "t_s,u_diff_v,u_env_v,env_minus_diff_v".
void write_traces_csv(std::ostream& os, std::span<const EnvelopeFrame> frames);
// Every frame field, for current/differential plots.
void write_frames_csv(std::ostream& os, std::span<const EnvelopeFrame> frames);

} // namespace iscdet
