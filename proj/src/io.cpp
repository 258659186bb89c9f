#include "iscdet/io.hpp"

#include "iscdet/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace iscdet {

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string() + ": cannot open");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

namespace {

double number_field(const json& j, const std::string& key)
{
    if (!j.is_object())
        throw ConfigError("expected a JSON object holding '" + key + "'");
    auto it = j.find(key);
    if (it == j.end())
        throw ConfigError(key + ": missing");
    if (!it->is_number())
        throw ConfigError(key + ": expected a number");
    return it->get<double>();
}

double number_field_or(const json& j, const std::string& key, double fallback)
{
    return j.contains(key) ? number_field(j, key) : fallback;
}

bool bool_field_or(const json& j, const std::string& key, bool fallback)
{
    auto it = j.find(key);
    if (it == j.end())
        return fallback;
    if (!it->is_boolean())
        throw ConfigError(key + ": expected true or false");
    return it->get<bool>();
}

std::vector<TablePoint> parse_table(const json& j, const std::string& key)
{
    if (!j.is_array())
        throw ConfigError(key + ": expected an array of [soc, value] pairs");
    std::vector<TablePoint> table;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& row = j[i];
        if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
            throw ConfigError(key + "[" + std::to_string(i) + "]: expected [soc, value]");
        table.push_back({row[0].get<double>(), row[1].get<double>()});
    }
    return table;
}

json table_to_json(const std::vector<TablePoint>& table)
{
    json out = json::array();
    for (const auto& p : table)
        out.push_back({p.soc, p.value});
    return out;
}

void check_keys(const json& j, std::initializer_list<const char*> known, const std::string& what)
{
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            ok = ok || key == k;
        if (!ok)
            throw ConfigError(key + ": unknown field in " + what);
    }
}

json event_to_json(const EscapeEvent& e)
{
    return {{"t_s", e.t_s},
            {"direction", to_string(e.direction)},
            {"u_diff_v", e.u_diff_v},
            {"u_env_v", e.u_env_v},
            {"excess_v", e.excess_v}};
}

} // namespace

CellParams parse_cell_params(const json& j)
{
    if (!j.is_object())
        throw ConfigError("cell parameters: expected a JSON object");
    check_keys(j, {"capacity_ah", "quantum_a", "resistance_table", "ocv_table", "comment"},
               "cell parameters");
    CellParams p;
    p.capacity_ah = number_field(j, "capacity_ah");
    p.quantum_a = number_field(j, "quantum_a");
    if (!j.contains("resistance_table"))
        throw ConfigError("resistance_table: missing");
    p.resistance_table = parse_table(j["resistance_table"], "resistance_table");
    if (j.contains("ocv_table"))
        p.ocv_table = parse_table(j["ocv_table"], "ocv_table");
    p.validate();
    return p;
}

json to_json(const CellParams& params)
{
    json out = {{"capacity_ah", params.capacity_ah},
                {"quantum_a", params.quantum_a},
                {"resistance_table", table_to_json(params.resistance_table)}};
    if (!params.ocv_table.empty())
        out["ocv_table"] = table_to_json(params.ocv_table);
    return out;
}

SimSetup parse_sim_setup(const json& j, const CellParams& params)
{
    if (!j.is_object())
        throw ConfigError("simulation config: expected a JSON object");
    check_keys(j,
               {"dt_s", "initial_soc", "soc_floor", "noise_sigma_v", "noise_sigma_a", "rng_seed",
                "max_duration_s", "schedule", "comment"},
               "simulation config");

    SimSetup s;
    auto& c = s.config;
    c.dt_s = number_field_or(j, "dt_s", c.dt_s);
    c.initial_soc = number_field_or(j, "initial_soc", c.initial_soc);
    c.soc_floor = number_field_or(j, "soc_floor", c.soc_floor);
    c.noise_sigma_v = number_field_or(j, "noise_sigma_v", c.noise_sigma_v);
    c.noise_sigma_a = number_field_or(j, "noise_sigma_a", c.noise_sigma_a);
    c.max_duration_s = number_field_or(j, "max_duration_s", c.max_duration_s);
    if (j.contains("rng_seed")) {
        if (!j["rng_seed"].is_number_unsigned())
            throw ConfigError("rng_seed: expected a non-negative integer");
        c.rng_seed = j["rng_seed"].get<std::uint64_t>();
    }
    c.validate();

    const json sched = j.value("schedule", json::object());
    if (sched.is_object()) {
        check_keys(sched, {"dst_peak_a"}, "schedule");
        const double peak = number_field_or(sched, "dst_peak_a", params.capacity_ah);
        if (!(peak > 0.0))
            throw ConfigError("schedule.dst_peak_a: must be > 0");
        s.schedule = make_dst_schedule(peak, params);
    } else if (sched.is_array()) {
        for (std::size_t i = 0; i < sched.size(); ++i) {
            const auto& row = sched[i];
            if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
                throw ConfigError("schedule[" + std::to_string(i) +
                                  "]: expected [duration_s, current_a]");
            s.schedule.steps.push_back({row[0].get<double>(), row[1].get<double>()});
        }
    } else {
        throw ConfigError("schedule: expected an object or an array");
    }
    s.schedule.validate();
    return s;
}

FaultScript parse_fault_script(const json& j)
{
    if (!j.is_array())
        throw ConfigError("fault script: expected an array of faults");
    FaultScript faults;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string at = "faults[" + std::to_string(i) + "].";
        const auto& f = j[i];
        if (!f.is_object())
            throw ConfigError("faults[" + std::to_string(i) + "]: expected an object");
        auto get = [&](const char* key) {
            try {
                return number_field(f, key);
            } catch (const ConfigError& e) {
                throw ConfigError(at + e.what());
            }
        };
        faults.push_back({get("t_on_s"), get("t_off_s"), get("r_short_ohm")});
    }
    validate_fault_script(faults);
    return faults;
}

json to_json(const FaultScript& faults)
{
    json out = json::array();
    for (const auto& f : faults)
        out.push_back({{"t_on_s", f.t_on_s}, {"t_off_s", f.t_off_s}, {"r_short_ohm", f.r_short_ohm}});
    return out;
}

DetectorSetup parse_detector_setup(const json& j)
{
    if (!j.is_object())
        throw ConfigError("detector config: expected a JSON object");
    check_keys(j,
               {"epsilon_v", "pairing_window_s", "emit_unpaired", "keep_traces", "voltage_min_v",
                "voltage_max_v", "initial_soc", "comment"},
               "detector config");
    DetectorSetup s;
    auto& c = s.config;
    c.epsilon_v = number_field_or(j, "epsilon_v", c.epsilon_v);
    c.pairing_window_s = number_field_or(j, "pairing_window_s", c.pairing_window_s);
    c.emit_unpaired = bool_field_or(j, "emit_unpaired", c.emit_unpaired);
    c.keep_traces = bool_field_or(j, "keep_traces", c.keep_traces);
    c.voltage_min_v = number_field_or(j, "voltage_min_v", c.voltage_min_v);
    c.voltage_max_v = number_field_or(j, "voltage_max_v", c.voltage_max_v);
    s.initial_soc = number_field_or(j, "initial_soc", s.initial_soc);
    c.validate();
    if (!(s.initial_soc >= 0.0 && s.initial_soc <= 1.0))
        throw ConfigError("initial_soc: must be in [0, 1]");
    return s;
}

json to_json(const DetectionReport& report)
{
    json faults = json::array();
    for (const auto& f : report.faults)
        faults.push_back({{"t_start_s", f.t_start_s},
                          {"t_end_s", f.t_end_s},
                          {"duration_s", f.duration_s()},
                          {"drop_excess_v", f.drop.excess_v},
                          {"recovery_excess_v", f.recovery.excess_v}});
    json unpaired = json::array();
    for (const auto& e : report.unpaired)
        unpaired.push_back(event_to_json(e));

    json out = {{"summary",
                 {{"n_samples", report.n_samples},
                  {"n_escapes", report.escapes.size()},
                  {"n_faults", report.faults.size()}}},
                {"faults", std::move(faults)},
                {"unpaired", std::move(unpaired)}};

    if (!report.frames.empty()) {
        json t = json::array(), d = json::array(), e = json::array(), m = json::array();
        for (const auto& f : report.frames) {
            t.push_back(f.t_s);
            d.push_back(f.u_diff_v);
            e.push_back(f.u_env_v);
            m.push_back(f.u_env_v - f.u_diff_v);
        }
        out["traces"] = {{"t_s", std::move(t)},
                         {"u_diff_v", std::move(d)},
                         {"u_env_v", std::move(e)},
                         {"env_minus_diff_v", std::move(m)}};
    }
    return out;
}

std::vector<DetectedSpan> parse_report_faults(const json& j)
{
    if (!j.is_object() || !j.contains("faults") || !j["faults"].is_array())
        throw ConfigError("report: missing 'faults' array");
    std::vector<DetectedSpan> out;
    for (std::size_t i = 0; i < j["faults"].size(); ++i) {
        const auto& f = j["faults"][i];
        try {
            out.push_back({number_field(f, "t_start_s"), number_field(f, "t_end_s")});
        } catch (const ConfigError& e) {
            throw ConfigError("faults[" + std::to_string(i) + "]." + e.what());
        }
    }
    return out;
}

json to_json(const EvalResult& r)
{
    json matches = json::array();
    for (const auto& m : r.matches)
        matches.push_back({{"detected", m.detected_index},
                           {"truth", m.truth_index},
                           {"onset_latency_s", m.onset_latency_s}});
    json out = {{"n_true_faults", r.n_true_faults},
                {"n_detected", r.n_detected},
                {"n_matched", r.n_matched},
                {"precision", r.precision},
                {"recall", r.recall},
                {"mean_onset_latency_s", nullptr},
                {"matches", std::move(matches)}};
    if (r.mean_onset_latency_s)
        out["mean_onset_latency_s"] = *r.mean_onset_latency_s;
    return out;
}

std::string format_number(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_samples_csv(std::ostream& os, std::span<const Sample> samples)
{
    os << "t_s,current_a,voltage_v\n";
    for (const auto& s : samples)
        os << format_number(s.t_s) << ',' << format_number(s.current_a) << ','
           << format_number(s.voltage_v) << '\n';
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, std::size_t line_no, const std::string& column)
{
    const std::string s = trim(raw);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
        throw InputError("line " + std::to_string(line_no) + ": column " + column +
                         ": not a number: '" + s + "'");
    return v;
}

} // namespace

std::vector<Sample> read_samples_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
        throw InputError("CSV is empty: expected header t_s,current_a,voltage_v");

    const auto header = split_csv_line(line);
    long col_t = -1, col_i = -1, col_v = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string h = trim(header[c]);
        if (h == "t_s") col_t = static_cast<long>(c);
        else if (h == "current_a") col_i = static_cast<long>(c);
        else if (h == "voltage_v") col_v = static_cast<long>(c);
    }
    for (auto [col, name] : {std::pair{col_t, "t_s"}, {col_i, "current_a"}, {col_v, "voltage_v"}})
        if (col < 0)
            throw InputError(std::string("CSV header: missing column ") + name);

    const auto width = static_cast<std::size_t>(std::max({col_t, col_i, col_v})) + 1;
    std::vector<Sample> samples;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto cells = split_csv_line(line);
        if (cells.size() < width)
            throw InputError("line " + std::to_string(line_no) + ": expected at least " +
                             std::to_string(width) + " columns");
        Sample s{parse_cell(cells[col_t], line_no, "t_s"),
                 parse_cell(cells[col_i], line_no, "current_a"),
                 parse_cell(cells[col_v], line_no, "voltage_v")};
        if (!samples.empty() && !(s.t_s > samples.back().t_s))
            throw InputError("line " + std::to_string(line_no) +
                             ": t_s not strictly increasing (" + format_number(s.t_s) +
                             " after " + format_number(samples.back().t_s) + ")");
        samples.push_back(s);
    }
    return samples;
}

void write_traces_csv(std::ostream& os, std::span<const EnvelopeFrame> frames)
{
    os << "t_s,u_diff_v,u_env_v,env_minus_diff_v\n";
    for (const auto& f : frames)
        os << format_number(f.t_s) << ',' << format_number(f.u_diff_v) << ','
           << format_number(f.u_env_v) << ',' << format_number(f.u_env_v - f.u_diff_v) << '\n';
}

void write_frames_csv(std::ostream& os, std::span<const EnvelopeFrame> frames)
{
    os << "t_s,soc,r0_ohm,i_rate,i_diff,u_diff_v,u_env_v\n";
    for (const auto& f : frames)
        os << format_number(f.t_s) << ',' << format_number(f.soc) << ','
           << format_number(f.r0_ohm) << ',' << f.i_rate << ',' << f.i_diff << ','
           << format_number(f.u_diff_v) << ',' << format_number(f.u_env_v) << '\n';
}

} // namespace iscdet
