#include "iscdet/simulator.hpp"

#include "iscdet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace iscdet {

double LoadSchedule::period_s() const
{
    double total = 0.0;
    for (const auto& s : steps)
        total += s.duration_s;
    return total;
}

double LoadSchedule::current_at(double t_s) const
{
    const double period = period_s();
    double phase = std::fmod(t_s, period);
    if (phase < 0.0)
        phase += period;
    double start = 0.0;
    for (const auto& s : steps) {
        if (phase < start + s.duration_s)
            return s.current_a;
        start += s.duration_s;
    }
    return steps.back().current_a;
}

void LoadSchedule::validate() const
{
    if (steps.empty())
        throw ConfigError("schedule: must contain at least one step");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!(steps[i].duration_s > 0.0) || !std::isfinite(steps[i].duration_s))
            throw ConfigError("schedule[" + std::to_string(i) + "]: duration_s must be > 0");
        if (!std::isfinite(steps[i].current_a))
            throw ConfigError("schedule[" + std::to_string(i) + "]: current_a not finite");
    }
}

void validate_fault_script(const FaultScript& faults)
{
    for (std::size_t i = 0; i < faults.size(); ++i) {
        const auto& f = faults[i];
        const std::string at = "faults[" + std::to_string(i) + "]";
        if (!std::isfinite(f.t_on_s) || !std::isfinite(f.t_off_s) || !(f.t_on_s < f.t_off_s))
            throw ConfigError(at + ": t_on_s must be finite and before t_off_s");
        if (!(f.r_short_ohm > 0.0) || !std::isfinite(f.r_short_ohm))
            throw ConfigError(at + ": r_short_ohm must be > 0");
        if (i > 0 && f.t_on_s < faults[i - 1].t_off_s)
            throw ConfigError(at + ": overlaps or precedes the previous fault");
    }
}

void SimConfig::validate() const
{
    if (!(dt_s > 0.0) || !std::isfinite(dt_s))
        throw ConfigError("dt_s: must be > 0");
    if (!(initial_soc >= 0.0 && initial_soc <= 1.0))
        throw ConfigError("initial_soc: must be in [0, 1]");
    if (!(soc_floor >= 0.0 && soc_floor <= 1.0))
        throw ConfigError("soc_floor: must be in [0, 1]");
    if (!(noise_sigma_v >= 0.0) || !std::isfinite(noise_sigma_v))
        throw ConfigError("noise_sigma_v: must be >= 0");
    if (!(noise_sigma_a >= 0.0) || !std::isfinite(noise_sigma_a))
        throw ConfigError("noise_sigma_a: must be >= 0");
    if (!(max_duration_s > 0.0) || !std::isfinite(max_duration_s))
        throw ConfigError("max_duration_s: must be > 0");
}

TerminalState terminal_voltage(double soc, double load_current_a,
                               std::optional<double> r_short_ohm, const CellParams& params)
{
    if (!std::isfinite(load_current_a))
        throw InputError("terminal_voltage: load current is not finite");
    const double ocv = lookup_ocv(soc, params);
    const double r0 = lookup_resistance(soc, params);
    const double open_loaded = ocv + load_current_a * r0;

    if (!r_short_ohm)
        return {open_loaded, 0.0};
    if (!(*r_short_ohm > 0.0))
        throw InputError("terminal_voltage: r_short_ohm must be > 0");

    const double u = open_loaded / (1.0 + r0 / *r_short_ohm);
    return {u, u / *r_short_ohm};
}

SimResult simulate(const LoadSchedule& schedule, const FaultScript& faults,
                   const CellParams& params, const SimConfig& config)
{
    params.validate();
    if (params.ocv_table.empty())
        throw ConfigError("ocv_table: required by the simulator");
    schedule.validate();
    validate_fault_script(faults);
    config.validate();

    std::mt19937_64 rng(config.rng_seed);
    std::normal_distribution<double> unit(0.0, 1.0);

    SimResult out;
    std::vector<bool> applied(faults.size(), false);
    SocState soc{config.initial_soc, 0.0};
    std::size_t next_fault = 0;

    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * config.dt_s;
        if (t > config.max_duration_s)
            break;

        while (next_fault < faults.size() && t >= faults[next_fault].t_off_s)
            ++next_fault;
        std::optional<double> r_short;
        if (next_fault < faults.size() && t >= faults[next_fault].t_on_s) {
            r_short = faults[next_fault].r_short_ohm;
            applied[next_fault] = true;
        }

        const double load = schedule.current_at(t);
        const TerminalState ts = terminal_voltage(soc.soc, load, r_short, params);

        // draw order is fixed (current, then voltage) so a seed pins the stream
        const double n_i = unit(rng) * config.noise_sigma_a;
        const double n_v = unit(rng) * config.noise_sigma_v;

        out.clean_samples.push_back({t, load, ts.voltage_v});
        out.samples.push_back({t, load + n_i, ts.voltage_v + n_v});
        out.true_soc.push_back(soc.soc);
        out.i_short_a.push_back(ts.i_short_a);

        soc = update_soc(soc, load, -ts.i_short_a, config.dt_s, params);
        if (soc.soc <= config.soc_floor)
            break;
    }

    const double t_last = out.samples.back().t_s;
    for (std::size_t i = 0; i < faults.size(); ++i) {
        const auto& f = faults[i];
        std::ostringstream msg;
        if (!applied[i]) {
            msg << "fault " << i << " [" << f.t_on_s << ", " << f.t_off_s
                << ") lies outside simulated time [0, " << t_last << "]; dropped";
            out.warnings.push_back(msg.str());
            continue;
        }
        if (f.t_off_s > t_last + config.dt_s) {
            msg << "fault " << i << " [" << f.t_on_s << ", " << f.t_off_s
                << ") is cut short by the end of simulation at " << t_last;
            out.warnings.push_back(msg.str());
        }
        out.ground_truth.push_back(f);
    }
    return out;
}

LoadSchedule make_dst_schedule(double peak_discharge_a, const CellParams& params)
{
    if (!(peak_discharge_a > 0.0))
        throw InputError("make_dst_schedule: peak_discharge_a must be > 0");

    // (duration, fraction of peak); negative is discharge
    static constexpr std::pair<double, double> shape[] = {
        {16, 0.0},  {28, -0.25}, {12, -0.5}, {8, 0.25},   {16, 0.0},  {24, -0.25}, {12, -0.5},
        {8, 0.25},  {16, 0.0},   {24, -0.25}, {12, -0.5}, {8, 0.25},  {16, 0.0},   {36, -0.25},
        {8, -1.0},  {24, -0.65}, {8, 0.25},  {32, -0.5},  {8, 0.5},   {44, -0.25},
    };

    const double q = params.quantum_a;
    const double peak_quanta = std::max(1.0, std::round(peak_discharge_a / q));

    LoadSchedule sched;
    for (const auto& [dur, frac] : shape)
        sched.steps.push_back({dur, std::round(frac * peak_quanta) * q});
    return sched;
}

} // namespace iscdet
