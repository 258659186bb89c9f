#pragma once

#include "iscdet/cell_model.hpp"
#include "iscdet/envelope.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace iscdet {

struct LoadStep {
    double duration_s;
    double current_a; // discharge negative
};

/// Periodic step load; cycled for as long as the simulation runs.
struct LoadSchedule {
    std::vector<LoadStep> steps;

    double period_s() const;
    /// Load applied over [t, t + dt). Step k covers [start_k, start_k + duration_k).
    double current_at(double t_s) const;
    void validate() const;
};

/// An internal short of resistance r_short_ohm, active for ticks with
/// t_on_s <= t < t_off_s.
struct FaultSpec {
    double t_on_s;
    double t_off_s;
    double r_short_ohm;
};

using FaultScript = std::vector<FaultSpec>;

void validate_fault_script(const FaultScript& faults);

struct SimConfig {
    double dt_s = 1.0;
    double initial_soc = 1.0;
    double soc_floor = 0.02;
    double noise_sigma_v = 0.5e-3;
    double noise_sigma_a = 0.05;
    std::uint64_t rng_seed = 1;
    /// Hard stop so schedules without net discharge still terminate.
    double max_duration_s = 86400.0;

    void validate() const;
};

struct TerminalState {
    double voltage_v;
    double i_short_a; // positive internal drain
};

/// Zeroth-order equivalent circuit U = OCV + I*R0. With a short of
/// resistance R_s across the terminals the short current U/R_s flows
/// through R0 as well, so U = (OCV + I*R0) / (1 + R0/R_s).
TerminalState terminal_voltage(double soc, double load_current_a,
                               std::optional<double> r_short_ohm, const CellParams& params);

struct SimResult {
    std::vector<Sample> samples;       // noisy, what a BMS would log
    std::vector<Sample> clean_samples; // same ticks without sensor noise
    std::vector<double> true_soc;      // SOC at each tick, before that tick's update
    std::vector<double> i_short_a;     // short current at each tick
    FaultScript ground_truth;          // scripted faults active on at least one tick
    std::vector<std::string> warnings;
};

SimResult simulate(const LoadSchedule& schedule, const FaultScript& faults,
                   const CellParams& params, const SimConfig& config);

/// DST-style periodic profile: rests, discharge steps at several levels,
/// brief regenerative charge pulses and one full-peak burst, 360 s per cycle.
/// Every step is a whole number of current quanta; the peak itself is
/// rounded to the nearest quantum multiple (at least one quantum).
LoadSchedule make_dst_schedule(double peak_discharge_a, const CellParams& params);

} // namespace iscdet
