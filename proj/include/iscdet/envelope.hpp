#pragma once

#include "iscdet/cell_model.hpp"

namespace iscdet {

/// One telemetry tick.
struct Sample {
    double t_s = 0.0;
    double current_a = 0.0;
    double voltage_v = 0.0;
};

/// Quantities derived for the transition from sample k to sample k+1.
/// `t_s` is the timestamp of sample k.
struct EnvelopeFrame {
    double t_s = 0.0;
    double soc = 0.0;
    double r0_ohm = 0.0;
    long i_rate = 0;   // quantized current at k+1, in quanta
    long i_diff = 0;   // i_rate(k+1) - i_rate(k)
    double u_diff_v = 0.0;
    double u_env_v = 0.0;
};

/// round(current / quantum), ties away from zero.
long quantize_current(double current_a, const CellParams& params);

/// Voltage differential envelope for a quantized current step.
///
/// A nonzero step is widened by one quantum in its own direction so that
/// rounding and measurement noise stay inside the bound:
///   i_diff > 0:  r0 * (i_diff + 1) * quantum
///   i_diff < 0:  r0 * (i_diff - 1) * quantum
///   i_diff = 0:  0
double compute_envelope(long i_diff, double r0_ohm, const CellParams& params);

/// Builds the frame for prev -> next and advances `soc` by prev's current
/// over the interval. R0 is looked up at the advanced SOC.
EnvelopeFrame derive_frame(const Sample& prev, const Sample& next, SocState& soc,
                           const CellParams& params);

} // namespace iscdet
