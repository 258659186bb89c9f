#include "iscdet/envelope.hpp"

#include "iscdet/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace iscdet {

long quantize_current(double current_a, const CellParams& params)
{
    if (!std::isfinite(current_a))
        throw InputError("quantize_current: current is not finite");
    const double ratio = std::round(current_a / params.quantum_a); // half away from zero
    if (std::abs(ratio) > static_cast<double>(std::numeric_limits<long>::max() / 2))
        throw InputError("quantize_current: current out of range");
    return static_cast<long>(ratio);
}

double compute_envelope(long i_diff, double r0_ohm, const CellParams& params)
{
    if (i_diff == 0)
        return 0.0;
    const double widened = i_diff > 0 ? static_cast<double>(i_diff) + 1.0
                                      : static_cast<double>(i_diff) - 1.0;
    return r0_ohm * widened * params.quantum_a;
}

EnvelopeFrame derive_frame(const Sample& prev, const Sample& next, SocState& soc,
                           const CellParams& params)
{
    if (!std::isfinite(prev.t_s) || !std::isfinite(next.t_s) || !(next.t_s > prev.t_s))
        throw InputError("derive_frame: time not strictly increasing at t=" +
                         std::to_string(next.t_s));
    if (!std::isfinite(prev.voltage_v) || !std::isfinite(next.voltage_v))
        throw InputError("derive_frame: voltage is not finite at t=" + std::to_string(next.t_s));

    const long rate_prev = quantize_current(prev.current_a, params);
    const long rate_next = quantize_current(next.current_a, params);

    soc = update_soc(soc, prev.current_a, 0.0, next.t_s - prev.t_s, params);

    EnvelopeFrame f;
    f.t_s = prev.t_s;
    f.soc = soc.soc;
    f.r0_ohm = lookup_resistance(soc.soc, params);
    f.i_rate = rate_next;
    f.i_diff = rate_next - rate_prev;
    f.u_diff_v = next.voltage_v - prev.voltage_v;
    f.u_env_v = compute_envelope(f.i_diff, f.r0_ohm, params);
    return f;
}

} // namespace iscdet
