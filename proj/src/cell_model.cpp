#include "iscdet/cell_model.hpp"

#include "iscdet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace iscdet {

double interpolate_clamped(std::span<const TablePoint> table, double soc)
{
    if (table.size() < 2)
        throw ConfigError("interpolation table needs at least 2 entries");
    if (!std::isfinite(soc))
        throw InputError("interpolation query is not finite");

    if (soc <= table.front().soc)
        return table.front().value;
    if (soc >= table.back().soc)
        return table.back().value;

    // first knot with knot.soc > soc; never begin() or end() after the clamps
    auto hi = std::upper_bound(table.begin(), table.end(), soc,
                               [](double s, const TablePoint& p) { return s < p.soc; });
    auto lo = hi - 1;
    const double w = (soc - lo->soc) / (hi->soc - lo->soc);
    return lo->value + w * (hi->value - lo->value);
}

namespace {

void check_table(const std::vector<TablePoint>& table, const std::string& name,
                 bool values_increasing)
{
    if (table.size() < 2)
        throw ConfigError(name + ": needs at least 2 entries");
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& p = table[i];
        if (!std::isfinite(p.soc) || !std::isfinite(p.value))
            throw ConfigError(name + "[" + std::to_string(i) + "]: not finite");
        if (p.soc < 0.0 || p.soc > 1.0)
            throw ConfigError(name + "[" + std::to_string(i) + "]: soc outside [0, 1]");
        if (i > 0 && !(p.soc > table[i - 1].soc))
            throw ConfigError(name + "[" + std::to_string(i) + "]: soc not strictly increasing");
        if (values_increasing && i > 0 && !(p.value > table[i - 1].value))
            throw ConfigError(name + "[" + std::to_string(i) + "]: value not strictly increasing");
    }
}

} // namespace

void CellParams::validate() const
{
    if (!(capacity_ah > 0.0) || !std::isfinite(capacity_ah))
        throw ConfigError("capacity_ah: must be a positive number");
    if (!(quantum_a > 0.0) || !std::isfinite(quantum_a))
        throw ConfigError("quantum_a: must be a positive number");
    check_table(resistance_table, "resistance_table", false);
    for (std::size_t i = 0; i < resistance_table.size(); ++i)
        if (!(resistance_table[i].value > 0.0))
            throw ConfigError("resistance_table[" + std::to_string(i) + "]: r0_ohm must be > 0");
    // the detector never reads the OCV table, so an empty one is allowed
    if (!ocv_table.empty())
        check_table(ocv_table, "ocv_table", true);
}

SocState update_soc(const SocState& state, double current_a, double fault_current_a,
                    double dt_s, const CellParams& params)
{
    if (!(dt_s > 0.0) || !std::isfinite(dt_s))
        throw InputError("update_soc: dt_s must be positive, got " + std::to_string(dt_s));
    if (!std::isfinite(current_a) || !std::isfinite(fault_current_a))
        throw InputError("update_soc: current is not finite");

    const double delta = (current_a + fault_current_a) * dt_s / (3600.0 * params.capacity_ah);
    return SocState{std::clamp(state.soc + delta, 0.0, 1.0), state.t_last + dt_s};
}

double lookup_resistance(double soc, const CellParams& params)
{
    return interpolate_clamped(params.resistance_table, soc);
}

double lookup_ocv(double soc, const CellParams& params)
{
    return interpolate_clamped(params.ocv_table, soc);
}

} // namespace iscdet
