#pragma once

#include <span>
#include <vector>

namespace iscdet {

/// One knot of a piecewise-linear table over state of charge.
struct TablePoint {
    double soc;
    double value;
};

/// Piecewise-linear interpolation over knots sorted by strictly increasing soc.
/// Queries outside the knot range take the nearest boundary value.
double interpolate_clamped(std::span<const TablePoint> table, double soc);

struct CellParams {
    double capacity_ah = 40.0;
    /// 0.05C current quantum used to round measured current.
    double quantum_a = 2.0;
    /// Internal resistance R0 [ohm] versus SOC.
    std::vector<TablePoint> resistance_table;
    /// Open-circuit voltage [V] versus SOC. Only the simulator reads it.
    std::vector<TablePoint> ocv_table;

    /// Throws ConfigError naming the first violated invariant.
    void validate() const;
};

struct SocState {
    double soc = 1.0;
    double t_last = 0.0;
};

/// Coulomb counting step. Discharge current is negative.
///
/// `fault_current_a` is the (signed) internal short current; the detector
/// cannot observe it and always passes zero. The result is clamped to [0, 1].
SocState update_soc(const SocState& state, double current_a, double fault_current_a,
                    double dt_s, const CellParams& params);

/// R0 at the given SOC, linear between table knots, clamped outside them.
double lookup_resistance(double soc, const CellParams& params);

double lookup_ocv(double soc, const CellParams& params);

} // namespace iscdet
