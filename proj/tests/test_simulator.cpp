#include "doctest.h"

#include "iscdet/errors.hpp"
#include "iscdet/simulator.hpp"
#include "test_support.hpp"

#include <cmath>
#include <random>

using namespace iscdet;
using iscdet::testing::default_cell;
using iscdet::testing::flat_cell;

namespace {

// U = OCV + (I - U/R_s) * R0 by plain substitution, starting from the healthy voltage.
double fixed_point_voltage(double ocv, double current, double r0, double r_short, int iterations)
{
    double u = ocv + current * r0;
    for (int i = 0; i < iterations; ++i)
        u = ocv + (current - u / r_short) * r0;
    return u;
}

CellParams cell_with_ocv_at_half(double ocv_mid, double r0, double capacity_ah)
{
    CellParams p = flat_cell(r0, capacity_ah);
    p.ocv_table = {{0.0, ocv_mid - 0.1}, {1.0, ocv_mid + 0.1}};
    return p;
}

SimConfig quiet()
{
    SimConfig c;
    c.noise_sigma_a = 0.0;
    c.noise_sigma_v = 0.0;
    return c;
}

} // namespace

TEST_CASE("terminal_voltage examples")
{
    const CellParams p = cell_with_ocv_at_half(3.8, 0.002, 40.0);

    auto open = terminal_voltage(0.5, 0.0, std::nullopt, p);
    CHECK(open.voltage_v == doctest::Approx(3.8).epsilon(1e-14));
    CHECK(open.i_short_a == 0.0);

    CHECK(terminal_voltage(0.5, -40.0, std::nullopt, p).voltage_v ==
          doctest::Approx(3.72).epsilon(1e-14));

    auto shorted = terminal_voltage(0.5, 0.0, 3.8, p);
    CHECK(std::abs(shorted.voltage_v - 3.798001) < 1e-5);
    CHECK(shorted.i_short_a == doctest::Approx(0.9995).epsilon(1e-4));
    CHECK(std::abs(shorted.voltage_v - fixed_point_voltage(3.8, 0.0, 0.002, 3.8, 50)) < 1e-12);

    CHECK_THROWS_AS(terminal_voltage(0.5, 0.0, 0.0, p), InputError);
    CHECK_THROWS_AS(terminal_voltage(0.5, 0.0, -1.0, p), InputError);
}

TEST_CASE("closed-form faulted voltage matches the fixed-point solve")
{
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> ocv(3.0, 4.2), cur(-80.0, 40.0), r0(0.0005, 0.01),
        rs_log(std::log(0.1), std::log(100.0));
    for (int i = 0; i < 1000; ++i) {
        const double o = ocv(rng), c = cur(rng), r = r0(rng), rs = std::exp(rs_log(rng));
        const CellParams p = cell_with_ocv_at_half(o, r, 40.0);
        const double closed = terminal_voltage(0.5, c, rs, p).voltage_v;
        REQUIRE(std::abs(closed - fixed_point_voltage(o, c, r, rs, 50)) < 1e-12);
    }
}

TEST_CASE("make_dst_schedule construction")
{
    const CellParams p = default_cell();
    const LoadSchedule s = make_dst_schedule(40.0, p);
    CHECK(s.period_s() == 360.0);

    double most_negative = 0.0;
    bool has_charge = false, has_rest = false;
    for (const auto& step : s.steps) {
        const double ratio = step.current_a / p.quantum_a;
        CHECK(ratio == std::round(ratio));
        most_negative = std::min(most_negative, step.current_a);
        has_charge = has_charge || step.current_a > 0.0;
        has_rest = has_rest || step.current_a == 0.0;
    }
    CHECK(most_negative == -40.0);
    CHECK(has_charge);
    CHECK(has_rest);

    // a peak that is not a quantum multiple is rounded to one
    const LoadSchedule odd = make_dst_schedule(41.5, p);
    for (const auto& step : odd.steps)
        CHECK(step.current_a / p.quantum_a == std::round(step.current_a / p.quantum_a));

    CHECK_THROWS_AS(make_dst_schedule(0.0, p), InputError);
}

TEST_CASE("LoadSchedule::current_at steps on boundaries and cycles")
{
    LoadSchedule s{{{10.0, -4.0}, {5.0, 2.0}}};
    CHECK(s.current_at(0.0) == -4.0);
    CHECK(s.current_at(9.0) == -4.0);
    CHECK(s.current_at(10.0) == 2.0);
    CHECK(s.current_at(14.0) == 2.0);
    CHECK(s.current_at(15.0) == -4.0);
    CHECK(s.current_at(31.0) == -4.0);
}

TEST_CASE("full DST discharge takes a few hours")
{
    const CellParams p = default_cell();
    const auto sim = simulate(make_dst_schedule(40.0, p), {}, p, quiet());
    const double hours = sim.samples.back().t_s / 3600.0;
    CHECK(hours > 3.0);
    CHECK(hours < 4.5);
    CHECK(sim.true_soc.back() > 0.02);
    CHECK(sim.true_soc.back() < 0.03);
}

TEST_CASE("rest with no faults and no noise holds the open-circuit voltage")
{
    const CellParams p = default_cell();
    SimConfig c = quiet();
    c.initial_soc = 0.6;
    c.max_duration_s = 500.0;
    const auto sim = simulate(LoadSchedule{{{100.0, 0.0}}}, {}, p, c);
    REQUIRE(sim.samples.size() == 501);
    for (std::size_t i = 0; i < sim.samples.size(); ++i) {
        CHECK(sim.samples[i].voltage_v == lookup_ocv(0.6, p));
        CHECK(sim.true_soc[i] == 0.6);
    }
}

TEST_CASE("single fault at rest drops the voltage by about R0 * I_short")
{
    const CellParams p = cell_with_ocv_at_half(3.8, 0.002, 1e6);
    SimConfig c = quiet();
    c.initial_soc = 0.5;
    c.max_duration_s = 200.0;
    const auto sim = simulate(LoadSchedule{{{1000.0, 0.0}}}, {{100.0, 130.0, 1.9}}, p, c);

    const auto& s = sim.samples;
    const double drop = s[100].voltage_v - s[99].voltage_v;
    const double recovery = s[130].voltage_v - s[129].voltage_v;
    CHECK(drop == doctest::Approx(-0.004).epsilon(1e-3));
    CHECK(recovery == doctest::Approx(0.004).epsilon(1e-3));
    CHECK(sim.i_short_a[99] == 0.0);
    CHECK(sim.i_short_a[100] > 0.0);
    CHECK(sim.i_short_a[129] > 0.0);
    CHECK(sim.i_short_a[130] == 0.0);
    REQUIRE(sim.ground_truth.size() == 1);
    CHECK(sim.warnings.empty());
}

TEST_CASE("fault signature under constant load is a symmetric jump pair")
{
    // with a huge capacity the SOC barely moves, so the recovery mirrors the drop
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> rs(0.1, 5.0);
    std::uniform_int_distribution<int> load_quanta(-20, 0);
    for (int trial = 0; trial < 50; ++trial) {
        const CellParams p = cell_with_ocv_at_half(3.7, 0.003, 1e9);
        SimConfig c = quiet();
        c.initial_soc = 0.5;
        c.max_duration_s = 100.0;
        const double load = 2.0 * load_quanta(rng);
        const auto sim = simulate(LoadSchedule{{{1000.0, load}}}, {{40.0, 60.0, rs(rng)}}, p, c);
        const double drop = sim.samples[40].voltage_v - sim.samples[39].voltage_v;
        const double rec = sim.samples[60].voltage_v - sim.samples[59].voltage_v;
        REQUIRE(drop < 0.0);
        REQUIRE(std::abs(drop + rec) < 1e-9);
    }
}

TEST_CASE("terminal voltage never exceeds OCV on discharge without faults")
{
    const CellParams p = default_cell();
    LoadSchedule s;
    for (const auto& step : make_dst_schedule(40.0, p).steps)
        s.steps.push_back({step.duration_s, std::min(step.current_a, 0.0)});
    SimConfig c = quiet();
    c.max_duration_s = 4000.0;
    const auto sim = simulate(s, {}, p, c);
    for (std::size_t i = 0; i < sim.samples.size(); ++i)
        REQUIRE(sim.samples[i].voltage_v <= lookup_ocv(sim.true_soc[i], p));
}

TEST_CASE("fault current drains the true SOC")
{
    const CellParams p = cell_with_ocv_at_half(3.8, 0.002, 1.0);
    SimConfig c = quiet();
    c.initial_soc = 0.5;
    c.max_duration_s = 10.0;
    const auto healthy = simulate(LoadSchedule{{{100.0, 0.0}}}, {}, p, c);
    const auto shorted = simulate(LoadSchedule{{{100.0, 0.0}}}, {{0.0, 100.0, 1.0}}, p, c);
    CHECK(healthy.true_soc.back() == 0.5);
    CHECK(shorted.true_soc.back() < 0.5);
    const double expected = 0.5 - shorted.i_short_a[0] / 3600.0;
    CHECK(shorted.true_soc[1] == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("seeded noise is reproducible and seed-dependent")
{
    const CellParams p = default_cell();
    SimConfig c;
    c.max_duration_s = 2000.0;
    c.rng_seed = 99;
    const FaultScript f{{500, 530, 0.4}};
    const auto a = simulate(make_dst_schedule(40.0, p), f, p, c);
    const auto b = simulate(make_dst_schedule(40.0, p), f, p, c);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        REQUIRE(a.samples[i].current_a == b.samples[i].current_a);
        REQUIRE(a.samples[i].voltage_v == b.samples[i].voltage_v);
    }
    c.rng_seed = 100;
    const auto other = simulate(make_dst_schedule(40.0, p), f, p, c);
    CHECK(other.samples[10].voltage_v != a.samples[10].voltage_v);
    // noise never touches the clean channel
    CHECK(other.clean_samples[10].voltage_v == a.clean_samples[10].voltage_v);
}

TEST_CASE("ground truth keeps each fault that touched simulated time exactly once")
{
    const CellParams p = default_cell();
    SimConfig c = quiet();
    c.max_duration_s = 1000.0;
    const FaultScript f{{100, 130, 0.5}, {990, 1020, 0.5}, {2000, 2030, 0.5}, {3000, 3030, 0.5}};
    const auto sim = simulate(make_dst_schedule(40.0, p), f, p, c);
    REQUIRE(sim.ground_truth.size() == 2);
    CHECK(sim.ground_truth[0].t_on_s == 100.0);
    CHECK(sim.ground_truth[1].t_on_s == 990.0);
    REQUIRE(sim.warnings.size() == 3); // one truncated, two dropped
    CHECK(sim.warnings[0].find("cut short") != std::string::npos);
    CHECK(sim.warnings[1].find("outside") != std::string::npos);
}

TEST_CASE("simulate validates its inputs")
{
    const CellParams p = default_cell();
    const LoadSchedule s = make_dst_schedule(40.0, p);
    SimConfig c;
    c.dt_s = 0.0;
    CHECK_THROWS_WITH_AS(simulate(s, {}, p, c), doctest::Contains("dt_s"), ConfigError);
    CHECK_THROWS_AS(simulate(s, {{10, 5, 1.0}}, p, SimConfig{}), ConfigError);
    CHECK_THROWS_AS(simulate(s, {{10, 50, 1.0}, {40, 80, 1.0}}, p, SimConfig{}), ConfigError);
    CHECK_THROWS_AS(simulate(s, {{10, 50, -1.0}}, p, SimConfig{}), ConfigError);
    CHECK_THROWS_AS(simulate(LoadSchedule{}, {}, p, SimConfig{}), ConfigError);

    CellParams no_ocv = p;
    no_ocv.ocv_table.clear();
    CHECK_THROWS_WITH_AS(simulate(s, {}, no_ocv, SimConfig{}), doctest::Contains("ocv_table"),
                         ConfigError);
}
