// iscdet: simulate cells with injected internal shorts, run the envelope
// detector over CSV logs, and score detections against ground truth.
//
// Exit codes: 0 success, 1 input or configuration error, 2 internal error.

#include "iscdet/detector.hpp"
#include "iscdet/errors.hpp"
#include "iscdet/eval.hpp"
#include "iscdet/io.hpp"
#include "iscdet/simulator.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <string>

namespace {

using namespace iscdet;

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError(path + ": cannot open for writing");
    return out;
}

void finish_out(std::ofstream& out, const std::string& path)
{
    out.flush();
    if (!out)
        throw InputError(path + ": write failed");
}

struct SimulateArgs {
    std::string params, sim, faults, out_csv, out_truth;
};

int cmd_simulate(const SimulateArgs& a)
{
    const CellParams params = parse_cell_params(read_json_file(a.params));
    const SimSetup setup = parse_sim_setup(read_json_file(a.sim), params);
    FaultScript faults;
    if (!a.faults.empty())
        faults = parse_fault_script(read_json_file(a.faults));

    const SimResult sim = simulate(setup.schedule, faults, params, setup.config);
    for (const auto& w : sim.warnings)
        std::cerr << "warning: " << w << '\n';

    auto csv = open_out(a.out_csv);
    write_samples_csv(csv, sim.samples);
    finish_out(csv, a.out_csv);

    auto truth = open_out(a.out_truth);
    truth << to_json(sim.ground_truth).dump(2) << '\n';
    finish_out(truth, a.out_truth);

    std::cerr << "simulated " << sim.samples.size() << " samples, "
              << sim.ground_truth.size() << " faults\n";
    return 0;
}

struct DetectArgs {
    std::string params, config, in, report, traces, frames;
};

int cmd_detect(const DetectArgs& a)
{
    const CellParams params = parse_cell_params(read_json_file(a.params));
    DetectorSetup setup;
    if (!a.config.empty())
        setup = parse_detector_setup(read_json_file(a.config));
    if (!a.traces.empty() || !a.frames.empty())
        setup.config.keep_traces = true;

    std::ifstream in(a.in);
    if (!in)
        throw InputError(a.in + ": cannot open");
    std::vector<Sample> samples;
    try {
        samples = read_samples_csv(in);
    } catch (const InputError& e) {
        throw InputError(a.in + ": " + e.what());
    }

    const DetectionReport report = run_detector(samples, setup.initial_soc, params, setup.config);

    auto rep = open_out(a.report);
    rep << to_json(report).dump(2) << '\n';
    finish_out(rep, a.report);

    if (!a.traces.empty()) {
        auto t = open_out(a.traces);
        write_traces_csv(t, report.frames);
        finish_out(t, a.traces);
    }
    if (!a.frames.empty()) {
        auto f = open_out(a.frames);
        write_frames_csv(f, report.frames);
        finish_out(f, a.frames);
    }

    std::cerr << report.n_samples << " samples, " << report.escapes.size() << " escapes, "
              << report.faults.size() << " faults, " << report.unpaired.size()
              << " unpaired escapes\n";
    for (const auto& f : report.faults)
        std::cerr << "fault: " << format_number(f.t_start_s) << " s -> "
                  << format_number(f.t_end_s) << " s (" << format_number(f.duration_s())
                  << " s)\n";
    return 0;
}

struct EvalArgs {
    std::string report, truth;
};

int cmd_eval(const EvalArgs& a)
{
    const auto detected = parse_report_faults(read_json_file(a.report));
    const auto truth = parse_fault_script(read_json_file(a.truth));
    std::cout << to_json(evaluate(detected, truth)).dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Internal short circuit detection by voltage differential envelope"};
    app.require_subcommand(1);

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Simulate a cell under a DST-style load with injected shorts");
    sim->add_option("--params", sa.params, "Cell parameter JSON")->required();
    sim->add_option("--sim", sa.sim, "Simulation config JSON")->required();
    sim->add_option("--faults", sa.faults, "Fault script JSON (omit for a healthy cell)");
    sim->add_option("--out-csv", sa.out_csv, "Sample CSV to write")->required();
    sim->add_option("--out-truth", sa.out_truth, "Ground-truth JSON to write")->required();

    DetectArgs da;
    auto* det = app.add_subcommand("detect", "Run the detector over a sample CSV");
    det->add_option("--params", da.params, "Cell parameter JSON")->required();
    det->add_option("--config", da.config, "Detector config JSON (defaults if omitted)");
    det->add_option("--in", da.in, "Sample CSV (t_s,current_a,voltage_v)")->required();
    det->add_option("--report", da.report, "Detection report JSON to write")->required();
    det->add_option("--traces", da.traces, "Trace CSV to write (t_s,u_diff_v,u_env_v,env_minus_diff_v)");
    det->add_option("--frames", da.frames, "Full per-frame CSV to write (SOC, R0, quantized current)");

    EvalArgs ea;
    auto* ev = app.add_subcommand("eval", "Score a detection report against ground truth");
    ev->add_option("--report", ea.report, "Detection report JSON")->required();
    ev->add_option("--truth", ea.truth, "Ground-truth JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sim)
            return cmd_simulate(sa);
        if (*det)
            return cmd_detect(da);
        return cmd_eval(ea);
    } catch (const iscdet::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const iscdet::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
}
