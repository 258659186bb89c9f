#pragma once

#include "iscdet/cell_model.hpp"
#include "iscdet/envelope.hpp"

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace iscdet {

enum class Direction { Down, Up };

const char* to_string(Direction d);

/// A voltage differential outside the envelope interval.
struct EscapeEvent {
    double t_s = 0.0;
    Direction direction = Direction::Down;
    double u_diff_v = 0.0;
    double u_env_v = 0.0;
    double excess_v = 0.0; // distance beyond the widened interval, > 0
};

/// A Down escape (short forms) followed by an Up escape (short opens).
struct FaultInterval {
    double t_start_s = 0.0;
    double t_end_s = 0.0;
    EscapeEvent drop;
    EscapeEvent recovery;

    double duration_s() const { return t_end_s - t_start_s; }
};

struct DetectorConfig {
    /// Slack added on both sides of the envelope interval [min(0,env), max(0,env)].
    /// At constant current the envelope collapses to {0}; this slack absorbs
    /// sensor noise and the OCV drift of one sampling interval.
    double epsilon_v = 0.003;
    double pairing_window_s = 60.0;
    bool emit_unpaired = true;
    bool keep_traces = true;
    /// Plausible terminal-voltage window; anything outside is a sensor fault.
    double voltage_min_v = 1.5;
    double voltage_max_v = 5.0;

    void validate() const;
};

std::optional<EscapeEvent> check_frame(const EnvelopeFrame& frame, const DetectorConfig& config);

struct PairingResult {
    std::vector<FaultInterval> faults;
    std::vector<EscapeEvent> unpaired;
};

/// Greedy pairing: every Down, in time order, takes the earliest later Up
/// within the pairing window that no earlier Down has taken.
PairingResult pair_anomalies(std::span<const EscapeEvent> events, const DetectorConfig& config);

struct DetectionReport {
    std::size_t n_samples = 0;
    std::vector<EscapeEvent> escapes;
    std::vector<FaultInterval> faults;
    std::vector<EscapeEvent> unpaired;
    /// One frame per transition; empty unless DetectorConfig::keep_traces.
    std::vector<EnvelopeFrame> frames;
};

/// Streaming detector for one cell. Feed samples in time order.
///
/// Pairing is done online: an Up escape claims the earliest pending Down
/// that is still within the window, which yields the same pairs as
/// pair_anomalies() over the whole event list.
class IscDetector {
public:
    IscDetector(CellParams params, DetectorConfig config, double initial_soc);

    struct Step {
        std::optional<EnvelopeFrame> frame;   // absent for the first sample
        std::optional<EscapeEvent> escape;
        std::optional<FaultInterval> fault;   // confirmed on this step
    };

    Step push(const Sample& sample);

    /// Flushes pending Downs and returns the report. The detector is left
    /// in its moved-from state; build a new one for another stream.
    DetectionReport finish();

    std::size_t samples_seen() const { return report_.n_samples; }

private:
    CellParams params_;
    DetectorConfig config_;
    SocState soc_;
    std::optional<Sample> prev_;
    std::deque<EscapeEvent> pending_downs_;
    DetectionReport report_;
};

DetectionReport run_detector(std::span<const Sample> samples, double initial_soc,
                             const CellParams& params, const DetectorConfig& config);

} // namespace iscdet
