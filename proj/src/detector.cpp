#include "iscdet/detector.hpp"

#include "iscdet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace iscdet {

const char* to_string(Direction d)
{
    return d == Direction::Down ? "down" : "up";
}

void DetectorConfig::validate() const
{
    if (!(epsilon_v >= 0.0) || !std::isfinite(epsilon_v))
        throw ConfigError("epsilon_v: must be >= 0");
    if (!(pairing_window_s > 0.0) || !std::isfinite(pairing_window_s))
        throw ConfigError("pairing_window_s: must be > 0");
    if (!(voltage_min_v < voltage_max_v))
        throw ConfigError("voltage_min_v: must be below voltage_max_v");
}

std::optional<EscapeEvent> check_frame(const EnvelopeFrame& frame, const DetectorConfig& config)
{
    const double lower = std::min(0.0, frame.u_env_v) - config.epsilon_v;
    const double upper = std::max(0.0, frame.u_env_v) + config.epsilon_v;

    if (frame.u_diff_v < lower)
        return EscapeEvent{frame.t_s, Direction::Down, frame.u_diff_v, frame.u_env_v,
                           lower - frame.u_diff_v};
    if (frame.u_diff_v > upper)
        return EscapeEvent{frame.t_s, Direction::Up, frame.u_diff_v, frame.u_env_v,
                           frame.u_diff_v - upper};
    return std::nullopt;
}

PairingResult pair_anomalies(std::span<const EscapeEvent> events, const DetectorConfig& config)
{
    for (std::size_t i = 1; i < events.size(); ++i)
        if (events[i].t_s < events[i - 1].t_s)
            throw InputError("pair_anomalies: events not sorted by time at index " +
                             std::to_string(i));

    std::vector<bool> used(events.size(), false);
    PairingResult out;

    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].direction != Direction::Down)
            continue;
        const double t0 = events[i].t_s;
        for (std::size_t j = i + 1; j < events.size(); ++j) {
            const auto& e = events[j];
            if (e.t_s - t0 > config.pairing_window_s)
                break;
            if (used[j] || e.direction != Direction::Up || !(e.t_s > t0))
                continue;
            used[i] = used[j] = true;
            out.faults.push_back(FaultInterval{t0, e.t_s, events[i], e});
            break;
        }
    }
    for (std::size_t i = 0; i < events.size(); ++i)
        if (!used[i])
            out.unpaired.push_back(events[i]);
    return out;
}

IscDetector::IscDetector(CellParams params, DetectorConfig config, double initial_soc)
    : params_(std::move(params)), config_(config)
{
    params_.validate();
    config_.validate();
    if (!(initial_soc >= 0.0 && initial_soc <= 1.0))
        throw ConfigError("initial_soc: must be in [0, 1]");
    soc_.soc = initial_soc;
}

IscDetector::Step IscDetector::push(const Sample& sample)
{
    if (!std::isfinite(sample.voltage_v) || sample.voltage_v < config_.voltage_min_v ||
        sample.voltage_v > config_.voltage_max_v)
        throw InputError("sample at t=" + std::to_string(sample.t_s) + ": voltage " +
                         std::to_string(sample.voltage_v) + " V outside plausible window");

    Step step;
    if (!prev_) {
        soc_.t_last = sample.t_s;
        prev_ = sample;
        ++report_.n_samples;
        return step;
    }

    const EnvelopeFrame frame = derive_frame(*prev_, sample, soc_, params_);
    prev_ = sample;
    ++report_.n_samples;
    if (config_.keep_traces)
        report_.frames.push_back(frame);
    step.frame = frame;

    auto escape = check_frame(frame, config_);
    if (!escape)
        return step;
    step.escape = escape;
    report_.escapes.push_back(*escape);

    if (escape->direction == Direction::Down) {
        pending_downs_.push_back(*escape);
        return step;
    }

    // Up: expire Downs that fell out of the window, then claim the oldest one left
    while (!pending_downs_.empty() &&
           escape->t_s - pending_downs_.front().t_s > config_.pairing_window_s) {
        report_.unpaired.push_back(pending_downs_.front());
        pending_downs_.pop_front();
    }
    if (pending_downs_.empty()) {
        report_.unpaired.push_back(*escape);
        return step;
    }
    const EscapeEvent drop = pending_downs_.front();
    pending_downs_.pop_front();
    FaultInterval fault{drop.t_s, escape->t_s, drop, *escape};
    report_.faults.push_back(fault);
    step.fault = fault;
    return step;
}

DetectionReport IscDetector::finish()
{
    for (const auto& d : pending_downs_)
        report_.unpaired.push_back(d);
    pending_downs_.clear();
    std::stable_sort(report_.unpaired.begin(), report_.unpaired.end(),
                     [](const EscapeEvent& a, const EscapeEvent& b) { return a.t_s < b.t_s; });
    if (!config_.emit_unpaired)
        report_.unpaired.clear();
    return std::move(report_);
}

DetectionReport run_detector(std::span<const Sample> samples, double initial_soc,
                             const CellParams& params, const DetectorConfig& config)
{
    if (samples.size() < 2)
        throw InputError("need at least 2 samples, got " + std::to_string(samples.size()));
    IscDetector det(params, config, initial_soc);
    for (const auto& s : samples)
        det.push(s);
    return det.finish();
}

} // namespace iscdet
