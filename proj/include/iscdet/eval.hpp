#pragma once

#include "iscdet/detector.hpp"
#include "iscdet/simulator.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace iscdet {

/// Detected interval as read back from a report: only its bounds matter.
struct DetectedSpan {
    double t_start_s;
    double t_end_s;
};

struct EvalMatch {
    std::size_t detected_index;
    std::size_t truth_index;
    double onset_latency_s; // detected start - true onset
};

struct EvalResult {
    std::size_t n_true_faults = 0;
    std::size_t n_detected = 0;
    std::size_t n_matched = 0;
    double precision = 1.0;
    double recall = 0.0;
    std::optional<double> mean_onset_latency_s; // absent with no matches
    std::vector<EvalMatch> matches;
};

/// Each detected interval, in order, is matched to the first still-unmatched
/// true interval it overlaps by a positive length. Precision is 1 when
/// nothing was detected; recall is 1 when there was nothing to find.
EvalResult evaluate(std::span<const DetectedSpan> detected, std::span<const FaultSpec> truth);

std::vector<DetectedSpan> spans_of(std::span<const FaultInterval> faults);

} // namespace iscdet
