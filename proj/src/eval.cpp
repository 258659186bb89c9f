#include "iscdet/eval.hpp"

#include <algorithm>

namespace iscdet {

EvalResult evaluate(std::span<const DetectedSpan> detected, std::span<const FaultSpec> truth)
{
    EvalResult r;
    r.n_true_faults = truth.size();
    r.n_detected = detected.size();

    std::vector<bool> taken(truth.size(), false);
    double latency_sum = 0.0;
    for (std::size_t i = 0; i < detected.size(); ++i) {
        for (std::size_t j = 0; j < truth.size(); ++j) {
            if (taken[j])
                continue;
            const double overlap = std::min(detected[i].t_end_s, truth[j].t_off_s) -
                                   std::max(detected[i].t_start_s, truth[j].t_on_s);
            if (overlap > 0.0) {
                taken[j] = true;
                const double latency = detected[i].t_start_s - truth[j].t_on_s;
                r.matches.push_back({i, j, latency});
                latency_sum += latency;
                break;
            }
        }
    }

    r.n_matched = r.matches.size();
    r.precision = r.n_detected == 0 ? 1.0
                                    : static_cast<double>(r.n_matched) / static_cast<double>(r.n_detected);
    r.recall = r.n_true_faults == 0
                   ? 1.0
                   : static_cast<double>(r.n_matched) / static_cast<double>(r.n_true_faults);
    if (r.n_matched > 0)
        r.mean_onset_latency_s = latency_sum / static_cast<double>(r.n_matched);
    return r;
}

std::vector<DetectedSpan> spans_of(std::span<const FaultInterval> faults)
{
    std::vector<DetectedSpan> out;
    out.reserve(faults.size());
    for (const auto& f : faults)
        out.push_back({f.t_start_s, f.t_end_s});
    return out;
}

} // namespace iscdet
