// Serial reference implementations. They follow the definitions literally and
// are only used to check the parallel kernels and by the benchmark.

#include <algorithm>
#include <numeric>
#include <string>

#include "actscan/error.hpp"
#include "actscan/ltss_scan.hpp"
#include "actscan/pvalue_ranges.hpp"
#include "scan_detail.hpp"

namespace actscan::reference {

RangeVector ranges_for_input(const BackgroundActivations& background, std::span<const float> input_row,
                             double tie_tolerance) {
    if (input_row.size() != background.n_nodes())
        throw Error(ErrorCode::dimension_mismatch,
                    "input has " + std::to_string(input_row.size()) + " nodes, background has " +
                        std::to_string(background.n_nodes()));
    const Matrix& bg = background.values();
    RangeVector out(input_row.size());
    for (std::size_t j = 0; j < input_row.size(); ++j) {
        const TieWindow window(input_row[j], tie_tolerance);
        BeatTie c;
        for (std::size_t i = 0; i < bg.rows(); ++i) {
            if (window.beats(bg(i, j))) ++c.n_beat;
            else if (window.ties(bg(i, j))) ++c.n_tie;
        }
        out[j] = pvalue_range(c.n_beat, c.n_tie, bg.rows());
    }
    return out;
}

ScanResult scan_nodes(const RangeVector& ranges, std::span<const std::size_t> eligible,
                      const ScanConfig& config) {
    detail::check_scan_inputs(ranges, eligible, config);
    const auto alphas = candidate_alphas(ranges, eligible, config);

    std::vector<std::size_t> order(eligible.begin(), eligible.end());
    std::vector<double> prio(ranges.size());
    detail::PrefixPick best;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        const double alpha = alphas[a];
        for (std::size_t node : eligible) prio[node] = priority(ranges[node], alpha);
        order.assign(eligible.begin(), eligible.end());
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return prio[x] > prio[y]; });

        double cumulative = 0.0;
        for (std::size_t k = 1; k <= order.size(); ++k) {
            cumulative += prio[order[k - 1]];
            const double s = score(config.statistic, SubsetStats{alpha, cumulative, k});
            if (!best.valid || s > best.score) best = {s, a, k, cumulative, true};
        }
    }
    return detail::materialize(ranges, eligible, alphas, best);
}

}  // namespace actscan::reference
