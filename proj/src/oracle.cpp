#include "actscan/oracle.hpp"

#include <bit>
#include <cstdint>
#include <string>

#include "actscan/error.hpp"

namespace actscan {

namespace {

std::vector<std::size_t> members(std::uint32_t mask) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; mask != 0; ++j, mask >>= 1)
        if (mask & 1u) out.push_back(j);
    return out;
}

// Tie-break for equal scores: fewer members, then lexicographic node list.
bool smaller_subset(std::uint32_t a, std::uint32_t b) {
    const int ca = std::popcount(a);
    const int cb = std::popcount(b);
    if (ca != cb) return ca < cb;
    return members(a) < members(b);
}

}  // namespace

OracleResult exhaustive_scan(const RangeVector& ranges, const ScanConfig& config) {
    config.validate();
    if (config.layer_restriction)
        throw Error(ErrorCode::invalid_argument, "the oracle scans all given ranges; drop the layer restriction");
    const std::size_t n_nodes = ranges.size();
    if (n_nodes == 0) throw Error(ErrorCode::invalid_argument, "no ranges to scan");
    if (n_nodes > kOracleMaxNodes)
        throw Error(ErrorCode::invalid_argument, "oracle refuses " + std::to_string(n_nodes) +
                                                     " nodes (limit " + std::to_string(kOracleMaxNodes) + ")");
    for (const auto& r : ranges)
        if (!(r.pmin >= 0.0 && r.pmin < r.pmax && r.pmax <= 1.0))
            throw Error(ErrorCode::invalid_argument, "invalid p-value range");

    const auto alphas = candidate_alphas(ranges, config);
    const std::uint32_t full = (std::uint32_t{1} << n_nodes) - 1;

    bool have = false;
    double best_score = 0.0;
    std::uint32_t best_mask = 0;
    double best_alpha = 0.0;
    std::vector<double> prio(n_nodes);

    for (double alpha : alphas) {
        for (std::size_t j = 0; j < n_nodes; ++j) prio[j] = priority(ranges[j], alpha);
        for (std::uint32_t mask = 1; mask <= full; ++mask) {
            double n_alpha = 0.0;
            for (std::size_t j = 0; j < n_nodes; ++j)
                if (mask & (std::uint32_t{1} << j)) n_alpha += prio[j];
            const auto n = static_cast<std::size_t>(std::popcount(mask));
            const double s = score(config.statistic, SubsetStats{alpha, n_alpha, n});
            // alphas ascend, so keeping the incumbent on a full tie keeps the smaller alpha
            if (!have || s > best_score || (s == best_score && smaller_subset(mask, best_mask))) {
                have = true;
                best_score = s;
                best_mask = mask;
                best_alpha = alpha;
            }
            if (mask == full) break;
        }
    }
    return {best_score, members(best_mask), best_alpha};
}

}  // namespace actscan
