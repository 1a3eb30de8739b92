#include "actscan/ltss_scan.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "actscan/error.hpp"
#include "scan_detail.hpp"

namespace actscan {

void ScanConfig::validate(const NetworkLayout* layout) const {
    if (!(alpha_max > 0.0 && alpha_max <= 1.0))
        throw Error(ErrorCode::invalid_argument, "alpha_max must lie in (0, 1]");
    if (alpha_policy == AlphaPolicy::uniform_grid && grid_points < 2)
        throw Error(ErrorCode::invalid_argument, "uniform grid needs at least 2 points");
    if (!(tie_tolerance >= 0.0) || !std::isfinite(tie_tolerance))
        throw Error(ErrorCode::invalid_argument, "tie tolerance must be finite and >= 0");
    if (layer_restriction && layout) {
        if (layer_restriction->empty())
            throw Error(ErrorCode::invalid_argument, "layer restriction names no layers");
        for (const auto& name : *layer_restriction)
            if (!layout->find(name)) throw Error(ErrorCode::invalid_argument, "unknown layer '" + name + "'");
    }
}

std::vector<std::size_t> eligible_nodes(const ScanConfig& config, const NetworkLayout& layout) {
    config.validate(&layout);
    std::vector<std::size_t> out;
    if (!config.layer_restriction) {
        out.resize(layout.total_nodes());
        for (std::size_t c = 0; c < out.size(); ++c) out[c] = c;
        return out;
    }
    for (std::size_t li = 0; li < layout.layers().size(); ++li) {
        const auto& name = layout.layers()[li].name;
        const auto& wanted = *config.layer_restriction;
        if (std::find(wanted.begin(), wanted.end(), name) == wanted.end()) continue;
        for (std::size_t c = 0; c < layout.layers()[li].size; ++c) out.push_back(layout.offset(li) + c);
    }
    return out;
}

std::vector<double> candidate_alphas(const RangeVector& ranges, std::span<const std::size_t> eligible,
                                     const ScanConfig& config) {
    config.validate();
    std::vector<double> alphas;
    if (config.alpha_policy == AlphaPolicy::uniform_grid) {
        const std::size_t k = config.grid_points;
        alphas.reserve(k);
        for (std::size_t i = 1; i <= k; ++i)
            alphas.push_back(i == k ? config.alpha_max
                                    : config.alpha_max * static_cast<double>(i) / static_cast<double>(k));
        return alphas;
    }

    alphas.reserve(2 * eligible.size() + 1);
    for (std::size_t node : eligible) {
        for (double v : {ranges[node].pmin, ranges[node].pmax})
            if (v > 0.0 && v <= config.alpha_max) alphas.push_back(v);
    }
    std::sort(alphas.begin(), alphas.end());
    alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
    if (alphas.empty() || alphas.back() != config.alpha_max) alphas.push_back(config.alpha_max);
    return alphas;
}

std::vector<double> candidate_alphas(const RangeVector& ranges, const ScanConfig& config) {
    std::vector<std::size_t> all(ranges.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return candidate_alphas(ranges, all, config);
}

namespace detail {

void check_scan_inputs(const RangeVector& ranges, std::span<const std::size_t> eligible,
                       const ScanConfig& config) {
    config.validate();
    if (eligible.empty()) throw Error(ErrorCode::invalid_argument, "no eligible nodes to scan");
    for (std::size_t i = 0; i < eligible.size(); ++i) {
        if (eligible[i] >= ranges.size())
            throw Error(ErrorCode::out_of_range, "eligible node " + std::to_string(eligible[i]) + " out of range");
        if (i > 0 && eligible[i] <= eligible[i - 1])
            throw Error(ErrorCode::invalid_argument, "eligible nodes must be strictly ascending");
        const auto& r = ranges[eligible[i]];
        if (!(r.pmin >= 0.0 && r.pmin < r.pmax && r.pmax <= 1.0))
            throw Error(ErrorCode::invalid_argument,
                        "invalid p-value range at node " + std::to_string(eligible[i]));
    }
}

bool preferred(const PrefixPick& a, const PrefixPick& b) {
    if (!a.valid) return false;
    if (!b.valid) return true;
    if (a.score != b.score) return a.score > b.score;
    if (a.alpha_index != b.alpha_index) return a.alpha_index < b.alpha_index;
    return a.k < b.k;
}

}  // namespace detail

namespace {

using detail::PrefixPick;

struct PriorityOrder {
    std::size_t ones = 0;
    std::vector<std::pair<double, std::size_t>> fractional;  // (priority, node)
    std::vector<std::size_t> zeros;
    bool keep_zeros = false;

    void build(const RangeVector& ranges, std::span<const std::size_t> eligible, double alpha,
               std::vector<std::size_t>* one_nodes) {
        ones = 0;
        fractional.clear();
        zeros.clear();
        for (std::size_t node : eligible) {
            const double p = priority(ranges[node], alpha);
            if (p == 1.0) {
                ++ones;
                if (one_nodes) one_nodes->push_back(node);
            } else if (p > 0.0) {
                fractional.emplace_back(p, node);
            } else if (keep_zeros) {
                zeros.push_back(node);
            }
        }
        std::sort(fractional.begin(), fractional.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
    }
};

// First maximizing prefix at one alpha. Only prefixes that can attain the
// maximum are scored: inside the all-ones head the score k * ln(1/alpha) grows
// with k, and appending a zero-priority node lowers a positive score. k = 1 is
// always scored so that an all-zero alpha resolves to the same prefix as a full
// sweep.
PrefixPick best_prefix_at(const RangeVector& ranges, std::span<const std::size_t> eligible, double alpha,
                          std::size_t alpha_index, Statistic statistic, PriorityOrder& order) {
    order.build(ranges, eligible, alpha, nullptr);

    PrefixPick best;
    auto consider = [&](std::size_t k, double n_alpha) {
        const double s = score(statistic, SubsetStats{alpha, n_alpha, k});
        if (!best.valid || s > best.score) best = {s, alpha_index, k, n_alpha, true};
    };

    const double first = order.ones > 0 ? 1.0 : (order.fractional.empty() ? 0.0 : order.fractional[0].first);
    consider(1, first);
    if (order.ones > 1) consider(order.ones, static_cast<double>(order.ones));
    double cumulative = static_cast<double>(order.ones);
    for (std::size_t i = 0; i < order.fractional.size(); ++i) {
        cumulative += order.fractional[i].first;
        const std::size_t k = order.ones + i + 1;
        if (k > 1) consider(k, cumulative);
    }
    return best;
}

}  // namespace

namespace detail {

ScanResult materialize(const RangeVector& ranges, std::span<const std::size_t> eligible,
                       const std::vector<double>& alphas, const PrefixPick& pick) {
    const double alpha = alphas[pick.alpha_index];
    PriorityOrder order;
    order.keep_zeros = true;
    std::vector<std::size_t> ordered;
    ordered.reserve(eligible.size());
    order.build(ranges, eligible, alpha, &ordered);
    for (const auto& f : order.fractional) ordered.push_back(f.second);
    ordered.insert(ordered.end(), order.zeros.begin(), order.zeros.end());

    if (pick.k == 0 || pick.k > ordered.size())
        throw Error(ErrorCode::invariant_breach, "maximizing prefix length out of range");

    ScanResult out;
    out.score = pick.score;
    out.alpha_star = alpha;
    out.n_alpha = pick.n_alpha;
    out.n = pick.k;
    out.subset.assign(ordered.begin(), ordered.begin() + static_cast<std::ptrdiff_t>(pick.k));
    std::sort(out.subset.begin(), out.subset.end());
    return out;
}

}  // namespace detail

ScanResult scan_nodes(const RangeVector& ranges, std::span<const std::size_t> eligible,
                      const ScanConfig& config) {
    detail::check_scan_inputs(ranges, eligible, config);
    const auto alphas = candidate_alphas(ranges, eligible, config);
    const auto n_alphas = static_cast<std::ptrdiff_t>(alphas.size());

    PrefixPick global;
#pragma omp parallel
    {
        PriorityOrder order;
        PrefixPick local;
#pragma omp for schedule(dynamic, 4) nowait
        for (std::ptrdiff_t a = 0; a < n_alphas; ++a) {
            const auto pick = best_prefix_at(ranges, eligible, alphas[a], static_cast<std::size_t>(a),
                                             config.statistic, order);
            if (detail::preferred(pick, local)) local = pick;
        }
#pragma omp critical(actscan_scan_merge)
        if (detail::preferred(local, global)) global = local;
    }
    return detail::materialize(ranges, eligible, alphas, global);
}

ScanResult scan(const RangeVector& ranges, const ScanConfig& config, const NetworkLayout& layout) {
    layout.check_covers(ranges.size());
    const auto eligible = eligible_nodes(config, layout);
    return scan_nodes(ranges, eligible, config);
}

double subset_n_alpha(const RangeVector& ranges, std::span<const std::size_t> subset, double alpha) {
    double sum = 0.0;
    for (std::size_t node : subset) sum += priority(ranges[node], alpha);
    return sum;
}

ScanResult score_all_nodes_in(const RangeVector& ranges, std::span<const std::size_t> eligible,
                              const ScanConfig& config) {
    detail::check_scan_inputs(ranges, eligible, config);
    const auto alphas = candidate_alphas(ranges, eligible, config);

    ScanResult best;
    bool have = false;
    for (double alpha : alphas) {
        const double n_alpha = subset_n_alpha(ranges, eligible, alpha);
        const double s = score(config.statistic, SubsetStats{alpha, n_alpha, eligible.size()});
        if (!have || s > best.score) {
            best.score = s;
            best.alpha_star = alpha;
            best.n_alpha = n_alpha;
            have = true;
        }
    }
    best.n = eligible.size();
    best.subset.assign(eligible.begin(), eligible.end());
    return best;
}

ScanResult score_all_nodes(const RangeVector& ranges, const ScanConfig& config, const NetworkLayout& layout) {
    layout.check_covers(ranges.size());
    const auto eligible = eligible_nodes(config, layout);
    return score_all_nodes_in(ranges, eligible, config);
}

std::vector<std::pair<std::string, ScanResult>> scan_per_layer(const RangeVector& ranges,
                                                               const ScanConfig& config,
                                                               const NetworkLayout& layout) {
    layout.check_covers(ranges.size());
    std::vector<std::pair<std::string, ScanResult>> out;
    out.reserve(layout.layers().size());
    for (const auto& layer : layout.layers()) {
        ScanConfig single = config;
        single.layer_restriction = std::vector<std::string>{layer.name};
        out.emplace_back(layer.name, scan(ranges, single, layout));
    }
    return out;
}

}  // namespace actscan
