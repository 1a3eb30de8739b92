#pragma once

// Exact maximization of the scan statistic over all subsets of nodes.
//
// For a fixed alpha the highest scoring subset is always a prefix of the nodes
// sorted by descending priority, so each alpha costs one sort plus a prefix
// sweep instead of an enumeration of 2^J subsets. The overall maximum is taken
// over a finite set of candidate alphas.
//
// Priority order: descending priority, ties by ascending node index.
// Maximum over (alpha, k): ties resolved toward the smaller alpha, then the
// shorter prefix. Both rules make the returned subset independent of the
// thread count.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "actscan/activation_store.hpp"
#include "actscan/npss_score.hpp"
#include "actscan/pvalue_ranges.hpp"

namespace actscan {

enum class AlphaPolicy {
    range_endpoints,  // distinct pmin/pmax values in (0, alpha_max], plus alpha_max
    uniform_grid,     // i * alpha_max / k for i = 1..k
};

struct ScanConfig {
    double alpha_max = 1.0;
    AlphaPolicy alpha_policy = AlphaPolicy::range_endpoints;
    std::size_t grid_points = 10;  // used by uniform_grid, >= 2
    std::optional<std::vector<std::string>> layer_restriction;
    double tie_tolerance = 0.0;
    Statistic statistic = Statistic::berk_jones;

    // Throws invalid_argument on a bad alpha_max, grid size or tolerance, and
    // when `layout` is given, on restricted layers that do not exist.
    void validate(const NetworkLayout* layout = nullptr) const;
};

struct ScanResult {
    double score = 0.0;
    double alpha_star = 0.0;
    std::vector<std::size_t> subset;  // ascending, duplicate-free
    double n_alpha = 0.0;
    std::size_t n = 0;
};

// Columns a scan may pick from: every column, or the union of the restricted
// layers (ascending).
std::vector<std::size_t> eligible_nodes(const ScanConfig& config, const NetworkLayout& layout);

std::vector<double> candidate_alphas(const RangeVector& ranges, std::span<const std::size_t> eligible,
                                     const ScanConfig& config);
// All nodes in scope.
std::vector<double> candidate_alphas(const RangeVector& ranges, const ScanConfig& config);

// Scan over the given eligible columns. Parallel over candidate alphas.
ScanResult scan_nodes(const RangeVector& ranges, std::span<const std::size_t> eligible,
                      const ScanConfig& config);

// Scan honoring config.layer_restriction.
ScanResult scan(const RangeVector& ranges, const ScanConfig& config, const NetworkLayout& layout);

// Subset fixed to every eligible node; maximizes only over alpha.
ScanResult score_all_nodes_in(const RangeVector& ranges, std::span<const std::size_t> eligible,
                              const ScanConfig& config);
ScanResult score_all_nodes(const RangeVector& ranges, const ScanConfig& config,
                           const NetworkLayout& layout);

// One independent scan per layer, in layout order.
std::vector<std::pair<std::string, ScanResult>> scan_per_layer(const RangeVector& ranges,
                                                               const ScanConfig& config,
                                                               const NetworkLayout& layout);

// N_alpha of a subset, summed in ascending node order.
double subset_n_alpha(const RangeVector& ranges, std::span<const std::size_t> subset, double alpha);

namespace reference {

// Serial reference: full priority sort and a score for every prefix at every
// candidate alpha. Same tie rules as scan_nodes.
ScanResult scan_nodes(const RangeVector& ranges, std::span<const std::size_t> eligible,
                      const ScanConfig& config);

}  // namespace reference

}  // namespace actscan
