#pragma once

// Pieces shared by the parallel scan kernel and the serial reference.

#include <cstddef>
#include <span>
#include <vector>

#include "actscan/ltss_scan.hpp"

namespace actscan::detail {

// A scored (alpha, prefix length) pair.
struct PrefixPick {
    double score = 0.0;
    std::size_t alpha_index = 0;
    std::size_t k = 0;
    double n_alpha = 0.0;
    bool valid = false;
};

void check_scan_inputs(const RangeVector& ranges, std::span<const std::size_t> eligible,
                       const ScanConfig& config);

// Higher score, then smaller alpha index, then shorter prefix.
bool preferred(const PrefixPick& a, const PrefixPick& b);

// Rebuilds the priority order at the picked alpha and returns its k-prefix.
ScanResult materialize(const RangeVector& ranges, std::span<const std::size_t> eligible,
                       const std::vector<double>& alphas, const PrefixPick& pick);

}  // namespace actscan::detail
