#pragma once

// Exhaustive maximizer over every nonempty subset. Exponential by construction;
// it exists to check the prefix scan and refuses more than kOracleMaxNodes nodes.

#include <cstddef>
#include <vector>

#include "actscan/ltss_scan.hpp"

namespace actscan {

inline constexpr std::size_t kOracleMaxNodes = 25;

struct OracleResult {
    double score = 0.0;
    std::vector<std::size_t> subset;  // ascending
    double alpha_star = 0.0;
};

// Searches all 2^J - 1 subsets times the same candidate alphas the scan uses.
// Score ties go to the smaller subset, then the lexicographically smaller node
// list, then the smaller alpha.
OracleResult exhaustive_scan(const RangeVector& ranges, const ScanConfig& config);

}  // namespace actscan
