#pragma once

// Nonparametric scan statistic scoring.
//
// A node's priority at threshold alpha is the fraction of its p-value range
// lying below alpha. Summing priorities over a subset gives N_alpha; the subset
// is scored by comparing the observed proportion N_alpha / N against alpha.

#include <cstddef>

#include "actscan/pvalue_ranges.hpp"

namespace actscan {

struct SubsetStats {
    double alpha = 1.0;    // (0, 1]
    double n_alpha = 0.0;  // [0, n]
    std::size_t n = 0;     // >= 1
};

// Statistics usable behind score(). Only Berk-Jones is implemented; the
// (alpha, N_alpha, N) signature is shared by Kolmogorov-Smirnov and
// Higher-Criticism style statistics.
enum class Statistic { berk_jones };

// clamp((alpha - pmin) / (pmax - pmin), 0, 1)
double priority(const PValueRange& range, double alpha);

// Bernoulli KL divergence KL(x || y) with 0 * ln 0 = 0. Requires 0 <= x <= 1 and 0 < y < 1.
double kl_bernoulli(double x, double y);

// n * KL(n_alpha / n, alpha) when n_alpha / n > alpha, else 0.
double berk_jones(const SubsetStats& stats);

inline double berk_jones(double alpha, double n_alpha, std::size_t n) {
    return berk_jones(SubsetStats{alpha, n_alpha, n});
}

double score(Statistic statistic, const SubsetStats& stats);

}  // namespace actscan
