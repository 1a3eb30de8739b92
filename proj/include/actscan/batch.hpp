#pragma once

// Scoring many evaluation rows against one background. Rows are scored in
// parallel; results are stored by row index, so the output never depends on
// scheduling.

#include <vector>

#include "actscan/activation_store.hpp"
#include "actscan/ltss_scan.hpp"
#include "actscan/pvalue_ranges.hpp"

namespace actscan {

enum class ScoreMode {
    subset_scan,  // maximize over subsets and alpha
    all_nodes,    // subset fixed to all eligible nodes
};

std::vector<ScanResult> score_rows(const BackgroundIndex& background, const Matrix& rows,
                                   const ScanConfig& config, const NetworkLayout& layout,
                                   ScoreMode mode = ScoreMode::subset_scan);

// Same results without an index: each row streams over the raw background.
// Preferable when there are only a few rows.
std::vector<ScanResult> score_rows(const BackgroundActivations& background, const Matrix& rows,
                                   const ScanConfig& config, const NetworkLayout& layout,
                                   ScoreMode mode = ScoreMode::subset_scan);

// Rows below which streaming beats building an index.
inline constexpr std::size_t kStreamingMaxRows = 8;

// Both modes from one p-value pass per row.
struct RowScores {
    std::vector<ScanResult> subset_scan;
    std::vector<ScanResult> all_nodes;
};

RowScores score_rows_both(const BackgroundIndex& background, const Matrix& rows, const ScanConfig& config,
                          const NetworkLayout& layout);
RowScores score_rows_both(const BackgroundActivations& background, const Matrix& rows, const ScanConfig& config,
                          const NetworkLayout& layout);

}  // namespace actscan
