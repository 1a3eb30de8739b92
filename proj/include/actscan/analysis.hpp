#pragma once

// Evaluation harness: AUC of clean-vs-anomalous score sets, the per-layer
// representation of a detected subset, and a seeded synthetic generator.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "actscan/activation_store.hpp"
#include "actscan/ltss_scan.hpp"
#include "actscan/pvalue_ranges.hpp"

namespace actscan {

struct ScoredGroups {
    std::vector<double> clean_scores;
    std::vector<double> anomalous_scores;
};

// P(anomalous > clean) + 0.5 * P(anomalous == clean), computed from rank sums.
double auc(const ScoredGroups& groups);

struct LayerRepresentation {
    std::string layer;
    double rep = 0.0;
    std::size_t subset_count = 0;
    std::size_t layer_size = 0;
};

// rep_k = (|S n L_k| / |S|) / (|L_k| / sum_l |L_l|), one entry per layer in
// layout order. 1.0 means the layer holds its proportional share of S.
std::vector<LayerRepresentation> representation(std::span<const std::size_t> subset,
                                                const NetworkLayout& layout);

struct SynthSpec {
    std::size_t n_nodes = 1000;
    std::size_t n_background = 500;
    std::size_t n_clean_eval = 100;
    std::size_t n_anomalous_eval = 100;
    double affected_fraction = 0.05;  // rho in (0, 1]
    double shift = 2.0;               // delta added to planted nodes of anomalous rows
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t planted_count() const;  // ceil(rho * n_nodes)
};

struct SynthData {
    Matrix background;
    Matrix clean;
    Matrix anomalous;
    std::vector<std::size_t> planted;  // ascending
};

// Every row is an independent standard normal draw per node; anomalous rows
// additionally get +shift on the planted nodes, which are fixed for the run.
// Fully determined by the seed.
SynthData synthesize(const SynthSpec& spec);

struct DetectionResult {
    double scan_auc = 0.0;
    double all_nodes_auc = 0.0;
    std::size_t n_clean = 0;
    std::size_t n_anom = 0;
};

// Each group is scored against the background, never against the other group.
DetectionResult evaluate_detection(const BackgroundIndex& background, const Matrix& clean,
                                   const Matrix& anomalous, const ScanConfig& config,
                                   const NetworkLayout& layout);

// Subset-scan AUC with the search confined to one layer at a time.
std::vector<std::pair<std::string, double>> per_layer_auc(const BackgroundIndex& background,
                                                          const Matrix& clean, const Matrix& anomalous,
                                                          const ScanConfig& config,
                                                          const NetworkLayout& layout);

}  // namespace actscan
