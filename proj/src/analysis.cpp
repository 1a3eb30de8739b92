#include "actscan/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "actscan/batch.hpp"
#include "actscan/error.hpp"

namespace actscan {

double auc(const ScoredGroups& groups) {
    const std::size_t n_anom = groups.anomalous_scores.size();
    const std::size_t n_clean = groups.clean_scores.size();
    if (n_anom == 0 || n_clean == 0) throw Error(ErrorCode::invalid_argument, "AUC needs two nonempty groups");

    struct Item {
        double score;
        bool anomalous;
    };
    std::vector<Item> items;
    items.reserve(n_anom + n_clean);
    for (double s : groups.anomalous_scores) items.push_back({s, true});
    for (double s : groups.clean_scores) items.push_back({s, false});
    for (const auto& it : items)
        if (std::isnan(it.score)) throw Error(ErrorCode::invalid_argument, "AUC given a NaN score");
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.score < b.score; });

    // average 1-based ranks over tie blocks
    double anom_rank_sum = 0.0;
    for (std::size_t i = 0; i < items.size();) {
        std::size_t j = i;
        std::size_t anom_in_block = 0;
        while (j < items.size() && items[j].score == items[i].score) {
            anom_in_block += items[j].anomalous ? 1 : 0;
            ++j;
        }
        const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        anom_rank_sum += mid_rank * static_cast<double>(anom_in_block);
        i = j;
    }
    const double na = static_cast<double>(n_anom);
    const double u = anom_rank_sum - na * (na + 1.0) / 2.0;
    return u / (na * static_cast<double>(n_clean));
}

std::vector<LayerRepresentation> representation(std::span<const std::size_t> subset,
                                                const NetworkLayout& layout) {
    if (subset.empty()) throw Error(ErrorCode::invalid_argument, "representation of an empty subset");
    std::vector<std::size_t> sorted(subset.begin(), subset.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error(ErrorCode::invalid_argument, "subset contains duplicate nodes");

    std::vector<std::size_t> counts(layout.layers().size(), 0);
    for (std::size_t node : sorted) ++counts[layout.layer_index_of(node)];

    const double subset_size = static_cast<double>(sorted.size());
    const double total = static_cast<double>(layout.total_nodes());
    std::vector<LayerRepresentation> out;
    out.reserve(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const auto& layer = layout.layers()[k];
        const double share_of_subset = static_cast<double>(counts[k]) / subset_size;
        const double share_of_network = static_cast<double>(layer.size) / total;
        out.push_back({layer.name, share_of_subset / share_of_network, counts[k], layer.size});
    }
    return out;
}

void SynthSpec::validate() const {
    if (n_nodes == 0 || n_background == 0 || n_clean_eval == 0 || n_anomalous_eval == 0)
        throw Error(ErrorCode::invalid_argument, "synthetic sizes must be positive");
    if (!(affected_fraction > 0.0 && affected_fraction <= 1.0))
        throw Error(ErrorCode::invalid_argument, "affected fraction must lie in (0, 1]");
    if (!std::isfinite(shift)) throw Error(ErrorCode::invalid_argument, "shift must be finite");
}

std::size_t SynthSpec::planted_count() const {
    // the small slack keeps e.g. 0.05 * 1000 from rounding up to 51
    const double raw = std::ceil(affected_fraction * static_cast<double>(n_nodes) - 1e-9);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, n_nodes);
}

SynthData synthesize(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);

    std::vector<std::size_t> nodes(spec.n_nodes);
    std::iota(nodes.begin(), nodes.end(), std::size_t{0});
    const std::size_t planted_n = spec.planted_count();
    for (std::size_t i = 0; i < planted_n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, spec.n_nodes - 1);
        std::swap(nodes[i], nodes[pick(rng)]);
    }
    SynthData data;
    data.planted.assign(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(planted_n));
    std::sort(data.planted.begin(), data.planted.end());

    std::normal_distribution<double> normal(0.0, 1.0);
    auto draw = [&](std::size_t rows) {
        Matrix m(rows, spec.n_nodes);
        for (std::size_t r = 0; r < rows; ++r)
            for (auto& v : m.row(r)) v = static_cast<float>(normal(rng));
        return m;
    };
    data.background = draw(spec.n_background);
    data.clean = draw(spec.n_clean_eval);
    data.anomalous = draw(spec.n_anomalous_eval);
    for (std::size_t r = 0; r < data.anomalous.rows(); ++r)
        for (std::size_t node : data.planted)
            data.anomalous(r, node) = static_cast<float>(static_cast<double>(data.anomalous(r, node)) + spec.shift);
    return data;
}

namespace {

std::vector<double> scores_of(const std::vector<ScanResult>& results) {
    std::vector<double> out;
    out.reserve(results.size());
    for (const auto& r : results) out.push_back(r.score);
    return out;
}

}  // namespace

DetectionResult evaluate_detection(const BackgroundIndex& background, const Matrix& clean,
                                   const Matrix& anomalous, const ScanConfig& config,
                                   const NetworkLayout& layout) {
    const auto clean_scores = score_rows_both(background, clean, config, layout);
    const auto anom_scores = score_rows_both(background, anomalous, config, layout);

    DetectionResult out;
    out.n_clean = clean.rows();
    out.n_anom = anomalous.rows();
    out.scan_auc = auc({scores_of(clean_scores.subset_scan), scores_of(anom_scores.subset_scan)});
    out.all_nodes_auc = auc({scores_of(clean_scores.all_nodes), scores_of(anom_scores.all_nodes)});
    return out;
}

std::vector<std::pair<std::string, double>> per_layer_auc(const BackgroundIndex& background,
                                                          const Matrix& clean, const Matrix& anomalous,
                                                          const ScanConfig& config,
                                                          const NetworkLayout& layout) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& layer : layout.layers()) {
        ScanConfig single = config;
        single.layer_restriction = std::vector<std::string>{layer.name};
        const auto c = score_rows(background, clean, single, layout);
        const auto a = score_rows(background, anomalous, single, layout);
        out.emplace_back(layer.name, auc({scores_of(c), scores_of(a)}));
    }
    return out;
}

}  // namespace actscan
