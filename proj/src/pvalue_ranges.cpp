#include "actscan/pvalue_ranges.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "actscan/error.hpp"

namespace actscan {

BeatTie beat_tie_counts(std::span<const float> background_column, double activation,
                        double tie_tolerance) {
    if (background_column.empty()) throw Error(ErrorCode::invalid_argument, "empty background column");
    const TieWindow window(activation, tie_tolerance);
    BeatTie out;
    for (float v : background_column) {
        if (window.beats(v)) ++out.n_beat;
        else if (window.ties(v)) ++out.n_tie;
    }
    return out;
}

PValueRange pvalue_range(std::size_t n_beat, std::size_t n_tie, std::size_t n_background) {
    if (n_background == 0) throw Error(ErrorCode::invalid_argument, "background size must be positive");
    if (n_beat > n_background || n_tie > n_background - n_beat)
        throw Error(ErrorCode::invalid_argument,
                    "n_beat + n_tie exceeds background size " + std::to_string(n_background));
    const double denom = static_cast<double>(n_background) + 1.0;
    return {static_cast<double>(n_beat) / denom, static_cast<double>(n_beat + n_tie + 1) / denom};
}

// ---------------------------------------------------------------------------

BackgroundIndex::BackgroundIndex(std::size_t n_backgrounds, std::size_t n_nodes,
                                 std::vector<float> columns)
    : n_backgrounds_(n_backgrounds), n_nodes_(n_nodes), sorted_(std::move(columns)) {
    if (n_backgrounds_ == 0 || n_nodes_ == 0)
        throw Error(ErrorCode::malformed_input, "background needs at least one row and one column");
    if (sorted_.size() != n_backgrounds_ * n_nodes_)
        throw Error(ErrorCode::dimension_mismatch, "column buffer size does not match dimensions");

    const auto nodes = static_cast<std::ptrdiff_t>(n_nodes_);
    bool finite = true;
#pragma omp parallel for schedule(static) reduction(&& : finite)
    for (std::ptrdiff_t j = 0; j < nodes; ++j) {
        auto first = sorted_.begin() + j * static_cast<std::ptrdiff_t>(n_backgrounds_);
        auto last = first + static_cast<std::ptrdiff_t>(n_backgrounds_);
        if (std::all_of(first, last, [](float v) { return std::isfinite(v); })) std::sort(first, last);
        else finite = false;
    }
    if (!finite) throw Error(ErrorCode::non_finite, "background contains NaN or Inf");
}

BackgroundIndex::BackgroundIndex(const BackgroundActivations& background)
    : BackgroundIndex([&] {
          const Matrix& m = background.values();
          std::vector<float> columns(m.rows() * m.cols());
          for (std::size_t i = 0; i < m.rows(); ++i) {
              auto row = m.row(i);
              for (std::size_t j = 0; j < m.cols(); ++j) columns[j * m.rows() + i] = row[j];
          }
          return BackgroundIndex(m.rows(), m.cols(), std::move(columns));
      }()) {}

BackgroundIndex BackgroundIndex::from_column_major(std::size_t n_backgrounds, std::size_t n_nodes,
                                                   std::vector<float> columns) {
    return BackgroundIndex(n_backgrounds, n_nodes, std::move(columns));
}

BeatTie BackgroundIndex::counts(std::size_t node, double activation, double tie_tolerance) const {
    const TieWindow window(activation, tie_tolerance);
    auto column = sorted_column(node);
    // first value >= lo, first value > hi
    auto lo = std::lower_bound(column.begin(), column.end(), window.lo,
                               [](float v, double x) { return static_cast<double>(v) < x; });
    auto hi = std::upper_bound(lo, column.end(), window.hi,
                               [](double x, float v) { return x < static_cast<double>(v); });
    return {static_cast<std::size_t>(column.end() - hi), static_cast<std::size_t>(hi - lo)};
}

RangeVector ranges_for_input(const BackgroundIndex& index, std::span<const float> input_row,
                             double tie_tolerance) {
    if (input_row.size() != index.n_nodes())
        throw Error(ErrorCode::dimension_mismatch,
                    "input has " + std::to_string(input_row.size()) + " nodes, background has " +
                        std::to_string(index.n_nodes()));
    if (!(tie_tolerance >= 0.0)) throw Error(ErrorCode::invalid_argument, "tie tolerance must be >= 0");

    RangeVector out(input_row.size());
    const auto nodes = static_cast<std::ptrdiff_t>(input_row.size());
    const std::size_t n_bg = index.n_backgrounds();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < nodes; ++j) {
        const auto c = index.counts(static_cast<std::size_t>(j), input_row[j], tie_tolerance);
        out[j] = pvalue_range(c.n_beat, c.n_tie, n_bg);
    }
    return out;
}

RangeVector ranges_streaming(const BackgroundActivations& background, std::span<const float> input_row,
                             double tie_tolerance) {
    const std::size_t n_nodes = background.n_nodes(), n_bg = background.n_backgrounds();
    if (input_row.size() != n_nodes)
        throw Error(ErrorCode::dimension_mismatch,
                    "input has " + std::to_string(input_row.size()) + " nodes, background has " +
                        std::to_string(n_nodes));
    if (!(tie_tolerance >= 0.0)) throw Error(ErrorCode::invalid_argument, "tie tolerance must be >= 0");

    // Column blocks keep the per-block counters in cache while rows stream by.
    constexpr std::size_t kBlock = 2048;
    const Matrix& m = background.values();
    RangeVector out(n_nodes);
    const auto n_blocks = static_cast<std::ptrdiff_t>((n_nodes + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < n_blocks; ++b) {
        const std::size_t first = static_cast<std::size_t>(b) * kBlock;
        const std::size_t width = std::min(kBlock, n_nodes - first);
        std::vector<double> lo(width), hi(width);
        for (std::size_t k = 0; k < width; ++k) {
            const TieWindow w(input_row[first + k], tie_tolerance);
            lo[k] = w.lo;
            hi[k] = w.hi;
        }
        std::vector<std::uint32_t> beats(width, 0), ties(width, 0);
        for (std::size_t i = 0; i < n_bg; ++i) {
            const float* row = m.row(i).data() + first;
            for (std::size_t k = 0; k < width; ++k) {
                const double v = row[k];
                beats[k] += v > hi[k];
                ties[k] += static_cast<std::uint32_t>(v >= lo[k]) & static_cast<std::uint32_t>(v <= hi[k]);
            }
        }
        for (std::size_t k = 0; k < width; ++k) out[first + k] = pvalue_range(beats[k], ties[k], n_bg);
    }
    return out;
}

}  // namespace actscan
