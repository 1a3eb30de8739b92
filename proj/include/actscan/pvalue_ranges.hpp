#pragma once

// Empirical p-value ranges of an evaluation input against the background.
//
// For node j with background activations A_ij and evaluation activation a:
//   n_beat = #{i : A_ij > a},  n_tie = #{i : A_ij == a}
//   range  = [n_beat / (|B|+1), (n_beat + n_tie + 1) / (|B|+1)]
// Large activations are the extreme direction (one-sided).

#include <cstddef>
#include <span>
#include <vector>

#include "actscan/activation_store.hpp"

namespace actscan {

struct PValueRange {
    double pmin = 0.0;
    double pmax = 1.0;

    friend bool operator==(const PValueRange&, const PValueRange&) = default;
};

using RangeVector = std::vector<PValueRange>;

struct BeatTie {
    std::size_t n_beat = 0;
    std::size_t n_tie = 0;

    friend bool operator==(const BeatTie&, const BeatTie&) = default;
};

// A background value beats `activation` when it exceeds activation + tol and
// ties when it lies in [activation - tol, activation + tol]. With tol == 0 this
// is exact float equality.
struct TieWindow {
    double lo;
    double hi;

    TieWindow(double activation, double tie_tolerance)
        : lo(activation - tie_tolerance), hi(activation + tie_tolerance) {}

    bool beats(float background) const { return static_cast<double>(background) > hi; }
    bool ties(float background) const {
        const double v = background;
        return v >= lo && v <= hi;
    }
};

// Linear scan over one background column.
BeatTie beat_tie_counts(std::span<const float> background_column, double activation,
                        double tie_tolerance = 0.0);

PValueRange pvalue_range(std::size_t n_beat, std::size_t n_tie, std::size_t n_background);

// Background columns sorted ascending, stored column-major, so that each
// per-node query is two binary searches. Built once per background.
class BackgroundIndex {
public:
    explicit BackgroundIndex(const BackgroundActivations& background);

    // Takes ownership of an unsorted column-major buffer (column j occupies
    // [j * n_backgrounds, (j + 1) * n_backgrounds)). Avoids holding a row-major
    // copy next to the index for very large backgrounds.
    static BackgroundIndex from_column_major(std::size_t n_backgrounds, std::size_t n_nodes,
                                             std::vector<float> columns);

    std::size_t n_backgrounds() const noexcept { return n_backgrounds_; }
    std::size_t n_nodes() const noexcept { return n_nodes_; }

    std::span<const float> sorted_column(std::size_t node) const {
        return {sorted_.data() + node * n_backgrounds_, n_backgrounds_};
    }

    BeatTie counts(std::size_t node, double activation, double tie_tolerance = 0.0) const;

private:
    BackgroundIndex(std::size_t n_backgrounds, std::size_t n_nodes, std::vector<float> columns);

    std::size_t n_backgrounds_ = 0;
    std::size_t n_nodes_ = 0;
    std::vector<float> sorted_;
};

// Parallel over nodes; identical output for any thread count.
RangeVector ranges_for_input(const BackgroundIndex& index, std::span<const float> input_row,
                             double tie_tolerance = 0.0);

// One streaming pass over the row-major background with no sorting:
// O(|B| * J) per input against O(|B| * J * log|B|) to build an index, so this
// is the cheaper path when only a few inputs are scored. Same output as the
// indexed kernel.
RangeVector ranges_streaming(const BackgroundActivations& background, std::span<const float> input_row,
                             double tie_tolerance = 0.0);

namespace reference {

// Direct linear-scan definition over the row-major background. Kept as the
// ground truth for the indexed kernel.
RangeVector ranges_for_input(const BackgroundActivations& background,
                             std::span<const float> input_row, double tie_tolerance = 0.0);

}  // namespace reference

}  // namespace actscan
