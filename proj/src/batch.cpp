#include "actscan/batch.hpp"

#include <exception>
#include <span>
#include <string>

#include "actscan/error.hpp"

namespace actscan {

namespace {

RangeVector ranges_of(const BackgroundIndex& background, std::span<const float> row, double tol) {
    return ranges_for_input(background, row, tol);
}

RangeVector ranges_of(const BackgroundActivations& background, std::span<const float> row, double tol) {
    return ranges_streaming(background, row, tol);
}

template <typename Background>
void check_inputs(const Background& background, const Matrix& rows, const ScanConfig& config,
                  const NetworkLayout& layout) {
    config.validate(&layout);
    layout.check_covers(background.n_nodes());
    if (rows.cols() != background.n_nodes())
        throw Error(ErrorCode::dimension_mismatch,
                    "evaluation has " + std::to_string(rows.cols()) + " columns, background has " +
                        std::to_string(background.n_nodes()));
}

// Runs `body(row)` for every row in parallel and rethrows the first failure
// (lowest row index) after the loop.
template <typename Body>
void for_each_row(std::size_t n_rows, Body&& body) {
    std::vector<std::exception_ptr> failures(n_rows);
    const auto n = static_cast<std::ptrdiff_t>(n_rows);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
        try {
            body(static_cast<std::size_t>(r));
        } catch (...) {
            failures[r] = std::current_exception();
        }
    }
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);
}


template <typename Background>
std::vector<ScanResult> score_rows_impl(const Background& background, const Matrix& rows, const ScanConfig& config,
                                        const NetworkLayout& layout, ScoreMode mode) {
    check_inputs(background, rows, config, layout);
    const auto eligible = eligible_nodes(config, layout);
    std::vector<ScanResult> out(rows.rows());
    for_each_row(rows.rows(), [&](std::size_t r) {
        const auto ranges = ranges_of(background, rows.row(r), config.tie_tolerance);
        out[r] = mode == ScoreMode::subset_scan ? scan_nodes(ranges, eligible, config)
                                                : score_all_nodes_in(ranges, eligible, config);
    });
    return out;
}

template <typename Background>
RowScores score_rows_both_impl(const Background& background, const Matrix& rows, const ScanConfig& config,
                               const NetworkLayout& layout) {
    check_inputs(background, rows, config, layout);
    const auto eligible = eligible_nodes(config, layout);
    RowScores out;
    out.subset_scan.resize(rows.rows());
    out.all_nodes.resize(rows.rows());
    for_each_row(rows.rows(), [&](std::size_t r) {
        const auto ranges = ranges_of(background, rows.row(r), config.tie_tolerance);
        out.subset_scan[r] = scan_nodes(ranges, eligible, config);
        out.all_nodes[r] = score_all_nodes_in(ranges, eligible, config);
    });
    return out;
}

}  // namespace

std::vector<ScanResult> score_rows(const BackgroundIndex& background, const Matrix& rows,
                                   const ScanConfig& config, const NetworkLayout& layout, ScoreMode mode) {
    return score_rows_impl(background, rows, config, layout, mode);
}

std::vector<ScanResult> score_rows(const BackgroundActivations& background, const Matrix& rows,
                                   const ScanConfig& config, const NetworkLayout& layout, ScoreMode mode) {
    return score_rows_impl(background, rows, config, layout, mode);
}

RowScores score_rows_both(const BackgroundIndex& background, const Matrix& rows, const ScanConfig& config,
                          const NetworkLayout& layout) {
    return score_rows_both_impl(background, rows, config, layout);
}

RowScores score_rows_both(const BackgroundActivations& background, const Matrix& rows, const ScanConfig& config,
                          const NetworkLayout& layout) {
    return score_rows_both_impl(background, rows, config, layout);
}

}  // namespace actscan
