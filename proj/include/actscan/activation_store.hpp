#pragma once

// Activation matrices, network layout metadata and their on-disk formats.
//
// ACTS layout (all little-endian):
//   "ACTS" | u32 version (=1) | u32 n_rows | u32 n_cols | f32[n_rows * n_cols]
// Payload is row-major: one row per network input, one column per node.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace actscan {

inline constexpr std::uint32_t kActsVersion = 1;

// Row-major float32 matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<float> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return values_.empty(); }

    float operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    float& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

    std::span<const float> row(std::size_t r) const {
        return {values_.data() + r * cols_, cols_};
    }
    std::span<float> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }

    std::span<const float> values() const noexcept { return values_; }

    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<float> values_;
};

// Activations of clean inputs that define the null distribution per node.
// Validated on construction and read-only afterwards.
class BackgroundActivations {
public:
    explicit BackgroundActivations(Matrix values);

    const Matrix& values() const noexcept { return values_; }
    std::size_t n_backgrounds() const noexcept { return values_.rows(); }
    std::size_t n_nodes() const noexcept { return values_.cols(); }

private:
    Matrix values_;
};

// Inputs under evaluation, optionally tagged per row ("clean", "adversarial", ...).
struct EvaluationBatch {
    Matrix values;
    std::vector<std::string> labels;  // empty, or one per row

    // Throws dimension_mismatch unless the batch has n_nodes columns.
    void check_against(const BackgroundActivations& background) const;
};

struct Layer {
    std::string name;
    std::size_t size = 0;

    friend bool operator==(const Layer&, const Layer&) = default;
};

// Ordered list of layers; column c belongs to the layer whose cumulative
// interval [offset, offset + size) contains it.
class NetworkLayout {
public:
    explicit NetworkLayout(std::vector<Layer> layers);

    // One layer called `name` spanning n_nodes columns.
    static NetworkLayout single(std::size_t n_nodes, std::string name = "all");

    const std::vector<Layer>& layers() const noexcept { return layers_; }
    std::size_t total_nodes() const noexcept { return offsets_.back(); }

    std::size_t layer_index_of(std::size_t col) const;
    const std::string& node_to_layer(std::size_t col) const;

    // Index of the layer called `name`, if any.
    std::optional<std::size_t> find(std::string_view name) const;

    std::size_t offset(std::size_t layer_index) const { return offsets_[layer_index]; }

    // Throws dimension_mismatch when total_nodes() != n_nodes.
    void check_covers(std::size_t n_nodes) const;

    friend bool operator==(const NetworkLayout& a, const NetworkLayout& b) {
        return a.layers_ == b.layers_;
    }

private:
    std::vector<Layer> layers_;
    std::vector<std::size_t> offsets_;  // size() + 1 cumulative boundaries
};

// The seven hidden layers of the small tanh CNN used for CIFAR-10 experiments
// (Conv1, Conv2, Pool1, Conv3, Conv4, Pool2, Flat; 96,800 nodes in total).
NetworkLayout cifar_cnn_layout();

std::vector<std::uint8_t> encode_acts(const Matrix& m);
Matrix decode_acts(std::span<const std::uint8_t> bytes);

Matrix load_acts(const std::filesystem::path& path);
void save_acts(const std::filesystem::path& path, const Matrix& m);

NetworkLayout parse_layout(std::string_view json_text);
std::string layout_to_json(const NetworkLayout& layout);
NetworkLayout load_layout(const std::filesystem::path& path);
void save_layout(const std::filesystem::path& path, const NetworkLayout& layout);

// Headerless CSV: one row per input, comma separated decimal floats.
Matrix parse_csv(std::string_view text);
Matrix import_csv(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames over `path` on success, so a
// failed write never leaves a partial artifact behind.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);

}  // namespace actscan
