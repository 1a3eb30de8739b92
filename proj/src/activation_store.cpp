#include "actscan/activation_store.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>
#include <system_error>

#include <json.hpp>

#include "actscan/error.hpp"

namespace actscan {

namespace {

constexpr std::uint8_t kMagic[4] = {0x41, 0x43, 0x54, 0x53};
constexpr std::size_t kHeaderBytes = 16;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[at + i]) << (8 * i);
    return v;
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0f) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<float> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows * cols)
        throw Error(ErrorCode::dimension_mismatch,
                    "matrix " + std::to_string(rows) + "x" + std::to_string(cols) + " given " +
                        std::to_string(values_.size()) + " values");
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](float v) { return std::isfinite(v); });
}

BackgroundActivations::BackgroundActivations(Matrix values) : values_(std::move(values)) {
    if (values_.rows() == 0 || values_.cols() == 0)
        throw Error(ErrorCode::malformed_input, "background needs at least one row and one column");
    if (!values_.all_finite())
        throw Error(ErrorCode::non_finite, "background contains NaN or Inf");
}

void EvaluationBatch::check_against(const BackgroundActivations& background) const {
    if (values.cols() != background.n_nodes())
        throw Error(ErrorCode::dimension_mismatch,
                    "evaluation has " + std::to_string(values.cols()) + " columns, background has " +
                        std::to_string(background.n_nodes()));
    if (!labels.empty() && labels.size() != values.rows())
        throw Error(ErrorCode::dimension_mismatch, "label count does not match row count");
}

// ---------------------------------------------------------------------------
// Layout

NetworkLayout::NetworkLayout(std::vector<Layer> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw Error(ErrorCode::malformed_layout, "layout has no layers");
    std::set<std::string> seen;
    offsets_.reserve(layers_.size() + 1);
    offsets_.push_back(0);
    for (const auto& layer : layers_) {
        if (layer.size == 0)
            throw Error(ErrorCode::malformed_layout, "layer '" + layer.name + "' has nonpositive size");
        if (!seen.insert(layer.name).second)
            throw Error(ErrorCode::malformed_layout, "duplicate layer name '" + layer.name + "'");
        offsets_.push_back(offsets_.back() + layer.size);
    }
}

NetworkLayout NetworkLayout::single(std::size_t n_nodes, std::string name) {
    return NetworkLayout({Layer{std::move(name), n_nodes}});
}

std::size_t NetworkLayout::layer_index_of(std::size_t col) const {
    if (col >= total_nodes())
        throw Error(ErrorCode::out_of_range, "node index " + std::to_string(col) +
                                                 " outside layout of " + std::to_string(total_nodes()));
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), col);
    return static_cast<std::size_t>(std::distance(offsets_.begin(), it)) - 1;
}

const std::string& NetworkLayout::node_to_layer(std::size_t col) const {
    return layers_[layer_index_of(col)].name;
}

std::optional<std::size_t> NetworkLayout::find(std::string_view name) const {
    for (std::size_t i = 0; i < layers_.size(); ++i)
        if (layers_[i].name == name) return i;
    return std::nullopt;
}

void NetworkLayout::check_covers(std::size_t n_nodes) const {
    if (total_nodes() != n_nodes)
        throw Error(ErrorCode::dimension_mismatch,
                    "layout covers " + std::to_string(total_nodes()) + " nodes, matrix has " +
                        std::to_string(n_nodes));
}

NetworkLayout cifar_cnn_layout() {
    return NetworkLayout({{"Conv1", 32768},
                          {"Conv2", 28800},
                          {"Pool1", 7200},
                          {"Conv3", 14400},
                          {"Conv4", 10816},
                          {"Pool2", 2304},
                          {"Flat", 512}});
}

NetworkLayout parse_layout(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::malformed_layout, std::string("layout is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array())
        throw Error(ErrorCode::malformed_layout, "layout must be an object with a 'layers' array");

    std::vector<Layer> layers;
    for (const auto& entry : doc["layers"]) {
        if (!entry.is_object() || !entry.contains("name") || !entry.contains("size") ||
            !entry["name"].is_string() || !entry["size"].is_number_integer())
            throw Error(ErrorCode::malformed_layout, "each layer needs a string 'name' and integer 'size'");
        auto size = entry["size"].get<std::int64_t>();
        if (size <= 0)
            throw Error(ErrorCode::malformed_layout,
                        "layer '" + entry["name"].get<std::string>() + "' has nonpositive size");
        layers.push_back({entry["name"].get<std::string>(), static_cast<std::size_t>(size)});
    }
    return NetworkLayout(std::move(layers));
}

std::string layout_to_json(const NetworkLayout& layout) {
    nlohmann::json doc;
    doc["layers"] = nlohmann::json::array();
    for (const auto& layer : layout.layers())
        doc["layers"].push_back({{"name", layer.name}, {"size", layer.size}});
    return doc.dump() + "\n";
}

NetworkLayout load_layout(const std::filesystem::path& path) {
    return parse_layout(read_file_text(path));
}

void save_layout(const std::filesystem::path& path, const NetworkLayout& layout) {
    write_file_atomic(path, layout_to_json(layout));
}

// ---------------------------------------------------------------------------
// ACTS

std::vector<std::uint8_t> encode_acts(const Matrix& m) {
    if (!m.all_finite()) throw Error(ErrorCode::non_finite, "refusing to save NaN or Inf activations");
    if (m.rows() > UINT32_MAX || m.cols() > UINT32_MAX)
        throw Error(ErrorCode::invalid_argument, "matrix dimensions exceed u32");
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes + 4 * m.values().size());
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_u32(out, kActsVersion);
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (float v : m.values()) put_u32(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

Matrix decode_acts(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin()))
        throw Error(ErrorCode::bad_magic, "not an ACTS file (bad magic)");
    if (bytes.size() < kHeaderBytes) throw Error(ErrorCode::truncated_payload, "ACTS header truncated");
    const std::uint32_t version = get_u32(bytes, 4);
    if (version != kActsVersion)
        throw Error(ErrorCode::version_mismatch, "unsupported ACTS version " + std::to_string(version));
    const std::size_t rows = get_u32(bytes, 8);
    const std::size_t cols = get_u32(bytes, 12);
    if (rows == 0 || cols == 0) throw Error(ErrorCode::malformed_input, "ACTS matrix has a zero dimension");

    const std::size_t count = rows * cols;
    const std::size_t payload = bytes.size() - kHeaderBytes;
    if (payload < 4 * count)
        throw Error(ErrorCode::truncated_payload,
                    "ACTS declares " + std::to_string(count) + " floats, payload holds " +
                        std::to_string(payload / 4));
    if (payload > 4 * count)
        throw Error(ErrorCode::trailing_data, "ACTS payload has bytes past the declared matrix");

    std::vector<float> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        values[i] = std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * i));
        if (!std::isfinite(values[i]))
            throw Error(ErrorCode::non_finite, "non-finite activation at row " + std::to_string(i / cols) +
                                                   ", column " + std::to_string(i % cols));
    }
    return Matrix(rows, cols, std::move(values));
}

Matrix load_acts(const std::filesystem::path& path) { return decode_acts(read_file_bytes(path)); }

void save_acts(const std::filesystem::path& path, const Matrix& m) {
    write_file_atomic(path, encode_acts(m));
}

// ---------------------------------------------------------------------------
// CSV

Matrix parse_csv(std::string_view text) {
    std::vector<float> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;

    while (!text.empty()) {
        auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        std::size_t fields = 0;
        while (true) {
            auto comma = line.find(',');
            std::string_view field = line.substr(0, comma);
            while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
            while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
            if (!field.empty() && field.front() == '+') field.remove_prefix(1);

            float v = 0.0f;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
                throw Error(ErrorCode::malformed_input,
                            "CSV line " + std::to_string(line_no) + ": cannot parse '" + std::string(field) + "'");
            if (!std::isfinite(v))
                throw Error(ErrorCode::non_finite, "CSV line " + std::to_string(line_no) + ": non-finite value");
            values.push_back(v);
            ++fields;
            if (comma == std::string_view::npos) break;
            line.remove_prefix(comma + 1);
        }
        if (rows == 0) cols = fields;
        else if (fields != cols)
            throw Error(ErrorCode::malformed_input, "CSV line " + std::to_string(line_no) + " has " +
                                                        std::to_string(fields) + " fields, expected " +
                                                        std::to_string(cols));
        ++rows;
    }
    if (rows == 0) throw Error(ErrorCode::malformed_input, "CSV has no rows");
    return Matrix(rows, cols, std::move(values));
}

Matrix import_csv(const std::filesystem::path& path) { return parse_csv(read_file_text(path)); }

// ---------------------------------------------------------------------------
// File helpers

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<std::uint8_t> bytes(size);
    if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size)))
        throw Error(ErrorCode::io_failure, "cannot read " + path.string());
    return bytes;
}

std::string read_file_text(const std::filesystem::path& path) {
    auto bytes = read_file_bytes(path);
    return std::string(bytes.begin(), bytes.end());
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::io_failure, "cannot create " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out.flush()) {
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw Error(ErrorCode::io_failure, "cannot write " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::io_failure, "cannot rename onto " + path.string());
    }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
    write_file_atomic(path, std::span<const std::uint8_t>(
                                reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace actscan
