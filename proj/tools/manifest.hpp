#pragma once

// Run manifest written next to every CLI output artifact.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace actscan::cli {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string file_sha256(const std::filesystem::path& path);

struct RunManifest {
    std::string command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::vector<std::pair<std::string, std::string>> inputs;   // path, sha256
    std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256
    double duration_seconds = 0.0;

    void add_input(const std::filesystem::path& path);
    nlohmann::ordered_json to_json() const;
};

// Writes `text` atomically to `path`, records it in the manifest and writes
// `<path>.manifest.json` beside it.
void emit_artifact(const std::filesystem::path& path, const std::string& text, RunManifest& manifest,
                   std::chrono::steady_clock::time_point started);

}  // namespace actscan::cli
