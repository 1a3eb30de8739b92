#include "manifest.hpp"

#include <array>
#include <cstdio>

#include <openssl/evp.h>

#include "actscan/activation_store.hpp"
#include "actscan/error.hpp"
#include "actscan/version.hpp"

namespace actscan::cli {

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::invariant_breach, "SHA-256 computation failed");
    std::string hex;
    hex.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        char buf[3];
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(read_file_bytes(path)); }

void RunManifest::add_input(const std::filesystem::path& path) {
    inputs.emplace_back(path.string(), file_sha256(path));
}

nlohmann::ordered_json RunManifest::to_json() const {
    nlohmann::ordered_json doc;
    doc["command"] = command;
    doc["config"] = config;
    doc["inputs"] = nlohmann::ordered_json::object();
    for (const auto& [path, digest] : inputs) doc["inputs"][path] = digest;
    doc["outputs"] = nlohmann::ordered_json::object();
    for (const auto& [path, digest] : outputs) doc["outputs"][path] = digest;
    doc["tool_version"] = kToolVersion;
    doc["duration_seconds"] = duration_seconds;
    return doc;
}

void emit_artifact(const std::filesystem::path& path, const std::string& text, RunManifest& manifest,
                   std::chrono::steady_clock::time_point started) {
    write_file_atomic(path, text);
    manifest.outputs.emplace_back(
        path.string(),
        sha256_hex({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}));
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    auto manifest_path = path;
    manifest_path += ".manifest.json";
    write_file_atomic(manifest_path, manifest.to_json().dump(2) + "\n");
}

}  // namespace actscan::cli
