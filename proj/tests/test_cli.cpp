#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "actscan/activation_store.hpp"
#include "cli.hpp"
#include "manifest.hpp"
#include "test_util.hpp"

using namespace actscan;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "actscan");
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string p(const fs::path& path) { return path.string(); }

void synth_into(const fs::path& dir, std::size_t nodes = 300, const std::string& seed = "5") {
    const auto r = run({"synth", "--nodes", std::to_string(nodes), "--background", "60", "--clean", "8", "--anom",
                        "8", "--rho", "0.1", "--delta", "3", "--seed", seed, "--out-dir", p(dir)});
    REQUIRE_MESSAGE(r.code == 0, r.err);
}

}  // namespace

TEST_CASE("synth then eval-auc produces valid JSON") {
    test::TempDir dir;
    synth_into(dir.path());
    for (const char* name : {"bg.acts", "clean.acts", "anom.acts", "layout.json", "planted.json", "manifest.json"})
        CHECK(fs::exists(dir.path() / name));

    const auto planted = nlohmann::json::parse(read_file_text(dir.path() / "planted.json"));
    CHECK(planted["nodes"].size() == 30);

    const auto r = run({"eval-auc", "--background", p(dir.path() / "bg.acts"), "--layout",
                        p(dir.path() / "layout.json"), "--clean", p(dir.path() / "clean.acts"), "--anom",
                        p(dir.path() / "anom.acts"), "--per-layer", "--out", p(dir.path() / "auc.json")});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["scan_auc"].get<double>() >= 0.0);
    CHECK(doc["scan_auc"].get<double>() <= 1.0);
    CHECK(doc["all_nodes_auc"].is_number());
    CHECK(doc["n_clean"] == 8);
    CHECK(doc["n_anom"] == 8);
    CHECK(doc["per_layer_scan_auc"].contains("all"));
    CHECK(read_file_text(dir.path() / "auc.json") == r.out);

    const auto manifest = nlohmann::json::parse(read_file_text(dir.path() / "auc.json.manifest.json"));
    CHECK(manifest["command"] == "eval-auc");
    CHECK(manifest["inputs"].size() == 4);
    CHECK(manifest["tool_version"].is_string());
    CHECK(manifest["duration_seconds"].is_number());
    CHECK(manifest["outputs"][p(dir.path() / "auc.json")] == cli::file_sha256(dir.path() / "auc.json"));
}

TEST_CASE("scan writes one JSON object per row, feeding represent") {
    test::TempDir dir;
    synth_into(dir.path());
    const NetworkLayout layout({{"first", 100}, {"second", 200}});
    save_layout(dir.path() / "two.json", layout);

    const auto out = dir.path() / "results.jsonl";
    auto r = run({"scan", "--background", p(dir.path() / "bg.acts"), "--layout", p(dir.path() / "two.json"),
                  "--input", p(dir.path() / "anom.acts"), "--out", p(out)});
    REQUIRE_MESSAGE(r.code == 0, r.err);

    std::istringstream lines(read_file_text(out));
    std::string line;
    std::size_t row = 0;
    while (std::getline(lines, line)) {
        const auto doc = nlohmann::ordered_json::parse(line);
        CHECK(doc["row"] == row);
        const std::vector<std::string> keys = {"row", "score", "alpha", "subset_size",
                                               "n_alpha", "nodes", "per_layer_counts"};
        std::vector<std::string> got;
        for (const auto& item : doc.items()) got.push_back(item.key());
        CHECK(got == keys);
        CHECK(doc["nodes"].size() == doc["subset_size"].get<std::size_t>());
        CHECK(doc["per_layer_counts"]["first"].get<std::size_t>() + doc["per_layer_counts"]["second"].get<std::size_t>() ==
              doc["subset_size"].get<std::size_t>());
        ++row;
    }
    CHECK(row == 8);
    CHECK(fs::exists(dir.path() / "results.jsonl.manifest.json"));

    // --layers restricts, --all-nodes fixes the subset
    r = run({"scan", "--background", p(dir.path() / "bg.acts"), "--layout", p(dir.path() / "two.json"), "--input",
             p(dir.path() / "anom.acts"), "--layers", "first", "--all-nodes", "--out", p(dir.path() / "all.jsonl")});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    std::istringstream all_lines(read_file_text(dir.path() / "all.jsonl"));
    std::getline(all_lines, line);
    const auto first = nlohmann::json::parse(line);
    CHECK(first["subset_size"] == 100);
    CHECK(first["per_layer_counts"]["second"] == 0);

    r = run({"represent", "--results", p(out), "--layout", p(dir.path() / "two.json"), "--out",
             p(dir.path() / "rep.csv")});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    std::istringstream csv(read_file_text(dir.path() / "rep.csv"));
    std::getline(csv, line);
    CHECK(line == "input_row,layer,rep");
    std::size_t data_lines = 0;
    while (std::getline(csv, line)) {
        ++data_lines;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        REQUIRE(c2 != std::string::npos);
        CHECK(std::stod(line.substr(c2 + 1)) >= 0.0);
    }
    CHECK(data_lines == 16);
}

TEST_CASE("pvalues output feeds the oracle") {
    test::TempDir dir;
    // 4-image background; three nodes with the worked-example activations
    Matrix bg(4, 3, {-1, -1, -1, -1, -1, -1, 0.2f, 0.2f, 0.2f, 0.75f, 0.75f, 0.75f});
    Matrix eval(1, 3, {0.8f, 0.1f, -1.0f});
    save_acts(dir.path() / "bg.acts", bg);
    save_acts(dir.path() / "eval.acts", eval);

    const auto ranges = dir.path() / "ranges.json";
    auto r = run({"pvalues", "--background", p(dir.path() / "bg.acts"), "--input", p(dir.path() / "eval.acts"),
                  "--row", "0", "--out", p(ranges)});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto doc = nlohmann::json::parse(read_file_text(ranges));
    REQUIRE(doc.size() == 3);
    CHECK(doc[0]["node"] == 0);
    CHECK(doc[0]["pmin"] == 0.0);
    CHECK(doc[0]["pmax"] == 0.2);
    CHECK(doc[1]["pmin"] == 0.4);
    CHECK(doc[1]["pmax"] == 0.6);
    CHECK(doc[2]["pmax"] == 1.0);

    r = run({"oracle", "--ranges", p(ranges), "--alpha-max", "1.0"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto o = nlohmann::json::parse(r.out);
    CHECK(o["subset"] == nlohmann::json::array({0}));
    CHECK(o["alpha"] == 0.2);
    CHECK(o["score"].get<double>() == doctest::Approx(1.6094379124341003));

    r = run({"pvalues", "--background", p(dir.path() / "bg.acts"), "--input", p(dir.path() / "eval.acts"),
             "--row", "3", "--out", p(dir.path() / "bad.json")});
    CHECK(r.code == cli::kExitDimension);
    CHECK_FALSE(fs::exists(dir.path() / "bad.json"));
}

TEST_CASE("import-csv converts to ACTS") {
    test::TempDir dir;
    write_file_atomic(dir.path() / "x.csv", std::string_view("1,2,3\n4,5,6\n"));
    auto r = run({"import-csv", "--in", p(dir.path() / "x.csv"), "--out", p(dir.path() / "x.acts")});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(load_acts(dir.path() / "x.acts") == Matrix(2, 3, {1, 2, 3, 4, 5, 6}));

    write_file_atomic(dir.path() / "bad.csv", std::string_view("1,2\n3\n"));
    r = run({"import-csv", "--in", p(dir.path() / "bad.csv"), "--out", p(dir.path() / "bad.acts")});
    CHECK(r.code == cli::kExitBadInput);
    CHECK_FALSE(fs::exists(dir.path() / "bad.acts"));
}

TEST_CASE("error contract") {
    test::TempDir dir;
    synth_into(dir.path(), 50);

    auto r = run({"frobnicate"});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.rfind("error: ", 0) == 0);

    NetworkLayout wrong({{"a", 49}});
    save_layout(dir.path() / "wrong.json", wrong);
    r = run({"scan", "--background", p(dir.path() / "bg.acts"), "--layout", p(dir.path() / "wrong.json"), "--input",
             p(dir.path() / "clean.acts"), "--out", p(dir.path() / "never.jsonl")});
    CHECK(r.code == cli::kExitDimension);
    CHECK(r.err.rfind("error: dimension-mismatch: ", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
    CHECK_FALSE(fs::exists(dir.path() / "never.jsonl"));

    write_file_atomic(dir.path() / "junk.acts", std::string_view("JUNKJUNKJUNKJUNK"));
    r = run({"scan", "--background", p(dir.path() / "junk.acts"), "--layout", p(dir.path() / "layout.json"),
             "--input", p(dir.path() / "clean.acts"), "--out", p(dir.path() / "never.jsonl")});
    CHECK(r.code == cli::kExitBadInput);
    CHECK(r.err.rfind("error: bad-magic: ", 0) == 0);

    r = run({"scan", "--background", p(dir.path() / "bg.acts"), "--layout", p(dir.path() / "layout.json"), "--input",
             p(dir.path() / "clean.acts"), "--alpha-max", "1.5", "--out", p(dir.path() / "never.jsonl")});
    CHECK(r.code == cli::kExitUsage);

    r = run({"scan", "--background", p(dir.path() / "bg.acts"), "--layout", p(dir.path() / "layout.json"), "--input",
             p(dir.path() / "clean.acts"), "--layers", "missing", "--out", p(dir.path() / "never.jsonl")});
    CHECK(r.code == cli::kExitUsage);

    r = run({"scan", "--help"});
    CHECK(r.code == 0);
    for (const char* flag : {"--background", "--layout", "--input", "--alpha-max", "--alpha-policy", "--layers",
                             "--all-nodes", "--threads", "--tie-tolerance"})
        CHECK(r.out.find(flag) != std::string::npos);
}

TEST_CASE("same inputs and seed give identical output digests") {
    test::TempDir a, b;
    synth_into(a.path(), 200, "42");
    synth_into(b.path(), 200, "42");
    for (const char* name : {"bg.acts", "clean.acts", "anom.acts", "layout.json", "planted.json"})
        CHECK(cli::file_sha256(a.path() / name) == cli::file_sha256(b.path() / name));

    auto scan_to = [&](const fs::path& out, const std::string& threads) {
        const auto r = run({"scan", "--background", p(a.path() / "bg.acts"), "--layout", p(a.path() / "layout.json"),
                            "--input", p(a.path() / "anom.acts"), "--threads", threads, "--out", p(out)});
        REQUIRE_MESSAGE(r.code == 0, r.err);
    };
    scan_to(a.path() / "one.jsonl", "1");
    scan_to(a.path() / "again.jsonl", "1");
    scan_to(a.path() / "four.jsonl", "4");
    CHECK(read_file_bytes(a.path() / "one.jsonl") == read_file_bytes(a.path() / "again.jsonl"));
    CHECK(read_file_bytes(a.path() / "one.jsonl") == read_file_bytes(a.path() / "four.jsonl"));
}

TEST_CASE("the installed executable reports exit statuses") {
    const std::string tool = ACTSCAN_TOOL_PATH;
    auto status = [&](const std::string& args) {
        const int raw = std::system((tool + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status("--help") == 0);
    CHECK(status("no-such-command") == cli::kExitUsage);
    CHECK(status("pvalues --background /nonexistent.acts --input /nonexistent.acts --out /tmp/x.json") ==
          cli::kExitBadInput);
}
