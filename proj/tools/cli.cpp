#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "actscan/activation_store.hpp"
#include "actscan/analysis.hpp"
#include "actscan/batch.hpp"
#include "actscan/error.hpp"
#include "actscan/ltss_scan.hpp"
#include "actscan/oracle.hpp"
#include "actscan/pvalue_ranges.hpp"
#include "actscan/version.hpp"
#include "manifest.hpp"

namespace actscan::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

// Restores the OpenMP thread count on scope exit so in-process callers (tests)
// do not leak a setting from one invocation into the next.
class ThreadScope {
public:
    explicit ThreadScope(int threads) : previous_(omp_get_max_threads()) {
        if (threads > 0) omp_set_num_threads(threads);
    }
    ~ThreadScope() { omp_set_num_threads(previous_); }
    ThreadScope(const ThreadScope&) = delete;
    ThreadScope& operator=(const ThreadScope&) = delete;

private:
    int previous_;
};

struct ScanFlags {
    double alpha_max = 1.0;
    std::string alpha_policy = "endpoints";
    std::size_t grid_points = 10;
    std::vector<std::string> layers;
    double tie_tolerance = 0.0;

    void add_to(CLI::App& cmd, bool with_layers, bool with_tolerance) {
        cmd.add_option("--alpha-max", alpha_max, "Largest significance threshold searched, in (0, 1]")
            ->capture_default_str();
        cmd.add_option("--alpha-policy", alpha_policy,
                       "Candidate thresholds: 'endpoints' (p-value range endpoints) or 'grid'")
            ->check(CLI::IsMember({"endpoints", "grid"}))
            ->capture_default_str();
        cmd.add_option("--grid-points", grid_points, "Number of thresholds for --alpha-policy grid (>= 2)")
            ->capture_default_str();
        if (with_layers)
            cmd.add_option("--layers", layers, "Restrict the search to these layers (comma separated)")
                ->delimiter(',');
        if (with_tolerance)
            cmd.add_option("--tie-tolerance", tie_tolerance,
                           "Background activations within this distance count as ties")
                ->capture_default_str();
    }

    ScanConfig config() const {
        ScanConfig c;
        c.alpha_max = alpha_max;
        c.alpha_policy = alpha_policy == "grid" ? AlphaPolicy::uniform_grid : AlphaPolicy::range_endpoints;
        c.grid_points = grid_points;
        if (!layers.empty()) c.layer_restriction = layers;
        c.tie_tolerance = tie_tolerance;
        return c;
    }

    void describe(ordered_json& doc) const {
        doc["alpha_max"] = alpha_max;
        doc["alpha_policy"] = alpha_policy;
        doc["grid_points"] = grid_points;
        doc["layers"] = layers;
        doc["tie_tolerance"] = tie_tolerance;
    }
};

BackgroundActivations load_background(const fs::path& path) { return BackgroundActivations(load_acts(path)); }

template <typename Background>
Matrix load_eval(const fs::path& path, const Background& background) {
    Matrix m = load_acts(path);
    if (m.cols() != background.n_nodes())
        throw Error(ErrorCode::dimension_mismatch,
                    path.string() + " has " + std::to_string(m.cols()) + " columns, background has " +
                        std::to_string(background.n_nodes()));
    return m;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw Error(ErrorCode::invariant_breach, "cannot format number");
    return std::string(buf, ptr);
}

ordered_json result_json(std::size_t row, const ScanResult& r, const NetworkLayout& layout) {
    ordered_json line;
    line["row"] = row;
    line["score"] = r.score;
    line["alpha"] = r.alpha_star;
    line["subset_size"] = r.n;
    line["n_alpha"] = r.n_alpha;
    line["nodes"] = r.subset;
    std::vector<std::size_t> counts(layout.layers().size(), 0);
    for (std::size_t node : r.subset) ++counts[layout.layer_index_of(node)];
    ordered_json per_layer = ordered_json::object();
    for (std::size_t k = 0; k < counts.size(); ++k) per_layer[layout.layers()[k].name] = counts[k];
    line["per_layer_counts"] = per_layer;
    return line;
}

// ---------------------------------------------------------------------------

struct PvaluesOptions {
    std::string background, input, out;
    std::size_t row = 0;
    double tie_tolerance = 0.0;
    int threads = 0;
};

int run_pvalues(const PvaluesOptions& o, std::ostream&) {
    const auto started = Clock::now();
    ThreadScope threads(o.threads);
    const auto background = load_background(o.background);
    const Matrix input = load_eval(o.input, background);
    if (o.row >= input.rows())
        throw Error(ErrorCode::out_of_range,
                    "row " + std::to_string(o.row) + " but input has " + std::to_string(input.rows()) + " rows");
    const auto ranges = ranges_streaming(background, input.row(o.row), o.tie_tolerance);

    ordered_json doc = ordered_json::array();
    for (std::size_t j = 0; j < ranges.size(); ++j)
        doc.push_back({{"node", j}, {"pmin", ranges[j].pmin}, {"pmax", ranges[j].pmax}});

    RunManifest manifest;
    manifest.command = "pvalues";
    manifest.config = {{"row", o.row}, {"tie_tolerance", o.tie_tolerance}, {"threads", o.threads}};
    manifest.add_input(o.background);
    manifest.add_input(o.input);
    emit_artifact(o.out, doc.dump() + "\n", manifest, started);
    return kExitOk;
}

struct ScanOptions {
    std::string background, layout, input, out;
    ScanFlags flags;
    bool all_nodes = false;
    int threads = 0;
};

int run_scan(const ScanOptions& o, std::ostream&) {
    const auto started = Clock::now();
    ThreadScope threads(o.threads);
    const auto layout = load_layout(o.layout);
    const auto config = o.flags.config();
    config.validate(&layout);
    const auto background = load_background(o.background);
    layout.check_covers(background.n_nodes());
    const Matrix input = load_eval(o.input, background);

    // sorting the background only pays off across many rows
    const auto mode = o.all_nodes ? ScoreMode::all_nodes : ScoreMode::subset_scan;
    const auto results = input.rows() <= kStreamingMaxRows
                             ? score_rows(background, input, config, layout, mode)
                             : score_rows(BackgroundIndex(background), input, config, layout, mode);

    std::string text;
    for (std::size_t r = 0; r < results.size(); ++r) text += result_json(r, results[r], layout).dump() + "\n";

    RunManifest manifest;
    manifest.command = "scan";
    o.flags.describe(manifest.config);
    manifest.config["all_nodes"] = o.all_nodes;
    manifest.config["threads"] = o.threads;
    manifest.add_input(o.background);
    manifest.add_input(o.layout);
    manifest.add_input(o.input);
    emit_artifact(o.out, text, manifest, started);
    return kExitOk;
}

struct EvalOptions {
    std::string background, layout, clean, anom, out;
    ScanFlags flags;
    bool per_layer = false;
    int threads = 0;
};

int run_eval_auc(const EvalOptions& o, std::ostream& out) {
    const auto started = Clock::now();
    ThreadScope threads(o.threads);
    const auto layout = load_layout(o.layout);
    const auto config = o.flags.config();
    config.validate(&layout);
    const BackgroundIndex index(load_background(o.background));
    layout.check_covers(index.n_nodes());
    const Matrix clean = load_eval(o.clean, index);
    const Matrix anom = load_eval(o.anom, index);

    const auto result = evaluate_detection(index, clean, anom, config, layout);
    ordered_json doc;
    doc["scan_auc"] = result.scan_auc;
    doc["all_nodes_auc"] = result.all_nodes_auc;
    doc["n_clean"] = result.n_clean;
    doc["n_anom"] = result.n_anom;
    if (o.per_layer) {
        ordered_json per_layer = ordered_json::object();
        for (const auto& [name, value] : per_layer_auc(index, clean, anom, config, layout)) per_layer[name] = value;
        doc["per_layer_scan_auc"] = per_layer;
    }
    const std::string text = doc.dump() + "\n";
    out << text;
    if (!o.out.empty()) {
        RunManifest manifest;
        manifest.command = "eval-auc";
        o.flags.describe(manifest.config);
        manifest.config["per_layer"] = o.per_layer;
        manifest.config["threads"] = o.threads;
        for (const auto& p : {o.background, o.layout, o.clean, o.anom}) manifest.add_input(p);
        emit_artifact(o.out, text, manifest, started);
    }
    return kExitOk;
}

struct RepresentOptions {
    std::string results, layout, out;
};

int run_represent(const RepresentOptions& o, std::ostream&) {
    const auto started = Clock::now();
    const auto layout = load_layout(o.layout);
    std::istringstream lines(read_file_text(o.results));
    std::string text = "input_row,layer,rep\n";
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json doc;
        try {
            doc = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::malformed_input,
                        o.results + " line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!doc.contains("row") || !doc.contains("nodes") || !doc["nodes"].is_array())
            throw Error(ErrorCode::malformed_input,
                        o.results + " line " + std::to_string(line_no) + ": needs 'row' and 'nodes'");
        const auto row = doc["row"].get<std::size_t>();
        const auto nodes = doc["nodes"].get<std::vector<std::size_t>>();
        for (const auto& entry : representation(nodes, layout))
            text += std::to_string(row) + "," + entry.layer + "," + format_double(entry.rep) + "\n";
    }
    RunManifest manifest;
    manifest.command = "represent";
    manifest.add_input(o.results);
    manifest.add_input(o.layout);
    emit_artifact(o.out, text, manifest, started);
    return kExitOk;
}

struct SynthOptions {
    SynthSpec spec;
    std::string out_dir, layout;
};

int run_synth(const SynthOptions& o, std::ostream&) {
    const auto started = Clock::now();
    o.spec.validate();
    const NetworkLayout layout = o.layout.empty() ? NetworkLayout::single(o.spec.n_nodes) : load_layout(o.layout);
    layout.check_covers(o.spec.n_nodes);
    const auto data = synthesize(o.spec);

    const fs::path dir(o.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::io_failure, "cannot create " + dir.string());

    RunManifest manifest;
    manifest.command = "synth";
    manifest.config = {{"nodes", o.spec.n_nodes},       {"background", o.spec.n_background},
                       {"clean", o.spec.n_clean_eval},  {"anom", o.spec.n_anomalous_eval},
                       {"rho", o.spec.affected_fraction}, {"delta", o.spec.shift},
                       {"seed", o.spec.seed}};
    if (!o.layout.empty()) manifest.add_input(o.layout);

    auto write = [&](const std::string& name, const std::vector<std::uint8_t>& bytes) {
        write_file_atomic(dir / name, bytes);
        manifest.outputs.emplace_back((dir / name).string(), sha256_hex(bytes));
    };
    auto write_text = [&](const std::string& name, const std::string& text) {
        write(name, std::vector<std::uint8_t>(text.begin(), text.end()));
    };
    write("bg.acts", encode_acts(data.background));
    write("clean.acts", encode_acts(data.clean));
    write("anom.acts", encode_acts(data.anomalous));
    write_text("layout.json", layout_to_json(layout));
    ordered_json planted;
    planted["rho"] = o.spec.affected_fraction;
    planted["delta"] = o.spec.shift;
    planted["seed"] = o.spec.seed;
    planted["nodes"] = data.planted;
    write_text("planted.json", planted.dump() + "\n");

    manifest.duration_seconds = std::chrono::duration<double>(Clock::now() - started).count();
    write_file_atomic(dir / "manifest.json", manifest.to_json().dump(2) + "\n");
    return kExitOk;
}

RangeVector parse_ranges(const std::string& text, const std::string& origin) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::malformed_input, origin + ": " + e.what());
    }
    if (!doc.is_array() || doc.empty())
        throw Error(ErrorCode::malformed_input, origin + ": expected a nonempty array of ranges");
    RangeVector ranges(doc.size());
    std::vector<bool> seen(doc.size(), false);
    for (const auto& entry : doc) {
        if (!entry.is_object() || !entry.contains("node") || !entry.contains("pmin") || !entry.contains("pmax") ||
            !entry["node"].is_number_unsigned())
            throw Error(ErrorCode::malformed_input, origin + ": each range needs node, pmin, pmax");
        const auto node = entry["node"].get<std::size_t>();
        if (node >= ranges.size() || seen[node])
            throw Error(ErrorCode::malformed_input, origin + ": node ids must be 0..J-1 without repeats");
        seen[node] = true;
        ranges[node] = {entry["pmin"].get<double>(), entry["pmax"].get<double>()};
    }
    return ranges;
}

struct OracleOptions {
    std::string ranges, out;
    ScanFlags flags;
};

int run_oracle(const OracleOptions& o, std::ostream& out) {
    const auto started = Clock::now();
    const auto ranges = parse_ranges(read_file_text(o.ranges), o.ranges);
    const auto result = exhaustive_scan(ranges, o.flags.config());
    ordered_json doc;
    doc["score"] = result.score;
    doc["alpha"] = result.alpha_star;
    doc["subset"] = result.subset;
    const std::string text = doc.dump() + "\n";
    out << text;
    if (!o.out.empty()) {
        RunManifest manifest;
        manifest.command = "oracle";
        o.flags.describe(manifest.config);
        manifest.add_input(o.ranges);
        emit_artifact(o.out, text, manifest, started);
    }
    return kExitOk;
}

struct ImportOptions {
    std::string in, out;
};

int run_import_csv(const ImportOptions& o, std::ostream&) {
    const auto started = Clock::now();
    const auto bytes = encode_acts(import_csv(o.in));
    RunManifest manifest;
    manifest.command = "import-csv";
    manifest.add_input(o.in);
    emit_artifact(o.out, std::string(bytes.begin(), bytes.end()), manifest, started);
    return kExitOk;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::bad_magic:
        case ErrorCode::version_mismatch:
        case ErrorCode::truncated_payload:
        case ErrorCode::trailing_data:
        case ErrorCode::non_finite:
        case ErrorCode::io_failure:
        case ErrorCode::malformed_layout:
        case ErrorCode::malformed_input: return kExitBadInput;
        case ErrorCode::dimension_mismatch:
        case ErrorCode::out_of_range: return kExitDimension;
        case ErrorCode::invalid_argument: return kExitUsage;
        case ErrorCode::invariant_breach: return kExitInvariant;
    }
    return kExitInvariant;
}

std::string one_line(std::string s) {
    for (auto& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Subset scanning over neural network activations", "actscan"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    PvaluesOptions pv;
    auto* pvalues = app.add_subcommand("pvalues", "Empirical p-value ranges of one evaluation row");
    pvalues->add_option("--background", pv.background, "Background activations (ACTS)")->required();
    pvalues->add_option("--input", pv.input, "Evaluation activations (ACTS)")->required();
    pvalues->add_option("--row", pv.row, "Row of --input to convert")->capture_default_str();
    pvalues->add_option("--out", pv.out, "Output JSON file")->required();
    pvalues->add_option("--tie-tolerance", pv.tie_tolerance, "Background activations within this distance tie")
        ->capture_default_str();
    pvalues->add_option("--threads", pv.threads, "Worker threads (0 = OpenMP default)")->capture_default_str();

    ScanOptions sc;
    auto* scan_cmd = app.add_subcommand("scan", "Highest scoring node subset for every evaluation row");
    scan_cmd->add_option("--background", sc.background, "Background activations (ACTS)")->required();
    scan_cmd->add_option("--layout", sc.layout, "Network layout (JSON)")->required();
    scan_cmd->add_option("--input", sc.input, "Evaluation activations (ACTS)")->required();
    scan_cmd->add_option("--out", sc.out, "Output JSONL file, one object per row")->required();
    scan_cmd->add_flag("--all-nodes", sc.all_nodes, "Score the full eligible node set instead of scanning");
    scan_cmd->add_option("--threads", sc.threads, "Worker threads (0 = OpenMP default)")->capture_default_str();
    sc.flags.add_to(*scan_cmd, true, true);

    EvalOptions ev;
    auto* eval = app.add_subcommand("eval-auc", "Detection AUC of subset scanning vs scoring all nodes");
    eval->add_option("--background", ev.background, "Background activations (ACTS)")->required();
    eval->add_option("--layout", ev.layout, "Network layout (JSON)")->required();
    eval->add_option("--clean", ev.clean, "Clean evaluation activations (ACTS)")->required();
    eval->add_option("--anom", ev.anom, "Anomalous evaluation activations (ACTS)")->required();
    eval->add_option("--out", ev.out, "Also write the JSON result to this file");
    eval->add_flag("--per-layer", ev.per_layer, "Add subset-scan AUC per individual layer");
    eval->add_option("--threads", ev.threads, "Worker threads (0 = OpenMP default)")->capture_default_str();
    ev.flags.add_to(*eval, true, true);

    RepresentOptions rp;
    auto* represent = app.add_subcommand("represent", "Per-layer representation of detected subsets");
    represent->add_option("--results", rp.results, "scan output (JSONL)")->required();
    represent->add_option("--layout", rp.layout, "Network layout (JSON)")->required();
    represent->add_option("--out", rp.out, "Output CSV: input_row,layer,rep")->required();

    SynthOptions sy;
    auto* synth = app.add_subcommand("synth", "Generate synthetic background/clean/anomalous activations");
    synth->add_option("--nodes", sy.spec.n_nodes, "Nodes per row")->capture_default_str();
    synth->add_option("--background", sy.spec.n_background, "Background rows")->capture_default_str();
    synth->add_option("--clean", sy.spec.n_clean_eval, "Clean evaluation rows")->capture_default_str();
    synth->add_option("--anom", sy.spec.n_anomalous_eval, "Anomalous evaluation rows")->capture_default_str();
    synth->add_option("--rho", sy.spec.affected_fraction, "Fraction of nodes carrying the anomaly, in (0, 1]")
        ->capture_default_str();
    synth->add_option("--delta", sy.spec.shift, "Shift added to anomalous nodes")->capture_default_str();
    synth->add_option("--seed", sy.spec.seed, "RNG seed")->capture_default_str();
    synth->add_option("--layout", sy.layout, "Layout to emit (must cover --nodes); default one layer 'all'");
    synth->add_option("--out-dir", sy.out_dir, "Output directory")->required();

    OracleOptions orc;
    auto* oracle = app.add_subcommand("oracle", "Exhaustive subset search over a small ranges file");
    oracle->add_option("--ranges", orc.ranges, "Ranges JSON as written by 'pvalues'")->required();
    oracle->add_option("--out", orc.out, "Also write the JSON result to this file");
    orc.flags.add_to(*oracle, false, false);

    ImportOptions im;
    auto* import = app.add_subcommand("import-csv", "Convert headerless CSV activations to ACTS");
    import->add_option("--in", im.in, "CSV file")->required();
    import->add_option("--out", im.out, "ACTS file")->required();

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: usage: " << one_line(e.what()) << "\n";
        return kExitUsage;
    }

    try {
        if (*pvalues) return run_pvalues(pv, out);
        if (*scan_cmd) return run_scan(sc, out);
        if (*eval) return run_eval_auc(ev, out);
        if (*represent) return run_represent(rp, out);
        if (*synth) return run_synth(sy, out);
        if (*oracle) return run_oracle(orc, out);
        if (*import) return run_import_csv(im, out);
    } catch (const Error& e) {
        err << "error: " << to_string(e.code()) << ": " << one_line(e.what()) << "\n";
        return exit_code_for(e.code());
    } catch (const nlohmann::json::exception& e) {
        err << "error: malformed-input: " << one_line(e.what()) << "\n";
        return kExitBadInput;
    } catch (const std::exception& e) {
        err << "error: internal: " << one_line(e.what()) << "\n";
        return kExitInvariant;
    }
    err << "error: usage: no subcommand\n";
    return kExitUsage;
}

}  // namespace actscan::cli
