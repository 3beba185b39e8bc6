// taigr — takeaway-rooted argumentation graphs with factor-graph trust inference.
//
// Subcommands: run, stage, eval, analyze, export-dot.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "taigr/common.hpp"
#include "taigr/llm/cache.hpp"
#include "taigr/pipeline/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ConfigOverrides {
    std::optional<double> beta, gamma;
    std::optional<std::string> solver;
    std::optional<int> ad3_max_iters;
    std::optional<double> ad3_eta, ad3_tol;
    std::optional<int> concurrency;
    std::optional<std::string> cache_dir;
    bool no_cache = false;
};

taigr::PipelineConfig load_config(const std::string& path, const ConfigOverrides& ov) {
    taigr::PipelineConfig config = taigr::PipelineConfig::from_file(path);
    if (ov.beta) config.potentials.beta = *ov.beta;
    if (ov.gamma) config.potentials.gamma = *ov.gamma;
    if (ov.solver) {
        auto choice = taigr::solver_choice_from_string(*ov.solver);
        if (!choice) throw taigr::ConfigError("--solver must be auto, exact, or ad3");
        config.solver = *choice;
    }
    if (ov.ad3_max_iters) config.ad3.max_iters = *ov.ad3_max_iters;
    if (ov.ad3_eta) config.ad3.eta = *ov.ad3_eta;
    if (ov.ad3_tol) config.ad3.tol = *ov.ad3_tol;
    if (ov.concurrency) config.concurrency_limit = *ov.concurrency;
    if (ov.cache_dir) config.cache_dir = *ov.cache_dir;
    if (ov.no_cache) config.cache_enabled = false;
    config.validate();
    return config;
}

void emit(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        taigr::write_file_atomic(out_path, text);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"takeaway argumentation graphs and factor-graph trust inference"};
    app.require_subcommand(1);

    std::string config_path;
    ConfigOverrides ov;
    app.add_option("--config", config_path, "pipeline config JSON")->required(false);
    app.add_option("--beta", ov.beta, "override potentials.beta");
    app.add_option("--gamma", ov.gamma, "override potentials.gamma");
    app.add_option("--solver", ov.solver, "override solver choice: auto|exact|ad3");
    app.add_option("--ad3-max-iters", ov.ad3_max_iters, "override AD3 iteration cap");
    app.add_option("--ad3-eta", ov.ad3_eta, "override AD3 penalty parameter");
    app.add_option("--ad3-tol", ov.ad3_tol, "override AD3 residual tolerance");
    app.add_option("--concurrency", ov.concurrency, "override concurrency limit");
    app.add_option("--cache-dir", ov.cache_dir, "override cache directory");
    app.add_flag("--no-cache", ov.no_cache, "disable the provider call cache");

    // run
    auto* run = app.add_subcommand("run", "run the full pipeline over a transcript batch");
    std::string transcripts_path, out_dir;
    run->add_option("--transcripts", transcripts_path, "JSONL transcripts")->required();
    run->add_option("--out", out_dir, "output directory")->required();

    // stage
    auto* stage = app.add_subcommand("stage", "run a single pipeline stage");
    std::string stage_name, in_transcript, in_statements, in_claims, in_takeaway, in_graph, in_trust,
        stage_out;
    stage->add_option("--name", stage_name,
                      "takeaway|segment|roles|claims|graph|evidence|infer|verdict")
        ->required();
    stage->add_option("--transcript", in_transcript, "transcript JSON file");
    stage->add_option("--statements", in_statements, "statements JSON file");
    stage->add_option("--claims", in_claims, "claims JSON file");
    stage->add_option("--takeaway", in_takeaway, "takeaway JSON file");
    stage->add_option("--graph", in_graph, "graph JSON file");
    stage->add_option("--trust", in_trust, "trust/assignment JSON file");
    stage->add_option("--out", stage_out, "output file (stdout when omitted)");

    // eval
    auto* eval = app.add_subcommand("eval", "F1 report and paired bootstrap significance");
    std::string pred_a, pred_b, gold_path, eval_out;
    std::uint64_t seed = 0;
    int iterations = 10000;
    eval->add_option("--pred-a", pred_a, "predictions JSONL for system A")->required();
    eval->add_option("--pred-b", pred_b, "predictions JSONL for system B (enables the bootstrap)");
    eval->add_option("--gold", gold_path, "gold labels JSONL")->required();
    eval->add_option("--seed", seed, "bootstrap seed");
    eval->add_option("--iterations", iterations, "bootstrap resamples (default 10000)");
    eval->add_option("--out", eval_out, "report JSON output (stdout when omitted)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "correlation matrix and per-topic aggregates");
    std::string summaries_path, metadata_path, analyze_out;
    analyze->add_option("--summaries", summaries_path, "summary.json from a run")->required();
    analyze->add_option("--metadata", metadata_path, "transcript metadata JSONL")->required();
    analyze->add_option("--out-dir", analyze_out, "directory for CSV/JSON artifacts")->required();

    // export-dot
    auto* export_dot = app.add_subcommand("export-dot", "convert a graph JSON file to Graphviz DOT");
    std::string dot_in, dot_out;
    export_dot->add_option("--graph", dot_in, "graph JSON file")->required();
    export_dot->add_option("--out", dot_out, "DOT output file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (config_path.empty()) throw taigr::ConfigError("run requires --config");
            const auto config = load_config(config_path, ov);
            const taigr::RunOutcome outcome = taigr::cmd_run(transcripts_path, config, out_dir);
            std::cout << "wrote " << (fs::path(out_dir) / "summary.json").string() << "\n";
            return outcome.exit_code;
        }
        if (stage->parsed()) {
            if (config_path.empty()) throw taigr::ConfigError("stage requires --config");
            const auto config = load_config(config_path, ov);
            std::map<std::string, fs::path> inputs;
            if (!in_transcript.empty()) inputs["transcript"] = in_transcript;
            if (!in_statements.empty()) inputs["statements"] = in_statements;
            if (!in_claims.empty()) inputs["claims"] = in_claims;
            if (!in_takeaway.empty()) inputs["takeaway"] = in_takeaway;
            if (!in_graph.empty()) inputs["graph"] = in_graph;
            if (!in_trust.empty()) inputs["trust"] = in_trust;
            emit(taigr::cmd_stage(stage_name, inputs, config), stage_out);
            return 0;
        }
        if (eval->parsed()) {
            std::optional<fs::path> pred_b_path;
            if (!pred_b.empty()) pred_b_path = pred_b;
            const json report = taigr::cmd_eval(pred_a, pred_b_path, gold_path, seed, iterations);
            std::cerr << taigr::eval_report_text(report);
            emit(report, eval_out);
            return 0;
        }
        if (analyze->parsed()) {
            const json result = taigr::cmd_analyze(summaries_path, metadata_path, analyze_out);
            for (const auto& w : result["warnings"]) {
                std::cerr << "warning: " << w.get<std::string>() << "\n";
            }
            std::cout << "wrote correlation artifacts to " << analyze_out << "\n";
            return 0;
        }
        if (export_dot->parsed()) {
            std::ifstream in(dot_in);
            if (!in) throw taigr::ConfigError("cannot open graph file: " + dot_in);
            std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            const taigr::ArgGraph g = taigr::deserialize_graph(bytes);
            const std::string dot = taigr::serialize_graph(g, taigr::GraphFormat::Dot);
            if (dot_out.empty()) std::cout << dot;
            else taigr::write_file_atomic(dot_out, dot);
            return 0;
        }
    } catch (const taigr::ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
