#pragma once
// Batch orchestration of the full flow plus the single-stage, eval, and
// analysis entry points the CLI wraps.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taigr/core/serialize.hpp"
#include "taigr/evidence/attach.hpp"
#include "taigr/evidence/lexical.hpp"
#include "taigr/infer/solvers.hpp"
#include "taigr/infer/verdict.hpp"
#include "taigr/pipeline/config.hpp"

namespace taigr {

// Provider/retriever instances assembled from config, with interface pointers
// into the owned objects.
struct Runtime {
    std::unique_ptr<LlmProvider> base_provider;
    std::unique_ptr<LlmProvider> caching_provider;
    std::unique_ptr<LexicalIndex> lexical;
    std::unique_ptr<RetrievalProvider> http_retriever;

    const LlmProvider* provider = nullptr;
    const RetrievalProvider* retriever = nullptr;
    const Reranker* reranker = nullptr;
};

Runtime make_runtime(const PipelineConfig& config);

struct TranscriptResult {
    std::string transcript_id;
    std::string status;  // "ok", "skipped_no_takeaway", or "error"
    std::string error;
    std::optional<Takeaway> takeaway;
    std::vector<Statement> statements;
    std::vector<Claim> claims;
    std::optional<ArgGraph> graph;
    std::optional<ArgGraph> augmented;
    std::optional<TrustAssignment> assignment;
    std::optional<Verdict> verdict;
    std::vector<std::string> warnings;

    // Fraction of statements per rhetorical role.
    std::map<RhetoricalRole, double> role_proportions() const;
};

// Runs all stages for one transcript. Stage errors are captured in the result
// rather than thrown.
TranscriptResult process_transcript(const Transcript& transcript, const PipelineConfig& config,
                                    const LlmProvider& provider,
                                    const RetrievalProvider& retriever, const Reranker& reranker);

// JSONL transcripts, one {id, text, metadata?} object per line.
std::vector<Transcript> read_transcripts_jsonl(const std::filesystem::path& path);

struct RunOutcome {
    int exit_code = 0;  // 0 ok, 1 partial failures, 2 fatal
    nlohmann::json summary;
};

// Processes every transcript (concurrently up to config.concurrency_limit),
// writes one artifact bundle per transcript plus summary.json under out_dir.
// Individual transcript failures are recorded as rows, not propagated.
RunOutcome cmd_run(const std::filesystem::path& transcripts_path, const PipelineConfig& config,
                   const std::filesystem::path& out_dir);

// Runs exactly one named stage ({takeaway, segment, roles, claims, graph,
// evidence, infer, verdict}) against prior-stage files.
nlohmann::json cmd_stage(const std::string& stage_name,
                         const std::map<std::string, std::filesystem::path>& inputs,
                         const PipelineConfig& config);

// F1 report for predictions A (and B when given) against gold, plus the paired
// bootstrap p-value when both systems are present.
nlohmann::json cmd_eval(const std::filesystem::path& pred_a_path,
                        const std::optional<std::filesystem::path>& pred_b_path,
                        const std::filesystem::path& gold_path, std::uint64_t seed,
                        int iterations = 10000);

std::string eval_report_text(const nlohmann::json& report);

// Joins run summaries with transcript metadata and emits correlation matrix
// artifacts (CSV + JSON) and a per-topic aggregate table under out_dir.
nlohmann::json cmd_analyze(const std::filesystem::path& summaries_path,
                           const std::filesystem::path& metadata_path,
                           const std::filesystem::path& out_dir);

nlohmann::json assignment_to_json(const TrustAssignment& assignment, const std::string& root_id);

}  // namespace taigr
