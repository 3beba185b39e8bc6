#pragma once
// One config to hold every stage's knobs, loadable from a JSON file with
// section names mirroring the sub-configs.

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "taigr/builder/builder.hpp"
#include "taigr/evidence/types.hpp"
#include "taigr/infer/solvers.hpp"
#include "taigr/infer/verdict.hpp"
#include "taigr/llm/provider.hpp"

namespace taigr {

struct ProviderSelection {
    enum class Kind { Mock, Http };
    Kind kind = Kind::Mock;
    std::string fixture_path;  // mock response table (Kind::Mock)
};

struct RetrieverSelection {
    enum class Kind { Lexical, Http };
    Kind kind = Kind::Lexical;
    std::string corpus_path;  // JSONL corpus (Kind::Lexical)
    std::string base_url;     // search endpoint (Kind::Http)
};

struct PipelineConfig {
    SamplingConfig sampling;
    BuilderConfig builder;
    RetrievalConfig retrieval;
    PotentialConfig potentials;
    VerdictConfig verdict;
    SolverChoice solver = SolverChoice::Auto;
    Ad3Options ad3;
    ProviderSelection provider;
    RetrieverSelection retriever;
    std::filesystem::path cache_dir = ".taigr-cache";
    bool cache_enabled = true;
    int concurrency_limit = 4;
    RetryPolicy retry;

    // Throws ConfigError when any section is out of range.
    void validate() const;

    static PipelineConfig from_json(const nlohmann::json& j);
    static PipelineConfig from_file(const std::filesystem::path& path);
    nlohmann::json to_json() const;
};

}  // namespace taigr
