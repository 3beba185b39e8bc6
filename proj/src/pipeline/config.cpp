#include "taigr/pipeline/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "taigr/common.hpp"

namespace taigr {

using nlohmann::json;

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

}  // namespace

void PipelineConfig::validate() const {
    if (!sampling.valid()) throw ConfigError("sampling: temperature >= 0 and top_p in (0,1] required");
    if (!builder.valid()) throw ConfigError("builder: thresholds must lie in [0,1]");
    if (!retrieval.valid()) throw ConfigError("retrieval: invalid top_k/keep_per_node/threshold");
    if (!potentials.valid()) throw ConfigError("potentials: beta, gamma > 0 and peak in [0,1] required");
    if (!verdict.valid()) throw ConfigError("verdict: require 0 <= incorrect_max <= partial_max <= 1");
    if (ad3.max_iters < 1 || ad3.eta <= 0.0 || ad3.tol <= 0.0) throw ConfigError("solver: invalid AD3 parameters");
    if (concurrency_limit < 1) throw ConfigError("concurrency_limit must be >= 1");
    if (retry.max_retries < 0 || retry.base_delay_ms < 0) throw ConfigError("retry: invalid policy");
    if (provider.kind == ProviderSelection::Kind::Mock && provider.fixture_path.empty()) {
        throw ConfigError("provider: mock provider needs fixture_path");
    }
    if (provider.kind == ProviderSelection::Kind::Http && sampling.endpoint_url.empty()) {
        throw ConfigError("provider: http provider needs sampling.endpoint_url");
    }
    if (retriever.kind == RetrieverSelection::Kind::Lexical && retriever.corpus_path.empty()) {
        throw ConfigError("retriever: lexical retriever needs corpus_path");
    }
    if (retriever.kind == RetrieverSelection::Kind::Http && retriever.base_url.empty()) {
        throw ConfigError("retriever: http retriever needs base_url");
    }
}

PipelineConfig PipelineConfig::from_json(const json& j) {
    PipelineConfig c;
    try {
        if (j.contains("sampling")) {
            const json& s = j["sampling"];
            read_if(s, "temperature", c.sampling.temperature);
            read_if(s, "top_p", c.sampling.top_p);
            read_if(s, "model_name", c.sampling.model_name);
            read_if(s, "endpoint_url", c.sampling.endpoint_url);
            read_if(s, "api_key_env_var", c.sampling.api_key_env_var);
        }
        if (j.contains("builder")) {
            const json& b = j["builder"];
            read_if(b, "threshold_claim_to_takeaway", c.builder.threshold_claim_to_takeaway);
            read_if(b, "threshold_claim_to_claim", c.builder.threshold_claim_to_claim);
            read_if(b, "threshold_statement_pair", c.builder.threshold_statement_pair);
            read_if(b, "threshold_statement_to_claim", c.builder.threshold_statement_to_claim);
        }
        if (j.contains("retrieval")) {
            const json& r = j["retrieval"];
            read_if(r, "top_k", c.retrieval.top_k);
            read_if(r, "rerank_threshold", c.retrieval.rerank_threshold);
            read_if(r, "keep_per_node", c.retrieval.keep_per_node);
            read_if(r, "neutral_epsilon", c.retrieval.neutral_epsilon);
        }
        if (j.contains("potentials")) {
            const json& p = j["potentials"];
            read_if(p, "beta", c.potentials.beta);
            read_if(p, "gamma", c.potentials.gamma);
            read_if(p, "rhetorical_peak", c.potentials.rhetorical_peak);
            read_if(p, "rhetorical_strength", c.potentials.rhetorical_strength);
            read_if(p, "uniform_value", c.potentials.uniform_value);
        }
        if (j.contains("verdict")) {
            const json& v = j["verdict"];
            read_if(v, "incorrect_max", c.verdict.incorrect_max);
            read_if(v, "partial_max", c.verdict.partial_max);
        }
        if (j.contains("solver")) {
            const json& s = j["solver"];
            if (s.contains("choice")) {
                auto choice = solver_choice_from_string(s["choice"].get<std::string>());
                if (!choice) throw ConfigError("solver.choice must be auto/exact/ad3");
                c.solver = *choice;
            }
            read_if(s, "max_iters", c.ad3.max_iters);
            read_if(s, "eta", c.ad3.eta);
            read_if(s, "tol", c.ad3.tol);
        }
        if (j.contains("provider")) {
            const json& p = j["provider"];
            const std::string kind = p.value("kind", "mock");
            if (kind == "mock") c.provider.kind = ProviderSelection::Kind::Mock;
            else if (kind == "http") c.provider.kind = ProviderSelection::Kind::Http;
            else throw ConfigError("provider.kind must be mock or http");
            read_if(p, "fixture_path", c.provider.fixture_path);
        }
        if (j.contains("retriever")) {
            const json& r = j["retriever"];
            const std::string kind = r.value("kind", "lexical");
            if (kind == "lexical") c.retriever.kind = RetrieverSelection::Kind::Lexical;
            else if (kind == "http") c.retriever.kind = RetrieverSelection::Kind::Http;
            else throw ConfigError("retriever.kind must be lexical or http");
            read_if(r, "corpus_path", c.retriever.corpus_path);
            read_if(r, "base_url", c.retriever.base_url);
        }
        if (j.contains("cache_dir")) c.cache_dir = j["cache_dir"].get<std::string>();
        read_if(j, "cache_enabled", c.cache_enabled);
        read_if(j, "concurrency_limit", c.concurrency_limit);
        if (j.contains("retry")) {
            read_if(j["retry"], "max_retries", c.retry.max_retries);
            read_if(j["retry"], "base_delay_ms", c.retry.base_delay_ms);
        }
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("malformed config: ") + ex.what());
    }
    c.validate();
    return c;
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + ex.what());
    }
    return from_json(j);
}

json PipelineConfig::to_json() const {
    json j;
    j["sampling"] = {{"temperature", sampling.temperature},
                     {"top_p", sampling.top_p},
                     {"model_name", sampling.model_name},
                     {"endpoint_url", sampling.endpoint_url},
                     {"api_key_env_var", sampling.api_key_env_var}};
    j["builder"] = {{"threshold_claim_to_takeaway", builder.threshold_claim_to_takeaway},
                    {"threshold_claim_to_claim", builder.threshold_claim_to_claim},
                    {"threshold_statement_pair", builder.threshold_statement_pair},
                    {"threshold_statement_to_claim", builder.threshold_statement_to_claim}};
    j["retrieval"] = {{"top_k", retrieval.top_k},
                      {"rerank_threshold", retrieval.rerank_threshold},
                      {"keep_per_node", retrieval.keep_per_node},
                      {"neutral_epsilon", retrieval.neutral_epsilon}};
    j["potentials"] = {{"beta", potentials.beta},
                       {"gamma", potentials.gamma},
                       {"rhetorical_peak", potentials.rhetorical_peak},
                       {"rhetorical_strength", potentials.rhetorical_strength},
                       {"uniform_value", potentials.uniform_value}};
    j["verdict"] = {{"incorrect_max", verdict.incorrect_max}, {"partial_max", verdict.partial_max}};
    j["solver"] = {{"choice", to_string(solver)},
                   {"max_iters", ad3.max_iters},
                   {"eta", ad3.eta},
                   {"tol", ad3.tol}};
    j["provider"] = {{"kind", provider.kind == ProviderSelection::Kind::Mock ? "mock" : "http"},
                     {"fixture_path", provider.fixture_path}};
    j["retriever"] = {
        {"kind", retriever.kind == RetrieverSelection::Kind::Lexical ? "lexical" : "http"},
        {"corpus_path", retriever.corpus_path},
        {"base_url", retriever.base_url}};
    j["cache_dir"] = cache_dir.string();
    j["cache_enabled"] = cache_enabled;
    j["concurrency_limit"] = concurrency_limit;
    j["retry"] = {{"max_retries", retry.max_retries}, {"base_delay_ms", retry.base_delay_ms}};
    return j;
}

}  // namespace taigr
