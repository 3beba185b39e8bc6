#include "taigr/llm/mock_provider.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <string_view>

#include <nlohmann/json.hpp>

#include "taigr/common.hpp"
#include "taigr/llm/distributions.hpp"

namespace taigr {

using nlohmann::json;

namespace {

// Substring matching is scoped to the prompt's input section so that example
// text baked into the templates never triggers an entry.
std::string_view match_region(const std::string& prompt) {
    const auto pos = prompt.rfind("### Input");
    if (pos == std::string::npos) return prompt;
    return std::string_view(prompt).substr(pos);
}

}  // namespace

bool MockProvider::Entry::matches(const std::string& stage_tag, const std::string& prompt,
                                  std::uint64_t hash) const {
    if (stage != stage_tag) return false;
    if (prompt_hash) return *prompt_hash == hash;
    const std::string_view region = match_region(prompt);
    for (const auto& needle : contains) {
        if (region.find(needle) == std::string_view::npos) return false;
    }
    return !contains.empty();
}

const MockProvider::Entry* MockProvider::find(const std::string& stage_tag,
                                              const std::string& prompt) const {
    const std::uint64_t hash = fnv1a64(prompt);
    // Exact hash entries take precedence over substring entries.
    for (const auto& e : entries_) {
        if (e.prompt_hash && e.matches(stage_tag, prompt, hash)) return &e;
    }
    for (const auto& e : entries_) {
        if (!e.prompt_hash && e.matches(stage_tag, prompt, hash)) return &e;
    }
    return nullptr;
}

void MockProvider::add_completion(const std::string& stage_tag, std::vector<std::string> contains,
                                  std::string response) {
    Entry e;
    e.stage = stage_tag;
    e.contains = std::move(contains);
    e.response = std::move(response);
    entries_.push_back(std::move(e));
}

void MockProvider::add_completion_for_prompt(const std::string& stage_tag,
                                             const std::string& exact_prompt,
                                             std::string response) {
    Entry e;
    e.stage = stage_tag;
    e.prompt_hash = fnv1a64(exact_prompt);
    e.response = std::move(response);
    entries_.push_back(std::move(e));
}

void MockProvider::add_distribution(const std::string& stage_tag,
                                    std::vector<std::string> contains,
                                    std::map<std::string, double> distribution) {
    Entry e;
    e.stage = stage_tag;
    e.contains = std::move(contains);
    e.distribution = std::move(distribution);
    entries_.push_back(std::move(e));
}

void MockProvider::set_default_completion(const std::string& stage_tag, std::string response) {
    default_completions_[stage_tag] = std::move(response);
}

void MockProvider::set_default_distribution(const std::string& stage_tag,
                                            std::map<std::string, double> distribution) {
    default_distributions_[stage_tag] = std::move(distribution);
}

std::string MockProvider::complete(const std::string& prompt,
                                   const std::string& schema_hint) const {
    const std::string stage = stage_tag_of(schema_hint);
    if (const Entry* e = find(stage, prompt); e != nullptr && e->response) {
        return *e->response;
    }
    if (auto it = default_completions_.find(stage); it != default_completions_.end()) {
        return it->second;
    }
    throw std::logic_error("MockProvider: no fixture entry for stage '" + stage +
                           "' (prompt begins: " + prompt.substr(0, 80) + "...)");
}

namespace {

// The two distribution-producing stages are identified by their label sets.
std::string stage_for_labels(const std::vector<std::string>& labels) {
    if (labels.size() == kSupportLabels.size() &&
        std::equal(labels.begin(), labels.end(), kSupportLabels.begin())) {
        return "support_classification";
    }
    if (labels.size() == kStanceLabels.size() &&
        std::equal(labels.begin(), labels.end(), kStanceLabels.begin())) {
        return "evidence_classification";
    }
    return "classify";
}

}  // namespace

LabelDistribution MockProvider::classify_with_probs(const std::string& prompt,
                                                    const std::vector<std::string>& labels) const {
    const std::string matched_stage = stage_for_labels(labels);
    const std::map<std::string, double>* dist = nullptr;
    if (const Entry* e = find(matched_stage, prompt); e != nullptr && e->distribution) {
        dist = &*e->distribution;
    }
    if (dist == nullptr) {
        if (auto it = default_distributions_.find(matched_stage); it != default_distributions_.end()) {
            dist = &it->second;
        }
    }
    if (dist == nullptr) {
        throw std::logic_error("MockProvider: no distribution fixture for stage '" + matched_stage +
                               "' matches prompt (begins: " + prompt.substr(0, 80) + "...)");
    }

    LabelDistribution out;
    out.labels = labels;
    out.probs.reserve(labels.size());
    for (const auto& label : labels) {
        auto it = dist->find(label);
        out.probs.push_back(it == dist->end() ? 0.0 : it->second);
    }
    if (!out.valid()) {
        throw std::logic_error("MockProvider: fixture distribution for stage '" + matched_stage +
                               "' does not form a distribution over the requested labels");
    }
    return out;
}

MockProvider MockProvider::from_json(const json& j) {
    MockProvider p;
    if (j.contains("defaults")) {
        for (const auto& [stage, d] : j["defaults"].items()) {
            if (d.contains("response")) {
                p.set_default_completion(stage, d["response"].get<std::string>());
            } else if (d.contains("response_json")) {
                p.set_default_completion(stage, d["response_json"].dump());
            }
            if (d.contains("distribution")) {
                p.set_default_distribution(stage, d["distribution"].get<std::map<std::string, double>>());
            } else if (d.contains("label")) {
                p.set_default_distribution(stage, {{d["label"].get<std::string>(), 1.0}});
            }
        }
    }
    for (const auto& e : j.value("entries", json::array())) {
        const std::string stage = e.at("stage").get<std::string>();
        std::vector<std::string> contains = e.value("contains", std::vector<std::string>{});
        if (e.contains("response") || e.contains("response_json")) {
            const std::string response = e.contains("response") ? e["response"].get<std::string>()
                                                                : e["response_json"].dump();
            if (e.contains("prompt")) {
                p.add_completion_for_prompt(stage, e["prompt"].get<std::string>(), response);
            } else {
                p.add_completion(stage, contains, response);
            }
        } else if (e.contains("distribution")) {
            p.add_distribution(stage, contains, e["distribution"].get<std::map<std::string, double>>());
        } else if (e.contains("label")) {
            p.add_distribution(stage, contains, {{e["label"].get<std::string>(), 1.0}});
        } else {
            throw ConfigError("mock fixture entry needs response, response_json, distribution or label");
        }
    }
    return p;
}

MockProvider MockProvider::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mock fixture file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw ConfigError("malformed mock fixture file " + path.string() + ": " + ex.what());
    }
    return from_json(j);
}

}  // namespace taigr
