#pragma once
// Deterministic offline provider backed by a fixture table.
//
// Lookup order per call: exact (stage, prompt-hash) entries, then substring
// ("contains") entries in registration order, then the stage default, then the
// global default. Identical inputs always produce identical outputs.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "taigr/llm/provider.hpp"

namespace taigr {

class MockProvider : public LlmProvider {
public:
    MockProvider() = default;

    static MockProvider from_json(const nlohmann::json& j);
    static MockProvider from_file(const std::filesystem::path& path);

    // Fixture construction. Immutable once handed to stages.
    void add_completion(const std::string& stage_tag, std::vector<std::string> contains,
                        std::string response);
    void add_completion_for_prompt(const std::string& stage_tag, const std::string& exact_prompt,
                                   std::string response);
    void add_distribution(const std::string& stage_tag, std::vector<std::string> contains,
                          std::map<std::string, double> distribution);
    void set_default_completion(const std::string& stage_tag, std::string response);
    void set_default_distribution(const std::string& stage_tag,
                                  std::map<std::string, double> distribution);

    std::string complete(const std::string& prompt, const std::string& schema_hint) const override;
    LabelDistribution classify_with_probs(const std::string& prompt,
                                          const std::vector<std::string>& labels) const override;

private:
    struct Entry {
        std::string stage;
        std::optional<std::uint64_t> prompt_hash;  // exact match on fnv1a64(prompt)
        std::vector<std::string> contains;         // all substrings must occur in the prompt
        std::optional<std::string> response;
        std::optional<std::map<std::string, double>> distribution;

        bool matches(const std::string& stage_tag, const std::string& prompt,
                     std::uint64_t hash) const;
    };

    const Entry* find(const std::string& stage_tag, const std::string& prompt) const;

    std::vector<Entry> entries_;
    std::map<std::string, std::string> default_completions_;
    std::map<std::string, std::map<std::string, double>> default_distributions_;
};

}  // namespace taigr
