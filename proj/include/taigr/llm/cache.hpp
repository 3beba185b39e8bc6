#pragma once
// On-disk cache for provider calls, keyed by a stable hash of
// (stage, template version, rendered prompt, sampling config).

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "taigr/llm/provider.hpp"

namespace taigr {

// Decorator: serves repeated calls from cache_dir without touching the inner
// provider. Safe for concurrent use; files are written atomically.
class CachingProvider : public LlmProvider {
public:
    CachingProvider(const LlmProvider& inner, std::filesystem::path cache_dir,
                    SamplingConfig sampling, bool enabled = true);

    std::string complete(const std::string& prompt, const std::string& schema_hint) const override;
    LabelDistribution classify_with_probs(const std::string& prompt,
                                          const std::vector<std::string>& labels) const override;

private:
    std::string key_for(const std::string& kind, const std::string& stage_tag,
                        const std::string& prompt, const std::string& extra) const;

    const LlmProvider& inner_;
    std::filesystem::path cache_dir_;
    std::string sampling_fingerprint_;
    bool enabled_;
    mutable std::mutex mutex_;
    mutable std::map<std::string, std::string> memo_;  // key -> file payload
};

// Atomically writes contents to path (temp file + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace taigr
