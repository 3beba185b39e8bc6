#include "taigr/llm/cache.hpp"

#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "taigr/common.hpp"
#include "taigr/llm/prompts.hpp"

namespace taigr {

using nlohmann::json;

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::create_directories(path.parent_path());
    // Unique temp name per thread to avoid collisions under concurrent writers.
    std::ostringstream tmp_name;
    tmp_name << path.filename().string() << ".tmp." << std::this_thread::get_id();
    const auto tmp = path.parent_path() / tmp_name.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write file: " + tmp.string());
        out << contents;
    }
    std::filesystem::rename(tmp, path);
}

CachingProvider::CachingProvider(const LlmProvider& inner, std::filesystem::path cache_dir,
                                 SamplingConfig sampling, bool enabled)
    : inner_(inner), cache_dir_(std::move(cache_dir)), enabled_(enabled) {
    std::ostringstream os;
    os << sampling.model_name << '\x1f' << sampling.temperature << '\x1f' << sampling.top_p;
    sampling_fingerprint_ = os.str();
}

std::string CachingProvider::key_for(const std::string& kind, const std::string& stage_tag,
                                     const std::string& prompt, const std::string& extra) const {
    std::string material;
    material.reserve(prompt.size() + 128);
    material += kind;
    material += '\x1f';
    material += stage_tag;
    material += '\x1f';
    material += kPromptTemplateVersion;
    material += '\x1f';
    material += prompt;
    material += '\x1f';
    material += sampling_fingerprint_;
    material += '\x1f';
    material += extra;
    return to_hex(fnv1a64(material));
}

std::string CachingProvider::complete(const std::string& prompt,
                                      const std::string& schema_hint) const {
    if (!enabled_) return inner_.complete(prompt, schema_hint);

    const std::string key = key_for("complete", stage_tag_of(schema_hint), prompt, "");
    {
        std::lock_guard lock(mutex_);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    const auto path = cache_dir_ / (key + ".json");
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        json j;
        in >> j;
        std::string response = j.at("response").get<std::string>();
        std::lock_guard lock(mutex_);
        memo_[key] = response;
        return response;
    }
    const std::string response = inner_.complete(prompt, schema_hint);
    json j{{"kind", "complete"}, {"stage", stage_tag_of(schema_hint)}, {"response", response}};
    write_file_atomic(path, j.dump(2));
    std::lock_guard lock(mutex_);
    memo_[key] = response;
    return response;
}

LabelDistribution CachingProvider::classify_with_probs(const std::string& prompt,
                                                       const std::vector<std::string>& labels) const {
    if (!enabled_) return inner_.classify_with_probs(prompt, labels);

    std::string label_key;
    for (const auto& l : labels) {
        label_key += l;
        label_key += '\x1e';
    }
    const std::string key = key_for("probs", "classify", prompt, label_key);

    auto from_payload = [&](const std::string& payload) {
        const json j = json::parse(payload);
        LabelDistribution d;
        d.labels = j.at("labels").get<std::vector<std::string>>();
        d.probs = j.at("probs").get<std::vector<double>>();
        return d;
    };

    {
        std::lock_guard lock(mutex_);
        if (auto it = memo_.find(key); it != memo_.end()) return from_payload(it->second);
    }
    const auto path = cache_dir_ / (key + ".json");
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        std::stringstream buf;
        buf << in.rdbuf();
        const std::string payload = buf.str();
        std::lock_guard lock(mutex_);
        memo_[key] = payload;
        return from_payload(payload);
    }
    const LabelDistribution d = inner_.classify_with_probs(prompt, labels);
    const json j{{"kind", "probs"}, {"labels", d.labels}, {"probs", d.probs}};
    const std::string payload = j.dump(2);
    write_file_atomic(path, payload);
    std::lock_guard lock(mutex_);
    memo_[key] = payload;
    return d;
}

}  // namespace taigr
