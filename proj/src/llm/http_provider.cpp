#include "taigr/llm/http_provider.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "taigr/common.hpp"

namespace taigr {

using nlohmann::json;

namespace {

struct ParsedUrl {
    std::string scheme_host;  // e.g. "http://localhost:8080"
    std::string path;         // e.g. "/v1/chat/completions"
};

ParsedUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint_url must start with http:// or https://: " + url);
    }
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string first_word(const std::string& s) {
    size_t b = 0;
    while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    size_t e = b;
    while (e < s.size() && !std::isspace(static_cast<unsigned char>(s[e]))) ++e;
    return s.substr(b, e - b);
}

// Limits concurrent requests; cheap stand-in for a full connection pool.
class InFlightGate {
public:
    explicit InFlightGate(int limit) : limit_(limit) {}

    void acquire() {
        std::unique_lock lock(m_);
        cv_.wait(lock, [&] { return in_flight_ < limit_; });
        ++in_flight_;
    }
    void release() {
        {
            std::lock_guard lock(m_);
            --in_flight_;
        }
        cv_.notify_one();
    }

private:
    std::mutex m_;
    std::condition_variable cv_;
    int limit_;
    int in_flight_ = 0;
};

struct GateGuard {
    InFlightGate& gate;
    explicit GateGuard(InFlightGate& g) : gate(g) { gate.acquire(); }
    ~GateGuard() { gate.release(); }
};

// Scans backwards for a JSON object containing a "probs" object.
std::optional<json> find_verbalized_probs(const std::string& content) {
    size_t pos = content.rfind("\"probs\"");
    while (pos != std::string::npos) {
        // Walk back to the opening brace of the enclosing object.
        size_t open = content.rfind('{', pos);
        while (open != std::string::npos) {
            int depth = 0;
            for (size_t i = open; i < content.size(); ++i) {
                if (content[i] == '{') ++depth;
                else if (content[i] == '}') {
                    if (--depth == 0) {
                        try {
                            json j = json::parse(content.substr(open, i - open + 1));
                            if (j.contains("probs") && j["probs"].is_object()) return j;
                        } catch (const json::exception&) {
                        }
                        break;
                    }
                }
            }
            open = open == 0 ? std::string::npos : content.rfind('{', open - 1);
        }
        pos = pos == 0 ? std::string::npos : content.rfind("\"probs\"", pos - 1);
    }
    return std::nullopt;
}

}  // namespace

struct HttpProvider::Impl {
    SamplingConfig sampling;
    ParsedUrl url;
    std::string api_key;
    mutable InFlightGate gate;

    Impl(SamplingConfig cfg, int max_in_flight)
        : sampling(std::move(cfg)), url(split_url(sampling.endpoint_url)), gate(max_in_flight) {
        if (!sampling.valid()) throw ConfigError("invalid sampling config");
        if (!sampling.api_key_env_var.empty()) {
            if (const char* v = std::getenv(sampling.api_key_env_var.c_str())) api_key = v;
        }
    }

    json post(const json& body) const {
        GateGuard guard(gate);
        httplib::Client client(url.scheme_host);
        client.set_read_timeout(120, 0);
        client.set_connection_timeout(10, 0);
        httplib::Headers headers;
        if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
        auto res = client.Post(url.path, headers, body.dump(), "application/json");
        if (!res) {
            throw TransportError("request to " + sampling.endpoint_url + " failed: " +
                                 httplib::to_string(res.error()));
        }
        if (res->status < 200 || res->status >= 300) {
            throw TransportError("endpoint returned status " + std::to_string(res->status) + ": " +
                                 res->body.substr(0, 200));
        }
        try {
            return json::parse(res->body);
        } catch (const json::exception& ex) {
            throw ParseError(std::string("endpoint returned non-JSON body: ") + ex.what());
        }
    }

    json request_body(const std::string& prompt, bool want_logprobs) const {
        json body{{"model", sampling.model_name},
                  {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
                  {"temperature", sampling.temperature},
                  {"top_p", sampling.top_p}};
        if (want_logprobs) {
            body["logprobs"] = true;
            body["top_logprobs"] = 8;
        }
        return body;
    }

    static std::string content_of(const json& response) {
        try {
            return response.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& ex) {
            throw ParseError(std::string("response has no message content: ") + ex.what());
        }
    }
};

HttpProvider::HttpProvider(SamplingConfig sampling, int max_in_flight)
    : impl_(std::make_unique<Impl>(std::move(sampling), std::max(1, max_in_flight))) {}

HttpProvider::~HttpProvider() = default;

std::string HttpProvider::complete(const std::string& prompt, const std::string&) const {
    const json response = impl_->post(impl_->request_body(prompt, false));
    return Impl::content_of(response);
}

LabelDistribution HttpProvider::classify_with_probs(const std::string& prompt,
                                                    const std::vector<std::string>& labels) const {
    if (labels.empty()) throw std::invalid_argument("classify_with_probs: no labels");

    // Ask for a verbalized distribution so endpoints without logprobs still work.
    std::string full_prompt = prompt;
    full_prompt +=
        "\n\nAfter the JSON answer above, output one extra line: a JSON object of the form "
        "{\"probs\": {\"<label>\": <probability>}} assigning your probability to every one of "
        "these labels: ";
    for (size_t i = 0; i < labels.size(); ++i) {
        if (i > 0) full_prompt += ", ";
        full_prompt += "\"" + labels[i] + "\"";
    }
    full_prompt += ". Probabilities must be nonnegative and sum to 1.";

    const json response = impl_->post(impl_->request_body(full_prompt, true));
    const std::string content = Impl::content_of(response);

    LabelDistribution out;
    out.labels = labels;
    out.probs.assign(labels.size(), 0.0);

    // Route 1: label-token log-probabilities, usable when first words are distinct.
    std::vector<std::string> firsts;
    bool firsts_distinct = true;
    for (const auto& l : labels) {
        std::string w = lower(first_word(l));
        if (std::find(firsts.begin(), firsts.end(), w) != firsts.end()) firsts_distinct = false;
        firsts.push_back(std::move(w));
    }
    if (firsts_distinct) {
        try {
            const json& lp = response.at("choices").at(0).at("logprobs").at("content");
            for (const auto& tok : lp) {
                const std::string token_text = lower(first_word(tok.value("token", std::string{})));
                if (std::find(firsts.begin(), firsts.end(), token_text) == firsts.end()) continue;
                // Found the position where a label is emitted; read its alternatives.
                double total = 0.0;
                std::vector<double> probs(labels.size(), 0.0);
                for (const auto& alt : tok.value("top_logprobs", json::array())) {
                    const std::string alt_text = lower(first_word(alt.value("token", std::string{})));
                    auto it = std::find(firsts.begin(), firsts.end(), alt_text);
                    if (it == firsts.end()) continue;
                    const size_t idx = static_cast<size_t>(it - firsts.begin());
                    const double p = std::exp(alt.at("logprob").get<double>());
                    probs[idx] = std::max(probs[idx], p);
                }
                for (double p : probs) total += p;
                if (total > 0.0) {
                    for (auto& p : probs) p /= total;
                    out.probs = std::move(probs);
                    return out;
                }
                break;
            }
        } catch (const json::exception&) {
            // No usable logprobs; fall through.
        }
    }

    // Route 2: verbalized probabilities.
    if (auto j = find_verbalized_probs(content)) {
        double total = 0.0;
        std::vector<double> probs(labels.size(), 0.0);
        for (size_t i = 0; i < labels.size(); ++i) {
            if ((*j)["probs"].contains(labels[i])) {
                const double p = (*j)["probs"][labels[i]].get<double>();
                if (p >= 0.0 && std::isfinite(p)) probs[i] = p;
            }
        }
        for (double p : probs) total += p;
        if (total > 0.0) {
            for (auto& p : probs) p /= total;
            out.probs = std::move(probs);
            return out;
        }
    }

    // Route 3: one-hot on the label mentioned in the answer (earliest, longest).
    const std::string content_lower = lower(content);
    size_t best_pos = std::string::npos;
    size_t best_idx = 0;
    size_t best_len = 0;
    for (size_t i = 0; i < labels.size(); ++i) {
        const auto pos = content_lower.find(lower(labels[i]));
        if (pos == std::string::npos) continue;
        if (pos < best_pos || (pos == best_pos && labels[i].size() > best_len)) {
            best_pos = pos;
            best_idx = i;
            best_len = labels[i].size();
        }
    }
    if (best_pos == std::string::npos) {
        throw ParseError("response mentions none of the requested labels");
    }
    out.probs[best_idx] = 1.0;
    return out;
}

}  // namespace taigr
