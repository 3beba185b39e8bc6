#pragma once
// Chat-completion provider speaking the widely deployed JSON wire format:
// request {model, messages, temperature, top_p}, response with message content.

#include <memory>
#include <string>
#include <vector>

#include "taigr/llm/provider.hpp"

namespace taigr {

class HttpProvider : public LlmProvider {
public:
    // endpoint_url must be of the form http(s)://host[:port]/path. The API key is
    // read from the environment variable named in the sampling config; requests
    // go out without an Authorization header when it is unset.
    explicit HttpProvider(SamplingConfig sampling, int max_in_flight = 4);
    ~HttpProvider() override;

    HttpProvider(const HttpProvider&) = delete;
    HttpProvider& operator=(const HttpProvider&) = delete;

    std::string complete(const std::string& prompt, const std::string& schema_hint) const override;

    // Distribution sources, in order of preference: label-token log-probabilities
    // when the endpoint returns them, a verbalized {"probs": {...}} JSON field
    // requested in the prompt, and finally one-hot on the returned label.
    LabelDistribution classify_with_probs(const std::string& prompt,
                                          const std::vector<std::string>& labels) const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace taigr
