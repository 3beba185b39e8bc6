#pragma once
// The chat-completion provider abstraction every LLM stage runs against.

#include <cstdint>
#include <string>
#include <vector>

namespace taigr {

// Sampling parameters and endpoint identity for provider calls.
struct SamplingConfig {
    double temperature = 0.25;
    double top_p = 0.95;
    std::string model_name = "gpt-4.1-mini";
    std::string endpoint_url;
    std::string api_key_env_var = "TAIGR_API_KEY";

    bool valid() const { return temperature >= 0.0 && top_p > 0.0 && top_p <= 1.0; }
};

struct RetryPolicy {
    int max_retries = 2;            // attempts = max_retries + 1
    int base_delay_ms = 500;        // doubles per retry
};

// A probability assigned to each of the requested labels, in request order.
struct LabelDistribution {
    std::vector<std::string> labels;
    std::vector<double> probs;

    // Nonnegative entries summing to 1 +- 1e-9 over exactly the requested labels.
    bool valid() const;
};

// Pluggable chat-completion backend. Implementations must be safely callable
// from multiple threads.
class LlmProvider {
public:
    virtual ~LlmProvider() = default;

    // Free-form completion. schema_hint names the calling stage and sketches the
    // expected response shape; backends may use it for routing or logging.
    // Throws TransportError / ParseError on failure.
    virtual std::string complete(const std::string& prompt, const std::string& schema_hint) const = 0;

    // A probability distribution over exactly the given labels.
    virtual LabelDistribution classify_with_probs(const std::string& prompt,
                                                  const std::vector<std::string>& labels) const = 0;
};

// Extracts the leading stage tag from a schema hint of the form "stage: details".
std::string stage_tag_of(const std::string& schema_hint);

}  // namespace taigr
