#pragma once
// Typed wrappers for the LLM-delegated pipeline stages: prompt rendering,
// provider calls with retries, response parsing and validation.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "taigr/core/types.hpp"
#include "taigr/llm/distributions.hpp"
#include "taigr/llm/provider.hpp"

namespace taigr {

struct StageOptions {
    RetryPolicy retry;
    // Optional sink for non-fatal stage warnings (cleared grounding, unknown labels, ...).
    std::vector<std::string>* warnings = nullptr;
};

inline constexpr const char* kNoTakeawaySentinel = "NO_TAKEAWAY_FOUND";

// Extracts the single takeaway. found=false iff the provider returns the
// fallback sentinel. Grounding substrings are verified against the transcript;
// unverifiable ones are dropped with a warning.
Takeaway extract_takeaway(const Transcript& transcript, const LlmProvider& provider,
                          const StageOptions& opts = {});

struct TakeawayTypeResult {
    TakeawayType type = TakeawayType::Explicit;
    std::string justification;
};

// Pre: takeaway.found. Throws std::invalid_argument otherwise.
TakeawayTypeResult classify_takeaway_type(const Transcript& transcript, const Takeaway& takeaway,
                                          const LlmProvider& provider,
                                          const StageOptions& opts = {});

// Splits the transcript into standalone statements S1..Sn (roles unset).
// Throws ParseError if the provider yields an empty list.
std::vector<Statement> segment_statements(const Transcript& transcript,
                                          const LlmProvider& provider,
                                          const StageOptions& opts = {});

// Assigns exactly one rhetorical role per statement. Unknown provider labels
// map to RhetoricalRole::None with a warning.
std::vector<Statement> classify_rhetorical_roles(const Transcript& transcript,
                                                 std::vector<Statement> statements,
                                                 const LlmProvider& provider,
                                                 const StageOptions& opts = {});

// Extracts claims; deduplicates by exact text, renumbers ids claim_1..claim_m,
// filters statement_ids to existing statements, flags ungrounded claims.
std::vector<Claim> extract_claims(const Transcript& transcript,
                                  const std::vector<Statement>& statements,
                                  const LlmProvider& provider, const StageOptions& opts = {});

// Classifies every candidate against target_text as direct/weak/no support.
// candidates are (id, text) pairs; each is classified with its own provider call.
std::map<std::string, SupportDistribution> classify_support(
    const Transcript& transcript, const std::string& target_text,
    const std::vector<std::pair<std::string, std::string>>& candidates,
    const LlmProvider& provider, const StageOptions& opts = {});

// PubMed-checkworthiness for (id, text) nodes; doubt resolves to true.
std::map<std::string, bool> classify_checkworthy(
    const Transcript& transcript, const std::vector<std::pair<std::string, std::string>>& nodes,
    const LlmProvider& provider, const StageOptions& opts = {});

struct QueryExpansion {
    std::vector<std::string> supporting;  // at most 5
    std::vector<std::string> opposing;    // at most 5
};

QueryExpansion expand_queries(const Transcript& transcript, const std::string& claim_text,
                              const LlmProvider& provider, const StageOptions& opts = {});

// Five-way stance per evidence document.
std::map<std::string, StanceDistribution> classify_evidence(const Transcript& transcript,
                                                            const std::string& claim_text,
                                                            const std::vector<EvidenceDoc>& docs,
                                                            const LlmProvider& provider,
                                                            const StageOptions& opts = {});

}  // namespace taigr
