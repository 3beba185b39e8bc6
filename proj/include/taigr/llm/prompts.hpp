#pragma once
// Prompt templates, shipped as text assets and embedded at build time.
//
// Templates use Python-format syntax: {name} is a placeholder, "{{" and "}}"
// are literal braces.

#include <map>
#include <set>
#include <string>

namespace taigr {

// Bump when any template text changes; part of every cache key.
inline constexpr const char* kPromptTemplateVersion = "v1";

// Stage tags double as template names and as the first component of cache keys.
namespace stage {
inline constexpr const char* kTakeawayExtraction = "takeaway_extraction";
inline constexpr const char* kTakeawayClassification = "takeaway_classification";
inline constexpr const char* kStatementSegmentation = "statement_segmentation";
inline constexpr const char* kRhetoricalClassification = "rhetorical_classification";
inline constexpr const char* kClaimExtraction = "claim_extraction";
inline constexpr const char* kSupportClassification = "support_classification";
inline constexpr const char* kCheckworthyClassification = "checkworthy_classification";
inline constexpr const char* kQueryExpansion = "query_expansion";
inline constexpr const char* kEvidenceClassification = "evidence_classification";
}  // namespace stage

// Raw template text for a stage tag. Throws std::invalid_argument for unknown tags.
const std::string& prompt_template(const std::string& stage_tag);

// Placeholder names appearing in a template.
std::set<std::string> template_placeholders(const std::string& template_text);

// Substitutes {name} fields and unescapes {{ }}. Throws std::invalid_argument
// when a placeholder has no value or a value is supplied for a missing field.
std::string render_template(const std::string& template_text,
                            const std::map<std::string, std::string>& fields);

// Convenience: render the named stage's template.
std::string render_stage_prompt(const std::string& stage_tag,
                                const std::map<std::string, std::string>& fields);

}  // namespace taigr
