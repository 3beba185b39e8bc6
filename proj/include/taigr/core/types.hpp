#pragma once
// Domain types shared by every pipeline stage.
//
// All types here are plain values, immutable by convention after construction;
// they can be shared across threads without synchronization.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace taigr {

struct TranscriptMetadata {
    std::optional<std::int64_t> follower_count;
    std::optional<std::int64_t> play_count;
    std::vector<std::string> topics;

    bool operator==(const TranscriptMetadata&) const = default;
};

struct Transcript {
    std::string id;
    std::string text;  // non-empty after whitespace trimming
    std::optional<TranscriptMetadata> metadata;

    bool operator==(const Transcript&) const = default;
};

enum class RhetoricalRole { Premise, AnecdotalEvidence, CredibilityMove, EmotionalAppeal, None };

// Label strings as they appear in prompts and serialized files.
std::string to_string(RhetoricalRole role);
std::optional<RhetoricalRole> rhetorical_role_from_string(const std::string& s);

struct Statement {
    std::string id;  // "S<k>", k >= 1
    std::string text;
    std::optional<RhetoricalRole> role;  // unset until the role-classification stage
    std::string role_explanation;

    bool operator==(const Statement&) const = default;
};

enum class ClaimType { Explicit, Implicit };

std::string to_string(ClaimType t);
std::optional<ClaimType> claim_type_from_string(const std::string& s);

struct Claim {
    std::string id;  // "claim_<k>"
    std::string text;
    ClaimType claim_type = ClaimType::Explicit;
    std::vector<std::string> statement_ids;  // supporting statement set; may be empty if ungrounded
    std::string justification;
    bool ungrounded = false;  // must be set when statement_ids is empty

    bool operator==(const Claim&) const = default;
};

enum class TakeawayType { Explicit, Implicit };

std::string to_string(TakeawayType t);
std::optional<TakeawayType> takeaway_type_from_string(const std::string& s);

struct Takeaway {
    std::string text;
    std::optional<TakeawayType> takeaway_type;  // set by the type-classification stage
    std::vector<std::string> grounding;         // verbatim transcript substrings
    bool found = false;

    bool operator==(const Takeaway&) const = default;
};

struct EvidenceDoc {
    std::string doc_id;
    std::string title;
    std::string abstract_text;  // non-empty
    std::optional<int> year;
    std::string source_tag;

    bool operator==(const EvidenceDoc&) const = default;
};

// Three-class content validation outcome; shared by trust inference and the
// evaluation machinery.
enum class VerdictLabel { Incorrect, PartiallyCorrect, Correct };

std::string to_string(VerdictLabel label);
std::optional<VerdictLabel> verdict_label_from_string(const std::string& s);

}  // namespace taigr
