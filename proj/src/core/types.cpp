#include "taigr/core/types.hpp"

namespace taigr {

std::string to_string(RhetoricalRole role) {
    switch (role) {
        case RhetoricalRole::Premise: return "Premise";
        case RhetoricalRole::AnecdotalEvidence: return "Anecdotal Evidence";
        case RhetoricalRole::CredibilityMove: return "Credibility Move";
        case RhetoricalRole::EmotionalAppeal: return "Emotional Appeal";
        case RhetoricalRole::None: return "None";
    }
    return "None";
}

std::optional<RhetoricalRole> rhetorical_role_from_string(const std::string& s) {
    if (s == "Premise") return RhetoricalRole::Premise;
    if (s == "Anecdotal Evidence") return RhetoricalRole::AnecdotalEvidence;
    if (s == "Credibility Move") return RhetoricalRole::CredibilityMove;
    if (s == "Emotional Appeal") return RhetoricalRole::EmotionalAppeal;
    if (s == "None") return RhetoricalRole::None;
    return std::nullopt;
}

std::string to_string(ClaimType t) {
    return t == ClaimType::Explicit ? "explicit" : "implicit";
}

std::optional<ClaimType> claim_type_from_string(const std::string& s) {
    if (s == "explicit") return ClaimType::Explicit;
    if (s == "implicit") return ClaimType::Implicit;
    return std::nullopt;
}

std::string to_string(TakeawayType t) {
    return t == TakeawayType::Explicit ? "explicit" : "implicit";
}

std::string to_string(VerdictLabel label) {
    switch (label) {
        case VerdictLabel::Incorrect: return "incorrect";
        case VerdictLabel::PartiallyCorrect: return "partially_correct";
        case VerdictLabel::Correct: return "correct";
    }
    return "incorrect";
}

std::optional<VerdictLabel> verdict_label_from_string(const std::string& s) {
    if (s == "incorrect") return VerdictLabel::Incorrect;
    if (s == "partially_correct") return VerdictLabel::PartiallyCorrect;
    if (s == "correct") return VerdictLabel::Correct;
    return std::nullopt;
}

std::optional<TakeawayType> takeaway_type_from_string(const std::string& s) {
    if (s == "explicit") return TakeawayType::Explicit;
    if (s == "implicit") return TakeawayType::Implicit;
    return std::nullopt;
}

}  // namespace taigr
