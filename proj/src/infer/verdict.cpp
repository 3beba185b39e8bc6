#include "taigr/infer/verdict.hpp"

namespace taigr {

Verdict verdict_from_trust(double trust, const VerdictConfig& config) {
    if (!(trust >= 0.0 && trust <= 1.0)) {
        throw std::domain_error("trust must lie in [0,1]");
    }
    if (!config.valid()) throw std::domain_error("invalid verdict config");
    Verdict v;
    v.trust = trust;
    if (trust <= config.incorrect_max) {
        v.label = VerdictLabel::Incorrect;
    } else if (trust <= config.partial_max) {
        v.label = VerdictLabel::PartiallyCorrect;
    } else {
        v.label = VerdictLabel::Correct;
    }
    return v;
}

}  // namespace taigr
