#pragma once
// Trust-to-verdict mapping.

#include <stdexcept>

#include "taigr/core/types.hpp"

namespace taigr {

// Boundary semantics: trust <= incorrect_max -> incorrect;
// incorrect_max < trust <= partial_max -> partially correct; above -> correct.
// The published ranges overlap at 0.5; the first-listed rule wins, so 0.5 maps
// to incorrect. Both boundaries are configurable.
struct VerdictConfig {
    double incorrect_max = 0.5;
    double partial_max = 0.7;

    bool valid() const {
        return incorrect_max >= 0.0 && incorrect_max <= partial_max && partial_max <= 1.0;
    }
};

struct Verdict {
    VerdictLabel label = VerdictLabel::Incorrect;
    double trust = 0.0;
};

// Throws std::domain_error when trust lies outside [0,1].
Verdict verdict_from_trust(double trust, const VerdictConfig& config = {});

}  // namespace taigr
