#include "taigr/llm/provider.hpp"

#include <cmath>

#include "taigr/llm/distributions.hpp"

namespace taigr {

bool LabelDistribution::valid() const {
    if (labels.size() != probs.size() || labels.empty()) return false;
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0) || !std::isfinite(p)) return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= kDistributionTolerance;
}

std::string stage_tag_of(const std::string& schema_hint) {
    const auto pos = schema_hint.find(':');
    return pos == std::string::npos ? schema_hint : schema_hint.substr(0, pos);
}

}  // namespace taigr
