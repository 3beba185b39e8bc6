#include "taigr/llm/distributions.hpp"

#include <cmath>

namespace taigr {

namespace {
bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }
}

bool SupportDistribution::valid() const {
    return in_unit(p_direct) && in_unit(p_weak) && in_unit(p_none) &&
           std::abs(p_direct + p_weak + p_none - 1.0) <= kDistributionTolerance;
}

std::map<std::string, double> SupportDistribution::as_map() const {
    return {{kSupportLabels[0], p_direct}, {kSupportLabels[1], p_weak}, {kSupportLabels[2], p_none}};
}

bool StanceDistribution::valid() const {
    const double sum = p_strong_support + p_weak_support + p_neutral + p_weak_oppose + p_strong_oppose;
    return in_unit(p_strong_support) && in_unit(p_weak_support) && in_unit(p_neutral) &&
           in_unit(p_weak_oppose) && in_unit(p_strong_oppose) &&
           std::abs(sum - 1.0) <= kDistributionTolerance;
}

std::map<std::string, double> StanceDistribution::as_map() const {
    return {{kStanceLabels[0], p_strong_support},
            {kStanceLabels[1], p_weak_support},
            {kStanceLabels[2], p_neutral},
            {kStanceLabels[3], p_weak_oppose},
            {kStanceLabels[4], p_strong_oppose}};
}

StanceDistribution StanceDistribution::reversed() const {
    StanceDistribution r;
    r.p_strong_support = p_strong_oppose;
    r.p_weak_support = p_weak_oppose;
    r.p_neutral = p_neutral;
    r.p_weak_oppose = p_weak_support;
    r.p_strong_oppose = p_strong_support;
    return r;
}

}  // namespace taigr
