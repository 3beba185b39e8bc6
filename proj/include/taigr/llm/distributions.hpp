#pragma once
// Class-probability distributions returned by the classification stages.

#include <array>
#include <map>
#include <string>

namespace taigr {

inline constexpr double kDistributionTolerance = 1e-9;

// Labels in prompt order. Stage code indexes distributions by these positions.
inline const std::array<std::string, 3> kSupportLabels = {"direct support", "weak support",
                                                          "no support"};
inline const std::array<std::string, 5> kStanceLabels = {"strong support", "weak support",
                                                         "neutral", "weak oppose", "strong oppose"};

// P(direct support), P(weak support), P(no support); entries in [0,1], sum 1 +- 1e-9.
struct SupportDistribution {
    double p_direct = 0.0;
    double p_weak = 0.0;
    double p_none = 0.0;

    bool valid() const;
    std::map<std::string, double> as_map() const;

    bool operator==(const SupportDistribution&) const = default;
};

// Five-way stance over {strong support, weak support, neutral, weak oppose, strong oppose}.
struct StanceDistribution {
    double p_strong_support = 0.0;
    double p_weak_support = 0.0;
    double p_neutral = 0.0;
    double p_weak_oppose = 0.0;
    double p_strong_oppose = 0.0;

    bool valid() const;
    std::map<std::string, double> as_map() const;

    // Distribution with the support/oppose axis mirrored (neutral fixed).
    StanceDistribution reversed() const;

    bool operator==(const StanceDistribution&) const = default;
};

}  // namespace taigr
