#pragma once
// Evaluation machinery: label collapsing, macro/class-wise F1, paired
// bootstrap significance, and Pearson correlation analysis.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "taigr/core/types.hpp"

namespace taigr {

struct LabeledExample {
    std::string transcript_id;
    VerdictLabel gold = VerdictLabel::Incorrect;
    VerdictLabel predicted = VerdictLabel::Incorrect;
    std::optional<TakeawayType> takeaway_type;
};

// Collapses the 12 fine-grained verdict strings into the 3-class domain
// (case-insensitive). Throws std::invalid_argument on unknown labels.
VerdictLabel collapse_label(const std::string& raw);

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int support = 0;  // gold count
};

struct F1Report {
    double macro_f1 = 0.0;
    std::map<VerdictLabel, ClassScores> per_class;
    std::map<TakeawayType, double> per_takeaway_type_macro;  // only types present
    int example_count = 0;
};

// Macro-F1 over the three fixed classes; per-class F1 uses the 0 convention
// when precision+recall is 0. Throws std::invalid_argument on empty input.
F1Report f1_report(const std::vector<LabeledExample>& examples);

double macro_f1(const std::vector<VerdictLabel>& gold, const std::vector<VerdictLabel>& predicted);

// One-sided paired bootstrap p-value for "system A outperforms system B" on
// macro-F1: p = fraction of resamples with macroF1(A) <= macroF1(B).
// Resampling is at the example level with per-iteration sub-seeds derived from
// `seed` (splitmix64 -> mt19937_64), so the result is reproducible and
// independent of any parallel execution order.
double paired_bootstrap(const std::vector<VerdictLabel>& preds_a,
                        const std::vector<VerdictLabel>& preds_b,
                        const std::vector<VerdictLabel>& gold, int iterations,
                        std::uint64_t seed);

inline constexpr const char* kBootstrapRngDescription =
    "mt19937_64 seeded per iteration via splitmix64(seed ^ iteration); indices drawn by modulo";

// Sample Pearson correlation. Throws std::invalid_argument on length mismatch
// or fewer than 2 points, std::domain_error when either vector is constant.
double pearson_r(std::span<const double> x, std::span<const double> y);

struct CorrelationRecord {
    std::string transcript_id;
    double trust = 0.0;
    std::int64_t followers = 0;
    std::int64_t plays = 0;
    std::map<RhetoricalRole, double> rhetorical_proportions;  // fractions of statements
};

inline const std::array<std::string, 7> kCorrelationFeatures = {
    "trust",       "followers",       "plays",         "premise_frac",
    "anecdote_frac", "credibility_frac", "emotional_frac"};

struct CorrelationMatrix {
    std::vector<std::string> features;
    // entries[i][j]: nullopt marks an undefined correlation (constant column).
    std::vector<std::vector<std::optional<double>>> entries;

    std::string to_csv() const;
    nlohmann::json to_json() const;  // heatmap-ready
};

// Symmetric matrix of pairwise correlations over the seven features.
// Throws std::invalid_argument with fewer than 2 records.
CorrelationMatrix correlation_matrix(const std::vector<CorrelationRecord>& records);

}  // namespace taigr
