#pragma once
// Discrete factor graph over node trust levels: 11 states per variable,
// quadratic support/attack pairwise potentials, evidence clamped to full trust.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "taigr/core/graph.hpp"

namespace taigr {

namespace trust {
inline constexpr int kNumStates = 11;
// State values 0.0, 0.1, ..., 1.0.
inline double state_value(int index) { return static_cast<double>(index) / 10.0; }
inline constexpr int kClampedEvidenceState = 10;  // 1.0
}  // namespace trust

struct PotentialConfig {
    double beta = 0.3;    // support strength
    double gamma = 5.0;   // attack strength
    double rhetorical_peak = 0.2;
    double rhetorical_strength = 0.5;
    double uniform_value = 0.0;

    bool valid() const {
        return beta > 0.0 && gamma > 0.0 && rhetorical_peak >= 0.0 && rhetorical_peak <= 1.0;
    }
};

using UnaryVector = std::array<double, trust::kNumStates>;
using PairwiseTable = std::array<std::array<double, trust::kNumStates>, trust::kNumStates>;

struct FgVariable {
    std::string node_id;
    std::optional<int> clamped;  // state index when hard-constrained
};

struct PairwisePotential {
    std::string u;
    std::string v;
    PairwiseTable table;  // table[state_u][state_v]
    EdgeKind kind = EdgeKind::Support;
};

struct FactorGraph {
    std::vector<FgVariable> variables;
    std::map<std::string, UnaryVector> unary;
    std::vector<PairwisePotential> pairwise;

    const FgVariable* find_variable(const std::string& node_id) const;
    size_t free_variable_count() const;
};

// Support/Grounding: beta * w * (1 - (y_u - y_v)^2)   -- rewards equal trust.
// Attack:            gamma * |w| * (1 - (y_u + y_v - 1)^2) -- rewards complementary trust.
PairwiseTable support_table(double beta, double weight);
PairwiseTable attack_table(double gamma, double weight_magnitude);

// One variable per graph node; Evidence clamped to 1.0; rhetorical statement
// roles get the soft low-trust prior -strength*(y - peak)^2; everything else a
// uniform unary. Throws std::invalid_argument when the graph fails validation.
FactorGraph build_factor_graph(const ArgGraph& graph, const PotentialConfig& config);

// Total potential of a full assignment (state index per variable, clamped
// included). Throws std::out_of_range if a variable is missing.
double objective_of(const FactorGraph& fg, const std::map<std::string, int>& states);

// Debugging serialization.
nlohmann::json factor_graph_to_json(const FactorGraph& fg);

}  // namespace taigr
