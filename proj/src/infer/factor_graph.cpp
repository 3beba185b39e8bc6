#include "taigr/infer/factor_graph.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace taigr {

using nlohmann::json;

const FgVariable* FactorGraph::find_variable(const std::string& node_id) const {
    for (const auto& v : variables) {
        if (v.node_id == node_id) return &v;
    }
    return nullptr;
}

size_t FactorGraph::free_variable_count() const {
    size_t n = 0;
    for (const auto& v : variables) {
        if (!v.clamped) ++n;
    }
    return n;
}

PairwiseTable support_table(double beta, double weight) {
    PairwiseTable t;
    for (int a = 0; a < trust::kNumStates; ++a) {
        for (int b = 0; b < trust::kNumStates; ++b) {
            const double diff = trust::state_value(a) - trust::state_value(b);
            t[a][b] = beta * weight * (1.0 - diff * diff);
        }
    }
    return t;
}

PairwiseTable attack_table(double gamma, double weight_magnitude) {
    PairwiseTable t;
    for (int a = 0; a < trust::kNumStates; ++a) {
        for (int b = 0; b < trust::kNumStates; ++b) {
            const double sum = trust::state_value(a) + trust::state_value(b) - 1.0;
            t[a][b] = gamma * weight_magnitude * (1.0 - sum * sum);
        }
    }
    return t;
}

FactorGraph build_factor_graph(const ArgGraph& graph, const PotentialConfig& config) {
    if (!config.valid()) throw std::invalid_argument("invalid potential config");
    if (auto violations = validate_graph(graph); !violations.empty()) {
        throw std::invalid_argument("build_factor_graph: graph invalid: " + violations.front().code +
                                    " (" + violations.front().subject + ")");
    }

    FactorGraph fg;
    for (const auto& n : graph.nodes) {
        FgVariable var;
        var.node_id = n.node_id;
        if (n.kind() == NodeKind::Evidence) var.clamped = trust::kClampedEvidenceState;
        fg.variables.push_back(var);

        UnaryVector u;
        bool rhetorical = false;
        if (n.kind() == NodeKind::Statement) {
            const auto& s = std::get<Statement>(n.payload);
            rhetorical = s.role == RhetoricalRole::AnecdotalEvidence ||
                         s.role == RhetoricalRole::CredibilityMove ||
                         s.role == RhetoricalRole::EmotionalAppeal;
        }
        for (int i = 0; i < trust::kNumStates; ++i) {
            if (rhetorical) {
                const double d = trust::state_value(i) - config.rhetorical_peak;
                u[i] = -config.rhetorical_strength * d * d;
            } else {
                u[i] = config.uniform_value;
            }
        }
        fg.unary[n.node_id] = u;
    }

    for (const auto& e : graph.edges) {
        PairwisePotential p;
        p.u = e.from;
        p.v = e.to;
        p.kind = e.kind;
        if (e.kind == EdgeKind::Attack) {
            p.table = attack_table(config.gamma, std::abs(e.weight));
        } else {
            // Grounding edges carry weight 1.0 and act as support factors.
            p.table = support_table(config.beta, e.weight);
        }
        fg.pairwise.push_back(std::move(p));
    }
    return fg;
}

double objective_of(const FactorGraph& fg, const std::map<std::string, int>& states) {
    double total = 0.0;
    for (const auto& v : fg.variables) {
        total += fg.unary.at(v.node_id)[static_cast<size_t>(states.at(v.node_id))];
    }
    for (const auto& p : fg.pairwise) {
        total += p.table[static_cast<size_t>(states.at(p.u))][static_cast<size_t>(states.at(p.v))];
    }
    return total;
}

json factor_graph_to_json(const FactorGraph& fg) {
    json j;
    json vars = json::array();
    for (const auto& v : fg.variables) {
        json jv{{"node_id", v.node_id}};
        if (v.clamped) jv["clamped"] = trust::state_value(*v.clamped);
        vars.push_back(std::move(jv));
    }
    j["variables"] = std::move(vars);
    json unary = json::object();
    for (const auto& [id, u] : fg.unary) unary[id] = u;
    j["unary"] = std::move(unary);
    json pw = json::array();
    for (const auto& p : fg.pairwise) {
        json tbl = json::array();
        for (const auto& row : p.table) tbl.push_back(row);
        pw.push_back(json{{"u", p.u}, {"v", p.v}, {"kind", to_string(p.kind)}, {"table", std::move(tbl)}});
    }
    j["pairwise"] = std::move(pw);
    j["num_states"] = trust::kNumStates;
    return j;
}

}  // namespace taigr
