#include "taigr/core/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace taigr {

std::string to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Takeaway: return "Takeaway";
        case NodeKind::Claim: return "Claim";
        case NodeKind::Statement: return "Statement";
        case NodeKind::Evidence: return "Evidence";
    }
    return "Takeaway";
}

std::string to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::Support: return "Support";
        case EdgeKind::Attack: return "Attack";
        case EdgeKind::Grounding: return "Grounding";
    }
    return "Support";
}

std::optional<NodeKind> node_kind_from_string(const std::string& s) {
    if (s == "Takeaway") return NodeKind::Takeaway;
    if (s == "Claim") return NodeKind::Claim;
    if (s == "Statement") return NodeKind::Statement;
    if (s == "Evidence") return NodeKind::Evidence;
    return std::nullopt;
}

std::optional<EdgeKind> edge_kind_from_string(const std::string& s) {
    if (s == "Support") return EdgeKind::Support;
    if (s == "Attack") return EdgeKind::Attack;
    if (s == "Grounding") return EdgeKind::Grounding;
    return std::nullopt;
}

NodeKind ArgNode::kind() const {
    if (std::holds_alternative<Takeaway>(payload)) return NodeKind::Takeaway;
    if (std::holds_alternative<Claim>(payload)) return NodeKind::Claim;
    if (std::holds_alternative<Statement>(payload)) return NodeKind::Statement;
    return NodeKind::Evidence;
}

const ArgNode* ArgGraph::find_node(const std::string& node_id) const {
    for (const auto& n : nodes) {
        if (n.node_id == node_id) return &n;
    }
    return nullptr;
}

void ArgGraph::add_node(ArgNode node) {
    if (has_node(node.node_id)) {
        throw std::invalid_argument("duplicate node id: " + node.node_id);
    }
    nodes.push_back(std::move(node));
}

void ArgGraph::add_edge(ArgEdge edge) {
    edges.push_back(std::move(edge));
}

bool ArgGraph::same_graph(const ArgGraph& other) const {
    if (root != other.root) return false;
    if (nodes.size() != other.nodes.size() || edges.size() != other.edges.size()) return false;
    for (const auto& n : nodes) {
        const ArgNode* o = other.find_node(n.node_id);
        if (o == nullptr || !(*o == n)) return false;
    }
    auto edge_key = [](const ArgEdge& e) {
        return std::tuple(e.from, e.to, e.kind, e.weight, e.class_probs);
    };
    auto sorted_keys = [&](const std::vector<ArgEdge>& es) {
        std::vector<decltype(edge_key(es[0]))> keys;
        keys.reserve(es.size());
        for (const auto& e : es) keys.push_back(edge_key(e));
        std::sort(keys.begin(), keys.end());
        return keys;
    };
    return sorted_keys(edges) == sorted_keys(other.edges);
}

namespace {

// Tarjan-style coloring DFS; reports one representative cycle per back edge.
void find_cycles(const std::vector<std::string>& ids,
                 const std::unordered_map<std::string, std::vector<std::string>>& adj,
                 std::vector<Violation>& out) {
    enum class Color { White, Gray, Black };
    std::unordered_map<std::string, Color> color;
    for (const auto& id : ids) color[id] = Color::White;

    // Iterative DFS with explicit stack to avoid recursion limits.
    for (const auto& start : ids) {
        if (color[start] != Color::White) continue;
        std::vector<std::pair<std::string, size_t>> stack;
        std::vector<std::string> path;
        stack.emplace_back(start, 0);
        color[start] = Color::Gray;
        path.push_back(start);
        while (!stack.empty()) {
            auto& [id, next] = stack.back();
            const auto it = adj.find(id);
            const auto& succ = it == adj.end() ? std::vector<std::string>{} : it->second;
            if (next < succ.size()) {
                const std::string& tgt = succ[next++];
                auto cit = color.find(tgt);
                if (cit == color.end()) continue;  // dangling, reported elsewhere
                if (cit->second == Color::Gray) {
                    std::string cycle;
                    auto pos = std::find(path.begin(), path.end(), tgt);
                    for (auto p = pos; p != path.end(); ++p) cycle += *p + "->";
                    cycle += tgt;
                    out.push_back({violation_code::kCycleDetected, tgt, "cycle: " + cycle});
                } else if (cit->second == Color::White) {
                    cit->second = Color::Gray;
                    stack.emplace_back(tgt, 0);
                    path.push_back(tgt);
                }
            } else {
                color[id] = Color::Black;
                stack.pop_back();
                path.pop_back();
            }
        }
    }
}

}  // namespace

std::vector<Violation> validate_graph(const ArgGraph& graph) {
    std::vector<Violation> out;

    std::unordered_map<std::string, const ArgNode*> by_id;
    for (const auto& n : graph.nodes) {
        if (!by_id.emplace(n.node_id, &n).second) {
            out.push_back({violation_code::kDuplicateNodeId, n.node_id, "node id appears more than once"});
        }
    }

    size_t takeaway_count = 0;
    for (const auto& n : graph.nodes) {
        if (n.kind() == NodeKind::Takeaway) ++takeaway_count;
    }
    if (takeaway_count == 0) {
        out.push_back({violation_code::kMissingTakeaway, "", "graph has no Takeaway node"});
    } else if (takeaway_count > 1) {
        out.push_back({violation_code::kMultipleTakeaways, "", "graph has more than one Takeaway node"});
    }
    const auto root_it = by_id.find(graph.root);
    if (root_it == by_id.end() || root_it->second->kind() != NodeKind::Takeaway) {
        out.push_back({violation_code::kRootInvalid, graph.root, "root is not a Takeaway node in the graph"});
    }

    // Edge-local invariants.
    for (const auto& e : graph.edges) {
        const std::string key = e.from + "->" + e.to;
        const bool from_ok = by_id.count(e.from) > 0;
        const bool to_ok = by_id.count(e.to) > 0;
        if (!from_ok || !to_ok) {
            out.push_back({violation_code::kDanglingEdge, key, "edge endpoint missing from node set"});
        }
        if (e.from == e.to) {
            out.push_back({violation_code::kSelfLoop, key, "self-loop"});
        }
        switch (e.kind) {
            case EdgeKind::Support:
                if (!(e.weight > 0.0 && e.weight <= 1.0)) {
                    out.push_back({violation_code::kWeightOutOfRange, key,
                                   "Support weight must lie in (0,1]"});
                }
                break;
            case EdgeKind::Attack:
                if (!(e.weight >= -1.0 && e.weight < 0.0)) {
                    out.push_back({violation_code::kWeightOutOfRange, key,
                                   "Attack weight must lie in [-1,0)"});
                }
                if (from_ok && by_id.at(e.from)->kind() != NodeKind::Evidence) {
                    out.push_back({violation_code::kAttackFromNonEvidence, key,
                                   "Attack edges may originate only from Evidence nodes"});
                }
                break;
            case EdgeKind::Grounding:
                if (e.weight != 1.0) {
                    out.push_back({violation_code::kWeightOutOfRange, key,
                                   "Grounding weight must equal 1.0"});
                }
                break;
        }
    }

    // Claim payload invariants within the graph.
    std::unordered_set<std::string> statement_ids;
    for (const auto& n : graph.nodes) {
        if (n.kind() == NodeKind::Statement) statement_ids.insert(n.node_id);
    }
    for (const auto& n : graph.nodes) {
        if (n.kind() != NodeKind::Claim) continue;
        const auto& claim = std::get<Claim>(n.payload);
        if (claim.statement_ids.empty() && !claim.ungrounded) {
            out.push_back({violation_code::kUnflaggedUngroundedClaim, n.node_id,
                           "claim has no grounding statements but is not flagged ungrounded"});
        }
        for (const auto& sid : claim.statement_ids) {
            if (statement_ids.count(sid) == 0) {
                out.push_back({violation_code::kMissingGroundingStatement, n.node_id,
                               "statement_ids references missing statement " + sid});
            }
        }
    }

    // Cycles.
    std::vector<std::string> ids;
    ids.reserve(graph.nodes.size());
    std::unordered_map<std::string, std::vector<std::string>> adj;
    for (const auto& n : graph.nodes) ids.push_back(n.node_id);
    for (const auto& e : graph.edges) {
        if (by_id.count(e.from) && by_id.count(e.to)) adj[e.from].push_back(e.to);
    }
    find_cycles(ids, adj, out);

    // Reachability: every non-root node with out-degree >= 1 must reach the root,
    // unless it is an Evidence node whose targets are claims or statements.
    if (root_it != by_id.end()) {
        std::unordered_set<std::string> reaches_root{graph.root};
        // Reverse BFS from root.
        std::unordered_map<std::string, std::vector<std::string>> radj;
        for (const auto& e : graph.edges) {
            if (by_id.count(e.from) && by_id.count(e.to)) radj[e.to].push_back(e.from);
        }
        std::vector<std::string> frontier{graph.root};
        while (!frontier.empty()) {
            std::string cur = frontier.back();
            frontier.pop_back();
            for (const auto& pred : radj[cur]) {
                if (reaches_root.insert(pred).second) frontier.push_back(pred);
            }
        }
        // Grounding edges record claim provenance and may point into unattached
        // claims; the path-to-root requirement applies to argumentative
        // (Support) chains only.
        std::unordered_set<std::string> support_sources;
        for (const auto& e : graph.edges) {
            if (e.kind == EdgeKind::Support && by_id.count(e.from)) support_sources.insert(e.from);
        }
        for (const auto& n : graph.nodes) {
            if (n.node_id == graph.root) continue;
            if (support_sources.count(n.node_id) == 0) continue;
            if (reaches_root.count(n.node_id)) continue;
            bool evidence_exception = n.kind() == NodeKind::Evidence;
            if (evidence_exception) {
                for (const auto& tgt : adj[n.node_id]) {
                    NodeKind k = by_id.at(tgt)->kind();
                    if (k != NodeKind::Claim && k != NodeKind::Statement) {
                        evidence_exception = false;
                        break;
                    }
                }
            }
            if (!evidence_exception) {
                out.push_back({violation_code::kNoPathToRoot, n.node_id,
                               "node supports others but has no directed path to the root"});
            }
        }
    }

    return out;
}

}  // namespace taigr
