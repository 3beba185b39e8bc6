#pragma once
// The takeaway-rooted argumentation graph and its structural validation.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "taigr/core/types.hpp"

namespace taigr {

enum class NodeKind { Takeaway, Claim, Statement, Evidence };
enum class EdgeKind { Support, Attack, Grounding };

std::string to_string(NodeKind k);
std::string to_string(EdgeKind k);
std::optional<NodeKind> node_kind_from_string(const std::string& s);
std::optional<EdgeKind> edge_kind_from_string(const std::string& s);

using NodePayload = std::variant<Takeaway, Claim, Statement, EvidenceDoc>;

struct ArgNode {
    std::string node_id;
    NodePayload payload;

    NodeKind kind() const;

    bool operator==(const ArgNode&) const = default;
};

struct ArgEdge {
    std::string from;
    std::string to;
    EdgeKind kind = EdgeKind::Support;
    double weight = 0.0;
    // The class-probability distribution the weight was computed from, when known.
    std::optional<std::map<std::string, double>> class_probs;

    bool operator==(const ArgEdge&) const = default;
};

// Directed acyclic graph over {takeaway, claims, statements} plus evidence nodes.
// Stored as plain node/edge lists; graphs are small (tens to low hundreds of nodes).
struct ArgGraph {
    std::vector<ArgNode> nodes;
    std::vector<ArgEdge> edges;
    std::string root;  // node_id of the single Takeaway node

    const ArgNode* find_node(const std::string& node_id) const;
    bool has_node(const std::string& node_id) const { return find_node(node_id) != nullptr; }

    // Throws std::invalid_argument on duplicate node id.
    void add_node(ArgNode node);
    void add_edge(ArgEdge edge);

    // Equality up to node/edge ordering.
    bool same_graph(const ArgGraph& other) const;
};

// A single invariant violation. Violations are data, not errors: validate_graph
// reports all of them instead of throwing.
struct Violation {
    std::string code;     // machine-readable, e.g. "WeightOutOfRange"
    std::string subject;  // offending node id or "from->to" edge key
    std::string detail;

    bool operator==(const Violation&) const = default;
};

namespace violation_code {
inline constexpr const char* kDuplicateNodeId = "DuplicateNodeId";
inline constexpr const char* kMissingTakeaway = "MissingTakeaway";
inline constexpr const char* kMultipleTakeaways = "MultipleTakeaways";
inline constexpr const char* kRootInvalid = "RootInvalid";
inline constexpr const char* kDanglingEdge = "DanglingEdge";
inline constexpr const char* kSelfLoop = "SelfLoop";
inline constexpr const char* kWeightOutOfRange = "WeightOutOfRange";
inline constexpr const char* kAttackFromNonEvidence = "AttackFromNonEvidence";
inline constexpr const char* kCycleDetected = "CycleDetected";
inline constexpr const char* kNoPathToRoot = "NoPathToRoot";
inline constexpr const char* kMissingGroundingStatement = "MissingGroundingStatement";
inline constexpr const char* kUnflaggedUngroundedClaim = "UnflaggedUngroundedClaim";
}  // namespace violation_code

// Returns every invariant violation; empty iff the graph is valid.
std::vector<Violation> validate_graph(const ArgGraph& graph);

}  // namespace taigr
