#pragma once
// Evidence acquisition: retrieve, rerank, classify, and attach evidence nodes
// to checkworthy graph nodes.

#include <utility>
#include <vector>

#include "taigr/core/graph.hpp"
#include "taigr/evidence/types.hpp"
#include "taigr/llm/stages.hpp"

namespace taigr {

// Signed stance weight in [-1,1]:
//   e = -1.0*P(strong oppose) - 0.5*P(weak oppose) + 0.5*P(weak support) + 1.0*P(strong support).
double evidence_weight(const StanceDistribution& dist);

// Pools per-query results (deduplicated by doc_id, first retrieval wins), drops
// docs scoring below rerank_threshold against node_text, sorts by score
// descending with doc_id ascending tie-break, and truncates to keep_per_node.
std::vector<std::pair<EvidenceDoc, double>> retrieve_for_node(
    const std::string& node_text, const std::vector<std::string>& queries,
    const RetrievalProvider& retriever, const Reranker& reranker, const RetrievalConfig& config);

// Adds evidence nodes and Support/Attack edges for every checkworthy Claim node
// and Premise statement node. Purely additive; the input graph is not modified.
ArgGraph attach_evidence(const ArgGraph& graph, const Transcript& transcript,
                         const LlmProvider& provider, const RetrievalProvider& retriever,
                         const Reranker& reranker, const RetrievalConfig& config,
                         const StageOptions& opts = {});

}  // namespace taigr
