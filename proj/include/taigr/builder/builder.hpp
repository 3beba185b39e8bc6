#pragma once
// Constructs the takeaway-rooted argumentation graph by thresholded,
// iterative edge addition over claims and statements.

#include <vector>

#include "taigr/core/graph.hpp"
#include "taigr/llm/stages.hpp"

namespace taigr {

struct BuilderConfig {
    double threshold_claim_to_takeaway = 0.5;
    double threshold_claim_to_claim = 0.25;
    double threshold_statement_pair = 0.5;
    // Not pinned by the published thresholds; statement->claim edges use the same
    // rigor as statement pairs.
    double threshold_statement_to_claim = 0.5;

    bool valid() const;
};

// Scalar edge weight from a support distribution: 1.0*P(direct) + 0.5*P(weak).
double support_weight(const SupportDistribution& dist);

inline constexpr const char* kTakeawayNodeId = "T";

// Builds the graph in three phases:
//   (a) grounding edges statement->claim for every claim's statement_ids,
//   (b) phase 1: claims vs the takeaway at threshold_claim_to_takeaway,
//   (c) phase 2: unattached claims vs attached {takeaway, claims}, repeated to
//       fixpoint; thresholds depend on the endpoint kinds,
//   (d) phase 3: unattached statements vs attached claims/statements, one best
//       qualifying edge per statement, repeated to fixpoint.
// The transcript supplies context for the pairwise support prompts.
ArgGraph build_graph(const Transcript& transcript, const Takeaway& takeaway,
                     const std::vector<Claim>& claims, const std::vector<Statement>& statements,
                     const LlmProvider& provider, const BuilderConfig& config,
                     const StageOptions& opts = {});

}  // namespace taigr
