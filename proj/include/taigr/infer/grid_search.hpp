#pragma once
// Exhaustive (beta, gamma) selection against labeled graphs.

#include <functional>
#include <utility>
#include <vector>

#include "taigr/infer/solvers.hpp"
#include "taigr/infer/verdict.hpp"

namespace taigr {

struct LabeledGraph {
    ArgGraph graph;
    VerdictLabel gold = VerdictLabel::Incorrect;
};

using VerdictMetric = std::function<double(const std::vector<VerdictLabel>& gold,
                                           const std::vector<VerdictLabel>& predicted)>;

// The published search grid: 0.1..1.0 step 0.1 then 2.0..10.0 step 1.0.
std::vector<double> default_potential_grid();

// Evaluates every (beta, gamma) cell with the given metric (macro-F1 when
// empty) and returns the argmax; ties break to the lexicographically smaller
// pair. Throws std::invalid_argument on an empty grid or empty input set.
std::pair<double, double> grid_search_potentials(
    const std::vector<LabeledGraph>& labeled_graphs, const std::vector<double>& grid_beta,
    const std::vector<double>& grid_gamma, const VerdictMetric& metric = {},
    const PotentialConfig& base_config = {}, const VerdictConfig& verdict_config = {},
    SolverChoice solver = SolverChoice::Auto);

}  // namespace taigr
