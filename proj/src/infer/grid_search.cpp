#include "taigr/infer/grid_search.hpp"

#include <stdexcept>

#include "taigr/eval/metrics.hpp"

namespace taigr {

std::vector<double> default_potential_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 10; ++i) grid.push_back(i / 10.0);
    for (int i = 2; i <= 10; ++i) grid.push_back(static_cast<double>(i));
    return grid;
}

std::pair<double, double> grid_search_potentials(const std::vector<LabeledGraph>& labeled_graphs,
                                                 const std::vector<double>& grid_beta,
                                                 const std::vector<double>& grid_gamma,
                                                 const VerdictMetric& metric,
                                                 const PotentialConfig& base_config,
                                                 const VerdictConfig& verdict_config,
                                                 SolverChoice solver) {
    if (grid_beta.empty() || grid_gamma.empty()) throw std::invalid_argument("empty grid");
    if (labeled_graphs.empty()) throw std::invalid_argument("no labeled graphs");

    const VerdictMetric eval_metric =
        metric ? metric : [](const std::vector<VerdictLabel>& gold,
                             const std::vector<VerdictLabel>& pred) { return macro_f1(gold, pred); };

    std::vector<VerdictLabel> gold;
    gold.reserve(labeled_graphs.size());
    for (const auto& lg : labeled_graphs) gold.push_back(lg.gold);

    double best_score = -1.0;
    std::pair<double, double> best_cell{grid_beta.front(), grid_gamma.front()};

    // Ascending iteration plus strict improvement resolves ties to the
    // lexicographically smallest (beta, gamma).
    for (double beta : grid_beta) {
        for (double gamma : grid_gamma) {
            PotentialConfig config = base_config;
            config.beta = beta;
            config.gamma = gamma;
            std::vector<VerdictLabel> predicted;
            predicted.reserve(labeled_graphs.size());
            for (const auto& lg : labeled_graphs) {
                const TrustAssignment assignment = infer_trust(lg.graph, config, solver);
                const double trust = assignment.value_of(lg.graph.root);
                predicted.push_back(verdict_from_trust(trust, verdict_config).label);
            }
            const double score = eval_metric(gold, predicted);
            if (score > best_score) {
                best_score = score;
                best_cell = {beta, gamma};
            }
        }
    }
    return best_cell;
}

}  // namespace taigr
