#pragma once
// MAP solvers: exhaustive oracle and an AD3-style ADMM solver for the
// LP relaxation over the pairwise local polytope.

#include <map>
#include <string>
#include <vector>

#include "taigr/infer/factor_graph.hpp"

namespace taigr {

class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class SolverTag { Exact, Ad3 };
enum class SolverChoice { Auto, Exact, Ad3 };

std::string to_string(SolverTag t);
std::string to_string(SolverChoice c);
std::optional<SolverChoice> solver_choice_from_string(const std::string& s);

struct TrustAssignment {
    std::map<std::string, int> states;  // node_id -> state index
    double objective = 0.0;
    SolverTag solver_tag = SolverTag::Exact;
    bool converged = false;
    int iterations = 0;
    // Relaxed variable beliefs from AD3, for inspection; empty for the exact solver.
    std::map<std::string, std::vector<double>> relaxed_marginals;

    double value_of(const std::string& node_id) const {
        return trust::state_value(states.at(node_id));
    }
};

struct Ad3Options {
    int max_iters = 1000;
    double eta = 0.1;    // ADMM penalty; adapted from residual ratios
    double tol = 1e-6;   // primal/dual residual tolerance
};

inline constexpr size_t kExactFreeVariableLimit = 6;

// Globally optimal assignment by exhaustive enumeration over free variables.
// Ties break to the lexicographically smallest state vector over node_ids
// sorted ascending. Throws SolverError("too many free variables") beyond the
// enumeration limit.
TrustAssignment solve_exact(const FactorGraph& fg);

// ADMM over the pairwise local polytope: factor subproblems are solved as
// small QPs against averaged variable beliefs, clamped variables held fixed;
// free variables round to the argmax of their relaxed marginals (ties to the
// lower state). Throws SolverError on non-finite potentials.
TrustAssignment solve_ad3(const FactorGraph& fg, const Ad3Options& options = {});

// Routing: Auto picks the exact solver when the free-variable count permits
// enumeration and AD3 otherwise.
TrustAssignment infer_trust(const ArgGraph& graph, const PotentialConfig& config,
                            SolverChoice choice = SolverChoice::Auto,
                            const Ad3Options& options = {});

}  // namespace taigr
