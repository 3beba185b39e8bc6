#include "taigr/infer/solvers.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <numeric>

namespace taigr {

std::string to_string(SolverTag t) { return t == SolverTag::Exact ? "exact" : "ad3"; }

std::string to_string(SolverChoice c) {
    switch (c) {
        case SolverChoice::Auto: return "auto";
        case SolverChoice::Exact: return "exact";
        case SolverChoice::Ad3: return "ad3";
    }
    return "auto";
}

std::optional<SolverChoice> solver_choice_from_string(const std::string& s) {
    if (s == "auto") return SolverChoice::Auto;
    if (s == "exact") return SolverChoice::Exact;
    if (s == "ad3") return SolverChoice::Ad3;
    return std::nullopt;
}

namespace {

constexpr int K = trust::kNumStates;

// Factor graph with clamped variables substituted out: clamped-adjacent
// pairwise tables collapse into the free endpoint's unary.
struct Reduced {
    std::vector<std::string> free_ids;                    // ascending node_id
    std::map<std::string, size_t> index;                  // node_id -> position
    std::vector<UnaryVector> eff_unary;                   // per free variable
    struct Factor {
        size_t a;
        size_t b;
        PairwiseTable table;
    };
    std::vector<Factor> factors;                          // both endpoints free
    std::map<std::string, int> clamped_states;
};

Reduced reduce(const FactorGraph& fg) {
    Reduced r;
    for (const auto& v : fg.variables) {
        if (v.clamped) {
            r.clamped_states[v.node_id] = *v.clamped;
        } else {
            r.free_ids.push_back(v.node_id);
        }
    }
    std::sort(r.free_ids.begin(), r.free_ids.end());
    for (size_t i = 0; i < r.free_ids.size(); ++i) r.index[r.free_ids[i]] = i;

    r.eff_unary.resize(r.free_ids.size());
    for (size_t i = 0; i < r.free_ids.size(); ++i) r.eff_unary[i] = fg.unary.at(r.free_ids[i]);

    for (const auto& p : fg.pairwise) {
        const bool u_clamped = r.clamped_states.count(p.u) > 0;
        const bool v_clamped = r.clamped_states.count(p.v) > 0;
        if (u_clamped && v_clamped) continue;  // constant; objective recomputed on the original
        if (u_clamped) {
            const int s = r.clamped_states.at(p.u);
            auto& unary = r.eff_unary[r.index.at(p.v)];
            for (int j = 0; j < K; ++j) unary[static_cast<size_t>(j)] += p.table[static_cast<size_t>(s)][static_cast<size_t>(j)];
        } else if (v_clamped) {
            const int s = r.clamped_states.at(p.v);
            auto& unary = r.eff_unary[r.index.at(p.u)];
            for (int i = 0; i < K; ++i) unary[static_cast<size_t>(i)] += p.table[static_cast<size_t>(i)][static_cast<size_t>(s)];
        } else {
            r.factors.push_back({r.index.at(p.u), r.index.at(p.v), p.table});
        }
    }
    return r;
}

void check_finite(const FactorGraph& fg) {
    for (const auto& [id, u] : fg.unary) {
        for (double x : u) {
            if (!std::isfinite(x)) throw SolverError("non-finite potentials (unary of " + id + ")");
        }
    }
    for (const auto& p : fg.pairwise) {
        for (const auto& row : p.table) {
            for (double x : row) {
                if (!std::isfinite(x)) {
                    throw SolverError("non-finite potentials (factor " + p.u + "," + p.v + ")");
                }
            }
        }
    }
}

int argmax_lowest_tie(const UnaryVector& v) {
    int best = 0;
    for (int i = 1; i < K; ++i) {
        if (v[static_cast<size_t>(i)] > v[static_cast<size_t>(best)]) best = i;
    }
    return best;
}

std::map<std::string, int> full_states(const Reduced& r, const std::vector<int>& free_states) {
    std::map<std::string, int> states = r.clamped_states;
    for (size_t i = 0; i < r.free_ids.size(); ++i) states[r.free_ids[i]] = free_states[i];
    return states;
}

// ---------------------------------------------------------------------------
// Factor subproblem: minimize -theta.mu + (eta/2)(|Rmu - a|^2 + |Cmu - b|^2)
// over the joint simplex, solved with warm-started away-step Frank-Wolfe.
// R and C are the row/column marginalization maps.
// ---------------------------------------------------------------------------
struct FactorState {
    std::array<double, K * K> mu;
    std::array<double, K> row;  // marginal of endpoint a
    std::array<double, K> col;  // marginal of endpoint b
    std::array<double, K> dual_a;
    std::array<double, K> dual_b;
};

void refresh_marginals(FactorState& f) {
    f.row.fill(0.0);
    f.col.fill(0.0);
    for (int i = 0; i < K; ++i) {
        for (int j = 0; j < K; ++j) {
            const double m = f.mu[static_cast<size_t>(i * K + j)];
            f.row[static_cast<size_t>(i)] += m;
            f.col[static_cast<size_t>(j)] += m;
        }
    }
}

void solve_factor_qp(const std::array<double, K * K>& theta, const std::array<double, K>& target_a,
                     const std::array<double, K>& target_b, double eta, FactorState& f,
                     double gap_tol, int max_iters) {
    std::array<double, K> ra, rb;  // marginal residuals
    auto recompute_residuals = [&] {
        for (int i = 0; i < K; ++i) {
            ra[static_cast<size_t>(i)] = f.row[static_cast<size_t>(i)] - target_a[static_cast<size_t>(i)];
            rb[static_cast<size_t>(i)] = f.col[static_cast<size_t>(i)] - target_b[static_cast<size_t>(i)];
        }
    };
    recompute_residuals();

    for (int iter = 0; iter < max_iters; ++iter) {
        // Gradient g_ij = -theta_ij + eta*(ra_i + rb_j); track extremes.
        int s_idx = 0;
        double s_val = std::numeric_limits<double>::infinity();
        int w_idx = -1;
        double w_val = -std::numeric_limits<double>::infinity();
        double g_dot_mu = 0.0;
        for (int i = 0; i < K; ++i) {
            const double gi = eta * ra[static_cast<size_t>(i)];
            for (int j = 0; j < K; ++j) {
                const size_t ij = static_cast<size_t>(i * K + j);
                const double g = -theta[ij] + gi + eta * rb[static_cast<size_t>(j)];
                if (g < s_val) {
                    s_val = g;
                    s_idx = i * K + j;
                }
                const double m = f.mu[ij];
                if (m > 1e-15) {
                    g_dot_mu += g * m;
                    if (g > w_val) {
                        w_val = g;
                        w_idx = i * K + j;
                    }
                }
            }
        }

        const double fw_gap = g_dot_mu - s_val;
        if (fw_gap <= gap_tol) break;

        const bool use_away = w_idx >= 0 && (w_val - g_dot_mu) > fw_gap;
        // Direction d: FW: e_s - mu ; away: mu - e_w. Work with marginal deltas.
        std::array<double, K> d_row, d_col;
        double slope;       // <g, d>
        double t_max;
        int vertex;
        if (!use_away) {
            vertex = s_idx;
            for (int i = 0; i < K; ++i) {
                d_row[static_cast<size_t>(i)] = -f.row[static_cast<size_t>(i)];
                d_col[static_cast<size_t>(i)] = -f.col[static_cast<size_t>(i)];
            }
            d_row[static_cast<size_t>(vertex / K)] += 1.0;
            d_col[static_cast<size_t>(vertex % K)] += 1.0;
            slope = s_val - g_dot_mu;
            t_max = 1.0;
        } else {
            vertex = w_idx;
            for (int i = 0; i < K; ++i) {
                d_row[static_cast<size_t>(i)] = f.row[static_cast<size_t>(i)];
                d_col[static_cast<size_t>(i)] = f.col[static_cast<size_t>(i)];
            }
            d_row[static_cast<size_t>(vertex / K)] -= 1.0;
            d_col[static_cast<size_t>(vertex % K)] -= 1.0;
            slope = g_dot_mu - w_val;
            const double alpha = f.mu[static_cast<size_t>(vertex)];
            t_max = alpha >= 1.0 ? 1e30 : alpha / (1.0 - alpha);
        }

        // Exact line search on the quadratic: curvature = eta*(|d_row|^2 + |d_col|^2).
        double curv = 0.0;
        for (int i = 0; i < K; ++i) {
            curv += d_row[static_cast<size_t>(i)] * d_row[static_cast<size_t>(i)] +
                    d_col[static_cast<size_t>(i)] * d_col[static_cast<size_t>(i)];
        }
        curv *= eta;
        double t = curv > 0.0 ? -slope / curv : t_max;
        t = std::clamp(t, 0.0, t_max);
        if (t <= 0.0) break;

        if (!use_away) {
            for (auto& m : f.mu) m *= (1.0 - t);
            f.mu[static_cast<size_t>(vertex)] += t;
        } else {
            for (auto& m : f.mu) m *= (1.0 + t);
            f.mu[static_cast<size_t>(vertex)] -= t;
            if (f.mu[static_cast<size_t>(vertex)] < 0.0) f.mu[static_cast<size_t>(vertex)] = 0.0;
        }
        refresh_marginals(f);
        recompute_residuals();
    }
}

}  // namespace

TrustAssignment solve_exact(const FactorGraph& fg) {
    check_finite(fg);
    const Reduced r = reduce(fg);
    const size_t n = r.free_ids.size();
    if (n > kExactFreeVariableLimit) {
        throw SolverError("too many free variables for exact enumeration: " + std::to_string(n));
    }

    TrustAssignment out;
    out.solver_tag = SolverTag::Exact;
    out.converged = true;
    out.iterations = 1;

    std::vector<int> assignment(n, 0);
    std::vector<int> best(n, 0);
    double best_obj = -std::numeric_limits<double>::infinity();

    auto reduced_objective = [&](const std::vector<int>& a) {
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) total += r.eff_unary[i][static_cast<size_t>(a[i])];
        for (const auto& f : r.factors) {
            total += f.table[static_cast<size_t>(a[f.a])][static_cast<size_t>(a[f.b])];
        }
        return total;
    };

    // Odometer in lexicographic order over node_ids sorted ascending; strict
    // improvement keeps the first (smallest) optimum.
    while (true) {
        const double obj = reduced_objective(assignment);
        if (obj > best_obj) {
            best_obj = obj;
            best = assignment;
        }
        size_t pos = n;
        bool overflow = true;
        while (pos > 0) {
            --pos;
            if (++assignment[pos] < K) {
                overflow = false;
                break;
            }
            assignment[pos] = 0;
        }
        if (overflow) break;
    }

    out.states = full_states(r, best);
    out.objective = objective_of(fg, out.states);
    return out;
}

TrustAssignment solve_ad3(const FactorGraph& fg, const Ad3Options& options) {
    check_finite(fg);
    if (options.max_iters < 1 || options.eta <= 0.0 || options.tol <= 0.0) {
        throw SolverError("invalid AD3 options");
    }
    const Reduced r = reduce(fg);
    const size_t n = r.free_ids.size();

    TrustAssignment out;
    out.solver_tag = SolverTag::Ad3;

    std::vector<int> degree(n, 0);
    for (const auto& f : r.factors) {
        ++degree[f.a];
        ++degree[f.b];
    }

    std::vector<int> rounded(n, 0);
    // Variables untouched by any factor settle at their effective-unary argmax.
    for (size_t i = 0; i < n; ++i) {
        if (degree[i] == 0) rounded[i] = argmax_lowest_tie(r.eff_unary[i]);
    }

    if (r.factors.empty()) {
        out.converged = true;
        out.iterations = n == 0 ? 0 : 1;
        out.states = full_states(r, rounded);
        out.objective = objective_of(fg, out.states);
        for (size_t i = 0; i < n; ++i) {
            std::vector<double> m(K, 0.0);
            m[static_cast<size_t>(rounded[i])] = 1.0;
            out.relaxed_marginals[r.free_ids[i]] = std::move(m);
        }
        return out;
    }

    // Unary potentials distributed uniformly over adjacent factors.
    std::vector<std::array<double, K * K>> theta(r.factors.size());
    for (size_t fi = 0; fi < r.factors.size(); ++fi) {
        const auto& f = r.factors[fi];
        for (int i = 0; i < K; ++i) {
            const double ua = r.eff_unary[f.a][static_cast<size_t>(i)] / degree[f.a];
            for (int j = 0; j < K; ++j) {
                const double ub = r.eff_unary[f.b][static_cast<size_t>(j)] / degree[f.b];
                theta[fi][static_cast<size_t>(i * K + j)] =
                    f.table[static_cast<size_t>(i)][static_cast<size_t>(j)] + ua + ub;
            }
        }
    }

    // Start every factor at its best vertex: sparse supports keep the
    // away-step subproblem solver effective, and QP optima have small support
    // anyway. A dense (uniform) start can stall the first iterations.
    std::vector<FactorState> fs(r.factors.size());
    for (size_t fi = 0; fi < fs.size(); ++fi) {
        auto& f = fs[fi];
        f.mu.fill(0.0);
        int best = 0;
        for (int ij = 1; ij < K * K; ++ij) {
            if (theta[fi][static_cast<size_t>(ij)] > theta[fi][static_cast<size_t>(best)]) best = ij;
        }
        f.mu[static_cast<size_t>(best)] = 1.0;
        f.dual_a.fill(0.0);
        f.dual_b.fill(0.0);
        refresh_marginals(f);
    }
    std::vector<std::array<double, K>> z(n);
    for (auto& zi : z) zi.fill(1.0 / K);

    double eta = options.eta;
    bool converged = false;
    int iterations = 0;
    const double comp_count = static_cast<double>(2 * r.factors.size() * K);
    const bool trace = std::getenv("TAIGR_AD3_TRACE") != nullptr;

    for (int iter = 1; iter <= options.max_iters; ++iter) {
        iterations = iter;

        // Factor subproblems against current averaged beliefs.
        for (size_t fi = 0; fi < r.factors.size(); ++fi) {
            const auto& f = r.factors[fi];
            std::array<double, K> ta, tb;
            for (int i = 0; i < K; ++i) {
                ta[static_cast<size_t>(i)] =
                    z[f.a][static_cast<size_t>(i)] - fs[fi].dual_a[static_cast<size_t>(i)];
                tb[static_cast<size_t>(i)] =
                    z[f.b][static_cast<size_t>(i)] - fs[fi].dual_b[static_cast<size_t>(i)];
            }
            solve_factor_qp(theta[fi], ta, tb, eta, fs[fi], 1e-11, 150);
        }

        // Gather: averaged beliefs per variable.
        std::vector<std::array<double, K>> z_new(n);
        for (auto& zi : z_new) zi.fill(0.0);
        for (size_t fi = 0; fi < r.factors.size(); ++fi) {
            const auto& f = r.factors[fi];
            for (int i = 0; i < K; ++i) {
                z_new[f.a][static_cast<size_t>(i)] +=
                    fs[fi].row[static_cast<size_t>(i)] + fs[fi].dual_a[static_cast<size_t>(i)];
                z_new[f.b][static_cast<size_t>(i)] +=
                    fs[fi].col[static_cast<size_t>(i)] + fs[fi].dual_b[static_cast<size_t>(i)];
            }
        }
        for (size_t i = 0; i < n; ++i) {
            if (degree[i] > 0) {
                for (auto& v : z_new[i]) v /= degree[i];
            } else {
                z_new[i] = z[i];
            }
        }

        // Dual updates and residuals.
        double primal_sq = 0.0;
        double dual_sq = 0.0;
        for (size_t fi = 0; fi < r.factors.size(); ++fi) {
            const auto& f = r.factors[fi];
            for (int i = 0; i < K; ++i) {
                const double pa = fs[fi].row[static_cast<size_t>(i)] - z_new[f.a][static_cast<size_t>(i)];
                const double pb = fs[fi].col[static_cast<size_t>(i)] - z_new[f.b][static_cast<size_t>(i)];
                fs[fi].dual_a[static_cast<size_t>(i)] += pa;
                fs[fi].dual_b[static_cast<size_t>(i)] += pb;
                primal_sq += pa * pa + pb * pb;
                const double da = z_new[f.a][static_cast<size_t>(i)] - z[f.a][static_cast<size_t>(i)];
                const double db = z_new[f.b][static_cast<size_t>(i)] - z[f.b][static_cast<size_t>(i)];
                dual_sq += eta * eta * (da * da + db * db);
            }
        }
        z = std::move(z_new);

        const double primal_res = std::sqrt(primal_sq / comp_count);
        const double dual_res = std::sqrt(dual_sq / comp_count);
        if (trace) {
            std::fprintf(stderr, "iter %d eta %.4g primal %.3e dual %.3e\n", iter, eta, primal_res,
                         dual_res);
        }
        if (primal_res < options.tol && dual_res < options.tol) {
            converged = true;
            break;
        }

        // Residual balancing; scaled duals shrink when the penalty grows.
        if (primal_res > 10.0 * dual_res) {
            eta *= 2.0;
            for (auto& f : fs) {
                for (auto& d : f.dual_a) d *= 0.5;
                for (auto& d : f.dual_b) d *= 0.5;
            }
        } else if (dual_res > 10.0 * primal_res) {
            eta *= 0.5;
            for (auto& f : fs) {
                for (auto& d : f.dual_a) d *= 2.0;
                for (auto& d : f.dual_b) d *= 2.0;
            }
        }
    }

    for (size_t i = 0; i < n; ++i) {
        if (degree[i] == 0) continue;
        int best = 0;
        for (int s = 1; s < K; ++s) {
            if (z[i][static_cast<size_t>(s)] > z[i][static_cast<size_t>(best)]) best = s;
        }
        rounded[i] = best;
    }

    out.converged = converged;
    out.iterations = iterations;
    out.states = full_states(r, rounded);
    out.objective = objective_of(fg, out.states);
    for (size_t i = 0; i < n; ++i) {
        if (degree[i] > 0) {
            out.relaxed_marginals[r.free_ids[i]] = std::vector<double>(z[i].begin(), z[i].end());
        } else {
            std::vector<double> m(K, 0.0);
            m[static_cast<size_t>(rounded[i])] = 1.0;
            out.relaxed_marginals[r.free_ids[i]] = std::move(m);
        }
    }
    return out;
}

TrustAssignment infer_trust(const ArgGraph& graph, const PotentialConfig& config,
                            SolverChoice choice, const Ad3Options& options) {
    const FactorGraph fg = build_factor_graph(graph, config);
    switch (choice) {
        case SolverChoice::Exact:
            return solve_exact(fg);
        case SolverChoice::Ad3:
            return solve_ad3(fg, options);
        case SolverChoice::Auto:
            break;
    }
    return fg.free_variable_count() <= kExactFreeVariableLimit ? solve_exact(fg)
                                                               : solve_ad3(fg, options);
}

}  // namespace taigr
