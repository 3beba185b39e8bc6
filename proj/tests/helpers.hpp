#pragma once
// Shared test fixtures: scripted providers, graph generators, and an
// independent max-sum oracle for acyclic factor graphs.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "taigr/builder/builder.hpp"
#include "taigr/common.hpp"
#include "taigr/core/graph.hpp"
#include "taigr/infer/factor_graph.hpp"
#include "taigr/llm/distributions.hpp"
#include "taigr/llm/provider.hpp"

namespace taigr::testing {

inline double u01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

// --- domain object shorthands -----------------------------------------------

inline Takeaway make_takeaway(const std::string& text, bool found = true) {
    Takeaway t;
    t.text = text;
    t.found = found;
    return t;
}

inline Claim make_claim(const std::string& id, const std::string& text,
                        std::vector<std::string> statement_ids = {},
                        ClaimType type = ClaimType::Explicit) {
    Claim c;
    c.id = id;
    c.text = text;
    c.claim_type = type;
    c.statement_ids = std::move(statement_ids);
    c.ungrounded = c.statement_ids.empty();
    return c;
}

inline Statement make_statement(const std::string& id, const std::string& text,
                                std::optional<RhetoricalRole> role = std::nullopt) {
    Statement s;
    s.id = id;
    s.text = text;
    s.role = role;
    return s;
}

inline EvidenceDoc make_doc(const std::string& id, const std::string& title,
                            const std::string& abstract) {
    EvidenceDoc d;
    d.doc_id = id;
    d.title = title;
    d.abstract_text = abstract;
    d.source_tag = "test";
    return d;
}

inline ArgGraph minimal_graph() {
    ArgGraph g;
    g.root = "T";
    g.add_node({"T", make_takeaway("drink water")});
    return g;
}

// Takeaway, two claims supporting it, five statements; S5 grounds claim_1.
inline ArgGraph figure_fixture_graph() {
    ArgGraph g;
    g.root = "T";
    g.add_node({"T", make_takeaway("consider the remedy for symptoms")});
    g.add_node({"claim_1", make_claim("claim_1", "the remedy is recommended by professionals", {"S5"})});
    g.add_node({"claim_2", make_claim("claim_2", "the remedy relieves symptoms", {"S4"})});
    g.add_node({"S1", make_statement("S1", "I went to the clinic", RhetoricalRole::AnecdotalEvidence)});
    g.add_node({"S2", make_statement("S2", "I was diagnosed", RhetoricalRole::AnecdotalEvidence)});
    g.add_node({"S3", make_statement("S3", "they sent me home", RhetoricalRole::None)});
    g.add_node({"S4", make_statement("S4", "I hope the remedy relieves my symptoms",
                                     RhetoricalRole::EmotionalAppeal)});
    g.add_node({"S5", make_statement("S5", "my doctor recommended the remedy",
                                     RhetoricalRole::CredibilityMove)});
    g.add_edge({"claim_1", "T", EdgeKind::Support, 0.8, std::nullopt});
    g.add_edge({"claim_2", "T", EdgeKind::Support, 0.7, std::nullopt});
    g.add_edge({"S5", "claim_1", EdgeKind::Grounding, 1.0, std::nullopt});
    g.add_edge({"S4", "claim_2", EdgeKind::Grounding, 1.0, std::nullopt});
    return g;
}

// Random valid graph for serialization round-trip properties.
inline ArgGraph random_valid_graph(std::mt19937_64& rng) {
    ArgGraph g;
    g.root = "T";
    Takeaway t = make_takeaway("takeaway text " + std::to_string(rng() % 1000));
    if (rng() % 2) t.takeaway_type = rng() % 2 ? TakeawayType::Explicit : TakeawayType::Implicit;
    if (rng() % 2) t.grounding.push_back("grounding span");
    g.add_node({"T", t});

    const int n_statements = static_cast<int>(rng() % 4);
    for (int i = 1; i <= n_statements; ++i) {
        auto roles = std::vector<std::optional<RhetoricalRole>>{
            std::nullopt,           RhetoricalRole::Premise,        RhetoricalRole::AnecdotalEvidence,
            RhetoricalRole::CredibilityMove, RhetoricalRole::EmotionalAppeal, RhetoricalRole::None};
        g.add_node({"S" + std::to_string(i),
                    make_statement("S" + std::to_string(i), "statement " + std::to_string(i),
                                   roles[rng() % roles.size()])});
    }
    const int n_claims = static_cast<int>(rng() % 3);
    for (int i = 1; i <= n_claims; ++i) {
        std::vector<std::string> sids;
        if (n_statements > 0 && rng() % 2) {
            sids.push_back("S" + std::to_string(
                                     1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n_statements))));
        }
        Claim c = make_claim("claim_" + std::to_string(i), "claim " + std::to_string(i), sids,
                             rng() % 2 ? ClaimType::Explicit : ClaimType::Implicit);
        g.add_node({c.id, c});
        for (const auto& sid : c.statement_ids) {
            g.add_edge({sid, c.id, EdgeKind::Grounding, 1.0, std::nullopt});
        }
        const double w = 0.05 + 0.95 * u01(rng);
        std::optional<std::map<std::string, double>> probs;
        if (rng() % 2) probs = std::map<std::string, double>{{"direct support", w}, {"no support", 1 - w}};
        g.add_edge({c.id, "T", EdgeKind::Support, w, probs});
    }
    int ev = 1;
    for (int i = 1; i <= n_claims; ++i) {
        if (rng() % 2) continue;
        const std::string ev_id = "ev_" + std::to_string(ev++);
        EvidenceDoc d = make_doc(ev_id + "_doc", "doc title", "doc abstract body");
        if (rng() % 2) d.year = 2020;
        g.add_node({ev_id, d});
        if (rng() % 2) {
            g.add_edge({ev_id, "claim_" + std::to_string(i), EdgeKind::Support, 0.05 + 0.95 * u01(rng),
                        std::nullopt});
        } else {
            g.add_edge({ev_id, "claim_" + std::to_string(i), EdgeKind::Attack, -0.05 - 0.95 * u01(rng),
                        std::nullopt});
        }
    }
    return g;
}

// --- scripted providers ------------------------------------------------------

// Support-classification provider answering from a (candidate id, target text)
// table; unlisted pairs default to no-support.
class PairScriptedProvider : public LlmProvider {
public:
    void set(const std::string& candidate_id, const std::string& target_text, double weight) {
        table_[{candidate_id, target_text}] = weight;
    }

    std::string complete(const std::string&, const std::string& hint) const override {
        throw std::logic_error("PairScriptedProvider only classifies (hint: " + hint + ")");
    }

    LabelDistribution classify_with_probs(const std::string& prompt,
                                          const std::vector<std::string>& labels) const override {
        const std::string target = extract(prompt, "`**Claim to Analyze**`: ");
        const std::string cand_block = extract(prompt, "`**Available Claims JSON**`: ");
        // First key of the single-candidate JSON object.
        const auto q1 = cand_block.find('"');
        const auto q2 = cand_block.find('"', q1 + 1);
        const std::string cand_id = cand_block.substr(q1 + 1, q2 - q1 - 1);

        double w = 0.0;
        if (auto it = table_.find({cand_id, target}); it != table_.end()) w = it->second;
        LabelDistribution d;
        d.labels = labels;
        d.probs = {w, 0.0, 1.0 - w};  // direct, weak, none
        return d;
    }

private:
    static std::string extract(const std::string& prompt, const std::string& marker) {
        const auto pos = prompt.find(marker);
        if (pos == std::string::npos) throw std::logic_error("marker not in prompt: " + marker);
        const auto start = pos + marker.size();
        const auto end = prompt.find("\n`**", start);
        return prompt.substr(start, end == std::string::npos ? std::string::npos : end - start);
    }

    std::map<std::pair<std::string, std::string>, double> table_;
};

// Fails the first `failures` calls with TransportError, then delegates.
class FlakyProvider : public LlmProvider {
public:
    FlakyProvider(const LlmProvider& inner, int failures) : inner_(inner), remaining_(failures) {}

    std::string complete(const std::string& prompt, const std::string& hint) const override {
        maybe_fail();
        return inner_.complete(prompt, hint);
    }
    LabelDistribution classify_with_probs(const std::string& prompt,
                                          const std::vector<std::string>& labels) const override {
        maybe_fail();
        return inner_.classify_with_probs(prompt, labels);
    }
    int calls() const { return calls_; }

private:
    void maybe_fail() const {
        ++calls_;
        if (remaining_ > 0) {
            --remaining_;
            throw TransportError("scripted flaky failure");
        }
    }
    const LlmProvider& inner_;
    mutable int remaining_;
    mutable int calls_ = 0;
};

// Counts provider calls; used to verify the cache short-circuits.
class CountingProvider : public LlmProvider {
public:
    explicit CountingProvider(const LlmProvider& inner) : inner_(inner) {}

    std::string complete(const std::string& prompt, const std::string& hint) const override {
        ++calls_;
        return inner_.complete(prompt, hint);
    }
    LabelDistribution classify_with_probs(const std::string& prompt,
                                          const std::vector<std::string>& labels) const override {
        ++calls_;
        return inner_.classify_with_probs(prompt, labels);
    }
    int calls() const { return calls_; }

private:
    const LlmProvider& inner_;
    mutable int calls_ = 0;
};

// --- independent factor-graph oracle -----------------------------------------

// Exact MAP by max-sum dynamic programming over an acyclic factor graph
// (clamped variables fixed). Throws std::logic_error when the free-variable
// factor graph is not a forest. Independent of the library solvers.
inline double tree_map_oracle(const FactorGraph& fg, std::map<std::string, int>* out_states = nullptr) {
    constexpr int K = trust::kNumStates;
    std::map<std::string, int> clamped;
    std::vector<std::string> free_ids;
    for (const auto& v : fg.variables) {
        if (v.clamped) clamped[v.node_id] = *v.clamped;
        else free_ids.push_back(v.node_id);
    }
    std::map<std::string, size_t> idx;
    for (size_t i = 0; i < free_ids.size(); ++i) idx[free_ids[i]] = i;

    // Effective unaries after clamping.
    std::vector<std::vector<double>> unary(free_ids.size(), std::vector<double>(K, 0.0));
    for (size_t i = 0; i < free_ids.size(); ++i) {
        for (int s = 0; s < K; ++s) unary[i][s] = fg.unary.at(free_ids[i])[s];
    }
    struct Edge {
        size_t a, b;
        const PairwiseTable* table;  // indexed [state_a][state_b]
    };
    std::vector<Edge> edges;
    for (const auto& p : fg.pairwise) {
        const bool uc = clamped.count(p.u), vc = clamped.count(p.v);
        if (uc && vc) continue;
        if (uc) {
            for (int s = 0; s < K; ++s) unary[idx.at(p.v)][s] += p.table[clamped.at(p.u)][s];
        } else if (vc) {
            for (int s = 0; s < K; ++s) unary[idx.at(p.u)][s] += p.table[s][clamped.at(p.v)];
        } else {
            edges.push_back({idx.at(p.u), idx.at(p.v), &p.table});
        }
    }

    // Forest check and adjacency.
    std::vector<std::vector<size_t>> adj(free_ids.size());  // edge indices
    {
        std::vector<size_t> parent(free_ids.size());
        for (size_t i = 0; i < parent.size(); ++i) parent[i] = i;
        auto find = [&](size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (size_t e = 0; e < edges.size(); ++e) {
            const size_t ra = find(edges[e].a), rb = find(edges[e].b);
            if (ra == rb) throw std::logic_error("tree_map_oracle: factor graph has a cycle");
            parent[ra] = rb;
            adj[edges[e].a].push_back(e);
            adj[edges[e].b].push_back(e);
        }
    }

    std::vector<int> best_state(free_ids.size(), -1);
    double total = 0.0;
    std::vector<char> visited(free_ids.size(), 0);

    // For each component: root at the smallest index, pass messages upward.
    // msg[v][s] = best achievable value of v's subtree when v is in state s,
    // including v's unary. back[e][s_parent] = argmax child state.
    for (size_t root = 0; root < free_ids.size(); ++root) {
        if (visited[root]) continue;
        // Iterative post-order.
        std::vector<std::pair<size_t, size_t>> order;  // (node, parent edge or SIZE_MAX)
        std::vector<std::pair<size_t, size_t>> stack{{root, SIZE_MAX}};
        visited[root] = 1;
        while (!stack.empty()) {
            auto [v, pe] = stack.back();
            stack.pop_back();
            order.emplace_back(v, pe);
            for (size_t e : adj[v]) {
                if (e == pe) continue;
                const size_t w = edges[e].a == v ? edges[e].b : edges[e].a;
                if (visited[w]) continue;
                visited[w] = 1;
                stack.emplace_back(w, e);
            }
        }
        std::vector<std::vector<double>> msg(free_ids.size(), std::vector<double>(K, 0.0));
        std::map<size_t, std::vector<int>> back;  // edge -> argmax child state per parent state
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const auto [v, pe] = *it;
            std::vector<double> value(K);
            for (int s = 0; s < K; ++s) value[s] = unary[v][s];
            for (size_t e : adj[v]) {
                if (e == pe) continue;
                const size_t w = edges[e].a == v ? edges[e].b : edges[e].a;
                for (int s = 0; s < K; ++s) value[s] += msg[w][s];
            }
            // hold the subtree value in msg[v] keyed by v's own state for now
            msg[v] = value;
            if (pe != SIZE_MAX) {
                const Edge& edge = edges[pe];
                const size_t parent = edge.a == v ? edge.b : edge.a;
                (void)parent;
                std::vector<double> out(K, -1e300);
                std::vector<int> arg(K, 0);
                for (int sp = 0; sp < K; ++sp) {
                    for (int sv = 0; sv < K; ++sv) {
                        const double pair_val = edge.a == v ? (*edge.table)[sv][sp]
                                                            : (*edge.table)[sp][sv];
                        const double cand = value[sv] + pair_val;
                        if (cand > out[sp]) {
                            out[sp] = cand;
                            arg[sp] = sv;
                        }
                    }
                }
                msg[v] = out;  // message to parent, keyed by parent state
                back[pe] = arg;
                // store child subtree values separately for decoding
            }
        }
        // Decode: recompute top-down. Root state = argmax of unary+messages.
        // Recompute root value vector.
        std::vector<double> root_value(K);
        for (int s = 0; s < K; ++s) root_value[s] = unary[root][s];
        for (size_t e : adj[root]) {
            const size_t w = edges[e].a == root ? edges[e].b : edges[e].a;
            for (int s = 0; s < K; ++s) root_value[s] += msg[w][s];
        }
        int rs = 0;
        for (int s = 1; s < K; ++s) {
            if (root_value[s] > root_value[rs]) rs = s;
        }
        best_state[root] = rs;
        total += root_value[rs];
        // Walk the order from the front (parents before children).
        for (const auto& [v, pe] : order) {
            if (pe == SIZE_MAX) continue;
            const Edge& edge = edges[pe];
            const size_t parent = edge.a == v ? edge.b : edge.a;
            best_state[v] = back.at(pe)[best_state[parent]];
        }
    }

    std::map<std::string, int> states = clamped;
    for (size_t i = 0; i < free_ids.size(); ++i) states[free_ids[i]] = best_state[i];
    // Clamped-clamped constants and clamped unaries via the library evaluator
    // would defeat independence; accumulate directly.
    double full = 0.0;
    for (const auto& v : fg.variables) full += fg.unary.at(v.node_id)[states.at(v.node_id)];
    for (const auto& p : fg.pairwise) full += p.table[states.at(p.u)][states.at(p.v)];
    if (out_states != nullptr) *out_states = states;
    (void)total;
    return full;
}

// Random factor graph for solver-equivalence checks.
inline FactorGraph random_factor_graph(std::mt19937_64& rng, int max_free, bool tree_only) {
    constexpr int K = trust::kNumStates;
    FactorGraph fg;
    const int n_free = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_free));
    const int n_clamped = static_cast<int>(rng() % 3);

    std::vector<std::string> free_ids, clamped_ids;
    for (int i = 0; i < n_free; ++i) {
        const std::string id = "v" + std::to_string(i + 1);
        free_ids.push_back(id);
        fg.variables.push_back({id, std::nullopt});
        // Continuous random prior on every variable. A generic objective keeps
        // the MAP unique; exactly flip-symmetric instances (all-zero unaries
        // with no clamps) have degenerate optimal faces whose fractional
        // center defeats per-variable argmax rounding.
        UnaryVector u{};
        const double peak = u01(rng);
        const double strength = 0.05 + u01(rng);
        for (int s = 0; s < K; ++s) {
            const double d = trust::state_value(s) - peak;
            u[s] = -strength * d * d;
        }
        fg.unary[id] = u;
    }
    for (int i = 0; i < n_clamped; ++i) {
        const std::string id = "e" + std::to_string(i + 1);
        clamped_ids.push_back(id);
        fg.variables.push_back({id, trust::kClampedEvidenceState});
        UnaryVector u{};
        u.fill(0.0);
        fg.unary[id] = u;
    }

    auto add_factor = [&](const std::string& a, const std::string& b) {
        const double w = 0.05 + 0.95 * u01(rng);
        PairwisePotential p;
        p.u = a;
        p.v = b;
        if (rng() % 3 == 0) {
            p.kind = EdgeKind::Attack;
            p.table = attack_table(1.0 + 9.0 * u01(rng), w);
        } else {
            p.kind = EdgeKind::Support;
            p.table = support_table(0.1 + 0.9 * u01(rng), w);
        }
        fg.pairwise.push_back(std::move(p));
    };

    // Spanning-tree-style construction over free variables.
    for (int i = 1; i < n_free; ++i) {
        const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i));
        add_factor(free_ids[static_cast<size_t>(i)], free_ids[static_cast<size_t>(j)]);
    }
    if (!tree_only && n_free >= 2) {
        const int extra = static_cast<int>(rng() % 3);
        for (int e = 0; e < extra; ++e) {
            const int a = static_cast<int>(rng() % static_cast<std::uint64_t>(n_free));
            int b = static_cast<int>(rng() % static_cast<std::uint64_t>(n_free));
            if (a == b) b = (b + 1) % n_free;
            add_factor(free_ids[static_cast<size_t>(a)], free_ids[static_cast<size_t>(b)]);
        }
    }
    // Clamped attachments (reduce to unaries; never create free cycles).
    for (const auto& cid : clamped_ids) {
        const int target = static_cast<int>(rng() % static_cast<std::uint64_t>(n_free));
        if (rng() % 2) add_factor(cid, free_ids[static_cast<size_t>(target)]);
        else add_factor(free_ids[static_cast<size_t>(target)], cid);
    }
    return fg;
}

// True when the pairwise structure over free variables is a forest (parallel
// edges count as cycles).
inline bool is_free_forest(const FactorGraph& fg) {
    std::map<std::string, int> clamped;
    std::map<std::string, size_t> idx;
    for (const auto& v : fg.variables) {
        if (v.clamped) clamped[v.node_id] = *v.clamped;
        else idx.emplace(v.node_id, idx.size());
    }
    std::vector<size_t> parent(idx.size());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& p : fg.pairwise) {
        if (clamped.count(p.u) || clamped.count(p.v)) continue;
        const size_t ra = find(idx.at(p.u)), rb = find(idx.at(p.v));
        if (ra == rb) return false;
        parent[ra] = rb;
    }
    return true;
}

}  // namespace taigr::testing
