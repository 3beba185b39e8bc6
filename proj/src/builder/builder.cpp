#include "taigr/builder/builder.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace taigr {

namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

// Natural ordering for ids like "claim_10" / "S2": numeric suffix, then text.
std::pair<long long, std::string> natural_key(const std::string& id) {
    size_t i = id.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(id[i - 1]))) --i;
    long long num = std::numeric_limits<long long>::max();
    if (i < id.size()) num = std::stoll(id.substr(i));
    return {num, id};
}

struct PairScore {
    double weight;
    std::map<std::string, double> class_probs;
};

// Memoizes pairwise support classifications within one build.
class PairScorer {
public:
    PairScorer(const Transcript& transcript, const LlmProvider& provider, const StageOptions& opts)
        : transcript_(transcript), provider_(provider), opts_(opts) {}

    const PairScore& score(const std::string& cand_id, const std::string& cand_text,
                           const std::string& target_id, const std::string& target_text) {
        const auto key = std::make_pair(cand_id, target_id);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        auto dists = classify_support(transcript_, target_text, {{cand_id, cand_text}}, provider_, opts_);
        const SupportDistribution& d = dists.at(cand_id);
        PairScore s{support_weight(d), d.as_map()};
        return cache_.emplace(key, std::move(s)).first->second;
    }

private:
    const Transcript& transcript_;
    const LlmProvider& provider_;
    StageOptions opts_;
    std::map<std::pair<std::string, std::string>, PairScore> cache_;
};

}  // namespace

bool BuilderConfig::valid() const {
    return in_unit(threshold_claim_to_takeaway) && in_unit(threshold_claim_to_claim) &&
           in_unit(threshold_statement_pair) && in_unit(threshold_statement_to_claim);
}

double support_weight(const SupportDistribution& dist) {
    return 1.0 * dist.p_direct + 0.5 * dist.p_weak;
}

ArgGraph build_graph(const Transcript& transcript, const Takeaway& takeaway,
                     const std::vector<Claim>& claims, const std::vector<Statement>& statements,
                     const LlmProvider& provider, const BuilderConfig& config,
                     const StageOptions& opts) {
    if (!takeaway.found) throw std::invalid_argument("build_graph: takeaway was not found");
    if (!config.valid()) throw std::invalid_argument("build_graph: invalid builder config");

    ArgGraph g;
    g.root = kTakeawayNodeId;
    g.add_node({kTakeawayNodeId, takeaway});
    for (const auto& c : claims) g.add_node({c.id, c});
    for (const auto& s : statements) g.add_node({s.id, s});

    std::map<std::string, std::string> text_of;
    text_of[kTakeawayNodeId] = takeaway.text;
    for (const auto& c : claims) text_of[c.id] = c.text;
    for (const auto& s : statements) text_of[s.id] = s.text;

    // Grounding edges from each claim's supporting statements.
    std::map<std::string, std::vector<std::string>> grounding_sources;  // claim -> statements
    for (const auto& c : claims) {
        for (const auto& sid : c.statement_ids) {
            if (!g.has_node(sid)) continue;
            g.add_edge({sid, c.id, EdgeKind::Grounding, 1.0, std::nullopt});
            grounding_sources[c.id].push_back(sid);
        }
    }

    // Attachment bookkeeping: a node is attached once it gains a directed path to
    // the root. Statements grounding a claim attach together with that claim.
    std::vector<std::string> attachment_order{kTakeawayNodeId};
    std::set<std::string> attached{kTakeawayNodeId};
    auto attach = [&](const std::string& id) {
        if (!attached.insert(id).second) return;
        attachment_order.push_back(id);
        auto it = grounding_sources.find(id);
        if (it != grounding_sources.end()) {
            std::vector<std::string> sources = it->second;
            std::sort(sources.begin(), sources.end(),
                      [](const std::string& a, const std::string& b) {
                          return natural_key(a) < natural_key(b);
                      });
            for (const auto& sid : sources) {
                if (attached.insert(sid).second) attachment_order.push_back(sid);
            }
        }
    };

    auto threshold_for = [&](NodeKind from, NodeKind to) {
        if (from == NodeKind::Claim && to == NodeKind::Takeaway) return config.threshold_claim_to_takeaway;
        if (from == NodeKind::Claim && to == NodeKind::Claim) return config.threshold_claim_to_claim;
        if (from == NodeKind::Statement && to == NodeKind::Claim) return config.threshold_statement_to_claim;
        return config.threshold_statement_pair;
    };

    PairScorer scorer(transcript, provider, opts);

    std::vector<std::string> claim_ids;
    for (const auto& c : claims) claim_ids.push_back(c.id);
    std::sort(claim_ids.begin(), claim_ids.end(),
              [](const std::string& a, const std::string& b) { return natural_key(a) < natural_key(b); });

    // Phase 1: claims against the takeaway.
    for (const auto& cid : claim_ids) {
        const PairScore& s = scorer.score(cid, text_of[cid], kTakeawayNodeId, takeaway.text);
        if (s.weight >= config.threshold_claim_to_takeaway) {
            g.add_edge({cid, kTakeawayNodeId, EdgeKind::Support, s.weight, s.class_probs});
            attach(cid);
        }
    }

    // Phase 2: unattached claims against attached takeaway/claim targets, with
    // kind-dependent thresholds, until a full pass adds nothing. Targets are
    // snapshotted per pass; a qualifying candidate attaches to all of them.
    for (size_t pass = 0; pass < claims.size() + 1; ++pass) {
        std::vector<std::string> targets;
        for (const auto& id : attachment_order) {
            const NodeKind k = g.find_node(id)->kind();
            if (k == NodeKind::Takeaway || k == NodeKind::Claim) targets.push_back(id);
        }
        bool added = false;
        for (const auto& cid : claim_ids) {
            if (attached.count(cid)) continue;
            for (const auto& tid : targets) {
                const PairScore& s = scorer.score(cid, text_of[cid], tid, text_of[tid]);
                const double thr = threshold_for(NodeKind::Claim, g.find_node(tid)->kind());
                if (s.weight >= thr) {
                    g.add_edge({cid, tid, EdgeKind::Support, s.weight, s.class_probs});
                    added = true;
                }
            }
            if (!attached.count(cid)) {
                // Attach after evaluating all targets of this pass.
                bool has_edge = std::any_of(g.edges.begin(), g.edges.end(), [&](const ArgEdge& e) {
                    return e.from == cid && e.kind == EdgeKind::Support;
                });
                if (has_edge) attach(cid);
            }
        }
        if (!added) break;
    }

    // Phase 3: unattached statements against attached claims and statements;
    // each statement gains at most its single best qualifying edge per pass.
    std::vector<std::string> statement_ids;
    for (const auto& s : statements) statement_ids.push_back(s.id);
    std::sort(statement_ids.begin(), statement_ids.end(),
              [](const std::string& a, const std::string& b) { return natural_key(a) < natural_key(b); });

    for (size_t pass = 0; pass < statements.size() + 1; ++pass) {
        std::vector<std::string> targets;
        for (const auto& id : attachment_order) {
            const NodeKind k = g.find_node(id)->kind();
            if (k == NodeKind::Claim || k == NodeKind::Statement) targets.push_back(id);
        }
        bool added = false;
        for (const auto& sid : statement_ids) {
            if (attached.count(sid)) continue;
            double best_weight = -1.0;
            const std::string* best_target = nullptr;
            const PairScore* best_score = nullptr;
            for (const auto& tid : targets) {
                const PairScore& s = scorer.score(sid, text_of[sid], tid, text_of[tid]);
                const double thr = threshold_for(NodeKind::Statement, g.find_node(tid)->kind());
                if (s.weight < thr) continue;
                if (s.weight > best_weight) {  // ties resolve to the earliest-attached target
                    best_weight = s.weight;
                    best_target = &tid;
                    best_score = &s;
                }
            }
            if (best_target != nullptr) {
                g.add_edge({sid, *best_target, EdgeKind::Support, best_score->weight,
                            best_score->class_probs});
                attach(sid);
                added = true;
            }
        }
        if (!added) break;
    }

    auto violations = validate_graph(g);
    if (!violations.empty()) {
        throw std::logic_error("build_graph produced an invalid graph: " + violations.front().code +
                               " (" + violations.front().subject + ")");
    }
    return g;
}

}  // namespace taigr
