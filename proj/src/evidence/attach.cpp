#include "taigr/evidence/attach.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_set>

#include "taigr/common.hpp"

namespace taigr {

namespace {

std::pair<long long, std::string> natural_key(const std::string& id) {
    size_t i = id.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(id[i - 1]))) --i;
    long long num = std::numeric_limits<long long>::max();
    if (i < id.size()) num = std::stoll(id.substr(i));
    return {num, id};
}

}  // namespace

double evidence_weight(const StanceDistribution& dist) {
    // e = -1.0*P(strong oppose) - 0.5*P(weak oppose) + 0.5*P(weak support)
    //     + 1.0*P(strong support), grouped so opposing pairs cancel exactly.
    return 1.0 * (dist.p_strong_support - dist.p_strong_oppose) +
           0.5 * (dist.p_weak_support - dist.p_weak_oppose);
}

std::vector<std::pair<EvidenceDoc, double>> retrieve_for_node(
    const std::string& node_text, const std::vector<std::string>& queries,
    const RetrievalProvider& retriever, const Reranker& reranker, const RetrievalConfig& config) {
    if (queries.empty()) throw std::invalid_argument("retrieve_for_node: no queries");
    if (!config.valid()) throw std::invalid_argument("retrieve_for_node: invalid retrieval config");

    // Pool results across queries, first retrieval of a doc_id wins.
    std::vector<EvidenceDoc> pooled;
    std::unordered_set<std::string> seen;
    for (const auto& query : queries) {
        for (auto& doc : retriever.search(query, config.top_k)) {
            if (seen.insert(doc.doc_id).second) pooled.push_back(std::move(doc));
        }
    }

    std::vector<std::pair<EvidenceDoc, double>> kept;
    for (auto& doc : pooled) {
        const double s = reranker.score(node_text, doc);
        if (s < config.rerank_threshold) continue;
        kept.emplace_back(std::move(doc), s);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first.doc_id < b.first.doc_id;
    });
    if (kept.size() > static_cast<size_t>(config.keep_per_node)) {
        kept.resize(static_cast<size_t>(config.keep_per_node));
    }
    return kept;
}

ArgGraph attach_evidence(const ArgGraph& graph, const Transcript& transcript,
                         const LlmProvider& provider, const RetrievalProvider& retriever,
                         const Reranker& reranker, const RetrievalConfig& config,
                         const StageOptions& opts) {
    if (auto violations = validate_graph(graph); !violations.empty()) {
        throw std::invalid_argument("attach_evidence: input graph invalid: " +
                                    violations.front().code);
    }
    if (!config.valid()) throw std::invalid_argument("attach_evidence: invalid retrieval config");

    // Candidates: claims and premise statements.
    std::vector<std::pair<std::string, std::string>> candidates;  // (node_id, text)
    for (const auto& n : graph.nodes) {
        if (n.kind() == NodeKind::Claim) {
            candidates.emplace_back(n.node_id, std::get<Claim>(n.payload).text);
        } else if (n.kind() == NodeKind::Statement) {
            const auto& s = std::get<Statement>(n.payload);
            if (s.role == RhetoricalRole::Premise) candidates.emplace_back(n.node_id, s.text);
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        return natural_key(a.first) < natural_key(b.first);
    });

    ArgGraph out = graph;
    if (candidates.empty()) return out;

    const auto checkworthy = classify_checkworthy(transcript, candidates, provider, opts);

    int ev_counter = 1;
    for (const auto& [node_id, node_text] : candidates) {
        if (!checkworthy.at(node_id)) continue;
        try {
            const QueryExpansion queries = expand_queries(transcript, node_text, provider, opts);
            std::vector<std::string> all_queries = queries.supporting;
            all_queries.insert(all_queries.end(), queries.opposing.begin(), queries.opposing.end());
            if (all_queries.empty()) continue;  // node skipped, nothing to search for

            const auto retrieved = retrieve_for_node(node_text, all_queries, retriever, reranker, config);
            if (retrieved.empty()) continue;

            std::vector<EvidenceDoc> docs;
            docs.reserve(retrieved.size());
            for (const auto& [doc, _] : retrieved) docs.push_back(doc);
            const auto stances = classify_evidence(transcript, node_text, docs, provider, opts);

            for (const auto& [doc, rerank_score] : retrieved) {
                (void)rerank_score;
                const StanceDistribution& stance = stances.at(doc.doc_id);
                const double e = evidence_weight(stance);
                if (e < config.neutral_epsilon && e > -config.neutral_epsilon) continue;
                const std::string ev_id = "ev_" + std::to_string(ev_counter++);
                out.add_node({ev_id, doc});
                if (e >= config.neutral_epsilon) {
                    out.add_edge({ev_id, node_id, EdgeKind::Support, e, stance.as_map()});
                } else {
                    out.add_edge({ev_id, node_id, EdgeKind::Attack, e, stance.as_map()});
                }
            }
        } catch (const TransportError& ex) {
            throw TransportError("evidence for node " + node_id + ": " + ex.what());
        } catch (const ParseError& ex) {
            throw ParseError("evidence for node " + node_id + ": " + ex.what());
        }
    }
    return out;
}

}  // namespace taigr
