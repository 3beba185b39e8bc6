#pragma once
// Retrieval and reranking contracts for the evidence layer.

#include <string>
#include <vector>

#include "taigr/core/types.hpp"

namespace taigr {

struct RetrievalConfig {
    int top_k = 100;              // retrieved per query
    double rerank_threshold = 0.3;
    int keep_per_node = 30;       // retained per node after rerank
    double neutral_epsilon = 0.05;  // |e| below this drops the document

    bool valid() const {
        return keep_per_node > 0 && keep_per_node <= top_k && rerank_threshold >= 0.0 &&
               rerank_threshold <= 1.0 && neutral_epsilon >= 0.0;
    }
};

// Model-agnostic retrieval contract. Implementations return at most k docs per
// call with no duplicate doc_ids, and must be deterministic for fixed inputs.
class RetrievalProvider {
public:
    virtual ~RetrievalProvider() = default;
    virtual std::vector<EvidenceDoc> search(const std::string& query, int k) const = 0;
};

// Relevance scorer in [0,1]; deterministic for fixed inputs.
class Reranker {
public:
    virtual ~Reranker() = default;
    virtual double score(const std::string& query, const EvidenceDoc& doc) const = 0;
};

}  // namespace taigr
