#pragma once
// Reference retrieval stack: a deterministic lexical scorer (IDF-weighted
// token-overlap ratio) over a local JSONL corpus. Stands in for external
// retrieval/reranking models in tests and offline runs.

#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "taigr/evidence/types.hpp"

namespace taigr {

std::vector<std::string> lexical_tokens(const std::string& text);

class LexicalIndex : public RetrievalProvider, public Reranker {
public:
    LexicalIndex() = default;
    explicit LexicalIndex(std::vector<EvidenceDoc> docs);

    // One EvidenceDoc JSON object per line; blank lines ignored.
    static LexicalIndex from_jsonl(const std::filesystem::path& path);

    const std::vector<EvidenceDoc>& docs() const { return docs_; }

    // Docs with positive score, ordered by (score desc, doc_id asc), at most k.
    std::vector<EvidenceDoc> search(const std::string& query, int k) const override;

    // IDF-weighted fraction of query tokens found in the document, in [0,1].
    // Works for documents outside the corpus; unseen tokens get df = 0.
    double score(const std::string& query, const EvidenceDoc& doc) const override;

private:
    double idf(const std::string& token) const;

    std::vector<EvidenceDoc> docs_;
    std::vector<std::unordered_set<std::string>> doc_tokens_;
    std::unordered_map<std::string, int> df_;
};

}  // namespace taigr
