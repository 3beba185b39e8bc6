#include "taigr/evidence/lexical.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "taigr/common.hpp"

namespace taigr {

using nlohmann::json;

std::vector<std::string> lexical_tokens(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

namespace {

std::unordered_set<std::string> token_set(const std::string& text) {
    auto toks = lexical_tokens(text);
    return {toks.begin(), toks.end()};
}

EvidenceDoc doc_from_json(const json& j) {
    EvidenceDoc d;
    d.doc_id = j.at("doc_id").get<std::string>();
    d.title = j.value("title", std::string{});
    d.abstract_text = j.at("abstract").get<std::string>();
    if (j.contains("year") && !j["year"].is_null()) d.year = j["year"].get<int>();
    d.source_tag = j.value("source_tag", std::string{});
    return d;
}

}  // namespace

LexicalIndex::LexicalIndex(std::vector<EvidenceDoc> docs) : docs_(std::move(docs)) {
    doc_tokens_.reserve(docs_.size());
    for (size_t i = 0; i < docs_.size(); ++i) {
        for (size_t j = i + 1; j < docs_.size(); ++j) {
            if (docs_[i].doc_id == docs_[j].doc_id) {
                throw ConfigError("duplicate doc_id in corpus: " + docs_[i].doc_id);
            }
        }
    }
    for (const auto& d : docs_) {
        auto toks = token_set(d.title + " " + d.abstract_text);
        for (const auto& t : toks) ++df_[t];
        doc_tokens_.push_back(std::move(toks));
    }
}

LexicalIndex LexicalIndex::from_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open corpus file: " + path.string());
    std::vector<EvidenceDoc> docs;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            docs.push_back(doc_from_json(json::parse(line)));
        } catch (const json::exception& ex) {
            throw ConfigError("corpus " + path.string() + " line " + std::to_string(lineno) +
                              ": " + ex.what());
        }
    }
    return LexicalIndex(std::move(docs));
}

double LexicalIndex::idf(const std::string& token) const {
    const auto it = df_.find(token);
    const int df = it == df_.end() ? 0 : it->second;
    const double n = static_cast<double>(docs_.size());
    return 1.0 + std::log((n + 1.0) / (df + 1.0));
}

double LexicalIndex::score(const std::string& query, const EvidenceDoc& doc) const {
    const auto q = token_set(query);
    if (q.empty()) return 0.0;
    const auto d = token_set(doc.title + " " + doc.abstract_text);
    double hit = 0.0, total = 0.0;
    for (const auto& t : q) {
        const double w = idf(t);
        total += w;
        if (d.count(t)) hit += w;
    }
    return total > 0.0 ? hit / total : 0.0;
}

std::vector<EvidenceDoc> LexicalIndex::search(const std::string& query, int k) const {
    if (k <= 0) return {};
    const auto q = token_set(query);
    if (q.empty()) return {};

    std::vector<std::pair<double, size_t>> scored;
    for (size_t i = 0; i < docs_.size(); ++i) {
        double hit = 0.0, total = 0.0;
        for (const auto& t : q) {
            const double w = idf(t);
            total += w;
            if (doc_tokens_[i].count(t)) hit += w;
        }
        const double s = total > 0.0 ? hit / total : 0.0;
        if (s > 0.0) scored.emplace_back(s, i);
    }
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return docs_[a.second].doc_id < docs_[b.second].doc_id;
    });
    if (scored.size() > static_cast<size_t>(k)) scored.resize(static_cast<size_t>(k));

    std::vector<EvidenceDoc> out;
    out.reserve(scored.size());
    for (const auto& [_, i] : scored) out.push_back(docs_[i]);
    return out;
}

}  // namespace taigr
