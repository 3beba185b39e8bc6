#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "taigr/evidence/attach.hpp"
#include "taigr/evidence/lexical.hpp"
#include "taigr/llm/mock_provider.hpp"
#include "taigr/llm/prompts.hpp"

using namespace taigr;
using namespace taigr::testing;
using nlohmann::json;

namespace {

const StageOptions kFastRetry{{2, 0}, nullptr};

// Retrieval scripted per query string.
class FixedRetriever : public RetrievalProvider {
public:
    void set(const std::string& query, std::vector<EvidenceDoc> docs) {
        table_[query] = std::move(docs);
    }
    std::vector<EvidenceDoc> search(const std::string& query, int k) const override {
        auto it = table_.find(query);
        if (it == table_.end()) return {};
        auto docs = it->second;
        if (docs.size() > static_cast<size_t>(k)) docs.resize(static_cast<size_t>(k));
        return docs;
    }

private:
    std::map<std::string, std::vector<EvidenceDoc>> table_;
};

class FixedReranker : public Reranker {
public:
    explicit FixedReranker(double fallback = 0.0) : fallback_(fallback) {}
    void set(const std::string& doc_id, double score) { scores_[doc_id] = score; }
    double score(const std::string&, const EvidenceDoc& doc) const override {
        auto it = scores_.find(doc.doc_id);
        return it == scores_.end() ? fallback_ : it->second;
    }

private:
    std::map<std::string, double> scores_;
    double fallback_;
};

}  // namespace

TEST_CASE("evidence_weight: stance vertices and the uniform distribution") {
    CHECK(evidence_weight({1.0, 0.0, 0.0, 0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(evidence_weight({0.0, 0.0, 1.0, 0.0, 0.0}) == doctest::Approx(0.0));
    CHECK(evidence_weight({0.0, 0.0, 0.0, 0.0, 1.0}) == doctest::Approx(-1.0));
    CHECK(evidence_weight({0.2, 0.2, 0.2, 0.2, 0.2}) == doctest::Approx(0.0));
}

TEST_CASE("property: evidence_weight is antisymmetric under stance reversal") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 200; ++i) {
        double raw[5];
        double total = 0.0;
        for (double& x : raw) total += (x = u01(rng) + 1e-9);
        StanceDistribution d{raw[0] / total, raw[1] / total, raw[2] / total, raw[3] / total,
                             raw[4] / total};
        REQUIRE(d.valid());
        CHECK(evidence_weight(d.reversed()) == doctest::Approx(-evidence_weight(d)).epsilon(1e-12));
    }
}

TEST_CASE("retrieve_for_node: pooling deduplicates by doc id") {
    FixedRetriever retriever;
    retriever.set("q1", {make_doc("A", "a", "x"), make_doc("B", "b", "x")});
    retriever.set("q2", {make_doc("B", "b", "x"), make_doc("C", "c", "x")});
    FixedReranker reranker(0.9);
    const auto kept = retrieve_for_node("node text", {"q1", "q2"}, retriever, reranker, RetrievalConfig{});
    REQUIRE(kept.size() == 3);
    std::set<std::string> ids;
    for (const auto& [doc, score] : kept) {
        ids.insert(doc.doc_id);
        CHECK(score == doctest::Approx(0.9));
    }
    CHECK(ids == std::set<std::string>{"A", "B", "C"});
}

TEST_CASE("retrieve_for_node: everything below the rerank threshold is dropped") {
    FixedRetriever retriever;
    retriever.set("q", {make_doc("A", "a", "x"), make_doc("B", "b", "x")});
    FixedReranker reranker(0.29);
    CHECK(retrieve_for_node("node", {"q"}, retriever, reranker, RetrievalConfig{}).empty());
}

TEST_CASE("retrieve_for_node: forty qualifying docs truncate to keep_per_node, score-sorted") {
    FixedRetriever retriever;
    std::vector<EvidenceDoc> docs;
    FixedReranker reranker;
    for (int i = 0; i < 40; ++i) {
        const std::string id = (i < 10 ? "doc_0" : "doc_") + std::to_string(i);
        docs.push_back(make_doc(id, "t", "x"));
        reranker.set(id, 0.3 + 0.01 * i);
    }
    retriever.set("q", docs);
    RetrievalConfig config;  // keep_per_node = 30
    const auto kept = retrieve_for_node("node", {"q"}, retriever, reranker, config);
    REQUIRE(kept.size() == 30);
    for (size_t i = 1; i < kept.size(); ++i) CHECK(kept[i - 1].second >= kept[i].second);
    CHECK(kept.front().first.doc_id == "doc_39");  // highest score first
    CHECK_THROWS_AS(retrieve_for_node("node", {}, retriever, reranker, config),
                    std::invalid_argument);
}

TEST_CASE("lexical index: jsonl loading, ranking, and determinism") {
    const auto path = std::filesystem::temp_directory_path() / "taigr-corpus-test.jsonl";
    {
        std::ofstream out(path);
        out << R"({"doc_id":"d1","title":"green tea and blood pressure","abstract":"a randomized trial of green tea for blood pressure in adults"})"
            << "\n";
        out << R"({"doc_id":"d2","title":"coffee consumption","abstract":"observational study of coffee drinkers"})"
            << "\n\n";
        out << R"({"doc_id":"d3","title":"green tea metabolism","abstract":"green tea extract and metabolic rate"})"
            << "\n";
    }
    const LexicalIndex index = LexicalIndex::from_jsonl(path);
    CHECK(index.docs().size() == 3);

    const auto hits = index.search("green tea blood pressure", 10);
    REQUIRE(!hits.empty());
    CHECK(hits.front().doc_id == "d1");
    // Deterministic: repeated searches agree.
    const auto hits2 = index.search("green tea blood pressure", 10);
    REQUIRE(hits.size() == hits2.size());
    for (size_t i = 0; i < hits.size(); ++i) CHECK(hits[i].doc_id == hits2[i].doc_id);

    // Score is an IDF-weighted overlap ratio in [0,1]; full containment scores 1.
    const double full = index.score("green tea", index.docs()[0]);
    CHECK(full == doctest::Approx(1.0));
    const double partial = index.score("green tea zebra", index.docs()[0]);
    CHECK(partial < 1.0);
    CHECK(partial > 0.0);

    CHECK(index.search("zebra xylophone", 5).empty());
    CHECK(index.search("green tea", 1).size() == 1);
    std::filesystem::remove(path);
}

TEST_CASE("attach_evidence: strong-support doc becomes one Support edge of weight 1") {
    ArgGraph g = minimal_graph();
    g.add_node({"claim_1", make_claim("claim_1", "green tea lowers blood pressure")});
    g.add_edge({"claim_1", "T", EdgeKind::Support, 0.9, std::nullopt});

    MockProvider mock;
    mock.set_default_completion(stage::kCheckworthyClassification,
                                json{{"claim_1", json{{"label", "PubMed-checkworthy"}}}}.dump());
    mock.set_default_completion(
        stage::kQueryExpansion,
        json{{"supporting_queries",
              json::array({json{{"query_id", "S1"}, {"query_text", "tea trial"}}})},
             {"opposing_queries", json::array()}}
            .dump());
    mock.set_default_distribution("evidence_classification", {{"strong support", 1.0}});

    FixedRetriever retriever;
    retriever.set("tea trial", {make_doc("pm1", "tea rct", "a tea trial abstract")});
    FixedReranker reranker(0.8);

    const Transcript t{"t", "transcript", std::nullopt};
    const ArgGraph out = attach_evidence(g, t, mock, retriever, reranker, RetrievalConfig{}, kFastRetry);
    REQUIRE(out.nodes.size() == g.nodes.size() + 1);
    const ArgNode* ev = out.find_node("ev_1");
    REQUIRE(ev != nullptr);
    CHECK(ev->kind() == NodeKind::Evidence);
    bool found_edge = false;
    for (const auto& e : out.edges) {
        if (e.from == "ev_1") {
            found_edge = true;
            CHECK(e.to == "claim_1");
            CHECK(e.kind == EdgeKind::Support);
            CHECK(e.weight == doctest::Approx(1.0));
        }
    }
    CHECK(found_edge);
    CHECK(validate_graph(out).empty());
}

TEST_CASE("attach_evidence: neutral docs are dropped") {
    ArgGraph g = minimal_graph();
    g.add_node({"claim_1", make_claim("claim_1", "a claim")});
    g.add_edge({"claim_1", "T", EdgeKind::Support, 0.9, std::nullopt});

    MockProvider mock;
    mock.set_default_completion(stage::kCheckworthyClassification,
                                json{{"claim_1", json{{"label", "PubMed-checkworthy"}}}}.dump());
    mock.set_default_completion(
        stage::kQueryExpansion,
        json{{"supporting_queries", json::array({json{{"query_text", "q"}}})},
             {"opposing_queries", json::array()}}
            .dump());
    mock.set_default_distribution("evidence_classification", {{"neutral", 1.0}});

    FixedRetriever retriever;
    retriever.set("q", {make_doc("pm1", "t", "x")});
    FixedReranker reranker(0.9);
    const ArgGraph out = attach_evidence(g, {"t", "tr", std::nullopt}, mock, retriever, reranker,
                                         RetrievalConfig{}, kFastRetry);
    CHECK(out.nodes.size() == g.nodes.size());
    CHECK(out.edges.size() == g.edges.size());
}

TEST_CASE("attach_evidence: mixed stances produce support and attack edges") {
    ArgGraph g = minimal_graph();
    g.add_node({"claim_1", make_claim("claim_1", "the claim under check")});
    g.add_edge({"claim_1", "T", EdgeKind::Support, 0.9, std::nullopt});

    MockProvider mock;
    mock.set_default_completion(stage::kCheckworthyClassification,
                                json{{"claim_1", json{{"label", "PubMed-checkworthy"}}}}.dump());
    mock.set_default_completion(
        stage::kQueryExpansion,
        json{{"supporting_queries", json::array({json{{"query_text", "q"}}})},
             {"opposing_queries", json::array()}}
            .dump());
    // e = 0.8, 0.6, -0.9 through the signed weight formula.
    mock.add_distribution("evidence_classification", {"\"sup1\""},
                          {{"strong support", 0.6}, {"weak support", 0.4}});
    mock.add_distribution("evidence_classification", {"\"sup2\""},
                          {{"strong support", 0.2}, {"weak support", 0.8}});
    mock.add_distribution("evidence_classification", {"\"opp1\""},
                          {{"weak oppose", 0.2}, {"strong oppose", 0.8}});

    FixedRetriever retriever;
    retriever.set("q", {make_doc("sup1", "sup1", "x"), make_doc("sup2", "sup2", "x"),
                        make_doc("opp1", "opp1", "x")});
    FixedReranker reranker(0.9);
    const ArgGraph out = attach_evidence(g, {"t", "tr", std::nullopt}, mock, retriever, reranker,
                                         RetrievalConfig{}, kFastRetry);

    CHECK(out.nodes.size() == g.nodes.size() + 3);
    int support = 0, attack = 0;
    for (const auto& e : out.edges) {
        if (out.find_node(e.from)->kind() != NodeKind::Evidence) continue;
        if (e.kind == EdgeKind::Support) {
            ++support;
            CHECK((e.weight == doctest::Approx(0.8) || e.weight == doctest::Approx(0.6)));
        } else {
            ++attack;
            CHECK(e.weight == doctest::Approx(-0.9));
        }
    }
    CHECK(support == 2);
    CHECK(attack == 1);
    CHECK(validate_graph(out).empty());

    // Additivity: the input graph is a subgraph of the output.
    for (const auto& n : g.nodes) CHECK(out.find_node(n.node_id) != nullptr);
    for (const auto& e : g.edges) {
        CHECK(std::any_of(out.edges.begin(), out.edges.end(), [&](const ArgEdge& oe) {
            return oe.from == e.from && oe.to == e.to && oe.kind == e.kind;
        }));
    }
}

TEST_CASE("attach_evidence: only claims and premise statements are candidates") {
    ArgGraph g = minimal_graph();
    g.add_node({"claim_1", make_claim("claim_1", "a claim", {"S1"})});
    g.add_node({"S1", make_statement("S1", "a premise statement", RhetoricalRole::Premise)});
    g.add_node({"S2", make_statement("S2", "an anecdote", RhetoricalRole::AnecdotalEvidence)});
    g.add_edge({"claim_1", "T", EdgeKind::Support, 0.9, std::nullopt});
    g.add_edge({"S1", "claim_1", EdgeKind::Grounding, 1.0, std::nullopt});

    // The checkworthy fixture lists exactly the candidate ids; an unexpected id
    // would make the mock response incomplete and the stage would throw.
    MockProvider mock;
    mock.set_default_completion(
        stage::kCheckworthyClassification,
        json{{"claim_1", json{{"label", "not PubMed-checkworthy"}}},
             {"S1", json{{"label", "not PubMed-checkworthy"}}}}
            .dump());
    FixedRetriever retriever;
    FixedReranker reranker;
    const ArgGraph out = attach_evidence(g, {"t", "tr", std::nullopt}, mock, retriever, reranker,
                                         RetrievalConfig{}, kFastRetry);
    CHECK(out.nodes.size() == g.nodes.size());  // nothing checkworthy, nothing retrieved
}

TEST_CASE("attach_evidence: provider failures carry node context") {
    ArgGraph g = minimal_graph();
    g.add_node({"claim_1", make_claim("claim_1", "a claim")});
    g.add_edge({"claim_1", "T", EdgeKind::Support, 0.9, std::nullopt});

    MockProvider mock;
    mock.set_default_completion(stage::kCheckworthyClassification,
                                json{{"claim_1", json{{"label", "PubMed-checkworthy"}}}}.dump());
    mock.set_default_completion(stage::kQueryExpansion, "this is not json at all {");
    FixedRetriever retriever;
    FixedReranker reranker;
    try {
        attach_evidence(g, {"t", "tr", std::nullopt}, mock, retriever, reranker, RetrievalConfig{},
                        kFastRetry);
        FAIL("expected ParseError");
    } catch (const ParseError& ex) {
        CHECK(std::string(ex.what()).find("claim_1") != std::string::npos);
    }
}
