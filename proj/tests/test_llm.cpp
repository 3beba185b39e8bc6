#include <doctest.h>

#include <filesystem>
#include <set>

#include <nlohmann/json.hpp>

#include "helpers.hpp"
#include "taigr/llm/cache.hpp"
#include "taigr/llm/mock_provider.hpp"
#include "taigr/llm/prompts.hpp"
#include "taigr/llm/stages.hpp"

using namespace taigr;
using namespace taigr::testing;
using nlohmann::json;

namespace {

const StageOptions kFastRetry{{2, 0}, nullptr};

Transcript make_transcript(const std::string& id, const std::string& text) {
    return Transcript{id, text, std::nullopt};
}

const char* kUrineTranscript =
    "Okay, I know this is gonna sound wild — but your own urine might be one of the most powerful "
    "natural boosters out there. Think about it: it's made by you, packed with your own minerals, "
    "hormones, and amino acids — literally personalized medicine.";

}  // namespace

TEST_CASE("templates: every stage template loads with the expected placeholders") {
    using Set = std::set<std::string>;
    CHECK(template_placeholders(prompt_template(stage::kTakeawayExtraction)) == Set{"transcript"});
    CHECK(template_placeholders(prompt_template(stage::kTakeawayClassification)) ==
          Set{"transcript", "takeaway"});
    CHECK(template_placeholders(prompt_template(stage::kStatementSegmentation)) == Set{"transcript"});
    CHECK(template_placeholders(prompt_template(stage::kRhetoricalClassification)) ==
          Set{"full_transcript", "statements_dict"});
    CHECK(template_placeholders(prompt_template(stage::kClaimExtraction)) ==
          Set{"transcript", "statements_dict"});
    CHECK(template_placeholders(prompt_template(stage::kSupportClassification)) ==
          Set{"full_transcript", "claim_text", "available_claims_json"});
    CHECK(template_placeholders(prompt_template(stage::kCheckworthyClassification)) ==
          Set{"transcript", "nodes_json"});
    CHECK(template_placeholders(prompt_template(stage::kQueryExpansion)) ==
          Set{"transcript", "claim"});
    CHECK(template_placeholders(prompt_template(stage::kEvidenceClassification)) ==
          Set{"transcript", "claim_text", "evidence_formatted"});
    CHECK_THROWS_AS(prompt_template("nonexistent_stage"), std::invalid_argument);
}

TEST_CASE("templates: rendering substitutes fields and unescapes literal braces") {
    const std::string rendered = render_template("json {{\"k\": \"{value}\"}}", {{"value", "x"}});
    CHECK(rendered == "json {\"k\": \"x\"}");
    CHECK_THROWS_AS(render_template("{a} {b}", {{"a", "1"}}), std::invalid_argument);
    CHECK_THROWS_AS(render_template("{a}", {{"a", "1"}, {"zzz", "2"}}), std::invalid_argument);
}

TEST_CASE("sampling defaults match the shipped configuration") {
    SamplingConfig s;
    CHECK(s.temperature == doctest::Approx(0.25));
    CHECK(s.top_p == doctest::Approx(0.95));
    CHECK(s.valid());
}

TEST_CASE("extract_takeaway: parses text and verifies grounding") {
    const Transcript t = make_transcript(
        "t2", "Go get your HPV vaccine. Now, go get your children, age 11 to 12, vaccinated too.");
    MockProvider mock;
    mock.set_default_completion(
        stage::kTakeawayExtraction,
        json{{"takeaway",
              json{{"text", "Go get your HPV vaccine and ensure your children are vaccinated."},
                   {"justification", "central advice"},
                   {"grounding", json{{"text", "Go get your HPV vaccine"}}}}}}
            .dump());

    std::vector<std::string> warnings;
    StageOptions opts = kFastRetry;
    opts.warnings = &warnings;
    const Takeaway tk = extract_takeaway(t, mock, opts);
    CHECK(tk.found);
    CHECK(tk.text == "Go get your HPV vaccine and ensure your children are vaccinated.");
    REQUIRE(tk.grounding.size() == 1);
    CHECK(tk.grounding[0] == "Go get your HPV vaccine");
    CHECK(warnings.empty());
}

TEST_CASE("extract_takeaway: unverifiable grounding spans are cleared with a warning") {
    const Transcript t = make_transcript("t", "Drink more water every day.");
    MockProvider mock;
    mock.set_default_completion(stage::kTakeawayExtraction,
                                json{{"takeaway", json{{"text", "Drink more water."},
                                                       {"grounding", json{{"text", "not present"}}}}}}
                                    .dump());
    std::vector<std::string> warnings;
    StageOptions opts = kFastRetry;
    opts.warnings = &warnings;
    const Takeaway tk = extract_takeaway(t, mock, opts);
    CHECK(tk.found);
    CHECK(tk.grounding.empty());
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("grounding") != std::string::npos);
}

TEST_CASE("extract_takeaway: fallback sentinel maps to found=false") {
    MockProvider mock;
    mock.set_default_completion(stage::kTakeawayExtraction,
                                json{{"takeaway", "NO_TAKEAWAY_FOUND"}}.dump());
    const Takeaway tk = extract_takeaway(make_transcript("t", "hello and welcome"), mock, kFastRetry);
    CHECK_FALSE(tk.found);
    CHECK(tk.text.empty());
}

TEST_CASE("classify_takeaway_type: label passthrough and precondition") {
    MockProvider mock;
    mock.set_default_completion(stage::kTakeawayClassification,
                                json{{"label", "explicit"}, {"justification", "directly stated"}}.dump());
    const Transcript t = make_transcript("t", "Go get your vaccine.");
    const Takeaway tk = make_takeaway("Go get your vaccine.");
    const auto result = classify_takeaway_type(t, tk, mock, kFastRetry);
    CHECK(result.type == TakeawayType::Explicit);
    CHECK(result.justification == "directly stated");

    Takeaway not_found;
    not_found.found = false;
    CHECK_THROWS_AS(classify_takeaway_type(t, not_found, mock, kFastRetry), std::invalid_argument);
}

TEST_CASE("segment_statements: ten standalone sentences from the worked example") {
    MockProvider mock;
    json sentences = json::array();
    for (int i = 1; i <= 10; ++i) sentences.push_back("Standalone sentence number " + std::to_string(i) + ".");
    mock.set_default_completion(stage::kStatementSegmentation,
                                json{{"all_standalone_sentences", sentences}}.dump());
    const auto statements = segment_statements(make_transcript("t", kUrineTranscript), mock, kFastRetry);
    REQUIRE(statements.size() == 10);
    CHECK(statements.front().id == "S1");
    CHECK(statements.back().id == "S10");
    for (const auto& s : statements) CHECK_FALSE(s.role.has_value());
}

TEST_CASE("segment_statements: single self-contained sentence passes through") {
    MockProvider mock;
    mock.set_default_completion(
        stage::kStatementSegmentation,
        json{{"all_standalone_sentences", json::array({"Water is good for you."})}}.dump());
    const auto statements =
        segment_statements(make_transcript("t", "Water is good for you."), mock, kFastRetry);
    REQUIRE(statements.size() == 1);
    CHECK(statements[0].text == "Water is good for you.");
}

TEST_CASE("segment_statements: coreferences resolve per the scripted table") {
    MockProvider mock;
    mock.add_completion(
        stage::kStatementSegmentation, {"I bought ginger tea. I drink it nightly."},
        json{{"all_standalone_sentences",
              json::array({"I bought ginger tea.", "I drink the ginger tea nightly."})}}
            .dump());
    const auto statements = segment_statements(
        make_transcript("t", "I bought ginger tea. I drink it nightly."), mock, kFastRetry);
    REQUIRE(statements.size() == 2);
    CHECK(statements[1].text.find("the ginger tea") != std::string::npos);
}

TEST_CASE("segment_statements: empty segmentation is an error") {
    MockProvider mock;
    mock.set_default_completion(stage::kStatementSegmentation,
                                json{{"all_standalone_sentences", json::array()}}.dump());
    CHECK_THROWS_AS(segment_statements(make_transcript("t", "words here"), mock, kFastRetry),
                    ParseError);
}

TEST_CASE("classify_rhetorical_roles: category examples and unknown-label mapping") {
    std::vector<Statement> statements = {
        make_statement("S1", "Because urine contains urea and minerals, it may have antimicrobial properties."),
        make_statement("S2", "I started drinking urine last year, and my skin has never been clearer."),
        make_statement("S3", "my doctor recommended it"),
        make_statement("S4", "something else entirely"),
    };
    MockProvider mock;
    mock.set_default_completion(
        stage::kRhetoricalClassification,
        json{{"S1", json{{"type", "Premise"}, {"explanation", "causal reasoning"}}},
             {"S2", json{{"type", "Anecdotal Evidence"}, {"explanation", "personal story"}}},
             {"S3", json{{"type", "Credibility Move"}, {"explanation", "authority"}}},
             {"S4", json{{"type", "Mystery Label"}, {"explanation", "?"}}}}
            .dump());
    std::vector<std::string> warnings;
    StageOptions opts = kFastRetry;
    opts.warnings = &warnings;
    const auto typed = classify_rhetorical_roles(make_transcript("t", "text"), statements, mock, opts);
    CHECK(typed[0].role == RhetoricalRole::Premise);
    CHECK(typed[1].role == RhetoricalRole::AnecdotalEvidence);
    CHECK(typed[2].role == RhetoricalRole::CredibilityMove);
    CHECK(typed[3].role == RhetoricalRole::None);  // unknown label maps to None
    REQUIRE(warnings.size() == 1);
}

TEST_CASE("classify_rhetorical_roles: omitted id fails after retries") {
    std::vector<Statement> statements = {make_statement("S1", "a"), make_statement("S2", "b")};
    MockProvider mock;
    mock.set_default_completion(stage::kRhetoricalClassification,
                                json{{"S1", json{{"type", "Premise"}}}}.dump());
    CHECK_THROWS_AS(
        classify_rhetorical_roles(make_transcript("t", "text"), statements, mock, kFastRetry),
        ParseError);
}

TEST_CASE("extract_claims: worked example with dedup, filtering and renumbering") {
    std::vector<Statement> statements = {make_statement("S1", "urine claim"),
                                         make_statement("S2", "more text")};
    MockProvider mock;
    mock.set_default_completion(
        stage::kClaimExtraction,
        json{{"claim_1",
              json{{"claim_text", "Human urine is a powerful natural booster."},
                   {"claim_type", "explicit"},
                   {"statement_ids", json::array({"S1"})},
                   {"justification", "asserted"}}},
             {"claim_2",
              json{{"claim_text", "Natural bodily substances can have health benefits when reused correctly."},
                   {"claim_type", "implicit"},
                   {"statement_ids", json::array({"S9"})},  // unknown id filtered out
                   {"justification", "inferred"}}},
             {"claim_3",
              json{{"claim_text", "Human urine is a powerful natural booster."},  // duplicate text
                   {"claim_type", "explicit"},
                   {"statement_ids", json::array({"S2"})}}}}
            .dump());
    std::vector<std::string> warnings;
    StageOptions opts = kFastRetry;
    opts.warnings = &warnings;
    const auto claims =
        extract_claims(make_transcript("t", kUrineTranscript), statements, mock, opts);
    REQUIRE(claims.size() == 2);
    CHECK(claims[0].id == "claim_1");
    CHECK(claims[0].text == "Human urine is a powerful natural booster.");
    CHECK(claims[0].claim_type == ClaimType::Explicit);
    CHECK(claims[0].statement_ids == std::vector<std::string>{"S1"});
    CHECK_FALSE(claims[0].ungrounded);
    CHECK(claims[1].id == "claim_2");
    CHECK(claims[1].claim_type == ClaimType::Implicit);
    CHECK(claims[1].statement_ids.empty());
    CHECK(claims[1].ungrounded);  // unknown grounding filtered away
    CHECK(warnings.size() >= 2);
}

TEST_CASE("extract_claims: empty dictionary fallback yields no claims") {
    MockProvider mock;
    mock.set_default_completion(stage::kClaimExtraction, "{}");
    CHECK(extract_claims(make_transcript("t", "no assertions here"), {}, mock, kFastRetry).empty());
}

TEST_CASE("classify_support: green-tea pair examples") {
    const Transcript t = make_transcript("t", "context text");
    const std::string target = "Drinking green tea helps with weight loss";
    MockProvider mock;
    mock.add_distribution("support_classification", {"I lost weight after switching to green tea"},
                          {{"direct support", 0.8}, {"weak support", 0.15}, {"no support", 0.05}});
    mock.add_distribution("support_classification", {"I prefer coffee in the morning"},
                          {{"direct support", 0.05}, {"weak support", 0.1}, {"no support", 0.85}});

    const auto direct = classify_support(
        t, target, {{"c1", "I lost weight after switching to green tea"}}, mock, kFastRetry);
    CHECK(direct.at("c1").p_direct == doctest::Approx(0.8));
    CHECK(direct.at("c1").valid());

    const auto none = classify_support(t, target, {{"c2", "I prefer coffee in the morning"}}, mock,
                                       kFastRetry);
    CHECK(none.at("c2").p_none == doctest::Approx(0.85));

    MockProvider uniform;
    uniform.set_default_distribution("support_classification",
                                     {{"direct support", 1.0 / 3},
                                      {"weak support", 1.0 / 3},
                                      {"no support", 1.0 / 3}});
    const auto u = classify_support(t, target, {{"c3", "anything"}}, uniform, kFastRetry);
    CHECK(u.at("c3").p_direct == doctest::Approx(1.0 / 3));
    CHECK(u.at("c3").valid());

    CHECK_THROWS_AS(classify_support(t, target, {}, mock, kFastRetry), std::invalid_argument);
}

TEST_CASE("classify_checkworthy: worked examples and doubt resolution") {
    const Transcript t = make_transcript("t", kUrineTranscript);
    MockProvider mock;
    mock.set_default_completion(
        stage::kCheckworthyClassification,
        json{{"claim_1", json{{"label", "PubMed-checkworthy"}, {"explanation", "biomedical"}}},
             {"S2", json{{"label", "not PubMed-checkworthy"}, {"explanation", "context-bound"}}},
             {"S3", json{{"label", "hmm unsure"}, {"explanation", "?"}}}}
            .dump());
    std::vector<std::string> warnings;
    StageOptions opts = kFastRetry;
    opts.warnings = &warnings;
    const auto result = classify_checkworthy(
        t,
        {{"claim_1", "Aged urine boosts testosterone and improves skin health."},
         {"S2", "This is aged urine."},
         {"S3", "ambiguous"}},
        mock, opts);
    CHECK(result.at("claim_1"));
    CHECK_FALSE(result.at("S2"));
    CHECK(result.at("S3"));  // doubt resolves to checkworthy
    CHECK(warnings.size() == 1);
}

TEST_CASE("expand_queries: truncation to five and empty fallback") {
    const Transcript t = make_transcript("t", "context");
    MockProvider mock;
    json supporting = json::array();
    for (int i = 1; i <= 7; ++i) {
        supporting.push_back(json{{"query_id", "S" + std::to_string(i)},
                                  {"query_text", "supporting query " + std::to_string(i)},
                                  {"justification", "j"}});
    }
    mock.set_default_completion(
        stage::kQueryExpansion,
        json{{"supporting_queries", supporting}, {"opposing_queries", json::array()}}.dump());
    const auto q = expand_queries(t, "some claim", mock, kFastRetry);
    CHECK(q.supporting.size() == 5);
    CHECK(q.opposing.empty());

    MockProvider empty;
    empty.set_default_completion(
        stage::kQueryExpansion,
        json{{"supporting_queries", json::array()}, {"opposing_queries", json::array()}}.dump());
    const auto qe = expand_queries(t, "some claim", empty, kFastRetry);
    CHECK(qe.supporting.empty());
    CHECK(qe.opposing.empty());
}

TEST_CASE("classify_evidence: stance category examples") {
    const Transcript t = make_transcript("t", "context");
    MockProvider mock;
    mock.add_distribution("evidence_classification", {"randomized controlled trial found"},
                          {{"strong support", 0.9}, {"weak support", 0.1}});
    mock.add_distribution("evidence_classification", {"meta-analysis of 15 randomized"},
                          {{"strong oppose", 0.85}, {"weak oppose", 0.15}});
    mock.set_default_distribution("evidence_classification",
                                  {{"strong support", 0.2},
                                   {"weak support", 0.2},
                                   {"neutral", 0.2},
                                   {"weak oppose", 0.2},
                                   {"strong oppose", 0.2}});

    std::vector<EvidenceDoc> docs = {
        make_doc("d1", "rct", "A large randomized controlled trial found a significant decrease."),
        make_doc("d2", "meta", "A meta-analysis of 15 randomized controlled trials found no effect."),
        make_doc("d3", "other", "Unrelated text.")};
    const auto stances = classify_evidence(t, "Green tea reduces blood pressure in adults.", docs,
                                           mock, kFastRetry);
    CHECK(stances.at("d1").p_strong_support == doctest::Approx(0.9));
    CHECK(stances.at("d2").p_strong_oppose == doctest::Approx(0.85));
    CHECK(stances.at("d3").p_neutral == doctest::Approx(0.2));
    for (const auto& [_, s] : stances) CHECK(s.valid());

    CHECK_THROWS_AS(classify_evidence(t, "claim", {}, mock, kFastRetry), std::invalid_argument);
}

TEST_CASE("retries: two failures then success succeeds; three failures propagate") {
    MockProvider inner;
    inner.set_default_completion(stage::kTakeawayExtraction,
                                 json{{"takeaway", "NO_TAKEAWAY_FOUND"}}.dump());
    const Transcript t = make_transcript("t", "hello world");

    FlakyProvider flaky2(inner, 2);
    const Takeaway tk = extract_takeaway(t, flaky2, kFastRetry);
    CHECK_FALSE(tk.found);
    CHECK(flaky2.calls() == 3);

    FlakyProvider flaky3(inner, 3);
    CHECK_THROWS_AS(extract_takeaway(t, flaky3, kFastRetry), TransportError);
}

TEST_CASE("determinism: identical inputs give byte-identical mock outputs") {
    MockProvider mock;
    mock.set_default_completion(stage::kTakeawayExtraction,
                                json{{"takeaway", json{{"text", "Drink water."}}}}.dump());
    const Transcript t = make_transcript("t", "drink water please");
    const Takeaway a = extract_takeaway(t, mock, kFastRetry);
    const Takeaway b = extract_takeaway(t, mock, kFastRetry);
    CHECK(a == b);
}

TEST_CASE("mock provider: fixture file parsing with entries and defaults") {
    const json fixture{
        {"defaults",
         {{"takeaway_extraction", {{"response_json", json{{"takeaway", "NO_TAKEAWAY_FOUND"}}}}},
          {"support_classification",
           {{"distribution", {{"direct support", 0.5}, {"weak support", 0.5}}}}}}},
        {"entries",
         json::array(
             {json{{"stage", "takeaway_extraction"},
                   {"contains", json::array({"special marker"})},
                   {"response_json", json{{"takeaway", json{{"text", "special takeaway"}}}}}},
              json{{"stage", "evidence_classification"},
                   {"contains", json::array({"doc about tea"})},
                   {"label", "strong support"}}})}};
    const MockProvider mock = MockProvider::from_json(fixture);

    const Takeaway fallback =
        extract_takeaway(Transcript{"a", "plain text", std::nullopt}, mock, kFastRetry);
    CHECK_FALSE(fallback.found);
    const Takeaway special =
        extract_takeaway(Transcript{"b", "text with special marker inside", std::nullopt}, mock,
                         kFastRetry);
    CHECK(special.text == "special takeaway");

    const auto stances = classify_evidence(Transcript{"c", "ctx", std::nullopt}, "claim",
                                           {make_doc("d", "doc about tea", "abstract")},
                                           mock, kFastRetry);
    CHECK(stances.at("d").p_strong_support == doctest::Approx(1.0));
}

TEST_CASE("caching provider: repeated calls hit the inner provider once") {
    MockProvider inner;
    inner.set_default_completion(stage::kTakeawayExtraction,
                                 json{{"takeaway", "NO_TAKEAWAY_FOUND"}}.dump());
    inner.set_default_distribution("support_classification",
                                   {{"direct support", 1.0}});
    CountingProvider counting(inner);

    const auto cache_dir = std::filesystem::temp_directory_path() / "taigr-test-cache";
    std::filesystem::remove_all(cache_dir);
    CachingProvider cached(counting, cache_dir, SamplingConfig{});

    const std::string hint = std::string(stage::kTakeawayExtraction) + ": x";
    CHECK(cached.complete("prompt one", hint) == cached.complete("prompt one", hint));
    CHECK(counting.calls() == 1);
    cached.complete("prompt two", hint);
    CHECK(counting.calls() == 2);

    const std::vector<std::string> labels(kSupportLabels.begin(), kSupportLabels.end());
    const auto d1 = cached.classify_with_probs("p", labels);
    const auto d2 = cached.classify_with_probs("p", labels);
    CHECK(counting.calls() == 3);
    CHECK(d1.probs == d2.probs);

    // A fresh provider instance reuses the on-disk entries.
    CachingProvider cached2(counting, cache_dir, SamplingConfig{});
    cached2.complete("prompt one", hint);
    cached2.classify_with_probs("p", labels);
    CHECK(counting.calls() == 3);

    // Disabled cache always delegates.
    CachingProvider uncached(counting, cache_dir, SamplingConfig{}, false);
    uncached.complete("prompt one", hint);
    CHECK(counting.calls() == 4);
    std::filesystem::remove_all(cache_dir);
}
