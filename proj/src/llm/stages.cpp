#include "taigr/llm/stages.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <limits>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "taigr/common.hpp"
#include "taigr/llm/prompts.hpp"

namespace taigr {

using nlohmann::json;

namespace {

void warn(const StageOptions& opts, std::string message) {
    if (opts.warnings != nullptr) opts.warnings->push_back(std::move(message));
}

// Runs attempt() with the stage retry policy: transport and parse failures are
// retried with exponential backoff; the last failure propagates.
template <typename F>
auto with_retries(const RetryPolicy& retry, const std::string& what, F&& attempt) {
    int delay_ms = retry.base_delay_ms;
    for (int tries = 0;; ++tries) {
        try {
            return attempt();
        } catch (const TransportError&) {
            if (tries >= retry.max_retries) throw;
        } catch (const ParseError&) {
            if (tries >= retry.max_retries) throw;
        }
        if (delay_ms > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
            delay_ms *= 2;
        }
        (void)what;
    }
}

// LLM responses often wrap JSON in markdown fences or prose; extract and parse
// the first well-formed JSON value.
json parse_json_response(const std::string& raw) {
    try {
        return json::parse(raw);
    } catch (const json::exception&) {
    }
    // Fenced block.
    auto fence = raw.find("```");
    if (fence != std::string::npos) {
        auto start = raw.find('\n', fence);
        auto end = raw.find("```", fence + 3);
        if (start != std::string::npos && end != std::string::npos && start < end) {
            try {
                return json::parse(raw.substr(start + 1, end - start - 1));
            } catch (const json::exception&) {
            }
        }
    }
    // Outermost braces.
    auto first = raw.find_first_of("{[");
    auto last = raw.find_last_of("}]");
    if (first != std::string::npos && last != std::string::npos && first < last) {
        try {
            return json::parse(raw.substr(first, last - first + 1));
        } catch (const json::exception& ex) {
            throw ParseError(std::string("response is not valid JSON: ") + ex.what());
        }
    }
    throw ParseError("response contains no JSON value");
}

std::vector<std::string> string_list(const json& j) {
    std::vector<std::string> out;
    if (!j.is_array()) throw ParseError("expected a JSON array of strings");
    for (const auto& item : j) {
        if (item.is_string()) {
            out.push_back(item.get<std::string>());
        } else {
            throw ParseError("expected string array entry, got: " + item.dump());
        }
    }
    return out;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

SupportDistribution to_support_distribution(const LabelDistribution& d) {
    SupportDistribution out;
    for (size_t i = 0; i < d.labels.size(); ++i) {
        if (d.labels[i] == kSupportLabels[0]) out.p_direct = d.probs[i];
        else if (d.labels[i] == kSupportLabels[1]) out.p_weak = d.probs[i];
        else if (d.labels[i] == kSupportLabels[2]) out.p_none = d.probs[i];
    }
    return out;
}

StanceDistribution to_stance_distribution(const LabelDistribution& d) {
    StanceDistribution out;
    for (size_t i = 0; i < d.labels.size(); ++i) {
        if (d.labels[i] == kStanceLabels[0]) out.p_strong_support = d.probs[i];
        else if (d.labels[i] == kStanceLabels[1]) out.p_weak_support = d.probs[i];
        else if (d.labels[i] == kStanceLabels[2]) out.p_neutral = d.probs[i];
        else if (d.labels[i] == kStanceLabels[3]) out.p_weak_oppose = d.probs[i];
        else if (d.labels[i] == kStanceLabels[4]) out.p_strong_oppose = d.probs[i];
    }
    return out;
}

// Natural sort key for provider-assigned ids like "claim_12" or "S3".
std::pair<long long, std::string> natural_key(const std::string& id) {
    size_t i = id.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(id[i - 1]))) --i;
    long long num = std::numeric_limits<long long>::max();
    if (i < id.size()) num = std::stoll(id.substr(i));
    return {num, id};
}

}  // namespace

Takeaway extract_takeaway(const Transcript& transcript, const LlmProvider& provider,
                          const StageOptions& opts) {
    if (trim(transcript.text).empty()) {
        throw std::invalid_argument("transcript text is empty");
    }
    const std::string prompt =
        render_stage_prompt(stage::kTakeawayExtraction, {{"transcript", transcript.text}});

    return with_retries(opts.retry, stage::kTakeawayExtraction, [&] {
        const std::string raw = provider.complete(
            prompt, std::string(stage::kTakeawayExtraction) + ": json object with key 'takeaway'");
        const json j = parse_json_response(raw);
        if (!j.contains("takeaway")) throw ParseError("missing 'takeaway' key");

        Takeaway t;
        const json& jt = j["takeaway"];
        if (jt.is_string()) {
            if (jt.get<std::string>() == kNoTakeawaySentinel) {
                t.found = false;
                return t;
            }
            throw ParseError("string takeaway must be the fallback sentinel");
        }
        t.found = true;
        t.text = jt.at("text").get<std::string>();
        if (trim(t.text).empty()) throw ParseError("takeaway text is empty");

        if (jt.contains("grounding")) {
            const json& g = jt["grounding"];
            std::vector<std::string> spans;
            if (g.is_object() && g.contains("text")) {
                if (g["text"].is_string()) spans.push_back(g["text"].get<std::string>());
                else if (g["text"].is_array()) spans = string_list(g["text"]);
            } else if (g.is_string()) {
                spans.push_back(g.get<std::string>());
            } else if (g.is_array()) {
                spans = string_list(g);
            }
            for (auto& span : spans) {
                if (transcript.text.find(span) != std::string::npos) {
                    t.grounding.push_back(std::move(span));
                } else {
                    warn(opts, "takeaway grounding span not found verbatim in transcript; cleared: \"" +
                                   span + "\"");
                }
            }
        }
        return t;
    });
}

TakeawayTypeResult classify_takeaway_type(const Transcript& transcript, const Takeaway& takeaway,
                                          const LlmProvider& provider, const StageOptions& opts) {
    if (!takeaway.found) {
        throw std::invalid_argument("cannot classify type of a takeaway that was not found");
    }
    const std::string prompt = render_stage_prompt(
        stage::kTakeawayClassification,
        {{"transcript", transcript.text}, {"takeaway", takeaway.text}});

    return with_retries(opts.retry, stage::kTakeawayClassification, [&] {
        const std::string raw = provider.complete(
            prompt, std::string(stage::kTakeawayClassification) + ": json with 'label'");
        const json j = parse_json_response(raw);
        const std::string label = j.at("label").get<std::string>();
        auto type = takeaway_type_from_string(label);
        if (!type) throw ParseError("takeaway type label must be explicit/implicit, got: " + label);
        TakeawayTypeResult result;
        result.type = *type;
        result.justification = j.value("justification", std::string{});
        return result;
    });
}

std::vector<Statement> segment_statements(const Transcript& transcript,
                                          const LlmProvider& provider, const StageOptions& opts) {
    if (trim(transcript.text).empty()) {
        throw std::invalid_argument("transcript text is empty");
    }
    const std::string prompt =
        render_stage_prompt(stage::kStatementSegmentation, {{"transcript", transcript.text}});

    return with_retries(opts.retry, stage::kStatementSegmentation, [&] {
        const std::string raw = provider.complete(
            prompt,
            std::string(stage::kStatementSegmentation) + ": json with 'all_standalone_sentences'");
        const json j = parse_json_response(raw);
        auto sentences = string_list(j.at("all_standalone_sentences"));
        std::vector<Statement> out;
        for (auto& text : sentences) {
            std::string cleaned = trim(text);
            if (cleaned.empty()) {
                warn(opts, "segmentation produced an empty sentence; dropped");
                continue;
            }
            Statement s;
            s.id = "S" + std::to_string(out.size() + 1);
            s.text = std::move(cleaned);
            out.push_back(std::move(s));
        }
        if (out.empty()) {
            throw ParseError("segmentation returned no statements for a non-empty transcript");
        }
        return out;
    });
}

std::vector<Statement> classify_rhetorical_roles(const Transcript& transcript,
                                                 std::vector<Statement> statements,
                                                 const LlmProvider& provider,
                                                 const StageOptions& opts) {
    if (statements.empty()) return statements;
    json dict = json::object();
    for (const auto& s : statements) dict[s.id] = s.text;
    const std::string prompt = render_stage_prompt(
        stage::kRhetoricalClassification,
        {{"full_transcript", transcript.text}, {"statements_dict", dict.dump(2)}});

    const json j = with_retries(opts.retry, stage::kRhetoricalClassification, [&] {
        const std::string raw = provider.complete(
            prompt, std::string(stage::kRhetoricalClassification) + ": json map id -> {type}");
        const json parsed = parse_json_response(raw);
        if (!parsed.is_object()) throw ParseError("role classification must be a JSON object");
        for (const auto& s : statements) {
            if (!parsed.contains(s.id)) {
                throw ParseError("role classification omits statement id " + s.id);
            }
        }
        return parsed;
    });

    for (auto& s : statements) {
        const json& entry = j.at(s.id);
        const std::string label =
            entry.is_object() ? entry.value("type", std::string{}) : entry.get<std::string>();
        auto role = rhetorical_role_from_string(label);
        if (!role) {
            warn(opts, "unknown rhetorical label '" + label + "' for " + s.id + "; mapped to None");
            role = RhetoricalRole::None;
        }
        s.role = *role;
        if (entry.is_object()) s.role_explanation = entry.value("explanation", std::string{});
    }
    return statements;
}

std::vector<Claim> extract_claims(const Transcript& transcript,
                                  const std::vector<Statement>& statements,
                                  const LlmProvider& provider, const StageOptions& opts) {
    json dict = json::object();
    for (const auto& s : statements) dict[s.id] = s.text;
    const std::string prompt = render_stage_prompt(
        stage::kClaimExtraction,
        {{"transcript", transcript.text}, {"statements_dict", dict.dump(2)}});

    const json j = with_retries(opts.retry, stage::kClaimExtraction, [&] {
        const std::string raw = provider.complete(
            prompt, std::string(stage::kClaimExtraction) + ": json map claim_id -> {claim_text,...}");
        const json parsed = parse_json_response(raw);
        if (!parsed.is_object()) throw ParseError("claim extraction must return a JSON object");
        return parsed;
    });

    std::vector<std::string> keys;
    for (const auto& [key, _] : j.items()) keys.push_back(key);
    std::sort(keys.begin(), keys.end(),
              [](const std::string& a, const std::string& b) { return natural_key(a) < natural_key(b); });

    std::vector<Claim> out;
    std::vector<std::string> seen_texts;
    for (const auto& key : keys) {
        const json& entry = j.at(key);
        Claim c;
        c.text = trim(entry.at("claim_text").get<std::string>());
        if (c.text.empty()) {
            warn(opts, "claim with empty text dropped (" + key + ")");
            continue;
        }
        if (std::find(seen_texts.begin(), seen_texts.end(), c.text) != seen_texts.end()) {
            warn(opts, "duplicate claim text dropped (" + key + ")");
            continue;
        }
        auto type = claim_type_from_string(entry.value("claim_type", std::string{"explicit"}));
        if (!type) throw ParseError("unknown claim_type in " + key);
        c.claim_type = *type;
        c.justification = entry.value("justification", std::string{});
        if (entry.contains("statement_ids")) {
            for (const auto& sid : entry["statement_ids"]) {
                if (!sid.is_string()) {
                    warn(opts, "non-string statement id in " + key + " ignored");
                    continue;
                }
                const std::string id = sid.get<std::string>();
                const bool exists = std::any_of(statements.begin(), statements.end(),
                                                [&](const Statement& s) { return s.id == id; });
                if (!exists) {
                    warn(opts, "claim " + key + " references unknown statement " + id + "; filtered");
                    continue;
                }
                if (std::find(c.statement_ids.begin(), c.statement_ids.end(), id) ==
                    c.statement_ids.end()) {
                    c.statement_ids.push_back(id);
                }
            }
        }
        c.ungrounded = c.statement_ids.empty();
        c.id = "claim_" + std::to_string(out.size() + 1);
        seen_texts.push_back(c.text);
        out.push_back(std::move(c));
    }
    return out;
}

std::map<std::string, SupportDistribution> classify_support(
    const Transcript& transcript, const std::string& target_text,
    const std::vector<std::pair<std::string, std::string>>& candidates,
    const LlmProvider& provider, const StageOptions& opts) {
    if (candidates.empty()) throw std::invalid_argument("classify_support: no candidates");
    if (trim(target_text).empty()) throw std::invalid_argument("classify_support: empty target");

    const std::vector<std::string> labels(kSupportLabels.begin(), kSupportLabels.end());
    std::map<std::string, SupportDistribution> out;
    for (const auto& [id, text] : candidates) {
        json available = json::object();
        available[id] = json{{"claim_text", text}};
        const std::string prompt = render_stage_prompt(stage::kSupportClassification,
                                                       {{"full_transcript", transcript.text},
                                                        {"claim_text", target_text},
                                                        {"available_claims_json", available.dump(2)}});
        out[id] = with_retries(opts.retry, stage::kSupportClassification, [&] {
            const LabelDistribution d = provider.classify_with_probs(prompt, labels);
            if (!d.valid()) throw ParseError("provider returned an invalid support distribution");
            return to_support_distribution(d);
        });
    }
    return out;
}

std::map<std::string, bool> classify_checkworthy(
    const Transcript& transcript, const std::vector<std::pair<std::string, std::string>>& nodes,
    const LlmProvider& provider, const StageOptions& opts) {
    std::map<std::string, bool> out;
    if (nodes.empty()) return out;
    json nodes_json = json::object();
    for (const auto& [id, text] : nodes) nodes_json[id] = text;
    const std::string prompt = render_stage_prompt(
        stage::kCheckworthyClassification,
        {{"transcript", transcript.text}, {"nodes_json", nodes_json.dump(2)}});

    const json j = with_retries(opts.retry, stage::kCheckworthyClassification, [&] {
        const std::string raw = provider.complete(
            prompt, std::string(stage::kCheckworthyClassification) + ": json map id -> {label}");
        const json parsed = parse_json_response(raw);
        if (!parsed.is_object()) throw ParseError("checkworthy output must be a JSON object");
        for (const auto& [id, _] : nodes) {
            if (!parsed.contains(id)) throw ParseError("checkworthy output omits id " + id);
        }
        return parsed;
    });

    for (const auto& [id, _] : nodes) {
        const json& entry = j.at(id);
        const std::string label =
            entry.is_object() ? entry.value("label", std::string{}) : entry.get<std::string>();
        if (label == "PubMed-checkworthy") {
            out[id] = true;
        } else if (label == "not PubMed-checkworthy") {
            out[id] = false;
        } else {
            warn(opts, "ambiguous checkworthy label '" + label + "' for " + id +
                           "; resolving to checkworthy");
            out[id] = true;
        }
    }
    return out;
}

QueryExpansion expand_queries(const Transcript& transcript, const std::string& claim_text,
                              const LlmProvider& provider, const StageOptions& opts) {
    const std::string prompt = render_stage_prompt(
        stage::kQueryExpansion, {{"transcript", transcript.text}, {"claim", claim_text}});

    const json j = with_retries(opts.retry, stage::kQueryExpansion, [&] {
        const std::string raw = provider.complete(
            prompt,
            std::string(stage::kQueryExpansion) + ": json with supporting_queries/opposing_queries");
        const json parsed = parse_json_response(raw);
        if (!parsed.is_object()) throw ParseError("query expansion must return a JSON object");
        return parsed;
    });

    auto collect = [&](const char* key) {
        std::vector<std::string> queries;
        for (const auto& q : j.value(key, json::array())) {
            std::string text = q.is_object() ? q.value("query_text", std::string{})
                                             : q.get<std::string>();
            text = trim(text);
            if (text.empty() || text.size() > 200) {
                warn(opts, std::string("query outside 1-200 characters dropped (") + key + ")");
                continue;
            }
            queries.push_back(std::move(text));
            if (queries.size() == 5) break;  // truncate to five per direction
        }
        return queries;
    };

    QueryExpansion out;
    out.supporting = collect("supporting_queries");
    out.opposing = collect("opposing_queries");
    return out;
}

std::map<std::string, StanceDistribution> classify_evidence(const Transcript& transcript,
                                                            const std::string& claim_text,
                                                            const std::vector<EvidenceDoc>& docs,
                                                            const LlmProvider& provider,
                                                            const StageOptions& opts) {
    if (docs.empty()) throw std::invalid_argument("classify_evidence: no documents");
    const std::vector<std::string> labels(kStanceLabels.begin(), kStanceLabels.end());
    std::map<std::string, StanceDistribution> out;
    for (const auto& doc : docs) {
        json formatted = json::object();
        formatted[doc.doc_id] = json{{"title", doc.title}, {"abstract", doc.abstract_text}};
        const std::string prompt = render_stage_prompt(stage::kEvidenceClassification,
                                                       {{"transcript", transcript.text},
                                                        {"claim_text", claim_text},
                                                        {"evidence_formatted", formatted.dump(2)}});
        out[doc.doc_id] = with_retries(opts.retry, stage::kEvidenceClassification, [&] {
            const LabelDistribution d = provider.classify_with_probs(prompt, labels);
            if (!d.valid()) throw ParseError("provider returned an invalid stance distribution");
            return to_stance_distribution(d);
        });
    }
    return out;
}

}  // namespace taigr
