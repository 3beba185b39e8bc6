#include "taigr/pipeline/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "taigr/common.hpp"
#include "taigr/eval/metrics.hpp"
#include "taigr/evidence/http_retriever.hpp"
#include "taigr/llm/cache.hpp"
#include "taigr/llm/http_provider.hpp"
#include "taigr/llm/mock_provider.hpp"

namespace taigr {

using nlohmann::json;

namespace {

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("missing prerequisite file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw ParseError("file " + path.string() + " is not valid JSON: " + ex.what());
    }
    return j;
}

std::vector<json> read_jsonl_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("missing prerequisite file: " + path.string());
    std::vector<json> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::exception& ex) {
            throw ParseError(path.string() + " line " + std::to_string(lineno) + ": " + ex.what());
        }
    }
    return out;
}

Transcript transcript_from_json(const json& j) {
    Transcript t;
    t.id = j.at("id").get<std::string>();
    t.text = j.at("text").get<std::string>();
    if (j.contains("metadata") && j["metadata"].is_object()) {
        TranscriptMetadata m;
        const json& jm = j["metadata"];
        if (jm.contains("follower_count") && !jm["follower_count"].is_null()) {
            m.follower_count = jm["follower_count"].get<std::int64_t>();
        }
        if (jm.contains("play_count") && !jm["play_count"].is_null()) {
            m.play_count = jm["play_count"].get<std::int64_t>();
        }
        if (jm.contains("topics")) m.topics = jm["topics"].get<std::vector<std::string>>();
        t.metadata = std::move(m);
    }
    if (t.text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw ParseError("transcript " + t.id + " has empty text");
    }
    return t;
}

std::string sanitize_for_path(const std::string& id) {
    std::string out;
    out.reserve(id.size());
    for (char c : id) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        out.push_back(ok ? c : '_');
    }
    return out.empty() ? std::string("transcript") : out;
}

json role_proportions_json(const std::map<RhetoricalRole, double>& props) {
    json j = json::object();
    for (const auto& [role, frac] : props) j[to_string(role)] = frac;
    return j;
}

json verdict_to_json(const Verdict& v) {
    return json{{"label", to_string(v.label)}, {"trust", v.trust}};
}

VerdictLabel parse_any_verdict_label(const std::string& s) {
    if (auto v = verdict_label_from_string(s)) return *v;
    return collapse_label(s);  // accepts the 12 fine-grained strings
}

}  // namespace

json assignment_to_json(const TrustAssignment& assignment, const std::string& root_id) {
    json values = json::object();
    for (const auto& [id, state] : assignment.states) values[id] = trust::state_value(state);
    json j{{"values", std::move(values)},
           {"objective", assignment.objective},
           {"solver", to_string(assignment.solver_tag)},
           {"converged", assignment.converged},
           {"iterations", assignment.iterations}};
    if (assignment.states.count(root_id)) j["takeaway_trust"] = assignment.value_of(root_id);
    if (!assignment.relaxed_marginals.empty()) {
        json m = json::object();
        for (const auto& [id, marg] : assignment.relaxed_marginals) m[id] = marg;
        j["relaxed_marginals"] = std::move(m);
    }
    return j;
}

Runtime make_runtime(const PipelineConfig& config) {
    config.validate();
    Runtime rt;
    if (config.provider.kind == ProviderSelection::Kind::Mock) {
        rt.base_provider = std::make_unique<MockProvider>(
            MockProvider::from_file(config.provider.fixture_path));
    } else {
        rt.base_provider = std::make_unique<HttpProvider>(config.sampling, config.concurrency_limit);
    }
    rt.caching_provider = std::make_unique<CachingProvider>(*rt.base_provider, config.cache_dir,
                                                            config.sampling, config.cache_enabled);
    rt.provider = rt.caching_provider.get();

    if (config.retriever.kind == RetrieverSelection::Kind::Lexical) {
        rt.lexical = std::make_unique<LexicalIndex>(LexicalIndex::from_jsonl(config.retriever.corpus_path));
        rt.retriever = rt.lexical.get();
    } else {
        rt.lexical = std::make_unique<LexicalIndex>();  // uniform-IDF reranking
        rt.http_retriever = std::make_unique<HttpRetriever>(config.retriever.base_url);
        rt.retriever = rt.http_retriever.get();
    }
    rt.reranker = rt.lexical.get();
    return rt;
}

std::map<RhetoricalRole, double> TranscriptResult::role_proportions() const {
    std::map<RhetoricalRole, double> props;
    if (statements.empty()) return props;
    for (const auto& s : statements) {
        if (s.role) props[*s.role] += 1.0;
    }
    for (auto& [_, count] : props) count /= static_cast<double>(statements.size());
    return props;
}

TranscriptResult process_transcript(const Transcript& transcript, const PipelineConfig& config,
                                    const LlmProvider& provider,
                                    const RetrievalProvider& retriever, const Reranker& reranker) {
    TranscriptResult result;
    result.transcript_id = transcript.id;
    StageOptions opts{config.retry, &result.warnings};

    try {
        Takeaway takeaway = extract_takeaway(transcript, provider, opts);
        if (!takeaway.found) {
            result.takeaway = std::move(takeaway);
            result.status = "skipped_no_takeaway";
            return result;
        }
        takeaway.takeaway_type = classify_takeaway_type(transcript, takeaway, provider, opts).type;
        result.takeaway = takeaway;

        result.statements = classify_rhetorical_roles(
            transcript, segment_statements(transcript, provider, opts), provider, opts);
        result.claims = extract_claims(transcript, result.statements, provider, opts);

        result.graph = build_graph(transcript, takeaway, result.claims, result.statements, provider,
                                   config.builder, opts);
        result.augmented = attach_evidence(*result.graph, transcript, provider, retriever, reranker,
                                           config.retrieval, opts);
        result.assignment = infer_trust(*result.augmented, config.potentials, config.solver, config.ad3);
        const double trust = result.assignment->value_of(result.augmented->root);
        result.verdict = verdict_from_trust(trust, config.verdict);
        result.status = "ok";
    } catch (const std::exception& ex) {
        result.status = "error";
        result.error = ex.what();
    }
    return result;
}

std::vector<Transcript> read_transcripts_jsonl(const std::filesystem::path& path) {
    std::vector<Transcript> out;
    for (const auto& j : read_jsonl_file(path)) out.push_back(transcript_from_json(j));
    std::vector<std::string> ids;
    for (const auto& t : out) ids.push_back(t.id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw ParseError("duplicate transcript id in " + path.string());
    }
    return out;
}

RunOutcome cmd_run(const std::filesystem::path& transcripts_path, const PipelineConfig& config,
                   const std::filesystem::path& out_dir) {
    const std::vector<Transcript> transcripts = read_transcripts_jsonl(transcripts_path);
    const Runtime rt = make_runtime(config);
    std::filesystem::create_directories(out_dir);

    std::vector<TranscriptResult> results(transcripts.size());
    const size_t workers =
        std::min<size_t>(static_cast<size_t>(config.concurrency_limit), std::max<size_t>(transcripts.size(), 1));
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t i = next.fetch_add(1); i < transcripts.size(); i = next.fetch_add(1)) {
            results[i] = process_transcript(transcripts[i], config, *rt.provider, *rt.retriever,
                                            *rt.reranker);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    json rows = json::array();
    bool any_error = false;
    for (const auto& r : results) {
        const auto bundle_dir = out_dir / sanitize_for_path(r.transcript_id);
        std::filesystem::create_directories(bundle_dir);

        json row{{"transcript_id", r.transcript_id}, {"status", r.status}};
        if (r.status == "error") {
            any_error = true;
            row["error"] = r.error;
        }
        if (r.takeaway) {
            write_file_atomic(bundle_dir / "takeaway.json", takeaway_to_json(*r.takeaway).dump(2) + "\n");
        }
        if (!r.statements.empty()) {
            json js = json::array();
            for (const auto& s : r.statements) js.push_back(statement_to_json(s));
            write_file_atomic(bundle_dir / "statements.json",
                              json{{"statements", std::move(js)}}.dump(2) + "\n");
        }
        if (!r.claims.empty()) {
            json jc = json::array();
            for (const auto& c : r.claims) jc.push_back(claim_to_json(c));
            write_file_atomic(bundle_dir / "claims.json", json{{"claims", std::move(jc)}}.dump(2) + "\n");
        }
        if (r.graph) {
            write_file_atomic(bundle_dir / "graph.json", serialize_graph(*r.graph, GraphFormat::Json));
        }
        if (r.augmented) {
            write_file_atomic(bundle_dir / "augmented_graph.json",
                              serialize_graph(*r.augmented, GraphFormat::Json));
        }
        if (r.assignment && r.augmented) {
            write_file_atomic(bundle_dir / "assignment.json",
                              assignment_to_json(*r.assignment, r.augmented->root).dump(2) + "\n");
        }
        if (r.verdict) {
            write_file_atomic(bundle_dir / "verdict.json", verdict_to_json(*r.verdict).dump(2) + "\n");
            row["trust"] = r.verdict->trust;
            row["verdict"] = to_string(r.verdict->label);
        }
        if (r.status == "ok") {
            row["rhetorical_proportions"] = role_proportions_json(r.role_proportions());
        }
        if (!r.warnings.empty()) row["warnings"] = r.warnings;
        rows.push_back(std::move(row));
    }

    RunOutcome outcome;
    outcome.summary = json{{"schema_version", 1},
                           {"transcript_count", transcripts.size()},
                           {"results", std::move(rows)}};
    write_file_atomic(out_dir / "summary.json", outcome.summary.dump(2) + "\n");
    outcome.exit_code = any_error ? 1 : 0;
    return outcome;
}

json cmd_stage(const std::string& stage_name,
               const std::map<std::string, std::filesystem::path>& inputs,
               const PipelineConfig& config) {
    auto input = [&](const char* key) -> const std::filesystem::path& {
        auto it = inputs.find(key);
        if (it == inputs.end()) {
            throw ConfigError("stage '" + stage_name + "' requires --" + std::string(key));
        }
        return it->second;
    };
    auto load_transcript = [&] { return transcript_from_json(read_json_file(input("transcript"))); };
    auto load_statements = [&] {
        const json file = read_json_file(input("statements"));
        std::vector<Statement> out;
        for (const auto& js : file.at("statements")) out.push_back(statement_from_json(js));
        return out;
    };
    auto load_claims = [&] {
        const json file = read_json_file(input("claims"));
        std::vector<Claim> out;
        for (const auto& jc : file.at("claims")) out.push_back(claim_from_json(jc));
        return out;
    };

    StageOptions opts{config.retry, nullptr};
    std::vector<std::string> warnings;
    opts.warnings = &warnings;

    json out;
    if (stage_name == "takeaway") {
        const Runtime rt = make_runtime(config);
        const Transcript t = load_transcript();
        Takeaway takeaway = extract_takeaway(t, *rt.provider, opts);
        if (takeaway.found) {
            takeaway.takeaway_type = classify_takeaway_type(t, takeaway, *rt.provider, opts).type;
        }
        out = takeaway_to_json(takeaway);
    } else if (stage_name == "segment") {
        const Runtime rt = make_runtime(config);
        json js = json::array();
        for (const auto& s : segment_statements(load_transcript(), *rt.provider, opts)) {
            js.push_back(statement_to_json(s));
        }
        out = json{{"statements", std::move(js)}};
    } else if (stage_name == "roles") {
        const Runtime rt = make_runtime(config);
        json js = json::array();
        for (const auto& s : classify_rhetorical_roles(load_transcript(), load_statements(),
                                                       *rt.provider, opts)) {
            js.push_back(statement_to_json(s));
        }
        out = json{{"statements", std::move(js)}};
    } else if (stage_name == "claims") {
        const Runtime rt = make_runtime(config);
        json jc = json::array();
        for (const auto& c : extract_claims(load_transcript(), load_statements(), *rt.provider, opts)) {
            jc.push_back(claim_to_json(c));
        }
        out = json{{"claims", std::move(jc)}};
    } else if (stage_name == "graph") {
        const Runtime rt = make_runtime(config);
        const Takeaway takeaway = takeaway_from_json(read_json_file(input("takeaway")));
        const ArgGraph g = build_graph(load_transcript(), takeaway, load_claims(), load_statements(),
                                       *rt.provider, config.builder, opts);
        out = graph_to_json(g);
    } else if (stage_name == "evidence") {
        const Runtime rt = make_runtime(config);
        const ArgGraph g = graph_from_json(read_json_file(input("graph")));
        const ArgGraph augmented = attach_evidence(g, load_transcript(), *rt.provider, *rt.retriever,
                                                   *rt.reranker, config.retrieval, opts);
        out = graph_to_json(augmented);
    } else if (stage_name == "infer") {
        const ArgGraph g = graph_from_json(read_json_file(input("graph")));
        const TrustAssignment assignment = infer_trust(g, config.potentials, config.solver, config.ad3);
        out = assignment_to_json(assignment, g.root);
    } else if (stage_name == "verdict") {
        const json j = read_json_file(input("trust"));
        double trust = 0.0;
        if (j.contains("trust")) trust = j["trust"].get<double>();
        else if (j.contains("takeaway_trust")) trust = j["takeaway_trust"].get<double>();
        else throw ParseError("trust file needs a 'trust' or 'takeaway_trust' field");
        out = verdict_to_json(verdict_from_trust(trust, config.verdict));
    } else {
        throw ConfigError("unknown stage: " + stage_name +
                          " (expected takeaway|segment|roles|claims|graph|evidence|infer|verdict)");
    }
    if (!warnings.empty()) out["warnings"] = warnings;
    return out;
}

namespace {

json f1_report_to_json(const F1Report& report) {
    json per_class = json::object();
    for (const auto& [cls, scores] : report.per_class) {
        per_class[to_string(cls)] = {{"precision", scores.precision},
                                     {"recall", scores.recall},
                                     {"f1", scores.f1},
                                     {"support", scores.support}};
    }
    json per_type = json::object();
    for (const auto& [type, f1] : report.per_takeaway_type_macro) per_type[to_string(type)] = f1;
    return json{{"macro_f1", report.macro_f1},
                {"class_f1", std::move(per_class)},
                {"takeaway_type_f1", std::move(per_type)},
                {"examples", report.example_count}};
}

}  // namespace

json cmd_eval(const std::filesystem::path& pred_a_path,
              const std::optional<std::filesystem::path>& pred_b_path,
              const std::filesystem::path& gold_path, std::uint64_t seed, int iterations) {
    struct GoldRow {
        std::string id;
        VerdictLabel gold;
        std::optional<TakeawayType> type;
    };
    std::vector<GoldRow> gold_rows;
    for (const auto& j : read_jsonl_file(gold_path)) {
        GoldRow row;
        row.id = j.at("transcript_id").get<std::string>();
        row.gold = parse_any_verdict_label(j.at("gold").get<std::string>());
        if (j.contains("takeaway_type") && !j["takeaway_type"].is_null()) {
            row.type = takeaway_type_from_string(j["takeaway_type"].get<std::string>());
        }
        gold_rows.push_back(std::move(row));
    }
    if (gold_rows.empty()) throw ParseError("gold file is empty");

    auto read_preds = [&](const std::filesystem::path& path) {
        std::map<std::string, VerdictLabel> preds;
        for (const auto& j : read_jsonl_file(path)) {
            const std::string id = j.at("transcript_id").get<std::string>();
            const std::string label =
                j.contains("predicted") ? j["predicted"].get<std::string>()
                                        : j.at("label").get<std::string>();
            if (!preds.emplace(id, parse_any_verdict_label(label)).second) {
                throw ParseError("duplicate prediction for transcript " + id + " in " + path.string());
            }
        }
        for (const auto& row : gold_rows) {
            if (preds.count(row.id) == 0) {
                throw ConfigError("id mismatch: no prediction for " + row.id + " in " + path.string());
            }
        }
        if (preds.size() != gold_rows.size()) {
            throw ConfigError("id mismatch: " + path.string() + " has predictions for unknown ids");
        }
        return preds;
    };

    auto examples_for = [&](const std::map<std::string, VerdictLabel>& preds) {
        std::vector<LabeledExample> out;
        for (const auto& row : gold_rows) {
            out.push_back({row.id, row.gold, preds.at(row.id), row.type});
        }
        return out;
    };

    const auto preds_a = read_preds(pred_a_path);
    json report{{"system_a", f1_report_to_json(f1_report(examples_for(preds_a)))}};

    if (pred_b_path) {
        const auto preds_b = read_preds(*pred_b_path);
        report["system_b"] = f1_report_to_json(f1_report(examples_for(preds_b)));

        std::vector<VerdictLabel> gold, a, b;
        for (const auto& row : gold_rows) {
            gold.push_back(row.gold);
            a.push_back(preds_a.at(row.id));
            b.push_back(preds_b.at(row.id));
        }
        // One-sided test of "A outperforms B" on macro-F1.
        const double p = paired_bootstrap(a, b, gold, iterations, seed);
        report["bootstrap"] = json{{"p_value", p},
                                   {"iterations", iterations},
                                   {"seed", seed},
                                   {"rng", kBootstrapRngDescription},
                                   {"hypothesis", "system_a outperforms system_b (macro-F1)"}};
    }
    return report;
}

std::string eval_report_text(const json& report) {
    std::ostringstream os;
    auto line = [&](const std::string& name, const json& r) {
        os << name << "  macro=" << r["macro_f1"].get<double>();
        os << "  incorrect=" << r["class_f1"]["incorrect"]["f1"].get<double>();
        os << "  partial=" << r["class_f1"]["partially_correct"]["f1"].get<double>();
        os << "  correct=" << r["class_f1"]["correct"]["f1"].get<double>();
        const json& tt = r["takeaway_type_f1"];
        if (tt.contains("implicit")) os << "  implicit=" << tt["implicit"].get<double>();
        if (tt.contains("explicit")) os << "  explicit=" << tt["explicit"].get<double>();
        os << "  (n=" << r["examples"].get<int>() << ")\n";
    };
    os << "Content validation report (F1 by class and takeaway type)\n";
    line("system_a", report["system_a"]);
    if (report.contains("system_b")) line("system_b", report["system_b"]);
    if (report.contains("bootstrap")) {
        const json& b = report["bootstrap"];
        os << "paired bootstrap: p=" << b["p_value"].get<double>() << " (" << b["iterations"].get<int>()
           << " iterations, seed=" << b["seed"].get<std::uint64_t>() << ")\n";
    }
    return os.str();
}

json cmd_analyze(const std::filesystem::path& summaries_path,
                 const std::filesystem::path& metadata_path,
                 const std::filesystem::path& out_dir) {
    const json summary = read_json_file(summaries_path);
    std::map<std::string, json> metadata;
    for (const auto& j : read_jsonl_file(metadata_path)) {
        metadata[j.at("transcript_id").get<std::string>()] = j;
    }

    std::vector<CorrelationRecord> records;
    std::map<std::string, std::vector<size_t>> by_topic;  // topic -> record indices
    for (const auto& row : summary.at("results")) {
        if (row.value("status", "") != "ok" || !row.contains("trust")) continue;
        const std::string id = row.at("transcript_id").get<std::string>();
        auto it = metadata.find(id);
        if (it == metadata.end()) {
            throw ConfigError("join failure on transcript_id: no metadata for " + id);
        }
        CorrelationRecord rec;
        rec.transcript_id = id;
        rec.trust = row.at("trust").get<double>();
        rec.followers = it->second.value("follower_count", std::int64_t{0});
        rec.plays = it->second.value("play_count", std::int64_t{0});
        if (row.contains("rhetorical_proportions")) {
            double total = 0.0;
            for (const auto& [name, frac] : row["rhetorical_proportions"].items()) {
                auto role = rhetorical_role_from_string(name);
                if (!role) continue;
                const double f = frac.get<double>();
                if (f < 0.0 || f > 1.0) throw ParseError("rhetorical proportion out of [0,1] for " + id);
                rec.rhetorical_proportions[*role] = f;
                total += f;
            }
            if (total > 1.0 + 1e-9) throw ParseError("rhetorical proportions exceed 1 for " + id);
        }
        const size_t idx = records.size();
        records.push_back(std::move(rec));
        if (it->second.contains("topics")) {
            for (const auto& topic : it->second["topics"]) {
                by_topic[topic.get<std::string>()].push_back(idx);
            }
        }
    }

    const CorrelationMatrix matrix = correlation_matrix(records);

    std::vector<std::string> warnings;
    if (records.size() < 10) {
        warnings.push_back("correlation computed from only " + std::to_string(records.size()) +
                           " records; estimates are unstable");
    }

    json topics = json::object();
    for (const auto& [topic, indices] : by_topic) {
        double trust_sum = 0.0;
        std::map<RhetoricalRole, double> prop_sums;
        for (size_t i : indices) {
            trust_sum += records[i].trust;
            for (const auto& [role, f] : records[i].rhetorical_proportions) prop_sums[role] += f;
        }
        json jt{{"count", indices.size()}, {"mean_trust", trust_sum / indices.size()}};
        json jp = json::object();
        for (const auto& [role, sum] : prop_sums) jp[to_string(role)] = sum / indices.size();
        jt["mean_rhetorical_proportions"] = std::move(jp);
        topics[topic] = std::move(jt);
    }

    std::filesystem::create_directories(out_dir);
    write_file_atomic(out_dir / "correlation.csv", matrix.to_csv());
    write_file_atomic(out_dir / "correlation.json", matrix.to_json().dump(2) + "\n");
    write_file_atomic(out_dir / "topics.json", topics.dump(2) + "\n");

    return json{{"records", records.size()},
                {"warnings", warnings},
                {"correlation", matrix.to_json()},
                {"topics", topics}};
}

}  // namespace taigr
