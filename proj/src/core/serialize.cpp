#include "taigr/core/serialize.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "taigr/common.hpp"

namespace taigr {

using nlohmann::json;

namespace {

json payload_to_json(const NodePayload& payload) {
    json j;
    if (const auto* t = std::get_if<Takeaway>(&payload)) {
        j["text"] = t->text;
        if (t->takeaway_type) j["takeaway_type"] = to_string(*t->takeaway_type);
        j["grounding"] = t->grounding;
        j["found"] = t->found;
    } else if (const auto* c = std::get_if<Claim>(&payload)) {
        j["id"] = c->id;
        j["text"] = c->text;
        j["claim_type"] = to_string(c->claim_type);
        j["statement_ids"] = c->statement_ids;
        j["justification"] = c->justification;
        j["ungrounded"] = c->ungrounded;
    } else if (const auto* s = std::get_if<Statement>(&payload)) {
        j["id"] = s->id;
        j["text"] = s->text;
        if (s->role) j["role"] = to_string(*s->role);
        j["role_explanation"] = s->role_explanation;
    } else if (const auto* d = std::get_if<EvidenceDoc>(&payload)) {
        j["doc_id"] = d->doc_id;
        j["title"] = d->title;
        j["abstract"] = d->abstract_text;
        if (d->year) j["year"] = *d->year;
        j["source_tag"] = d->source_tag;
    }
    return j;
}

NodePayload payload_from_json(NodeKind kind, const json& j) {
    switch (kind) {
        case NodeKind::Takeaway: {
            Takeaway t;
            t.text = j.at("text").get<std::string>();
            if (j.contains("takeaway_type") && !j["takeaway_type"].is_null()) {
                auto tt = takeaway_type_from_string(j["takeaway_type"].get<std::string>());
                if (!tt) throw ParseError("unknown takeaway_type: " + j["takeaway_type"].dump());
                t.takeaway_type = *tt;
            }
            t.grounding = j.value("grounding", std::vector<std::string>{});
            t.found = j.value("found", true);
            return t;
        }
        case NodeKind::Claim: {
            Claim c;
            c.id = j.at("id").get<std::string>();
            c.text = j.at("text").get<std::string>();
            auto ct = claim_type_from_string(j.at("claim_type").get<std::string>());
            if (!ct) throw ParseError("unknown claim_type: " + j["claim_type"].dump());
            c.claim_type = *ct;
            c.statement_ids = j.value("statement_ids", std::vector<std::string>{});
            c.justification = j.value("justification", std::string{});
            c.ungrounded = j.value("ungrounded", false);
            return c;
        }
        case NodeKind::Statement: {
            Statement s;
            s.id = j.at("id").get<std::string>();
            s.text = j.at("text").get<std::string>();
            if (j.contains("role") && !j["role"].is_null()) {
                auto r = rhetorical_role_from_string(j["role"].get<std::string>());
                if (!r) throw ParseError("unknown role: " + j["role"].dump());
                s.role = *r;
            }
            s.role_explanation = j.value("role_explanation", std::string{});
            return s;
        }
        case NodeKind::Evidence: {
            EvidenceDoc d;
            d.doc_id = j.at("doc_id").get<std::string>();
            d.title = j.value("title", std::string{});
            d.abstract_text = j.at("abstract").get<std::string>();
            if (j.contains("year") && !j["year"].is_null()) d.year = j["year"].get<int>();
            d.source_tag = j.value("source_tag", std::string{});
            return d;
        }
    }
    throw ParseError("unhandled node kind");
}

}  // namespace

json takeaway_to_json(const Takeaway& t) { return payload_to_json(t); }
Takeaway takeaway_from_json(const json& j) {
    return std::get<Takeaway>(payload_from_json(NodeKind::Takeaway, j));
}
json statement_to_json(const Statement& s) { return payload_to_json(s); }
Statement statement_from_json(const json& j) {
    return std::get<Statement>(payload_from_json(NodeKind::Statement, j));
}
json claim_to_json(const Claim& c) { return payload_to_json(c); }
Claim claim_from_json(const json& j) {
    return std::get<Claim>(payload_from_json(NodeKind::Claim, j));
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    return out;
}

std::string node_label(const ArgNode& n) {
    std::string text;
    if (const auto* t = std::get_if<Takeaway>(&n.payload)) text = t->text;
    else if (const auto* c = std::get_if<Claim>(&n.payload)) text = c->text;
    else if (const auto* s = std::get_if<Statement>(&n.payload)) text = s->text;
    else if (const auto* d = std::get_if<EvidenceDoc>(&n.payload)) text = d->title.empty() ? d->doc_id : d->title;
    if (text.size() > 60) text = text.substr(0, 57) + "...";
    return to_string(n.kind()) + ": " + text;
}

std::string to_dot(const ArgGraph& graph) {
    std::ostringstream os;
    os << "digraph argumentation {\n";
    os << "  rankdir=BT;\n";
    std::vector<const ArgNode*> nodes;
    for (const auto& n : graph.nodes) nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(),
              [](const ArgNode* a, const ArgNode* b) { return a->node_id < b->node_id; });
    for (const auto* n : nodes) {
        const char* shape = "ellipse";
        switch (n->kind()) {
            case NodeKind::Takeaway: shape = "doubleoctagon"; break;
            case NodeKind::Claim: shape = "box"; break;
            case NodeKind::Statement: shape = "ellipse"; break;
            case NodeKind::Evidence: shape = "note"; break;
        }
        os << "  \"" << dot_escape(n->node_id) << "\" [label=\"" << dot_escape(node_label(*n))
           << "\" shape=" << shape << "];\n";
    }
    std::vector<const ArgEdge*> edges;
    for (const auto& e : graph.edges) edges.push_back(&e);
    std::sort(edges.begin(), edges.end(), [](const ArgEdge* a, const ArgEdge* b) {
        return std::tuple(a->from, a->to, a->kind) < std::tuple(b->from, b->to, b->kind);
    });
    for (const auto* e : edges) {
        const char* style = e->kind == EdgeKind::Attack ? " style=dashed color=red"
                          : e->kind == EdgeKind::Grounding ? " style=dotted" : "";
        std::ostringstream w;
        w.precision(6);
        w << e->weight;
        os << "  \"" << dot_escape(e->from) << "\" -> \"" << dot_escape(e->to) << "\" [label=\""
           << to_string(e->kind) << " " << w.str() << "\"" << style << "];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace

json graph_to_json(const ArgGraph& graph) {
    json j;
    j["schema_version"] = kGraphSchemaVersion;
    j["root"] = graph.root;

    std::vector<const ArgNode*> nodes;
    for (const auto& n : graph.nodes) nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(),
              [](const ArgNode* a, const ArgNode* b) { return a->node_id < b->node_id; });
    json jnodes = json::array();
    for (const auto* n : nodes) {
        jnodes.push_back({{"node_id", n->node_id},
                          {"kind", to_string(n->kind())},
                          {"payload", payload_to_json(n->payload)}});
    }
    j["nodes"] = std::move(jnodes);

    std::vector<const ArgEdge*> edges;
    for (const auto& e : graph.edges) edges.push_back(&e);
    std::sort(edges.begin(), edges.end(), [](const ArgEdge* a, const ArgEdge* b) {
        return std::tuple(a->from, a->to, a->kind, a->weight) <
               std::tuple(b->from, b->to, b->kind, b->weight);
    });
    json jedges = json::array();
    for (const auto* e : edges) {
        json je{{"from", e->from}, {"to", e->to}, {"kind", to_string(e->kind)}, {"weight", e->weight}};
        if (e->class_probs) je["class_probs"] = *e->class_probs;
        jedges.push_back(std::move(je));
    }
    j["edges"] = std::move(jedges);
    return j;
}

ArgGraph graph_from_json(const json& j) {
    try {
        const int version = j.at("schema_version").get<int>();
        if (version != kGraphSchemaVersion) {
            throw ParseError("unsupported graph schema_version " + std::to_string(version));
        }
        ArgGraph g;
        g.root = j.at("root").get<std::string>();
        for (const auto& jn : j.at("nodes")) {
            auto kind = node_kind_from_string(jn.at("kind").get<std::string>());
            if (!kind) throw ParseError("unknown node kind: " + jn["kind"].dump());
            ArgNode n;
            n.node_id = jn.at("node_id").get<std::string>();
            n.payload = payload_from_json(*kind, jn.at("payload"));
            g.nodes.push_back(std::move(n));
        }
        for (const auto& je : j.at("edges")) {
            ArgEdge e;
            e.from = je.at("from").get<std::string>();
            e.to = je.at("to").get<std::string>();
            auto kind = edge_kind_from_string(je.at("kind").get<std::string>());
            if (!kind) throw ParseError("unknown edge kind: " + je["kind"].dump());
            e.kind = *kind;
            e.weight = je.at("weight").get<double>();
            if (je.contains("class_probs") && !je["class_probs"].is_null()) {
                e.class_probs = je["class_probs"].get<std::map<std::string, double>>();
            }
            g.edges.push_back(std::move(e));
        }
        return g;
    } catch (const json::exception& ex) {
        throw ParseError(std::string("malformed graph JSON: ") + ex.what());
    }
}

std::string serialize_graph(const ArgGraph& graph, GraphFormat format) {
    switch (format) {
        case GraphFormat::Json:
            return graph_to_json(graph).dump(2) + "\n";
        case GraphFormat::Dot:
            return to_dot(graph);
    }
    throw std::invalid_argument("unsupported graph format tag");
}

ArgGraph deserialize_graph(const std::string& bytes) {
    json j;
    try {
        j = json::parse(bytes);
    } catch (const json::exception& ex) {
        throw ParseError(std::string("graph JSON parse failure: ") + ex.what());
    }
    return graph_from_json(j);
}

}  // namespace taigr
