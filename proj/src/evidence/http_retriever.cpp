#include "taigr/evidence/http_retriever.hpp"

#include <unordered_set>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "taigr/common.hpp"

namespace taigr {

using nlohmann::json;

struct HttpRetriever::Impl {
    std::string scheme_host;
    std::string path;
};

HttpRetriever::HttpRetriever(std::string base_url) : impl_(std::make_unique<Impl>()) {
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("retriever base url must start with http:// or https://: " + base_url);
    }
    auto path_start = base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        impl_->scheme_host = base_url;
        impl_->path = "/";
    } else {
        impl_->scheme_host = base_url.substr(0, path_start);
        impl_->path = base_url.substr(path_start);
    }
}

HttpRetriever::~HttpRetriever() = default;

std::vector<EvidenceDoc> HttpRetriever::search(const std::string& query, int k) const {
    httplib::Client client(impl_->scheme_host);
    client.set_read_timeout(60, 0);
    httplib::Params params{{"query", query}, {"k", std::to_string(k)}};
    auto res = client.Get(impl_->path, params, httplib::Headers{});
    if (!res) {
        throw TransportError("retrieval request failed: " + httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw TransportError("retrieval endpoint returned status " + std::to_string(res->status));
    }
    json j;
    try {
        j = json::parse(res->body);
    } catch (const json::exception& ex) {
        throw ParseError(std::string("retrieval endpoint returned non-JSON body: ") + ex.what());
    }
    if (!j.is_array()) throw ParseError("retrieval endpoint must return a JSON array");

    std::vector<EvidenceDoc> out;
    std::unordered_set<std::string> seen;
    for (const auto& jd : j) {
        EvidenceDoc d;
        try {
            d.doc_id = jd.at("doc_id").get<std::string>();
            d.title = jd.value("title", std::string{});
            d.abstract_text = jd.at("abstract").get<std::string>();
            if (jd.contains("year") && !jd["year"].is_null()) d.year = jd["year"].get<int>();
            d.source_tag = jd.value("source_tag", std::string{});
        } catch (const json::exception& ex) {
            throw ParseError(std::string("malformed retrieval result: ") + ex.what());
        }
        if (seen.insert(d.doc_id).second) out.push_back(std::move(d));
        if (out.size() == static_cast<size_t>(k)) break;
    }
    return out;
}

}  // namespace taigr
