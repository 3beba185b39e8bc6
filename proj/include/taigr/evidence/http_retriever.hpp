#pragma once
// Retrieval over HTTP: GET <base>?query=...&k=... returning a JSON array of docs.

#include <memory>
#include <string>

#include "taigr/evidence/types.hpp"

namespace taigr {

class HttpRetriever : public RetrievalProvider {
public:
    // base_url: http(s)://host[:port]/path
    explicit HttpRetriever(std::string base_url);
    ~HttpRetriever() override;

    HttpRetriever(const HttpRetriever&) = delete;
    HttpRetriever& operator=(const HttpRetriever&) = delete;

    std::vector<EvidenceDoc> search(const std::string& query, int k) const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace taigr
