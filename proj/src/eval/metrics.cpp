#include "taigr/eval/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "taigr/common.hpp"

namespace taigr {

using nlohmann::json;

namespace {

constexpr std::array<VerdictLabel, 3> kClasses = {VerdictLabel::Incorrect,
                                                  VerdictLabel::PartiallyCorrect,
                                                  VerdictLabel::Correct};

std::string normalize_label(const std::string& raw) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : raw) {
        if (std::isalpha(c)) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else if (std::isspace(c) || c == '_' || c == '-') {
            pending_space = true;
        } else {
            pending_space = true;
        }
    }
    return out;
}

double class_f1(const std::vector<VerdictLabel>& gold, const std::vector<VerdictLabel>& pred,
                VerdictLabel cls, ClassScores* scores = nullptr) {
    int tp = 0, fp = 0, fn = 0, support = 0;
    for (size_t i = 0; i < gold.size(); ++i) {
        const bool g = gold[i] == cls;
        const bool p = pred[i] == cls;
        if (g) ++support;
        if (g && p) ++tp;
        else if (!g && p) ++fp;
        else if (g && !p) ++fn;
    }
    const double precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    if (scores != nullptr) {
        scores->precision = precision;
        scores->recall = recall;
        scores->f1 = f1;
        scores->support = support;
    }
    return f1;
}

}  // namespace

VerdictLabel collapse_label(const std::string& raw) {
    const std::string label = normalize_label(raw);
    static const std::map<std::string, VerdictLabel> mapping = {
        {"inaccurate", VerdictLabel::Incorrect},
        {"incorrect", VerdictLabel::Incorrect},
        {"flawed reasoning", VerdictLabel::Incorrect},
        {"unsupported", VerdictLabel::Incorrect},
        {"misleading", VerdictLabel::Incorrect},
        {"lacks context", VerdictLabel::PartiallyCorrect},
        {"imprecise", VerdictLabel::PartiallyCorrect},
        {"partially correct", VerdictLabel::PartiallyCorrect},
        {"mostly accurate", VerdictLabel::Correct},
        {"mostly correct", VerdictLabel::Correct},
        {"accurate", VerdictLabel::Correct},
        {"correct", VerdictLabel::Correct},
    };
    auto it = mapping.find(label);
    if (it == mapping.end()) {
        throw std::invalid_argument("unknown verdict label: '" + raw + "'");
    }
    return it->second;
}

double macro_f1(const std::vector<VerdictLabel>& gold, const std::vector<VerdictLabel>& predicted) {
    if (gold.size() != predicted.size()) throw std::invalid_argument("length mismatch");
    if (gold.empty()) throw std::invalid_argument("empty label vectors");
    double total = 0.0;
    for (VerdictLabel cls : kClasses) total += class_f1(gold, predicted, cls);
    return total / static_cast<double>(kClasses.size());
}

F1Report f1_report(const std::vector<LabeledExample>& examples) {
    if (examples.empty()) throw std::invalid_argument("f1_report: no examples");

    std::vector<VerdictLabel> gold, pred;
    gold.reserve(examples.size());
    pred.reserve(examples.size());
    for (const auto& e : examples) {
        gold.push_back(e.gold);
        pred.push_back(e.predicted);
    }

    F1Report report;
    report.example_count = static_cast<int>(examples.size());
    double total = 0.0;
    for (VerdictLabel cls : kClasses) {
        ClassScores scores;
        total += class_f1(gold, pred, cls, &scores);
        report.per_class[cls] = scores;
    }
    report.macro_f1 = total / static_cast<double>(kClasses.size());

    for (TakeawayType type : {TakeawayType::Implicit, TakeawayType::Explicit}) {
        std::vector<VerdictLabel> g, p;
        for (const auto& e : examples) {
            if (e.takeaway_type == type) {
                g.push_back(e.gold);
                p.push_back(e.predicted);
            }
        }
        if (!g.empty()) report.per_takeaway_type_macro[type] = macro_f1(g, p);
    }
    return report;
}

double paired_bootstrap(const std::vector<VerdictLabel>& preds_a,
                        const std::vector<VerdictLabel>& preds_b,
                        const std::vector<VerdictLabel>& gold, int iterations,
                        std::uint64_t seed) {
    const size_t n = gold.size();
    if (preds_a.size() != n || preds_b.size() != n) {
        throw std::invalid_argument("paired_bootstrap: prediction/gold lengths differ");
    }
    if (n < 2) throw std::invalid_argument("paired_bootstrap: need at least 2 examples");
    if (iterations < 1) throw std::invalid_argument("paired_bootstrap: iterations must be >= 1");

    std::vector<VerdictLabel> g(n), a(n), b(n);
    long long favored_b = 0;
    for (int iter = 0; iter < iterations; ++iter) {
        std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(iter + 1));
        std::mt19937_64 eng(splitmix64(state));
        for (size_t i = 0; i < n; ++i) {
            const size_t idx = static_cast<size_t>(eng() % n);
            g[i] = gold[idx];
            a[i] = preds_a[idx];
            b[i] = preds_b[idx];
        }
        if (macro_f1(g, a) <= macro_f1(g, b)) ++favored_b;
    }
    return static_cast<double>(favored_b) / static_cast<double>(iterations);
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson_r: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("pearson_r: need at least 2 points");
    const double n = static_cast<double>(x.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw std::domain_error("pearson_r: correlation undefined for a constant vector");
    }
    return sxy / std::sqrt(sxx * syy);
}

CorrelationMatrix correlation_matrix(const std::vector<CorrelationRecord>& records) {
    if (records.size() < 2) throw std::invalid_argument("correlation_matrix: need >= 2 records");

    auto proportion = [](const CorrelationRecord& r, RhetoricalRole role) {
        auto it = r.rhetorical_proportions.find(role);
        return it == r.rhetorical_proportions.end() ? 0.0 : it->second;
    };

    const size_t F = kCorrelationFeatures.size();
    std::vector<std::vector<double>> columns(F, std::vector<double>(records.size()));
    for (size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        columns[0][i] = r.trust;
        columns[1][i] = static_cast<double>(r.followers);
        columns[2][i] = static_cast<double>(r.plays);
        columns[3][i] = proportion(r, RhetoricalRole::Premise);
        columns[4][i] = proportion(r, RhetoricalRole::AnecdotalEvidence);
        columns[5][i] = proportion(r, RhetoricalRole::CredibilityMove);
        columns[6][i] = proportion(r, RhetoricalRole::EmotionalAppeal);
    }

    CorrelationMatrix m;
    m.features.assign(kCorrelationFeatures.begin(), kCorrelationFeatures.end());
    m.entries.assign(F, std::vector<std::optional<double>>(F));
    for (size_t i = 0; i < F; ++i) {
        for (size_t j = i; j < F; ++j) {
            std::optional<double> r;
            try {
                r = i == j ? pearson_r(columns[i], columns[i])  // 1 unless the column is constant
                           : pearson_r(columns[i], columns[j]);
                if (i == j) r = 1.0;
            } catch (const std::domain_error&) {
                r = std::nullopt;
            }
            m.entries[i][j] = r;
            m.entries[j][i] = r;
        }
    }
    return m;
}

std::string CorrelationMatrix::to_csv() const {
    std::ostringstream os;
    os << "feature";
    for (const auto& f : features) os << ',' << f;
    os << '\n';
    for (size_t i = 0; i < features.size(); ++i) {
        os << features[i];
        for (size_t j = 0; j < features.size(); ++j) {
            os << ',';
            if (entries[i][j]) os << *entries[i][j];
        }
        os << '\n';
    }
    return os.str();
}

json CorrelationMatrix::to_json() const {
    json j;
    j["features"] = features;
    json matrix = json::array();
    for (const auto& row : entries) {
        json jrow = json::array();
        for (const auto& e : row) {
            if (e) jrow.push_back(*e);
            else jrow.push_back(nullptr);
        }
        matrix.push_back(std::move(jrow));
    }
    j["matrix"] = std::move(matrix);
    return j;
}

}  // namespace taigr
