#include "parascope/evaluation.hpp"

#include <cmath>
#include <set>

#include "parascope/metrics.hpp"
#include "parascope/util.hpp"

namespace parascope {

const char* similarity_metric_name(SimilarityMetric m) {
    switch (m) {
        case SimilarityMetric::embed_cosine: return "embed_cosine";
        case SimilarityMetric::learned_metric: return "learned_metric";
    }
    throw EvalError("unknown similarity metric");
}

SimilarityMetric similarity_metric_from_name(const std::string& name) {
    if (name == "embed_cosine") return SimilarityMetric::embed_cosine;
    if (name == "learned_metric") return SimilarityMetric::learned_metric;
    throw EvalError("unknown similarity metric '" + name + "'");
}

void SimilarityScore::validate() const {
    if (absent) return;
    if (!std::isfinite(value)) throw EvalError("similarity value is not finite");
    if (metric == SimilarityMetric::embed_cosine && (value < -1.0 - 1e-9 || value > 1.0 + 1e-9))
        throw EvalError("cosine similarity " + std::to_string(value) + " outside [-1, 1]");
}

void to_json(Json& j, const SimilarityScore& s) {
    j = Json{{"record_id", s.record_id}, {"method", s.method},
             {"metric", similarity_metric_name(s.metric)},
             {"value", s.value},         {"scorer_id", s.scorer_id},
             {"absent", s.absent}};
}

void from_json(const Json& j, SimilarityScore& s) {
    try {
        s.record_id = j.at("record_id").get<std::string>();
        s.method = j.at("method").get<std::string>();
        s.metric = similarity_metric_from_name(j.at("metric").get<std::string>());
        s.value = j.at("value").get<double>();
        s.scorer_id = j.at("scorer_id").get<std::string>();
        s.absent = j.at("absent").get<bool>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad similarity score: ") + e.what());
    }
}

SimilarityScore embed_cosine(const std::string& candidate, const std::string& reference,
                             TextEmbedder& embedder) {
    if (candidate.empty() || reference.empty())
        throw EvalError("embedding similarity needs two non-empty texts");
    const std::vector<float> u = embedder.embed(candidate);
    const std::vector<float> v = embedder.embed(reference);
    SimilarityScore s;
    s.metric = SimilarityMetric::embed_cosine;
    s.value = cosine(u, v);
    s.scorer_id = embedder.space_id();
    s.validate();
    return s;
}

double StubPairScorer::score(const std::string& candidate, const std::string& reference) {
    const auto cw = split_words(candidate);
    const auto rw = split_words(reference);
    const std::set<std::string> a(cw.begin(), cw.end());
    const std::set<std::string> b(rw.begin(), rw.end());
    if (a.empty() && b.empty()) return 1.0;
    std::size_t both = 0;
    for (const std::string& w : a) both += b.count(w);
    const std::size_t either = a.size() + b.size() - both;
    return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

SimilarityScore learned_metric(const std::string& candidate, const std::string& reference,
                               PairScorer& scorer) {
    SimilarityScore s;
    s.metric = SimilarityMetric::learned_metric;
    s.scorer_id = scorer.scorer_id();
    try {
        s.value = scorer.score(candidate, reference);
    } catch (const ClientError&) {
        s.absent = true;
        s.value = 0.0;
    }
    s.validate();
    return s;
}

}  // namespace parascope
