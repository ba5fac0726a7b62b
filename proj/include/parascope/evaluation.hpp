#pragma once

#include <cstdint>
#include <string>

#include "parascope/embedder.hpp"
#include "parascope/errors.hpp"
#include "parascope/jsonl.hpp"

namespace parascope {

enum class SimilarityMetric { embed_cosine, learned_metric };

const char* similarity_metric_name(SimilarityMetric m);
SimilarityMetric similarity_metric_from_name(const std::string& name);

// One (candidate, reference) similarity measurement. record_id and method are
// stamped by the caller that knows which decode produced the candidate.
struct SimilarityScore {
    std::string record_id;
    std::string method;
    SimilarityMetric metric = SimilarityMetric::embed_cosine;
    double value = 0.0;
    std::string scorer_id;  // embedder or learned-scorer identity
    bool absent = false;    // scorer was unavailable; value carries no meaning

    // EvalError on out-of-range or non-finite values (absent rows exempt).
    void validate() const;
    bool operator==(const SimilarityScore&) const = default;
};

void to_json(Json& j, const SimilarityScore& s);
void from_json(const Json& j, SimilarityScore& s);

// Cosine similarity between the two texts' embeddings. EvalError on empty
// input; symmetric in its text arguments.
SimilarityScore embed_cosine(const std::string& candidate, const std::string& reference,
                             TextEmbedder& embedder);

// Learned pairwise similarity model (served behind a client); higher is more
// similar. Implementations must be deterministic for fixed configuration.
class PairScorer {
public:
    virtual ~PairScorer() = default;
    virtual double score(const std::string& candidate, const std::string& reference) = 0;
    virtual std::string scorer_id() const = 0;
};

// Offline scorer: Jaccard overlap of distinct lowercased words, squashed
// into (0, 1]. Self-similarity is maximal.
class StubPairScorer : public PairScorer {
public:
    double score(const std::string& candidate, const std::string& reference) override;
    std::string scorer_id() const override { return "stub-overlap-scorer"; }
};

// A scorer failure is a degradation, not an error: the row comes back with
// absent=true so downstream aggregation can skip the metric.
SimilarityScore learned_metric(const std::string& candidate, const std::string& reference,
                               PairScorer& scorer);

}  // namespace parascope
