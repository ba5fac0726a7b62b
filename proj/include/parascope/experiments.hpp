#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "parascope/adapter.hpp"
#include "parascope/dataset.hpp"
#include "parascope/embedder.hpp"
#include "parascope/errors.hpp"
#include "parascope/jsonl.hpp"

namespace parascope {

// One layer-scrubbing run: two topic conditions generated from the same
// prompt template, hybridized at every k in k_values.
struct ScrubSpec {
    std::string prompt_template;  // "{topic}" marks the insertion point
    std::string topic_a;
    std::string topic_b;
    std::vector<int> k_values;
    int samples_per_config = 100;
    int best_of = 64;
    double temperature = 0.8;
    int max_new_tokens = 48;        // per decoded sample
    int reference_max_tokens = 192; // budget for the greedy condition generations
    uint64_t seed = 0x5c24b;

    // ConfigError on bad knobs; RangeError when a k falls outside [0, N].
    void validate(int num_layers) const;
    bool operator==(const ScrubSpec&) const = default;
};

void to_json(Json& j, const ScrubSpec& s);
void from_json(const Json& j, ScrubSpec& s);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
    bool operator==(const MeanStd&) const = default;
};

// An x-axis (layer k or token offset from the boundary) with aligned
// similarity statistics; delta is only populated by the scrub sweep.
struct SweepCurve {
    std::vector<double> positions;
    std::vector<MeanStd> similarity_to_ref1;
    std::vector<MeanStd> similarity_to_ref2;
    std::vector<double> delta;  // scrub: direction-averaged best-of delta per k
    int64_t n_examples = 0;     // scored samples across all points
    int64_t skipped = 0;        // clipped positions and empty generations

    void validate() const;  // EvalError on misaligned lists or negative stds
    bool operator==(const SweepCurve&) const = default;
};

void to_json(Json& j, const SweepCurve& c);
void from_json(const Json& j, SweepCurve& c);

// Best-of-n: the maximum over the first min(n, size) entries. Monotone
// non-decreasing in n for a fixed pool. EvalError on an empty pool or n < 1.
double best_of_similarity(std::span<const double> sims, int n);

// A single-position copy of a (possibly multi-position) capture.
// IndexError when the capture does not hold that position.
ResidualCapture capture_slice(const ResidualCapture& cap, int64_t position);

// Layers 1..k (1-indexed, i.e. the first k blocks) from cap_a and the rest
// from cap_b. k = 0 returns cap_b verbatim and k = N returns cap_a verbatim,
// positions and all; both captures must be full residual patches of the same
// model. Pure function of its inputs.
ResidualCapture hybrid_capture(const ResidualCapture& cap_a, const ResidualCapture& cap_b, int k);

// Shared sampling knobs for the token-window sweeps.
struct SweepSampling {
    int samples = 64;
    double temperature = 0.8;
    int max_new_tokens = 48;
    uint64_t seed = 0x70c5;

    void validate() const;  // ConfigError on non-positive counts
};

// Generates per-k hybrids in both topic directions, decodes them from the
// blank context, and scores samples against both topic references.
// similarity_to_ref1 tracks the early-layer topic, similarity_to_ref2 the
// late-layer topic; delta(k) = (delta_ab(k) - delta_ba(k)) / 2 with
// delta_xy = best-of similarity to topic a minus best-of similarity to b.
SweepCurve scrub_sweep(const ScrubSpec& spec, ModelAdapter& adapter, TextEmbedder& embedder);

// Decodes continuations from the captured residuals at every token position
// within +-window of the record's first paragraph boundary. Curve positions
// are offsets from the boundary; ref1 is the paragraph before it, ref2 the
// paragraph after. Positions clipped at the sequence edges are counted in
// skipped.
SweepCurve tokenwise_sweep(const GenerationRecord& record, ModelAdapter& adapter,
                           TextEmbedder& embedder, int window = 10,
                           const SweepSampling& sampling = {});

// As tokenwise_sweep, but each swept position's input token is replaced by
// the boundary token before capturing at it, so the curve shows where an
// injected boundary still elicits the original second paragraph.
SweepCurve replace_token_sweep(const GenerationRecord& record, ModelAdapter& adapter,
                               TextEmbedder& embedder, int window = 10,
                               const SweepSampling& sampling = {});

}  // namespace parascope
