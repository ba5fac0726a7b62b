#include "parascope/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "parascope/baselines.hpp"
#include "parascope/continuation.hpp"
#include "parascope/metrics.hpp"
#include "parascope/util.hpp"

namespace parascope {

namespace {

constexpr const char* kTopicKey = "{topic}";

std::string substitute_topic(const std::string& tmpl, const std::string& topic) {
    std::string out = tmpl;
    size_t at = 0;
    while ((at = out.find(kTopicKey, at)) != std::string::npos) {
        out.replace(at, std::string_view(kTopicKey).size(), topic);
        at += topic.size();
    }
    return out;
}

MeanStd stats_of(std::span<const double> xs) { return {mean_of(xs), sample_std(xs)}; }

}  // namespace

void ScrubSpec::validate(int num_layers) const {
    if (prompt_template.find(kTopicKey) == std::string::npos)
        throw ConfigError("scrub prompt template has no {topic} placeholder");
    if (topic_a.empty() || topic_b.empty()) throw ConfigError("scrub topics must be non-empty");
    if (k_values.empty()) throw ConfigError("scrub needs at least one k value");
    for (int k : k_values)
        if (k < 0 || k > num_layers)
            throw RangeError("scrub k=" + std::to_string(k) + " outside [0, " +
                             std::to_string(num_layers) + "]");
    if (samples_per_config < 1) throw ConfigError("samples_per_config must be at least 1");
    if (best_of < 1) throw ConfigError("best_of must be at least 1");
    if (temperature < 0) throw ConfigError("temperature must be non-negative");
    if (max_new_tokens < 1 || max_new_tokens > 128)
        throw ConfigError("scrub sample budget must be within [1, 128]");
    if (reference_max_tokens < 1) throw ConfigError("reference budget must be positive");
}

void to_json(Json& j, const ScrubSpec& s) {
    j = Json{{"prompt_template", s.prompt_template},
             {"topic_a", s.topic_a},
             {"topic_b", s.topic_b},
             {"k_values", s.k_values},
             {"samples_per_config", s.samples_per_config},
             {"best_of", s.best_of},
             {"temperature", s.temperature},
             {"max_new_tokens", s.max_new_tokens},
             {"reference_max_tokens", s.reference_max_tokens},
             {"seed", s.seed}};
}

void from_json(const Json& j, ScrubSpec& s) {
    try {
        s.prompt_template = j.at("prompt_template").get<std::string>();
        s.topic_a = j.at("topic_a").get<std::string>();
        s.topic_b = j.at("topic_b").get<std::string>();
        s.k_values = j.at("k_values").get<std::vector<int>>();
        if (j.contains("samples_per_config")) s.samples_per_config = j.at("samples_per_config").get<int>();
        if (j.contains("best_of")) s.best_of = j.at("best_of").get<int>();
        if (j.contains("temperature")) s.temperature = j.at("temperature").get<double>();
        if (j.contains("max_new_tokens")) s.max_new_tokens = j.at("max_new_tokens").get<int>();
        if (j.contains("reference_max_tokens"))
            s.reference_max_tokens = j.at("reference_max_tokens").get<int>();
        if (j.contains("seed")) s.seed = j.at("seed").get<uint64_t>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad scrub spec: ") + e.what());
    }
}

void SweepCurve::validate() const {
    const size_t n = positions.size();
    if (similarity_to_ref1.size() != n || similarity_to_ref2.size() != n)
        throw EvalError("sweep curve lists are misaligned");
    if (!delta.empty() && delta.size() != n)
        throw EvalError("sweep curve delta list is misaligned");
    const auto check_stats = [](const std::vector<MeanStd>& xs) {
        for (const MeanStd& m : xs) {
            if (!std::isfinite(m.mean) || !std::isfinite(m.std))
                throw EvalError("sweep curve contains non-finite statistics");
            if (m.std < 0.0) throw EvalError("sweep curve contains a negative std");
        }
    };
    check_stats(similarity_to_ref1);
    check_stats(similarity_to_ref2);
    for (double d : delta)
        if (!std::isfinite(d)) throw EvalError("sweep curve delta is non-finite");
    if (n_examples < 0 || skipped < 0) throw EvalError("sweep curve counts are negative");
}

void to_json(Json& j, const SweepCurve& c) {
    auto pack = [](const std::vector<MeanStd>& xs) {
        Json arr = Json::array();
        for (const MeanStd& m : xs) arr.push_back(Json{{"mean", m.mean}, {"std", m.std}});
        return arr;
    };
    j = Json{{"positions", c.positions},
             {"similarity_to_ref1", pack(c.similarity_to_ref1)},
             {"similarity_to_ref2", pack(c.similarity_to_ref2)},
             {"delta", c.delta},
             {"n_examples", c.n_examples},
             {"skipped", c.skipped}};
}

void from_json(const Json& j, SweepCurve& c) {
    auto unpack = [](const Json& arr) {
        std::vector<MeanStd> out;
        for (const Json& m : arr)
            out.push_back({m.at("mean").get<double>(), m.at("std").get<double>()});
        return out;
    };
    try {
        c.positions = j.at("positions").get<std::vector<double>>();
        c.similarity_to_ref1 = unpack(j.at("similarity_to_ref1"));
        c.similarity_to_ref2 = unpack(j.at("similarity_to_ref2"));
        c.delta = j.at("delta").get<std::vector<double>>();
        c.n_examples = j.at("n_examples").get<int64_t>();
        c.skipped = j.at("skipped").get<int64_t>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad sweep curve: ") + e.what());
    }
}

double best_of_similarity(std::span<const double> sims, int n) {
    if (n < 1) throw EvalError("best-of needs n >= 1");
    if (sims.empty()) throw EvalError("best-of over an empty sample pool");
    const size_t count = std::min(static_cast<size_t>(n), sims.size());
    return *std::max_element(sims.begin(), sims.begin() + static_cast<std::ptrdiff_t>(count));
}

ResidualCapture capture_slice(const ResidualCapture& cap, int64_t position) {
    const auto& ps = cap.spec.positions;
    if (std::find(ps.begin(), ps.end(), position) == ps.end())
        throw IndexError("capture does not hold position " + std::to_string(position));
    ResidualCapture out;
    out.model_info = cap.model_info;
    out.spec = cap.spec;
    out.spec.positions = {position};
    out.context_hash = cap.context_hash;
    out.data.reserve(cap.spec.streams.size() * cap.spec.layers.size() *
                     static_cast<size_t>(cap.model_info.hidden_dim));
    for (Stream s : cap.spec.streams)
        for (int layer : cap.spec.layers) {
            std::span<const float> v = cap.vector_at(s, layer, position);
            out.data.insert(out.data.end(), v.begin(), v.end());
        }
    return out;
}

ResidualCapture hybrid_capture(const ResidualCapture& cap_a, const ResidualCapture& cap_b, int k) {
    if (!cap_a.is_full_residual_patch() || !cap_b.is_full_residual_patch())
        throw PatchError(
            "hybrids need post-layer residuals for every layer at exactly one position");
    if (!(cap_a.model_info == cap_b.model_info))
        throw CompatibilityError("hybrid captures come from different models");
    const int n = cap_a.model_info.num_layers;
    if (k < 0 || k > n)
        throw RangeError("hybrid split k=" + std::to_string(k) + " outside [0, " +
                         std::to_string(n) + "]");
    if (k == 0) return cap_b;
    if (k == n) return cap_a;

    ResidualCapture out = cap_b;
    const int64_t pa = cap_a.single_position();
    const int64_t pb = cap_b.single_position();
    for (int layer = 0; layer < k; ++layer) {  // 1-indexed layers 1..k
        std::span<const float> src = cap_a.vector_at(Stream::residual_post_layer, layer, pa);
        std::span<float> dst = out.vector_at_mut(Stream::residual_post_layer, layer, pb);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    out.context_hash = mix64(cap_a.context_hash, cap_b.context_hash);
    return out;
}

void SweepSampling::validate() const {
    if (samples < 1) throw ConfigError("sweep needs at least one sample");
    if (temperature < 0) throw ConfigError("temperature must be non-negative");
    if (max_new_tokens < 1 || max_new_tokens > 128)
        throw ConfigError("sweep sample budget must be within [1, 128]");
}

namespace {

struct Condition {
    std::string reference;    // the paragraph after the first generated boundary
    ResidualCapture capture;  // every layer's residual at that boundary
};

Condition make_condition(const ScrubSpec& spec, const std::string& topic, ModelAdapter& adapter) {
    PromptRecord prompt;
    prompt.prompt_id = "scrub-" + topic;
    prompt.source_chunk_ref = "scrub";
    prompt.prompt_text = substitute_topic(spec.prompt_template, topic);

    GenerationParams params;
    params.max_new_tokens = spec.reference_max_tokens;
    params.temperature = 0.0;
    GenerationRecord rec = build_generation_record(prompt, adapter, params, spec.seed);
    if (rec.boundary_positions.empty())
        throw EvalError("scrub condition '" + topic + "' generated no paragraph boundary");

    Condition c;
    c.reference = rec.paragraph_after_boundary(0);
    if (c.reference.empty())
        throw EvalError("scrub condition '" + topic + "' has an empty second paragraph");
    const std::vector<TokenId> ctx = rec.context_through_boundary(0);
    const CaptureSpec cspec =
        CaptureSpec::all_layers(adapter.info(), {static_cast<int64_t>(ctx.size()) - 1});
    c.capture = adapter.capture(ctx, cspec);
    return c;
}

// Scores every non-empty sample's first paragraph against both references.
struct ScoredSamples {
    std::vector<double> sim_a;
    std::vector<double> sim_b;
    int64_t skipped = 0;
};

ScoredSamples score_samples(const std::vector<std::string>& texts, TextEmbedder& embedder,
                            std::span<const float> emb_a, std::span<const float> emb_b) {
    ScoredSamples out;
    for (const std::string& text : texts) {
        const std::string fp = first_paragraph(text);
        if (fp.empty()) {
            ++out.skipped;
            continue;
        }
        const std::vector<float> e = embedder.embed(fp);
        out.sim_a.push_back(cosine(e, emb_a));
        out.sim_b.push_back(cosine(e, emb_b));
    }
    return out;
}

}  // namespace

SweepCurve scrub_sweep(const ScrubSpec& spec, ModelAdapter& adapter, TextEmbedder& embedder) {
    spec.validate(adapter.info().num_layers);
    const Condition a = make_condition(spec, spec.topic_a, adapter);
    const Condition b = make_condition(spec, spec.topic_b, adapter);
    const std::vector<float> emb_a = embedder.embed(a.reference);
    const std::vector<float> emb_b = embedder.embed(b.reference);

    SweepCurve curve;
    for (int k : spec.k_values) {
        std::vector<double> early, late;
        double delta_ab = 0.0, delta_ba = 0.0;
        for (int dir = 0; dir < 2; ++dir) {
            const ResidualCapture hybrid = dir == 0 ? hybrid_capture(a.capture, b.capture, k)
                                                    : hybrid_capture(b.capture, a.capture, k);
            ContinuationConfig cfg;
            cfg.max_new_tokens = spec.max_new_tokens;
            cfg.params.temperature = spec.temperature;
            cfg.params.num_samples = spec.samples_per_config;
            cfg.params.seed =
                mix64(spec.seed, (static_cast<uint64_t>(k) << 1) | static_cast<uint64_t>(dir));
            const std::vector<std::string> texts = continuation_decode(hybrid, adapter, cfg);

            ScoredSamples scored = score_samples(texts, embedder, emb_a, emb_b);
            if (scored.sim_a.empty())
                throw EvalError("every scrub sample at k=" + std::to_string(k) + " was empty");
            curve.skipped += scored.skipped;
            curve.n_examples += static_cast<int64_t>(scored.sim_a.size());

            const double d = best_of_similarity(scored.sim_a, spec.best_of) -
                             best_of_similarity(scored.sim_b, spec.best_of);
            (dir == 0 ? delta_ab : delta_ba) = d;
            const auto& early_dir = dir == 0 ? scored.sim_a : scored.sim_b;
            const auto& late_dir = dir == 0 ? scored.sim_b : scored.sim_a;
            early.insert(early.end(), early_dir.begin(), early_dir.end());
            late.insert(late.end(), late_dir.begin(), late_dir.end());
        }
        curve.positions.push_back(static_cast<double>(k));
        curve.similarity_to_ref1.push_back(stats_of(early));
        curve.similarity_to_ref2.push_back(stats_of(late));
        curve.delta.push_back(0.5 * (delta_ab - delta_ba));
    }
    curve.validate();
    return curve;
}

namespace {

// Both token sweeps share the window arithmetic and the scoring loop; they
// differ only in how the capture at a position is produced.
template <typename CaptureAt>
SweepCurve window_sweep(const GenerationRecord& record, ModelAdapter& adapter,
                        TextEmbedder& embedder, int window, const SweepSampling& sampling,
                        CaptureAt&& capture_at) {
    sampling.validate();
    if (window < 0) throw ConfigError("window must be non-negative");
    if (record.boundary_positions.empty())
        throw DataError("record '" + record.record_id + "' has no internal paragraph boundary");
    const int64_t b = record.boundary_positions.front();
    const int64_t len = static_cast<int64_t>(record.token_ids.size());
    const std::string& ref1 = record.paragraphs.front();
    const std::string& ref2 = record.paragraph_after_boundary(0);
    if (ref1.empty() || ref2.empty())
        throw DataError("record '" + record.record_id +
                        "' has an empty paragraph at its first boundary");
    const std::vector<float> emb1 = embedder.embed(ref1);
    const std::vector<float> emb2 = embedder.embed(ref2);

    SweepCurve curve;
    for (int64_t off = -window; off <= window; ++off) {
        const int64_t p = b + off;
        if (p < 1 || p >= len) {  // clipped at the sequence edges
            ++curve.skipped;
            continue;
        }
        ContinuationConfig cfg;
        cfg.max_new_tokens = sampling.max_new_tokens;
        cfg.params.temperature = sampling.temperature;
        cfg.params.num_samples = sampling.samples;
        cfg.params.seed = mix64(sampling.seed, static_cast<uint64_t>(p));
        const std::vector<std::string> texts =
            continuation_decode(capture_at(p), adapter, cfg);

        ScoredSamples scored = score_samples(texts, embedder, emb1, emb2);
        if (scored.sim_a.empty())
            throw EvalError("every sample at offset " + std::to_string(off) + " was empty");
        curve.skipped += scored.skipped;
        curve.n_examples += static_cast<int64_t>(scored.sim_a.size());
        curve.positions.push_back(static_cast<double>(off));
        curve.similarity_to_ref1.push_back(stats_of(scored.sim_a));
        curve.similarity_to_ref2.push_back(stats_of(scored.sim_b));
    }
    if (curve.positions.empty()) throw EvalError("the sweep window held no usable positions");
    curve.validate();
    return curve;
}

}  // namespace

SweepCurve tokenwise_sweep(const GenerationRecord& record, ModelAdapter& adapter,
                           TextEmbedder& embedder, int window, const SweepSampling& sampling) {
    // One forward pass captures the whole window; positions are sliced out.
    std::vector<int64_t> positions;
    const int64_t b =
        record.boundary_positions.empty() ? 0 : record.boundary_positions.front();
    const int64_t len = static_cast<int64_t>(record.token_ids.size());
    for (int64_t off = -window; off <= window; ++off) {
        const int64_t p = b + off;
        if (p >= 1 && p < len) positions.push_back(p);
    }
    ResidualCapture cap;
    if (!positions.empty() && !record.boundary_positions.empty())
        cap = adapter.capture(record.token_ids,
                              CaptureSpec::all_layers(adapter.info(), positions));
    return window_sweep(record, adapter, embedder, window, sampling,
                        [&](int64_t p) { return capture_slice(cap, p); });
}

SweepCurve replace_token_sweep(const GenerationRecord& record, ModelAdapter& adapter,
                               TextEmbedder& embedder, int window, const SweepSampling& sampling) {
    return window_sweep(record, adapter, embedder, window, sampling, [&](int64_t p) {
        std::vector<TokenId> prefix(record.token_ids.begin(),
                                    record.token_ids.begin() + p + 1);
        prefix[static_cast<size_t>(p)] = adapter.boundary_token_id();
        return adapter.capture(prefix, CaptureSpec::all_layers(adapter.info(),
                                                               {static_cast<int64_t>(p)}));
    });
}

}  // namespace parascope
