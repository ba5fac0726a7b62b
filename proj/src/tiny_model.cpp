#include "parascope/tiny_model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "parascope/errors.hpp"
#include "parascope/util.hpp"
#include "parascope/wordlist.hpp"

namespace parascope {

namespace {

using Mat = Eigen::MatrixXf;
using Vec = Eigen::VectorXf;

float gelu(float x) {
    const float c = 0.7978845608028654f;  // sqrt(2/pi)
    return 0.5f * x * (1.0f + std::tanh(c * (x + 0.044715f * x * x * x)));
}

Vec rmsnorm(const Vec& x) {
    float ms = x.squaredNorm() / static_cast<float>(x.size());
    return x / std::sqrt(ms + 1e-5f);
}

Mat gaussian_matrix(Rng& rng, int rows, int cols, float stddev) {
    std::normal_distribution<float> dist(0.0f, stddev);
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = dist(rng);
    return m;
}

}  // namespace

std::string TinyLmConfig::derived_model_id() const {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "tiny-%dl-%dd-%dh-s%llu", layers, dim, heads,
                  static_cast<unsigned long long>(weight_seed));
    return buf;
}

struct TinyLm::Impl {
    TinyLmConfig cfg;
    ByteFallbackTokenizer tok;
    ModelInfo info;
    int vocab = 0;
    int dim = 0;
    int heads = 0;
    int head_dim = 0;

    struct Layer {
        Mat wq, wk, wv, wo;  // dim x dim, row-major semantics: out = W * x
        Mat w1;              // ffn x dim
        Mat w2;              // dim x ffn
    };
    Mat embed;    // vocab x dim
    Mat unembed;  // vocab x dim
    Vec logit_bias;
    std::vector<Layer> layers;
    Mat rope_cos, rope_sin;  // window x head_dim/2

    // Per-layer KV cache for one forward session. Rows beyond `cache_len`
    // are stale and never read, so resetting `cache_len` rewinds the session.
    std::vector<Mat> k_cache, v_cache;
    int cache_len = 0;

    explicit Impl(TinyLmConfig c)
        : cfg(std::move(c)), tok(builtin_wordlist(), cfg.extra_merges) {
        if (cfg.layers < 1 || cfg.dim < 2 || cfg.heads < 1 || cfg.dim % cfg.heads != 0)
            throw ConfigError("tiny model: invalid layer/dim/head configuration");
        dim = cfg.dim;
        heads = cfg.heads;
        head_dim = dim / heads;
        if (head_dim % 2 != 0) throw ConfigError("tiny model: head dim must be even for rotary embedding");
        vocab = static_cast<int>(tok.vocab_size());

        info.model_id = cfg.model_id.empty() ? cfg.derived_model_id() : cfg.model_id;
        info.num_layers = cfg.layers;
        info.hidden_dim = dim;
        info.tokenizer_id = "bytefb-" + hex64(tok.vocab_hash());
        info.boundary_token_text = "\n\n";
        info.bos_token_text = "<bos>";

        init_weights();
        init_bias();
        init_rope();

        k_cache.assign(cfg.layers, Mat::Zero(cfg.window, dim));
        v_cache.assign(cfg.layers, Mat::Zero(cfg.window, dim));
    }

    void init_weights() {
        Rng rng = make_rng(mix64(cfg.weight_seed, 0x7e1));
        float inv_sqrt_d = 1.0f / std::sqrt(static_cast<float>(dim));
        float inv_sqrt_f = 1.0f / std::sqrt(static_cast<float>(cfg.ffn_dim));
        embed = gaussian_matrix(rng, vocab, dim, 1.0f);
        unembed = gaussian_matrix(rng, vocab, dim, cfg.logit_scale * inv_sqrt_d);
        layers.resize(cfg.layers);
        for (auto& l : layers) {
            l.wq = gaussian_matrix(rng, dim, dim, inv_sqrt_d);
            l.wk = gaussian_matrix(rng, dim, dim, inv_sqrt_d);
            l.wv = gaussian_matrix(rng, dim, dim, inv_sqrt_d);
            l.wo = gaussian_matrix(rng, dim, dim, inv_sqrt_d);
            l.w1 = gaussian_matrix(rng, cfg.ffn_dim, dim, inv_sqrt_d);
            l.w2 = gaussian_matrix(rng, dim, cfg.ffn_dim, inv_sqrt_f);
        }
    }

    // The bias encodes a unigram prior: words follow a zipf curve, the
    // paragraph boundary gets a fixed slice, printable bytes get a sliver so
    // arbitrary input is representable, and everything else (raw control
    // bytes, <bos>) is unreachable during generation.
    void init_bias() {
        logit_bias = Vec::Constant(vocab, -1e9f);
        const double merge_p = 0.002;
        const double byte_mass = 0.012;
        int printable = 0;
        for (int b = 0; b < 256; ++b)
            if ((b >= 32 && b <= 126) || b == '\n') ++printable;

        size_t n_words = tok.word_count();
        size_t first_word = tok.first_word_id();
        size_t n_merges = first_word - (ByteFallbackTokenizer::kBoundaryId + 1);

        double reserved = cfg.boundary_prob + byte_mass + merge_p * static_cast<double>(n_merges);
        double word_mass = 1.0 - reserved;
        if (word_mass <= 0.0) throw ConfigError("tiny model: boundary_prob leaves no probability for words");
        double zipf_total = 0.0;
        for (size_t i = 0; i < n_words; ++i) zipf_total += 1.0 / (static_cast<double>(i) + 20.0);

        for (int b = 0; b < 256; ++b)
            if ((b >= 32 && b <= 126) || b == '\n')
                logit_bias[b] = static_cast<float>(std::log(byte_mass / printable));
        logit_bias[ByteFallbackTokenizer::kBoundaryId] = static_cast<float>(std::log(cfg.boundary_prob));
        for (size_t m = 0; m < n_merges; ++m)
            logit_bias[static_cast<int>(ByteFallbackTokenizer::kBoundaryId + 1 + m)] =
                static_cast<float>(std::log(merge_p));
        for (size_t i = 0; i < n_words; ++i) {
            double p = word_mass * (1.0 / (static_cast<double>(i) + 20.0)) / zipf_total;
            logit_bias[static_cast<int>(first_word + i)] = static_cast<float>(std::log(p));
        }
    }

    void init_rope() {
        int half = head_dim / 2;
        rope_cos.resize(cfg.window, half);
        rope_sin.resize(cfg.window, half);
        for (int t = 0; t < cfg.window; ++t) {
            for (int i = 0; i < half; ++i) {
                double theta = static_cast<double>(t) *
                               std::pow(10000.0, -2.0 * static_cast<double>(i) / head_dim);
                rope_cos(t, i) = static_cast<float>(std::cos(theta));
                rope_sin(t, i) = static_cast<float>(std::sin(theta));
            }
        }
    }

    void apply_rope(Vec& qk, int pos) const {
        int half = head_dim / 2;
        for (int h = 0; h < heads; ++h) {
            int base = h * head_dim;
            for (int i = 0; i < half; ++i) {
                float c = rope_cos(pos, i);
                float s = rope_sin(pos, i);
                float a = qk[base + 2 * i];
                float b = qk[base + 2 * i + 1];
                qk[base + 2 * i] = a * c - b * s;
                qk[base + 2 * i + 1] = a * s + b * c;
            }
        }
    }

    // Hook points observed while one position flows through the stack.
    struct StepSink {
        virtual void attn_diff(int layer, const Vec& v) = 0;
        virtual void mlp_diff(int layer, const Vec& v) = 0;
        virtual void post_layer(int layer, const Vec& v) = 0;
        virtual ~StepSink() = default;
    };

    // Residual override applied after each layer at one position.
    struct PatchView {
        const ResidualCapture* cap = nullptr;
        int64_t source_position = 0;
        int64_t target = -1;
    };

    // Processes one token at `pos`, extending the KV cache, and returns the
    // logits for the next position. All cross-position state lives in the
    // cache, so the residual vector here is local to this position.
    Vec step(TokenId token, int pos, const PatchView& patch, StepSink* sink) {
        Vec x = embed.row(token).transpose();
        float inv_sqrt_hd = 1.0f / std::sqrt(static_cast<float>(head_dim));
        for (int l = 0; l < cfg.layers; ++l) {
            Layer& L = layers[l];
            Vec xn = rmsnorm(x);
            Vec q = L.wq * xn;
            Vec k = L.wk * xn;
            Vec v = L.wv * xn;
            apply_rope(q, pos);
            apply_rope(k, pos);
            k_cache[l].row(pos) = k.transpose();
            v_cache[l].row(pos) = v.transpose();

            Vec attn(dim);
            int ctx = pos + 1;
            for (int h = 0; h < heads; ++h) {
                auto kh = k_cache[l].topRows(ctx).middleCols(h * head_dim, head_dim);
                auto vh = v_cache[l].topRows(ctx).middleCols(h * head_dim, head_dim);
                Vec qh = q.segment(h * head_dim, head_dim);
                Vec scores = kh * qh * inv_sqrt_hd;
                float mx = scores.maxCoeff();
                Vec w = (scores.array() - mx).exp();
                w /= w.sum();
                attn.segment(h * head_dim, head_dim) = vh.transpose() * w;
            }
            Vec attn_out = L.wo * attn;
            if (sink) sink->attn_diff(l, attn_out);
            x += attn_out;

            Vec yn = rmsnorm(x);
            Vec pre = L.w1 * yn;
            for (int i = 0; i < pre.size(); ++i) pre[i] = gelu(pre[i]);
            Vec mlp_out = L.w2 * pre;
            if (sink) sink->mlp_diff(l, mlp_out);
            x += mlp_out;

            if (patch.target == pos) {
                std::span<const float> row =
                    patch.cap->vector_at(Stream::residual_post_layer, l, patch.source_position);
                for (int i = 0; i < dim; ++i) x[i] = row[static_cast<size_t>(i)];
            }
            if (sink) sink->post_layer(l, x);
        }
        Vec out = rmsnorm(x);
        Vec logits = unembed * out + logit_bias;
        return logits;
    }

    // Runs the whole context through the model, filling the KV cache.
    // Returns logits after the last context token.
    Vec prefill(std::span<const TokenId> context, const PatchView& patch, StepSink* sink) {
        if (context.empty()) throw LengthError("tiny model: empty context");
        if (static_cast<int64_t>(context.size()) > cfg.window)
            throw LengthError("tiny model: context length " + std::to_string(context.size()) +
                              " exceeds window " + std::to_string(cfg.window));
        for (TokenId t : context)
            if (t < 0 || t >= vocab)
                throw IndexError("tiny model: token id " + std::to_string(t) + " out of vocabulary");
        Vec logits;
        for (size_t pos = 0; pos < context.size(); ++pos)
            logits = step(context[pos], static_cast<int>(pos), patch, sink);
        cache_len = static_cast<int>(context.size());
        return logits;
    }

    TokenId pick_token(const Vec& logits, double temperature, Rng& rng) const {
        if (temperature == 0.0) {
            int best = 0;
            for (int i = 1; i < logits.size(); ++i)
                if (logits[i] > logits[best]) best = i;
            return best;
        }
        // Double-precision softmax walk keeps sampling platform-stable.
        std::vector<double> weights(static_cast<size_t>(logits.size()));
        double mx = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < logits.size(); ++i)
            mx = std::max(mx, static_cast<double>(logits[i]) / temperature);
        double total = 0.0;
        for (int i = 0; i < logits.size(); ++i) {
            double w = std::exp(static_cast<double>(logits[i]) / temperature - mx);
            weights[static_cast<size_t>(i)] = w;
            total += w;
        }
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double u = unit(rng) * total;
        double acc = 0.0;
        for (size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return static_cast<TokenId>(i);
        }
        return static_cast<TokenId>(weights.size() - 1);
    }

    // Collects requested rows into the flat capture layout:
    // stream-major, then layer, then position. The position counter advances
    // once the last layer of each prefill step has flowed through.
    struct CaptureCollector : StepSink {
        const CaptureSpec* spec = nullptr;
        ResidualCapture* out = nullptr;
        int hidden = 0;
        int last_layer = 0;
        int64_t current_pos = 0;

        void store(Stream s, int layer, int64_t pos, const Vec& v) {
            int64_t si = -1;
            for (size_t i = 0; i < spec->streams.size(); ++i)
                if (spec->streams[i] == s) si = static_cast<int64_t>(i);
            if (si < 0) return;
            int64_t li = -1;
            for (size_t i = 0; i < spec->layers.size(); ++i)
                if (spec->layers[i] == layer) li = static_cast<int64_t>(i);
            if (li < 0) return;
            int64_t pi = -1;
            for (size_t i = 0; i < spec->positions.size(); ++i)
                if (spec->positions[i] == pos) pi = static_cast<int64_t>(i);
            if (pi < 0) return;
            size_t idx = ((static_cast<size_t>(si) * spec->layers.size() + static_cast<size_t>(li)) *
                              spec->positions.size() +
                          static_cast<size_t>(pi)) *
                         static_cast<size_t>(hidden);
            for (int i = 0; i < hidden; ++i) out->data[idx + static_cast<size_t>(i)] = v[i];
        }

        void attn_diff(int layer, const Vec& v) override {
            store(Stream::attn_out_diff, layer, current_pos, v);
        }
        void mlp_diff(int layer, const Vec& v) override {
            store(Stream::mlp_out_diff, layer, current_pos, v);
        }
        void post_layer(int layer, const Vec& v) override {
            store(Stream::residual_post_layer, layer, current_pos, v);
            if (layer == last_layer) ++current_pos;
        }
    };

    ResidualCapture do_capture(std::span<const TokenId> context, const CaptureSpec& spec) {
        spec.validate(info, static_cast<int64_t>(context.size()));
        ResidualCapture cap;
        cap.model_info = info;
        cap.spec = spec;
        cap.context_hash = fnv1a64(std::vector<TokenId>(context.begin(), context.end()));
        cap.data.assign(spec.streams.size() * spec.layers.size() * spec.positions.size() *
                            static_cast<size_t>(dim),
                        0.0f);
        CaptureCollector sink;
        sink.spec = &spec;
        sink.out = &cap;
        sink.hidden = dim;
        sink.last_layer = cfg.layers - 1;
        prefill(context, PatchView{}, &sink);
        return cap;
    }

    std::vector<GenerationOutput> run_generate(std::span<const TokenId> context,
                                               const PatchView& patch,
                                               const GenerationParams& params) {
        params.validate();
        int64_t need = static_cast<int64_t>(context.size()) + params.max_new_tokens;
        if (need > cfg.window)
            throw LengthError("tiny model: context " + std::to_string(context.size()) + " + " +
                              std::to_string(params.max_new_tokens) + " new tokens exceeds window " +
                              std::to_string(cfg.window));

        Vec base_logits = prefill(context, patch, nullptr);
        int base_len = cache_len;
        uint64_t seed = params.seed.value_or(0);

        std::vector<GenerationOutput> outs;
        outs.reserve(static_cast<size_t>(params.num_samples));
        for (int s = 0; s < params.num_samples; ++s) {
            cache_len = base_len;  // rewind: rows past the context get overwritten
            Rng rng = make_rng(mix64(seed, static_cast<uint64_t>(s)));
            Vec logits = base_logits;
            GenerationOutput out;
            out.tokens.reserve(static_cast<size_t>(params.max_new_tokens));
            for (int64_t i = 0; i < params.max_new_tokens; ++i) {
                TokenId t = pick_token(logits, params.temperature, rng);
                out.tokens.push_back(t);
                if (i + 1 < params.max_new_tokens)
                    logits = step(t, cache_len++, PatchView{}, nullptr);
            }
            out.text = tok.detokenize(out.tokens);
            outs.push_back(std::move(out));
        }
        return outs;
    }
};

TinyLm::TinyLm(TinyLmConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}
TinyLm::~TinyLm() = default;

const ModelInfo& TinyLm::info() const { return impl_->info; }

std::vector<TokenId> TinyLm::tokenize(std::string_view text) const { return impl_->tok.tokenize(text); }

std::string TinyLm::detokenize(std::span<const TokenId> tokens) const {
    return impl_->tok.detokenize(tokens);
}

TokenId TinyLm::bos_token_id() const { return ByteFallbackTokenizer::kBosId; }
TokenId TinyLm::boundary_token_id() const { return ByteFallbackTokenizer::kBoundaryId; }

std::vector<GenerationOutput> TinyLm::generate(std::span<const TokenId> context,
                                               const GenerationParams& params) {
    return impl_->run_generate(context, Impl::PatchView{}, params);
}

ResidualCapture TinyLm::capture(std::span<const TokenId> context, const CaptureSpec& spec) {
    return impl_->do_capture(context, spec);
}

std::vector<GenerationOutput> TinyLm::generate_with_patch(std::span<const TokenId> context,
                                                          const ResidualCapture& patch,
                                                          int64_t patch_position,
                                                          const GenerationParams& params) {
    if (patch.model_info != impl_->info)
        throw CompatibilityError("patch capture comes from model '" + patch.model_info.model_id +
                                 "', adapter is '" + impl_->info.model_id + "'");
    if (!patch.is_full_residual_patch())
        throw PatchError("patch must hold post-layer residuals for every layer at one position");
    if (patch_position < 0 || patch_position >= static_cast<int64_t>(context.size()))
        throw IndexError("patch position " + std::to_string(patch_position) +
                         " outside context of length " + std::to_string(context.size()));
    if (!patch.all_finite()) throw PatchError("patch contains non-finite values");

    Impl::PatchView view;
    view.cap = &patch;
    view.source_position = patch.spec.positions.at(0);
    view.target = patch_position;
    return impl_->run_generate(context, view, params);
}

const ByteFallbackTokenizer& TinyLm::tokenizer() const { return impl_->tok; }
const TinyLmConfig& TinyLm::config() const { return impl_->cfg; }

}  // namespace parascope
