#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parascope/errors.hpp"
#include "parascope/jsonl.hpp"

namespace parascope {

using TokenId = int32_t;

// Activation streams that can be captured at a token position.
enum class Stream {
    residual_post_layer,  // residual after the full block (attn + mlp)
    attn_out_diff,        // additive contribution of the attention sublayer
    mlp_out_diff,         // additive contribution of the mlp sublayer
};

const char* stream_name(Stream s);
Stream stream_from_name(std::string_view name);

struct ModelInfo {
    std::string model_id;
    int num_layers = 0;
    int hidden_dim = 0;
    std::string tokenizer_id;
    std::string boundary_token_text = "\n\n";
    std::string bos_token_text = "<bos>";

    bool operator==(const ModelInfo&) const = default;
};

struct CaptureSpec {
    std::vector<Stream> streams;
    std::vector<int> layers;         // strictly increasing, in [0, num_layers)
    std::vector<int64_t> positions;  // strictly increasing absolute token positions

    void validate(const ModelInfo& info, int64_t context_len) const;

    static CaptureSpec all_layers(const ModelInfo& info, std::vector<int64_t> positions,
                                  std::vector<Stream> streams = {Stream::residual_post_layer});
};

void to_json(Json& j, const ModelInfo& m);
void from_json(const Json& j, ModelInfo& m);
void to_json(Json& j, const CaptureSpec& s);
void from_json(const Json& j, CaptureSpec& s);

// Per-layer activation vectors gathered in one forward pass. Vectors are laid
// out stream-major, then layer, then position, each of length hidden_dim.
struct ResidualCapture {
    ModelInfo model_info;
    CaptureSpec spec;
    std::vector<float> data;
    uint64_t context_hash = 0;

    size_t vector_count() const;
    std::span<const float> vector_at(Stream s, int layer, int64_t position) const;
    std::span<float> vector_at_mut(Stream s, int layer, int64_t position);
    bool all_finite() const;

    // True when the capture holds residual_post_layer vectors for every model
    // layer at exactly one position (the shape generate_with_patch needs).
    bool is_full_residual_patch() const;
    int64_t single_position() const;
};

struct GenerationParams {
    int max_new_tokens = 128;
    double temperature = 0.3;  // 0 means greedy
    std::optional<uint64_t> seed;
    int num_samples = 1;

    void validate() const;
};

struct GenerationOutput {
    std::vector<TokenId> tokens;
    std::string text;
};

// Uniform interface over causal language models: tokenization, sampling,
// activation capture and activation patching. One instance is single-threaded.
class ModelAdapter {
public:
    virtual ~ModelAdapter() = default;

    virtual const ModelInfo& info() const = 0;

    virtual std::vector<TokenId> tokenize(std::string_view text) const = 0;
    virtual std::string detokenize(std::span<const TokenId> tokens) const = 0;

    virtual TokenId bos_token_id() const = 0;
    // Last token of the tokenized boundary text; the position whose
    // activations condition the next paragraph.
    virtual TokenId boundary_token_id() const = 0;

    virtual std::vector<GenerationOutput> generate(std::span<const TokenId> context,
                                                   const GenerationParams& params) = 0;

    virtual ResidualCapture capture(std::span<const TokenId> context, const CaptureSpec& spec) = 0;

    // Overwrites the post-layer residual at patch_position with the patch's
    // per-layer vectors on every forward pass over that position, then
    // generates. The capture itself is never mutated.
    virtual std::vector<GenerationOutput> generate_with_patch(std::span<const TokenId> context,
                                                              const ResidualCapture& patch,
                                                              int64_t patch_position,
                                                              const GenerationParams& params) = 0;
};

}  // namespace parascope
