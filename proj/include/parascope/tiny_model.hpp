#pragma once

#include <memory>
#include <string>
#include <vector>

#include "parascope/adapter.hpp"
#include "parascope/tokenizer.hpp"

namespace parascope {

// Configuration of the bundled tiny causal LM. Weights are drawn from a
// seeded RNG, so a config fully determines the model. The unigram logit
// bias is shaped so that generations are made of word tokens with paragraph
// breaks at a controlled rate; the context-dependent part of the logits
// comes from the transformer itself.
struct TinyLmConfig {
    uint64_t weight_seed = 7;
    int layers = 6;
    int dim = 64;
    int heads = 4;
    int ffn_dim = 256;
    int window = 1024;
    float logit_scale = 2.0f;       // std-dev of the context-dependent logit term
    double boundary_prob = 0.02;    // unigram prior mass on the "\n\n" token
    std::vector<std::string> extra_merges;
    std::string model_id;           // derived from the fields above when empty

    std::string derived_model_id() const;
};

// Deterministic CPU reference model behind the ModelAdapter interface.
// Pre-norm transformer: RMSNorm, RoPE attention, GELU MLP. Every forward
// pass is computed position by position with a KV cache, so repeated runs
// are bitwise identical and patched runs agree exactly with unpatched ones
// where they should.
class TinyLm : public ModelAdapter {
public:
    explicit TinyLm(TinyLmConfig cfg = {});
    ~TinyLm() override;

    const ModelInfo& info() const override;

    std::vector<TokenId> tokenize(std::string_view text) const override;
    std::string detokenize(std::span<const TokenId> tokens) const override;
    TokenId bos_token_id() const override;
    TokenId boundary_token_id() const override;

    std::vector<GenerationOutput> generate(std::span<const TokenId> context,
                                           const GenerationParams& params) override;

    ResidualCapture capture(std::span<const TokenId> context, const CaptureSpec& spec) override;

    std::vector<GenerationOutput> generate_with_patch(std::span<const TokenId> context,
                                                      const ResidualCapture& patch,
                                                      int64_t patch_position,
                                                      const GenerationParams& params) override;

    const ByteFallbackTokenizer& tokenizer() const;
    const TinyLmConfig& config() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace parascope
