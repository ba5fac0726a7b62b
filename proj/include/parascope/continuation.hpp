#pragma once

#include <string>
#include <vector>

#include "parascope/adapter.hpp"

namespace parascope {

// Decoding by activation patching: the saved boundary-token residuals are
// written into a blank context's boundary position and the model generates
// from there. No training is involved; the decoder is stateless.
struct ContinuationConfig {
    // Empty means the blank context is built token-by-token from the
    // adapter's explicit bos and boundary ids, which keeps the patch target
    // position unambiguous even when the text form would merge oddly under a
    // tokenizer. A non-empty value is tokenized instead and must begin with
    // bos and end with the boundary token.
    std::string blank_context_text;
    int max_new_tokens = 128;  // hard cap; larger values are rejected
    GenerationParams params;

    void validate() const;  // ConfigError on an out-of-range token budget
};

// The context a patched or blind generation starts from.
std::vector<TokenId> blank_context_tokens(const ModelAdapter& adapter,
                                          const ContinuationConfig& config);

// Patches the capture into the blank context's boundary token and generates
// params.num_samples completions. The capture must hold residual_post_layer
// vectors for every model layer at exactly one position.
std::vector<std::string> continuation_decode(const ResidualCapture& capture, ModelAdapter& adapter,
                                             const ContinuationConfig& config);

}  // namespace parascope
