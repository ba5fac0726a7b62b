#include "parascope/continuation.hpp"

#include "parascope/errors.hpp"

namespace parascope {

void ContinuationConfig::validate() const {
    if (max_new_tokens < 1 || max_new_tokens > 128)
        throw ConfigError("continuation max_new_tokens must be in [1, 128], got " +
                          std::to_string(max_new_tokens));
    params.validate();
}

std::vector<TokenId> blank_context_tokens(const ModelAdapter& adapter,
                                          const ContinuationConfig& config) {
    if (config.blank_context_text.empty())
        return {adapter.bos_token_id(), adapter.boundary_token_id()};

    std::vector<TokenId> tokens = adapter.tokenize(config.blank_context_text);
    if (tokens.size() < 2)
        throw ConfigError("blank context must tokenize to at least 2 tokens (bos + boundary)");
    if (tokens.front() != adapter.bos_token_id())
        throw ConfigError("blank context must start with the bos token");
    if (tokens.back() != adapter.boundary_token_id())
        throw ConfigError("blank context must end with the boundary token (the patch target)");
    return tokens;
}

std::vector<std::string> continuation_decode(const ResidualCapture& capture, ModelAdapter& adapter,
                                             const ContinuationConfig& config) {
    config.validate();
    if (!capture.is_full_residual_patch())
        throw PatchError("continuation decoding needs residual_post_layer vectors for every "
                         "model layer at exactly one position");

    const std::vector<TokenId> context = blank_context_tokens(adapter, config);
    const int64_t target = static_cast<int64_t>(context.size()) - 1;

    GenerationParams params = config.params;
    params.max_new_tokens = config.max_new_tokens;

    std::vector<GenerationOutput> outputs =
        adapter.generate_with_patch(context, capture, target, params);
    std::vector<std::string> texts;
    texts.reserve(outputs.size());
    for (GenerationOutput& out : outputs) texts.push_back(std::move(out.text));
    return texts;
}

}  // namespace parascope
