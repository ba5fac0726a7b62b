#include "parascope/baselines.hpp"

#include "parascope/continuation.hpp"
#include "parascope/errors.hpp"

namespace parascope {

void BaselineResult::validate() const {
    if (record_id.empty()) throw DataError("baseline result without record_id");
    if (method.empty()) throw DataError("baseline result without method tag");
    if (filtered != texts.empty())
        throw DataError("baseline result for " + record_id +
                        ": filtered flag does not match text presence");
    if (filtered && filter_reason.empty())
        throw DataError("baseline result for " + record_id + ": filtered without a reason");
}

void to_json(Json& j, const BaselineResult& r) {
    j = Json{{"record_id", r.record_id},   {"method", r.method},
             {"k", r.k},                   {"boundary_index", r.boundary_index},
             {"texts", r.texts},           {"filtered", r.filtered},
             {"filter_reason", r.filter_reason}};
}

void from_json(const Json& j, BaselineResult& r) {
    try {
        r.record_id = j.at("record_id").get<std::string>();
        r.method = j.at("method").get<std::string>();
        r.k = j.at("k").get<int>();
        r.boundary_index = j.at("boundary_index").get<int>();
        r.texts = j.at("texts").get<std::vector<std::string>>();
        r.filtered = j.at("filtered").get<bool>();
        r.filter_reason = j.at("filter_reason").get<std::string>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad baseline result: ") + e.what());
    }
}

std::vector<std::string> blind_baseline(ModelAdapter& adapter, const GenerationParams& params) {
    const std::vector<TokenId> context = blank_context_tokens(adapter, ContinuationConfig{});
    std::vector<GenerationOutput> outputs = adapter.generate(context, params);
    std::vector<std::string> texts;
    texts.reserve(outputs.size());
    for (GenerationOutput& out : outputs) texts.push_back(std::move(out.text));
    return texts;
}

BaselineResult cheat_k_baseline(const std::string& record_id, int boundary_index,
                                const std::string& reference_paragraph, int k,
                                ModelAdapter& adapter, const GenerationParams& params) {
    if (k < 1) throw ConfigError("cheat-k needs k >= 1, got " + std::to_string(k));

    BaselineResult result;
    result.record_id = record_id;
    result.method = "cheat_k";
    result.k = k;
    result.boundary_index = boundary_index;

    const std::vector<TokenId> reference_tokens = adapter.tokenize(reference_paragraph);
    if (reference_tokens.empty()) {
        result.filtered = true;
        result.filter_reason = "empty reference paragraph";
        return result;
    }
    if (static_cast<double>(k) > 0.5 * static_cast<double>(reference_tokens.size())) {
        result.filtered = true;
        result.filter_reason = "k=" + std::to_string(k) + " would reveal more than 50% of the " +
                               std::to_string(reference_tokens.size()) + "-token reference";
        return result;
    }

    std::vector<TokenId> context = blank_context_tokens(adapter, ContinuationConfig{});
    context.insert(context.end(), reference_tokens.begin(),
                   reference_tokens.begin() + k);
    const std::string prefix =
        adapter.detokenize(std::span<const TokenId>(reference_tokens.data(),
                                                    static_cast<size_t>(k)));

    std::vector<GenerationOutput> outputs = adapter.generate(context, params);
    for (const GenerationOutput& out : outputs) result.texts.push_back(prefix + out.text);
    result.validate();
    return result;
}

std::vector<std::string> regenerate_baseline(const GenerationRecord& record, size_t boundary_index,
                                             ModelAdapter& adapter, const GenerationParams& params) {
    const std::vector<TokenId> context = record.context_through_boundary(boundary_index);
    std::vector<GenerationOutput> outputs = adapter.generate(context, params);
    std::vector<std::string> texts;
    texts.reserve(outputs.size());
    for (GenerationOutput& out : outputs) texts.push_back(std::move(out.text));
    return texts;
}

std::string auto_decode_baseline(const std::string& reference_paragraph, TextAutoencoder& tae) {
    if (reference_paragraph.empty()) throw DataError("auto-decode of an empty reference");
    return tae.decode(tae.encode(reference_paragraph));
}

std::string first_paragraph(const std::string& text) {
    const size_t brk = text.find("\n\n");
    return brk == std::string::npos ? text : text.substr(0, brk);
}

}  // namespace parascope
