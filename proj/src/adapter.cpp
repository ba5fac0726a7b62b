#include "parascope/adapter.hpp"

#include <algorithm>
#include <cmath>

namespace parascope {

const char* stream_name(Stream s) {
    switch (s) {
        case Stream::residual_post_layer: return "residual_post_layer";
        case Stream::attn_out_diff: return "attn_out_diff";
        case Stream::mlp_out_diff: return "mlp_out_diff";
    }
    return "unknown";
}

Stream stream_from_name(std::string_view name) {
    if (name == "residual_post_layer") return Stream::residual_post_layer;
    if (name == "attn_out_diff") return Stream::attn_out_diff;
    if (name == "mlp_out_diff") return Stream::mlp_out_diff;
    throw SpecError("unknown stream name: " + std::string(name));
}

void to_json(Json& j, const ModelInfo& m) {
    j = Json{{"model_id", m.model_id},
             {"num_layers", m.num_layers},
             {"hidden_dim", m.hidden_dim},
             {"tokenizer_id", m.tokenizer_id},
             {"boundary_token_text", m.boundary_token_text},
             {"bos_token_text", m.bos_token_text}};
}

void from_json(const Json& j, ModelInfo& m) {
    try {
        m.model_id = j.at("model_id").get<std::string>();
        m.num_layers = j.at("num_layers").get<int>();
        m.hidden_dim = j.at("hidden_dim").get<int>();
        m.tokenizer_id = j.at("tokenizer_id").get<std::string>();
        m.boundary_token_text = j.at("boundary_token_text").get<std::string>();
        m.bos_token_text = j.at("bos_token_text").get<std::string>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad model info json: ") + e.what());
    }
}

void to_json(Json& j, const CaptureSpec& s) {
    std::vector<std::string> names;
    names.reserve(s.streams.size());
    for (Stream st : s.streams) names.emplace_back(stream_name(st));
    j = Json{{"streams", names}, {"layers", s.layers}, {"positions", s.positions}};
}

void from_json(const Json& j, CaptureSpec& s) {
    try {
        s.streams.clear();
        for (const auto& n : j.at("streams")) s.streams.push_back(stream_from_name(n.get<std::string>()));
        s.layers = j.at("layers").get<std::vector<int>>();
        s.positions = j.at("positions").get<std::vector<int64_t>>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad capture spec json: ") + e.what());
    }
}

void CaptureSpec::validate(const ModelInfo& info, int64_t context_len) const {
    if (streams.empty()) {
        throw SpecError("capture spec has no streams");
    }
    if (layers.empty() || positions.empty()) {
        throw SpecError("capture spec needs at least one layer and one position");
    }
    for (size_t i = 0; i < layers.size(); ++i) {
        if (layers[i] < 0 || layers[i] >= info.num_layers) {
            throw SpecError("layer index out of range: " + std::to_string(layers[i]));
        }
        if (i > 0 && layers[i] <= layers[i - 1]) {
            throw SpecError("layers must be strictly increasing");
        }
    }
    for (size_t i = 0; i < positions.size(); ++i) {
        if (positions[i] < 0 || positions[i] >= context_len) {
            throw IndexError("capture position " + std::to_string(positions[i]) +
                             " out of range for context of length " + std::to_string(context_len));
        }
        if (i > 0 && positions[i] <= positions[i - 1]) {
            throw SpecError("positions must be strictly increasing");
        }
    }
}

CaptureSpec CaptureSpec::all_layers(const ModelInfo& info, std::vector<int64_t> positions,
                                    std::vector<Stream> streams) {
    CaptureSpec spec;
    spec.streams = std::move(streams);
    spec.layers.resize(static_cast<size_t>(info.num_layers));
    for (int l = 0; l < info.num_layers; ++l) {
        spec.layers[static_cast<size_t>(l)] = l;
    }
    spec.positions = std::move(positions);
    return spec;
}

size_t ResidualCapture::vector_count() const {
    return spec.streams.size() * spec.layers.size() * spec.positions.size();
}

namespace {

size_t index_of(const std::vector<Stream>& v, Stream s) {
    auto it = std::find(v.begin(), v.end(), s);
    if (it == v.end()) {
        throw SpecError(std::string("stream not captured: ") + stream_name(s));
    }
    return static_cast<size_t>(it - v.begin());
}

template <typename T>
size_t index_of(const std::vector<T>& v, T x, const char* what) {
    auto it = std::find(v.begin(), v.end(), x);
    if (it == v.end()) {
        throw SpecError(std::string(what) + " not captured: " + std::to_string(x));
    }
    return static_cast<size_t>(it - v.begin());
}

}  // namespace

std::span<const float> ResidualCapture::vector_at(Stream s, int layer, int64_t position) const {
    const size_t si = index_of(spec.streams, s);
    const size_t li = index_of(spec.layers, layer, "layer");
    const size_t pi = index_of(spec.positions, position, "position");
    const size_t d = static_cast<size_t>(model_info.hidden_dim);
    const size_t idx = ((si * spec.layers.size() + li) * spec.positions.size() + pi) * d;
    return {data.data() + idx, d};
}

std::span<float> ResidualCapture::vector_at_mut(Stream s, int layer, int64_t position) {
    auto c = static_cast<const ResidualCapture*>(this)->vector_at(s, layer, position);
    return {data.data() + (c.data() - data.data()), c.size()};
}

bool ResidualCapture::all_finite() const {
    return std::all_of(data.begin(), data.end(), [](float v) { return std::isfinite(v); });
}

bool ResidualCapture::is_full_residual_patch() const {
    if (spec.positions.size() != 1) {
        return false;
    }
    if (std::find(spec.streams.begin(), spec.streams.end(), Stream::residual_post_layer) ==
        spec.streams.end()) {
        return false;
    }
    if (static_cast<int>(spec.layers.size()) != model_info.num_layers) {
        return false;
    }
    for (int l = 0; l < model_info.num_layers; ++l) {
        if (spec.layers[static_cast<size_t>(l)] != l) {
            return false;
        }
    }
    return true;
}

int64_t ResidualCapture::single_position() const {
    if (spec.positions.size() != 1) {
        throw PatchError("capture does not hold a single source position");
    }
    return spec.positions[0];
}

void GenerationParams::validate() const {
    if (max_new_tokens < 1) {
        throw SpecError("max_new_tokens must be >= 1");
    }
    if (num_samples < 1) {
        throw SpecError("num_samples must be >= 1");
    }
    if (temperature < 0.0) {
        throw SpecError("temperature must be >= 0");
    }
}

}  // namespace parascope
