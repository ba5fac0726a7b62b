#include "parascope/linear_map.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <numeric>

#include "parascope/metrics.hpp"
#include "parascope/util.hpp"

namespace parascope {

namespace {

using MatrixRM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

}  // namespace

LayerSelection LayerSelection::last_n(const ModelInfo& info, int n) {
    if (info.num_layers < 1) throw ConfigError("model has no layers");
    if (n < 1) throw ConfigError("layer selection needs at least one layer");
    LayerSelection sel;
    const int count = std::min(n, info.num_layers);
    for (int l = info.num_layers - count; l < info.num_layers; ++l) sel.layers.push_back(l);
    return sel;
}

int64_t LayerSelection::feature_dim(int hidden_dim) const {
    return static_cast<int64_t>(layers.size()) * static_cast<int64_t>(streams.size()) * hidden_dim;
}

void to_json(Json& j, const LayerSelection& s) {
    std::vector<std::string> stream_names;
    for (Stream st : s.streams) stream_names.emplace_back(stream_name(st));
    j = Json{{"layers", s.layers}, {"streams", stream_names}};
}

void from_json(const Json& j, LayerSelection& s) {
    try {
        s.layers = j.at("layers").get<std::vector<int>>();
        s.streams.clear();
        for (const auto& name : j.at("streams").get<std::vector<std::string>>())
            s.streams.push_back(stream_from_name(name));
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad layer selection: ") + e.what());
    }
}

std::vector<float> build_raw_features(const ResidualCapture& capture,
                                      const LayerSelection& selection, int64_t position) {
    if (selection.layers.empty() || selection.streams.empty())
        throw FeatureError("layer selection is empty");
    const int64_t pos = position < 0 ? capture.single_position() : position;

    const auto has = [](const auto& xs, auto x) {
        return std::find(xs.begin(), xs.end(), x) != xs.end();
    };
    std::vector<float> out;
    out.reserve(static_cast<size_t>(selection.feature_dim(capture.model_info.hidden_dim)));
    for (int layer : selection.layers) {
        for (Stream stream : selection.streams) {
            if (!has(capture.spec.layers, layer) || !has(capture.spec.streams, stream) ||
                !has(capture.spec.positions, pos))
                throw FeatureError("capture is missing sublayer (" +
                                   std::string(stream_name(stream)) + ", layer " +
                                   std::to_string(layer) + ") at position " + std::to_string(pos));
            std::span<const float> v = capture.vector_at(stream, layer, pos);
            out.insert(out.end(), v.begin(), v.end());
        }
    }
    return out;
}

std::vector<float> build_features(const ResidualCapture& capture, const LayerSelection& selection,
                                  const NormStats& stats, int64_t position) {
    std::vector<float> raw = build_raw_features(capture, selection, position);
    if (stats.dim() != static_cast<int64_t>(raw.size()))
        throw FeatureError("normalization stats dimension " + std::to_string(stats.dim()) +
                           " does not match feature dimension " + std::to_string(raw.size()));
    return stats.normalize(raw);
}

void LinearMap::validate() const {
    if (output_dim != kTaeDim)
        throw MapError("map output dimension must be " + std::to_string(kTaeDim));
    if (feature_dim <= 0 || hidden_dim <= 0) throw MapError("map has empty dimensions");
    if (selection.feature_dim(hidden_dim) != feature_dim)
        throw MapError("selection implies feature dimension " +
                       std::to_string(selection.feature_dim(hidden_dim)) + " but map holds " +
                       std::to_string(feature_dim));
    if (static_cast<int64_t>(weight.size()) != static_cast<int64_t>(output_dim) * feature_dim)
        throw MapError("weight size does not match output_dim x feature_dim");
    if (static_cast<int>(bias.size()) != output_dim) throw MapError("bias size mismatch");
    for (float w : weight)
        if (!std::isfinite(w)) throw MapError("weight contains non-finite entries");
    for (float b : bias)
        if (!std::isfinite(b)) throw MapError("bias contains non-finite entries");
}

EmbeddingVector predict_embedding(std::span<const float> features, const LinearMap& map) {
    if (static_cast<int64_t>(features.size()) != map.feature_dim)
        throw MapError("feature length " + std::to_string(features.size()) +
                       " does not match map feature dimension " + std::to_string(map.feature_dim));

    Eigen::Map<const MatrixRM> W(map.weight.data(), map.output_dim, map.feature_dim);
    Eigen::Map<const Eigen::VectorXf> x(features.data(), static_cast<Eigen::Index>(features.size()));
    Eigen::Map<const Eigen::VectorXf> b(map.bias.data(), map.output_dim);
    Eigen::VectorXf y = W * x + b;

    EmbeddingVector out;
    out.values.assign(y.data(), y.data() + y.size());
    out.space_id = map.space_id;
    return out;
}

std::string decode_embedding(const EmbeddingVector& embedding, TextAutoencoder& tae) {
    if (static_cast<int>(embedding.values.size()) != kTaeDim)
        throw DecodeError("embedding length " + std::to_string(embedding.values.size()) +
                          " != " + std::to_string(kTaeDim));
    if (embedding.space_id != tae.space_id())
        throw CompatibilityError("embedding space '" + embedding.space_id +
                                 "' does not match the autoencoder space '" + tae.space_id() + "'");
    return tae.decode(embedding.values);
}

std::vector<MapBlockNorm> map_layer_norms(const LinearMap& map) {
    map.validate();
    const int d = map.hidden_dim;
    std::vector<MapBlockNorm> blocks;
    int64_t col = 0;
    for (int layer : map.selection.layers) {
        for (Stream stream : map.selection.streams) {
            double sq = 0.0;
            for (int row = 0; row < map.output_dim; ++row) {
                const float* base = map.weight.data() + static_cast<int64_t>(row) * map.feature_dim;
                for (int64_t c = col; c < col + d; ++c) {
                    const double w = static_cast<double>(base[c]);
                    sq += w * w;
                }
            }
            blocks.push_back({layer, stream, std::sqrt(sq)});
            col += d;
        }
    }
    return blocks;
}

void TrainConfig::validate() const {
    if (batch_size < 1) throw ConfigError("batch_size must be positive");
    if (learning_rate <= 0) throw ConfigError("learning_rate must be positive");
    if (lr_decay_per_epoch <= 0) throw ConfigError("lr_decay_per_epoch must be positive");
    if (weight_decay < 0) throw ConfigError("weight_decay must be non-negative");
    if (epochs < 1) throw ConfigError("epochs must be at least 1");
}

void to_json(Json& j, const TrainConfig& c) {
    j = Json{{"batch_size", c.batch_size},
             {"learning_rate", c.learning_rate},
             {"lr_decay_per_epoch", c.lr_decay_per_epoch},
             {"weight_decay", c.weight_decay},
             {"epochs", c.epochs},
             {"shuffle_seed", c.shuffle_seed}};
}

void from_json(const Json& j, TrainConfig& c) {
    try {
        c.batch_size = j.at("batch_size").get<int>();
        c.learning_rate = j.at("learning_rate").get<double>();
        c.lr_decay_per_epoch = j.at("lr_decay_per_epoch").get<double>();
        c.weight_decay = j.at("weight_decay").get<double>();
        c.epochs = j.at("epochs").get<int>();
        if (j.contains("shuffle_seed")) c.shuffle_seed = j.at("shuffle_seed").get<uint64_t>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad train config: ") + e.what());
    }
}

Json TrainReport::to_json() const {
    return Json{{"train_loss", train_loss}, {"val_loss", val_loss},
                {"epoch_lr", epoch_lr},     {"train_count", train_count},
                {"val_count", val_count},   {"final_val_cosine", final_val_cosine}};
}

std::string TrainReport::digest() const { return hex64(fnv1a64(to_json().dump())); }

namespace {

struct Dataset {
    MatrixRM x;  // n x D
    MatrixRM y;  // n x K
};

Dataset load_dataset(std::span<const FeatureRecord> records, int64_t feature_dim,
                     const char* which) {
    Dataset d;
    d.x.resize(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(feature_dim));
    d.y.resize(static_cast<Eigen::Index>(records.size()), kTaeDim);
    for (size_t i = 0; i < records.size(); ++i) {
        const FeatureRecord& r = records[i];
        if (static_cast<int64_t>(r.features.size()) != feature_dim)
            throw DataError(std::string(which) + " record '" + r.record_id + "' has " +
                            std::to_string(r.features.size()) + " features, expected " +
                            std::to_string(feature_dim));
        if (!r.target_embedding)
            throw DataError(std::string(which) + " record '" + r.record_id +
                            "' has no target embedding");
        if (static_cast<int>(r.target_embedding->size()) != kTaeDim)
            throw DataError(std::string(which) + " record '" + r.record_id +
                            "' target has wrong length");
        for (int64_t c = 0; c < feature_dim; ++c)
            d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                r.features[static_cast<size_t>(c)];
        for (int c = 0; c < kTaeDim; ++c)
            d.y(static_cast<Eigen::Index>(i), c) = (*r.target_embedding)[static_cast<size_t>(c)];
    }
    return d;
}

double mse_of(const MatrixRM& pred, const MatrixRM& target) {
    const double n = static_cast<double>(pred.rows()) * static_cast<double>(pred.cols());
    return (pred - target).cast<double>().squaredNorm() / n;
}

LinearMap make_map(const MatrixRM& w, const Eigen::VectorXf& b, const MapSpec& spec,
                   int64_t feature_dim) {
    LinearMap map;
    map.weight.assign(w.data(), w.data() + w.size());
    map.bias.assign(b.data(), b.data() + b.size());
    map.selection = spec.selection;
    map.feature_dim = feature_dim;
    map.output_dim = kTaeDim;
    map.hidden_dim = spec.hidden_dim;
    map.space_id = spec.space_id;
    map.stats_digest = spec.stats_digest;
    return map;
}

}  // namespace

TrainResult train_linear_map(std::span<const FeatureRecord> train,
                             std::span<const FeatureRecord> val, const TrainConfig& config,
                             const MapSpec& spec) {
    config.validate();
    if (train.empty()) throw DataError("training set is empty");
    if (spec.hidden_dim < 1) throw ConfigError("map spec needs the model hidden dimension");
    const int64_t D = spec.selection.feature_dim(spec.hidden_dim);

    Dataset tr = load_dataset(train, D, "train");
    Dataset va = load_dataset(val, D, "val");
    const Eigen::Index n = tr.x.rows();

    MatrixRM w = MatrixRM::Zero(kTaeDim, D);
    Eigen::VectorXf b = Eigen::VectorXf::Zero(kTaeDim);
    MatrixRM mw = MatrixRM::Zero(kTaeDim, D), vw = MatrixRM::Zero(kTaeDim, D);
    Eigen::VectorXf mb = Eigen::VectorXf::Zero(kTaeDim), vb = Eigen::VectorXf::Zero(kTaeDim);
    int64_t step = 0;

    TrainReport report;
    report.train_count = static_cast<int64_t>(train.size());
    report.val_count = static_cast<int64_t>(val.size());

    std::shared_ptr<TrainResult> checkpoint;
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const double lr = config.learning_rate * std::pow(config.lr_decay_per_epoch, epoch);
        Rng rng = make_rng(mix64(config.shuffle_seed, static_cast<uint64_t>(epoch)));
        std::shuffle(order.begin(), order.end(), rng);

        double epoch_sq = 0.0;
        for (Eigen::Index start = 0; start < n; start += config.batch_size) {
            const Eigen::Index bs = std::min<Eigen::Index>(config.batch_size, n - start);
            MatrixRM xb(bs, D), yb(bs, kTaeDim);
            for (Eigen::Index i = 0; i < bs; ++i) {
                xb.row(i) = tr.x.row(order[static_cast<size_t>(start + i)]);
                yb.row(i) = tr.y.row(order[static_cast<size_t>(start + i)]);
            }

            MatrixRM resid = xb * w.transpose() - yb;
            resid.rowwise() += b.transpose();
            const double denom = static_cast<double>(bs) * static_cast<double>(kTaeDim);
            epoch_sq += resid.cast<double>().squaredNorm();

            const float scale = static_cast<float>(2.0 / denom);
            MatrixRM gw = scale * (resid.transpose() * xb);
            Eigen::VectorXf gb = scale * resid.colwise().sum().transpose();

            ++step;
            const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
            const float flr = static_cast<float>(lr);
            const float f1 = static_cast<float>(kBeta1), f2 = static_cast<float>(kBeta2);

            mw = f1 * mw + (1.0f - f1) * gw;
            vw = f2 * vw + (1.0f - f2) * gw.cwiseProduct(gw);
            mb = f1 * mb + (1.0f - f1) * gb;
            vb = f2 * vb + (1.0f - f2) * gb.cwiseProduct(gb);

            const float c1 = static_cast<float>(1.0 / bc1);
            const float c2 = static_cast<float>(1.0 / bc2);
            w.array() -= flr * (c1 * mw.array()) /
                         ((c2 * vw.array()).sqrt() + static_cast<float>(kAdamEps));
            b.array() -= flr * (c1 * mb.array()) /
                         ((c2 * vb.array()).sqrt() + static_cast<float>(kAdamEps));
            // Decoupled weight decay, bias exempt.
            w *= (1.0f - static_cast<float>(lr * config.weight_decay));
        }

        const double train_loss =
            epoch_sq / (static_cast<double>(n) * static_cast<double>(kTaeDim));
        double val_loss = 0.0;
        if (va.x.rows() > 0) {
            MatrixRM pred = va.x * w.transpose();
            pred.rowwise() += b.transpose();
            val_loss = mse_of(pred, va.y);
        }
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
            throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                                      " (loss is not finite)",
                                  checkpoint, epoch);
        if (!w.allFinite() || !b.allFinite())
            throw DivergenceError("training diverged at epoch " + std::to_string(epoch) +
                                      " (weights are not finite)",
                                  checkpoint, epoch);

        report.train_loss.push_back(train_loss);
        if (va.x.rows() > 0) report.val_loss.push_back(val_loss);
        report.epoch_lr.push_back(lr);

        auto snap = std::make_shared<TrainResult>();
        snap->map = make_map(w, b, spec, D);
        snap->report = report;
        checkpoint = std::move(snap);
    }

    TrainResult result = *checkpoint;
    if (va.x.rows() > 0) {
        MatrixRM pred = va.x * w.transpose();
        pred.rowwise() += b.transpose();
        double cos_sum = 0.0;
        for (Eigen::Index i = 0; i < va.x.rows(); ++i) {
            Eigen::RowVectorXf p = pred.row(i);
            Eigen::RowVectorXf t = va.y.row(i);
            cos_sum += cosine(std::span<const float>(p.data(), static_cast<size_t>(p.size())),
                              std::span<const float>(t.data(), static_cast<size_t>(t.size())));
        }
        result.report.final_val_cosine = cos_sum / static_cast<double>(va.x.rows());
    }
    result.map.validate();
    return result;
}

void save_linear_map(const TrainResult& result, const std::string& dir) {
    result.map.validate();
    std::filesystem::create_directories(dir);

    std::string blob;
    blob.resize((result.map.weight.size() + result.map.bias.size()) * sizeof(float));
    std::memcpy(blob.data(), result.map.weight.data(), result.map.weight.size() * sizeof(float));
    std::memcpy(blob.data() + result.map.weight.size() * sizeof(float), result.map.bias.data(),
                result.map.bias.size() * sizeof(float));
    write_file(dir + "/weights.bin", blob);

    Json sidecar{{"schema_version", 1},
                 {"output_dim", result.map.output_dim},
                 {"feature_dim", result.map.feature_dim},
                 {"hidden_dim", result.map.hidden_dim},
                 {"selection", result.map.selection},
                 {"space_id", result.map.space_id},
                 {"stats_digest", result.map.stats_digest},
                 {"weight_digest", hex64(fnv1a64(std::string_view(blob)))},
                 {"report_digest", result.report.digest()},
                 {"report", result.report.to_json()}};
    write_file(dir + "/map.json", sidecar.dump(2) + "\n");
}

LoadedMap load_linear_map(const std::string& dir) {
    Json sidecar;
    try {
        sidecar = Json::parse(read_file(dir + "/map.json"));
    } catch (const Json::exception& e) {
        throw FormatError(dir + "/map.json: " + e.what());
    }

    LoadedMap out;
    std::string want_digest;
    try {
        out.map.output_dim = sidecar.at("output_dim").get<int>();
        out.map.feature_dim = sidecar.at("feature_dim").get<int64_t>();
        out.map.hidden_dim = sidecar.at("hidden_dim").get<int>();
        out.map.selection = sidecar.at("selection").get<LayerSelection>();
        out.map.space_id = sidecar.at("space_id").get<std::string>();
        out.map.stats_digest = sidecar.at("stats_digest").get<std::string>();
        out.report = sidecar.at("report");
        want_digest = sidecar.at("weight_digest").get<std::string>();
    } catch (const Json::exception& e) {
        throw FormatError(dir + "/map.json: " + e.what());
    }

    const std::string blob = read_file(dir + "/weights.bin");
    if (hex64(fnv1a64(std::string_view(blob))) != want_digest)
        throw StorageError(dir + "/weights.bin does not match its recorded digest");

    const size_t weight_count =
        static_cast<size_t>(out.map.output_dim) * static_cast<size_t>(out.map.feature_dim);
    const size_t expected = (weight_count + static_cast<size_t>(out.map.output_dim)) * sizeof(float);
    if (blob.size() != expected)
        throw StorageError(dir + "/weights.bin holds " + std::to_string(blob.size()) +
                           " bytes, expected " + std::to_string(expected));

    out.map.weight.resize(weight_count);
    out.map.bias.resize(static_cast<size_t>(out.map.output_dim));
    std::memcpy(out.map.weight.data(), blob.data(), weight_count * sizeof(float));
    std::memcpy(out.map.bias.data(), blob.data() + weight_count * sizeof(float),
                out.map.bias.size() * sizeof(float));
    out.map.validate();
    return out;
}

}  // namespace parascope
