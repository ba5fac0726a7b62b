#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parascope/adapter.hpp"
#include "parascope/errors.hpp"
#include "parascope/jsonl.hpp"
#include "parascope/shard.hpp"
#include "parascope/tae_client.hpp"
#include "parascope/welford.hpp"

namespace parascope {

// Which sublayer vectors feed the map, concatenated by layer then stream.
struct LayerSelection {
    std::vector<int> layers;
    std::vector<Stream> streams = {Stream::attn_out_diff, Stream::mlp_out_diff};

    // The last n layers of the model (all of them when the model is shallower).
    static LayerSelection last_n(const ModelInfo& info, int n = 12);

    int64_t feature_dim(int hidden_dim) const;
    bool operator==(const LayerSelection&) const = default;
};

void to_json(Json& j, const LayerSelection& s);
void from_json(const Json& j, LayerSelection& s);

// Concatenated sublayer vectors in selection order, straight from the
// capture. position < 0 means the capture's single position.
std::vector<float> build_raw_features(const ResidualCapture& capture,
                                      const LayerSelection& selection, int64_t position = -1);

// Raw features normalized dimension-wise by the stats. The stats must have
// been accumulated over raw features of the same selection.
std::vector<float> build_features(const ResidualCapture& capture, const LayerSelection& selection,
                                  const NormStats& stats, int64_t position = -1);

struct EmbeddingVector {
    std::vector<float> values;  // length kTaeDim
    std::string space_id;
};

struct LinearMap {
    std::vector<float> weight;  // row-major, output_dim x feature_dim
    std::vector<float> bias;    // output_dim
    LayerSelection selection;
    int64_t feature_dim = 0;
    int output_dim = kTaeDim;
    int hidden_dim = 0;         // model width; fixes the column block layout
    std::string space_id;       // embedding space the targets lived in
    std::string stats_digest;   // identity of the normalization stats

    void validate() const;  // MapError on shape mismatch or non-finite entries
};

// weight . features + bias. MapError on a feature-length mismatch.
EmbeddingVector predict_embedding(std::span<const float> features, const LinearMap& map);

// Decodes through the autoencoder client after checking the embedding was
// produced for that client's space.
std::string decode_embedding(const EmbeddingVector& embedding, TextAutoencoder& tae);

struct MapBlockNorm {
    int layer = 0;
    Stream stream = Stream::attn_out_diff;
    double norm = 0.0;  // Frobenius norm of that sublayer's weight columns
};

// Per-(layer, stream) Frobenius norms of the weight blocks; the squared
// norms sum to the squared norm of the whole matrix.
std::vector<MapBlockNorm> map_layer_norms(const LinearMap& map);

struct TrainConfig {
    int batch_size = 1024;
    double learning_rate = 2e-5;
    double lr_decay_per_epoch = 0.8;
    double weight_decay = 1e-7;
    int epochs = 10;
    uint64_t shuffle_seed = 0x5eed;

    void validate() const;  // ConfigError on non-positive values
};

void to_json(Json& j, const TrainConfig& c);
void from_json(const Json& j, TrainConfig& c);

struct TrainReport {
    std::vector<double> train_loss;  // one entry per epoch (mean squared error)
    std::vector<double> val_loss;    // empty when no validation records
    std::vector<double> epoch_lr;
    int64_t train_count = 0;
    int64_t val_count = 0;
    double final_val_cosine = 0.0;  // mean cosine(prediction, target) over val

    Json to_json() const;
    std::string digest() const;
};

struct TrainResult {
    LinearMap map;
    TrainReport report;
};

// Thrown when the loss stops being finite; carries the last epoch that was.
struct DivergenceError : TrainError {
    std::shared_ptr<TrainResult> checkpoint;  // null when epoch 0 already diverged
    int failed_epoch = 0;
    DivergenceError(const std::string& msg, std::shared_ptr<TrainResult> ckpt, int epoch)
        : TrainError(msg), checkpoint(std::move(ckpt)), failed_epoch(epoch) {}
};

// Everything about the map that is not learned from data.
struct MapSpec {
    LayerSelection selection;
    int hidden_dim = 0;
    std::string space_id;
    std::string stats_digest;
};

// Minimizes mean squared error between weight.features + bias and the target
// embeddings with adaptive-moment gradient descent; the learning rate decays
// by lr_decay_per_epoch each epoch and decoupled weight decay is applied.
TrainResult train_linear_map(std::span<const FeatureRecord> train,
                             std::span<const FeatureRecord> val, const TrainConfig& config,
                             const MapSpec& spec);

// The outline decoder trains the identical architecture; only the dataset
// (features at the prompt-end newline, outline-embedding targets) differs.
inline TrainResult train_outline_map(std::span<const FeatureRecord> train,
                                     std::span<const FeatureRecord> val, const TrainConfig& config,
                                     const MapSpec& spec) {
    return train_linear_map(train, val, config, spec);
}

// On-disk form: <dir>/weights.bin (raw little-endian float32, weight rows
// then bias) plus <dir>/map.json (shape, selection, space, digests, report).
void save_linear_map(const TrainResult& result, const std::string& dir);

struct LoadedMap {
    LinearMap map;
    Json report;
};
LoadedMap load_linear_map(const std::string& dir);

}  // namespace parascope
