#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "parascope/adapter.hpp"
#include "parascope/jsonl.hpp"

namespace parascope {

// One labeled feature vector, optionally paired with its training target.
struct FeatureRecord {
    std::string record_id;
    std::vector<float> features;
    std::optional<std::vector<float>> target_embedding;
    std::string split;  // "train", "val" or "test"

    bool operator==(const FeatureRecord&) const = default;
};

// A shard is a directory: manifest.json describes the payload shape,
// data.bin holds raw little-endian float32 vectors, index.jsonl holds one
// row per record with byte offsets into data.bin.
struct ShardManifest {
    int schema_version = 1;
    std::string kind;  // "feature" or "capture"
    int64_t dim = 0;   // feature length (feature shards); hidden_dim (capture shards)
    std::optional<ModelInfo> model_info;   // capture shards
    std::optional<CaptureSpec> capture_spec;  // capture shards: layers/streams; positions vary per record
    std::string stats_ref;  // path of the stats file used/produced, empty if none
    bool closed = false;

    Json to_json() const;
    static ShardManifest from_json(const Json& j);
};

class ShardWriter {
public:
    // resume = false requires the directory to be absent or empty; resume =
    // true reopens an existing shard, validates the manifest matches, and
    // truncates any torn tail in data.bin past the last indexed record.
    ShardWriter(const std::string& dir, ShardManifest manifest, bool resume = false);
    ~ShardWriter();

    void append(const FeatureRecord& rec);
    // Capture payload is the raw capture.data block; positions stored per record.
    void append_capture(const std::string& record_id, const ResidualCapture& cap);

    bool contains(const std::string& record_id) const;
    int64_t count() const;
    void close();  // marks the manifest closed; later appends are storage errors

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

class ShardReader {
public:
    explicit ShardReader(const std::string& dir);
    ~ShardReader();

    const ShardManifest& manifest() const;
    int64_t count() const;
    std::string record_id(int64_t i) const;

    FeatureRecord read_feature(int64_t i) const;
    ResidualCapture read_capture(int64_t i) const;

    // Indices in stored order, optionally filtered by split.
    std::vector<int64_t> indices(const std::optional<std::string>& split = std::nullopt) const;
    std::optional<int64_t> find(const std::string& record_id) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace parascope
