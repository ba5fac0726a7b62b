#pragma once

#include <string>

#include "parascope/continuation.hpp"
#include "parascope/experiments.hpp"
#include "parascope/http_clients.hpp"
#include "parascope/jsonl.hpp"
#include "parascope/linear_map.hpp"
#include "parascope/tiny_model.hpp"

namespace parascope {

// Which client backs one pipeline role. Chat roles (prompt_writer,
// summarizer, judge) accept "stub" or "http"; embedding roles (embedder,
// autoencoder) accept "bow" or "http"; the pair scorer accepts "stub",
// "http" or "none" (metric skipped).
struct ClientPreset {
    std::string kind;
    HttpClientConfig http;  // consulted only when kind == "http"

    bool operator==(const ClientPreset&) const = default;
};

void to_json(Json& j, const ClientPreset& p);
void from_json(const Json& j, ClientPreset& p);

void to_json(Json& j, const HttpClientConfig& c);
void from_json(const Json& j, HttpClientConfig& c);

void to_json(Json& j, const TinyLmConfig& c);
void from_json(const Json& j, TinyLmConfig& c);

void to_json(Json& j, const ContinuationConfig& c);
void from_json(const Json& j, ContinuationConfig& c);

void to_json(Json& j, const SweepSampling& s);
void from_json(const Json& j, SweepSampling& s);

struct DatasetConfig {
    std::string corpus_path = "data/seed_corpus.txt";
    int chunk_min_chars = 500;
    int chunk_max_chars = 2000;
    int max_records = 200;       // generation records built from the prompt list
    double train_frac = 0.90;    // per-record split fractions; test is the rest
    double val_frac = 0.05;
    int client_retries = 1;      // prompt/outline chat retries before dropping
    int stats_sample_cap = 10000;  // feature vectors folded into the norm stats
    GenerationParams generation;   // subject-model sampling for the corpus

    void validate() const;
    bool operator==(const DatasetConfig&) const = default;
};

void to_json(Json& j, const DatasetConfig& c);
void from_json(const Json& j, DatasetConfig& c);

struct BaselineConfig {
    int cheat_k = 10;
    GenerationParams generation;  // shared by blind / cheat-k / regenerate

    void validate() const;
    bool operator==(const BaselineConfig&) const = default;
};

void to_json(Json& j, const BaselineConfig& c);
void from_json(const Json& j, BaselineConfig& c);

// One declarative file drives every pipeline stage. The digest of the whole
// config (seed included) is stamped into every artifact, so artifacts from
// different configurations never silently mix.
struct RunConfig {
    std::string out_dir = "runs/desk";
    uint64_t seed = 0;
    int workers = 1;

    std::string subject_kind = "tiny";  // bundled deterministic reference model
    TinyLmConfig tiny;

    ClientPreset prompt_writer{"stub", {}};
    ClientPreset summarizer{"stub", {}};
    ClientPreset judge{"stub", {}};
    ClientPreset embedder{"bow", {}};
    ClientPreset autoencoder{"bow", {}};
    ClientPreset pair_scorer{"stub", {}};

    DatasetConfig dataset;
    int map_last_layers = 12;   // sublayer-diff features come from the last n layers
    TrainConfig train;          // paragraph map
    TrainConfig outline_train;  // outline map
    ContinuationConfig decode;  // continuation decoding
    BaselineConfig baseline;
    // Empty k_values means "every k in [0, N]"; the scrub stage fills it.
    ScrubSpec scrub{
        "Write a piece, titled '{topic}', which includes a short introduction and approximately "
        "3 paragraphs.",
        "storm season",
        "river trade",
        {}};
    int sweep_window = 10;
    SweepSampling sweep;
    int judge_max_reasks = 1;

    void validate() const;  // ConfigError on any out-of-range knob
    Json to_json() const;
    std::string digest() const;  // 64-bit content hash of the serialized config
};

RunConfig config_from_json(const Json& j);

// Replaces every ${VAR} with the value of that environment variable.
// ConfigError when a referenced variable is unset.
std::string interpolate_env(const std::string& text);

// Reads, interpolates, parses and validates a config file.
RunConfig load_config(const std::string& path);

}  // namespace parascope
