#pragma once

#include <memory>
#include <string>
#include <vector>

#include "parascope/adapter.hpp"
#include "parascope/chat.hpp"
#include "parascope/config.hpp"
#include "parascope/embedder.hpp"
#include "parascope/evaluation.hpp"
#include "parascope/tae_client.hpp"

namespace parascope {

// Artifact layout under one run directory. Each stage reads its
// prerequisites from here and writes its own outputs here.
struct RunPaths {
    std::string out_dir;

    std::string prompts() const;
    std::string records() const;
    std::string outlines() const;
    std::string boundary_features() const;   // feature shard: raw sublayer diffs + targets
    std::string boundary_residuals() const;  // capture shard: full residual patches
    std::string prompt_features() const;     // feature shard at the prompt-end boundary
    std::string boundary_stats() const;
    std::string prompt_stats() const;
    std::string paragraph_map() const;
    std::string outline_map() const;
    std::string decodes() const;
    std::string baselines() const;
    std::string scores() const;
    std::string judgments() const;
    std::string experiment(const std::string& name) const;
    std::string report_dir() const;
};

struct CommandOptions {
    bool resume = true;   // skip record_ids already present in the stage output
    int64_t limit = -1;   // cap on records considered by the stage; negative = no cap
};

// Client factories shared by the commands and the tests.
std::unique_ptr<ModelAdapter> make_subject(const RunConfig& config);
std::unique_ptr<ChatClient> make_chat_client(const ClientPreset& preset, const std::string& role);
std::unique_ptr<TextEmbedder> make_embedder(const ClientPreset& preset);
std::unique_ptr<TextAutoencoder> make_autoencoder(const ClientPreset& preset);
// Null when the preset kind is "none" (the learned metric is skipped).
std::unique_ptr<PairScorer> make_pair_scorer(const ClientPreset& preset);

// The composite id scoring and judging key their rows on.
std::string boundary_key(const std::string& record_id, int boundary_index);

// Runs one pipeline stage. `kind` selects the variant for train-map
// (paragraph|outline), decode (continuation|tae) and baseline
// (blind|cheat-k|regen|autodecode; empty means the whole ladder); the other
// commands take no kind. A missing prerequisite artifact raises StorageError
// naming the command that produces it; unknown names raise ConfigError.
void run_command(const std::string& name, const std::string& kind, const RunConfig& config,
                 const CommandOptions& opts);

const std::vector<std::string>& command_names();

}  // namespace parascope
