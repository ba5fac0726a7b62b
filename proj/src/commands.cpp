#include "parascope/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <thread>

#include "parascope/baselines.hpp"
#include "parascope/continuation.hpp"
#include "parascope/dataset.hpp"
#include "parascope/errors.hpp"
#include "parascope/experiments.hpp"
#include "parascope/http_clients.hpp"
#include "parascope/linear_map.hpp"
#include "parascope/report.hpp"
#include "parascope/rubric.hpp"
#include "parascope/shard.hpp"
#include "parascope/stub_clients.hpp"
#include "parascope/tiny_model.hpp"
#include "parascope/util.hpp"
#include "parascope/welford.hpp"

namespace parascope {

namespace fs = std::filesystem;

std::string RunPaths::prompts() const { return out_dir + "/prompts.jsonl"; }
std::string RunPaths::records() const { return out_dir + "/records.jsonl"; }
std::string RunPaths::outlines() const { return out_dir + "/outlines.jsonl"; }
std::string RunPaths::boundary_features() const { return out_dir + "/captures/boundary_features"; }
std::string RunPaths::boundary_residuals() const {
    return out_dir + "/captures/boundary_residuals";
}
std::string RunPaths::prompt_features() const { return out_dir + "/captures/prompt_features"; }
std::string RunPaths::boundary_stats() const { return out_dir + "/stats/boundary_stats.json"; }
std::string RunPaths::prompt_stats() const { return out_dir + "/stats/prompt_stats.json"; }
std::string RunPaths::paragraph_map() const { return out_dir + "/maps/paragraph"; }
std::string RunPaths::outline_map() const { return out_dir + "/maps/outline"; }
std::string RunPaths::decodes() const { return out_dir + "/decodes.jsonl"; }
std::string RunPaths::baselines() const { return out_dir + "/baselines.jsonl"; }
std::string RunPaths::scores() const { return out_dir + "/scores.jsonl"; }
std::string RunPaths::judgments() const { return out_dir + "/judgments.jsonl"; }
std::string RunPaths::experiment(const std::string& name) const {
    return out_dir + "/experiments/" + name + ".json";
}
std::string RunPaths::report_dir() const { return out_dir + "/report"; }

std::unique_ptr<ModelAdapter> make_subject(const RunConfig& config) {
    if (config.subject_kind != "tiny")
        throw ConfigError("unknown subject_kind \"" + config.subject_kind + "\"");
    return std::make_unique<TinyLm>(config.tiny);
}

std::unique_ptr<ChatClient> make_chat_client(const ClientPreset& preset, const std::string& role) {
    if (preset.kind == "http") return std::make_unique<HttpChatClient>(preset.http);
    if (preset.kind == "stub") {
        if (role == "prompt_writer") return std::make_unique<StubPromptWriter>();
        if (role == "summarizer") return std::make_unique<StubOutliner>();
        if (role == "judge") return std::make_unique<StubJudge>();
        throw ConfigError("no stub chat client for role " + role);
    }
    throw ConfigError("unknown chat preset kind \"" + preset.kind + "\" for role " + role);
}

std::unique_ptr<TextEmbedder> make_embedder(const ClientPreset& preset) {
    if (preset.kind == "bow") return std::make_unique<BowEmbedder>();
    if (preset.kind == "http") return std::make_unique<HttpEmbedder>(preset.http);
    throw ConfigError("unknown embedder preset kind \"" + preset.kind + "\"");
}

std::unique_ptr<TextAutoencoder> make_autoencoder(const ClientPreset& preset) {
    if (preset.kind == "bow") return std::make_unique<BowAutoencoder>();
    if (preset.kind == "http") return std::make_unique<HttpTextAutoencoder>(preset.http);
    throw ConfigError("unknown autoencoder preset kind \"" + preset.kind + "\"");
}

std::unique_ptr<PairScorer> make_pair_scorer(const ClientPreset& preset) {
    if (preset.kind == "none") return nullptr;
    if (preset.kind == "stub") return std::make_unique<StubPairScorer>();
    if (preset.kind == "http") return std::make_unique<HttpPairScorer>(preset.http);
    throw ConfigError("unknown pair_scorer preset kind \"" + preset.kind + "\"");
}

std::string boundary_key(const std::string& record_id, int boundary_index) {
    return record_id + "#b" + std::to_string(boundary_index);
}

namespace {

[[noreturn]] void missing_artifact(const std::string& path, const std::string& producer) {
    throw StorageError("missing artifact " + path + "; run the `" + producer +
                       "` command first");
}

void require_file(const std::string& path, const std::string& producer) {
    if (!file_exists(path)) missing_artifact(path, producer);
}

void require_dir(const std::string& path, const std::string& producer) {
    if (!fs::exists(path)) missing_artifact(path, producer);
}

ArtifactHeader make_header(const std::string& command, const RunConfig& cfg) {
    ArtifactHeader h;
    h.command = command;
    h.config_digest = cfg.digest();
    h.seed = cfg.seed;
    return h;
}

uint64_t row_seed(const RunConfig& cfg, const std::string& key) {
    return mix64(cfg.seed, fnv1a64(key));
}

// Deterministic per-record split assignment, independent of record order.
std::string split_of(const RunConfig& cfg, const std::string& record_id) {
    const uint64_t h = mix64(mix64(cfg.seed, 0x5f117ULL), fnv1a64(record_id));
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    if (u < cfg.dataset.train_frac) return "train";
    if (u < cfg.dataset.train_frac + cfg.dataset.val_frac) return "val";
    return "test";
}

std::set<std::string> existing_keys(const std::string& path,
                                    const std::function<std::string(const Json&)>& key_of) {
    std::set<std::string> keys;
    if (!file_exists(path)) return keys;
    for (const Json& row : read_jsonl(path).rows) keys.insert(key_of(row));
    return keys;
}

// Caps work at `limit` distinct record ids, preserving first-seen order.
struct RecordLimiter {
    int64_t limit;
    std::vector<std::string> seen;

    explicit RecordLimiter(int64_t lim) : limit(lim) {}

    bool admit(const std::string& id) {
        if (limit < 0) return true;
        if (std::find(seen.begin(), seen.end(), id) != seen.end()) return true;
        if (static_cast<int64_t>(seen.size()) < limit) {
            seen.push_back(id);
            return true;
        }
        return false;
    }
};

// Runs work(job, worker) over all jobs with a bounded worker pool; results
// come back in job order so downstream writes stay deterministic.
template <typename Job, typename Result, typename Work>
std::vector<Result> map_ordered(const std::vector<Job>& jobs, int workers, Work&& work) {
    std::vector<Result> results(jobs.size());
    const int pool = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
    if (pool == 1) {
        for (size_t i = 0; i < jobs.size(); ++i) results[i] = work(jobs[i], 0);
        return results;
    }
    std::atomic<size_t> next{0};
    std::mutex error_mu;
    std::exception_ptr first_error;
    std::vector<std::thread> threads;
    threads.reserve(static_cast<size_t>(pool));
    for (int w = 0; w < pool; ++w) {
        threads.emplace_back([&, w] {
            while (true) {
                const size_t i = next.fetch_add(1);
                if (i >= jobs.size()) return;
                try {
                    results[i] = work(jobs[i], w);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

std::vector<GenerationRecord> load_records(const RunPaths& paths, int64_t limit) {
    require_file(paths.records(), "generate");
    std::vector<GenerationRecord> records;
    for (const Json& row : read_jsonl(paths.records()).rows) {
        if (limit >= 0 && static_cast<int64_t>(records.size()) >= limit) break;
        records.push_back(row.get<GenerationRecord>());
    }
    return records;
}

// source_record_id -> outline text, from the outline artifact's kept rows.
std::map<std::string, std::string> load_outline_texts(const std::string& path) {
    std::map<std::string, std::string> outlines;
    if (!file_exists(path)) return outlines;
    for (const Json& row : read_jsonl(path).rows) {
        if (!row.contains("outline")) continue;
        const auto rec = row.at("outline").get<OutlineRecord>();
        outlines[rec.source_record_id] = rec.outline_text;
    }
    return outlines;
}

struct LoadedStats {
    NormStats stats;
    std::string digest;  // identity the trained map records as stats_digest
};

LoadedStats load_stats_file(const std::string& path, const std::string& producer) {
    require_file(path, producer);
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const Json::exception& e) {
        throw FormatError("stats file " + path + " is not valid json: " + e.what());
    }
    if (!j.contains("stats")) throw FormatError("stats file " + path + " has no stats payload");
    LoadedStats out;
    out.stats = NormStats::from_json(j.at("stats"));
    out.digest = hex64(fnv1a64(j.at("stats").dump()));
    return out;
}

void write_pretty_json(const std::string& path, const Json& j) {
    write_file(path, j.dump(2) + "\n");
}

// A boundary can only be captured, decoded and evaluated when a paragraph
// actually follows it; generations that stop on the boundary token leave an
// empty trailing paragraph with nothing to predict.
bool evaluable_boundary(const GenerationRecord& record, size_t i) {
    return !record.paragraph_after_boundary(i).empty();
}

// Splits a composite "record#bN" key back into (record_id, boundary_index).
std::pair<std::string, int> parse_boundary_key(const std::string& key) {
    const size_t at = key.rfind("#b");
    if (at == std::string::npos)
        throw FormatError("feature record id '" + key + "' has no #b<boundary> suffix");
    return {key.substr(0, at), std::stoi(key.substr(at + 2))};
}

// ---------------------------------------------------------------------------
// prompts: corpus chunks -> synthetic writing prompts
// ---------------------------------------------------------------------------

void cmd_prompts(const RunConfig& cfg, const CommandOptions& opts) {
    const RunPaths paths{cfg.out_dir};
    if (!file_exists(cfg.dataset.corpus_path))
        throw StorageError("corpus file not found: " + cfg.dataset.corpus_path +
                           " (set dataset.corpus_path)");
    std::vector<std::string> chunks = chunk_corpus_text(
        read_file(cfg.dataset.corpus_path), static_cast<size_t>(cfg.dataset.chunk_min_chars),
        static_cast<size_t>(cfg.dataset.chunk_max_chars));
    if (opts.limit >= 0 && static_cast<int64_t>(chunks.size()) > opts.limit)
        chunks.resize(static_cast<size_t>(opts.limit));

    fs::create_directories(cfg.out_dir);
    const std::set<std::string> done =
        opts.resume ? existing_keys(paths.prompts(),
                                    [](const Json& row) { return row.value("chunk_ref", ""); })
                    : std::set<std::string>{};
    JsonlWriter writer(paths.prompts(), make_header("prompts", cfg), opts.resume);

    struct Job {
        std::string chunk_ref;
        std::string chunk;
    };
    std::vector<Job> jobs;
    for (size_t i = 0; i < chunks.size(); ++i) {
        char ref[32];
        std::snprintf(ref, sizeof(ref), "chunk-%05zu", i);
        if (!done.count(ref)) jobs.push_back({ref, chunks[i]});
    }

    std::vector<std::unique_ptr<ChatClient>> clients;
    for (int w = 0; w < std::max(1, cfg.workers); ++w)
        clients.push_back(make_chat_client(cfg.prompt_writer, "prompt_writer"));

    const auto results = map_ordered<Job, PromptSynthesisResult>(
        jobs, cfg.workers, [&](const Job& job, int worker) {
            return synthesize_prompt(job.chunk, job.chunk_ref, *clients[static_cast<size_t>(worker)],
                                     cfg.dataset.client_retries);
        });

    int64_t kept = 0, dropped = 0;
    for (size_t i = 0; i < jobs.size(); ++i) {
        Json row{{"chunk_ref", jobs[i].chunk_ref}};
        if (results[i].record) {
            row["prompt"] = *results[i].record;
            ++kept;
        } else {
            row["dropped"] = true;
            row["reason"] = results[i].drop_reason;
            ++dropped;
        }
        writer.write_row(row);
    }
    std::printf("[prompts] chunks=%zu new=%zu kept=%lld dropped=%lld\n", chunks.size(), jobs.size(),
                static_cast<long long>(kept), static_cast<long long>(dropped));
}

// ---------------------------------------------------------------------------
// generate: prompts -> subject-model generations split at boundaries
// ---------------------------------------------------------------------------

void cmd_generate(const RunConfig& cfg, const CommandOptions& opts) {
    const RunPaths paths{cfg.out_dir};
    require_file(paths.prompts(), "prompts");
    std::vector<PromptRecord> prompts;
    for (const Json& row : read_jsonl(paths.prompts()).rows)
        if (row.contains("prompt")) prompts.push_back(row.at("prompt").get<PromptRecord>());
    int64_t cap = cfg.dataset.max_records;
    if (opts.limit >= 0) cap = std::min<int64_t>(cap, opts.limit);
    if (static_cast<int64_t>(prompts.size()) > cap) prompts.resize(static_cast<size_t>(cap));

    const std::set<std::string> done =
        opts.resume ? existing_keys(paths.records(),
                                    [](const Json& row) { return row.value("record_id", ""); })
                    : std::set<std::string>{};
    JsonlWriter writer(paths.records(), make_header("generate", cfg), opts.resume);
    auto adapter = make_subject(cfg);

    int64_t built = 0, flagged = 0;
    for (const PromptRecord& prompt : prompts) {
        const std::string rid = "gen-" + hex64(fnv1a64(prompt.prompt_id));
        if (done.count(rid)) continue;
        GenerationRecord record = build_generation_record(prompt, *adapter,
                                                          cfg.dataset.generation,
                                                          row_seed(cfg, prompt.prompt_id));
        record.validate();
        writer.write_row(record);
        ++built;
        if (record.flagged_single_paragraph) ++flagged;
    }
    std::printf("[generate] prompts=%zu new=%lld flagged_single_paragraph=%lld\n", prompts.size(),
                static_cast<long long>(built), static_cast<long long>(flagged));
}

// ---------------------------------------------------------------------------
// outline: generations -> bullet-point outline summaries
// ---------------------------------------------------------------------------

void cmd_outline(const RunConfig& cfg, const CommandOptions& opts) {
    const RunPaths paths{cfg.out_dir};
    const std::vector<GenerationRecord> records = load_records(paths, opts.limit);
    const std::set<std::string> done =
        opts.resume
            ? existing_keys(paths.outlines(),
                            [](const Json& row) { return row.value("source_record_id", ""); })
            : std::set<std::string>{};
    JsonlWriter writer(paths.outlines(), make_header("outline", cfg), opts.resume);

    std::vector<const GenerationRecord*> jobs;
    for (const GenerationRecord& r : records)
        if (!done.count(r.record_id)) jobs.push_back(&r);

    std::vector<std::unique_ptr<ChatClient>> clients;
    for (int w = 0; w < std::max(1, cfg.workers); ++w)
        clients.push_back(make_chat_client(cfg.summarizer, "summarizer"));

    const auto results = map_ordered<const GenerationRecord*, OutlineSynthesisResult>(
        jobs, cfg.workers, [&](const GenerationRecord* rec, int worker) {
            return make_outline(*rec, *clients[static_cast<size_t>(worker)],
                                cfg.dataset.client_retries);
        });

    int64_t kept = 0, dropped = 0;
    for (size_t i = 0; i < jobs.size(); ++i) {
        Json row{{"source_record_id", jobs[i]->record_id}};
        if (results[i].record) {
            row["outline"] = *results[i].record;
            ++kept;
        } else {
            row["dropped"] = true;
            row["reason"] = results[i].drop_reason;
            ++dropped;
        }
        writer.write_row(row);
    }
    std::printf("[outline] records=%zu new=%zu kept=%lld dropped=%lld\n", records.size(),
                jobs.size(), static_cast<long long>(kept), static_cast<long long>(dropped));
}

// ---------------------------------------------------------------------------
// capture: per-boundary sublayer-diff features (+ targets) and full residual
// patches; prompt-end features when outlines are available
// ---------------------------------------------------------------------------

void cmd_capture(const RunConfig& cfg, const CommandOptions& opts) {
    const RunPaths paths{cfg.out_dir};
    const std::vector<GenerationRecord> records = load_records(paths, opts.limit);
    auto adapter = make_subject(cfg);
    auto tae = make_autoencoder(cfg.autoencoder);
    const ModelInfo& info = adapter->info();
    const LayerSelection selection = LayerSelection::last_n(info, cfg.map_last_layers);

    if (!opts.resume) {
        fs::remove_all(paths.boundary_features());
        fs::remove_all(paths.boundary_residuals());
        fs::remove_all(paths.prompt_features());
    }

    ShardManifest feature_manifest;
    feature_manifest.kind = "feature";
    feature_manifest.dim = selection.feature_dim(info.hidden_dim);
    feature_manifest.model_info = info;
    feature_manifest.capture_spec = CaptureSpec{selection.streams, selection.layers, {}};

    ShardManifest residual_manifest;
    residual_manifest.kind = "capture";
    residual_manifest.dim = info.hidden_dim;
    residual_manifest.model_info = info;
    std::vector<int> all_layers(static_cast<size_t>(info.num_layers));
    std::iota(all_layers.begin(), all_layers.end(), 0);
    residual_manifest.capture_spec =
        CaptureSpec{{Stream::residual_post_layer}, all_layers, {}};

    ShardWriter features(paths.boundary_features(), feature_manifest, true);
    ShardWriter residuals(paths.boundary_residuals(), residual_manifest, true);

    const std::map<std::string, std::string> outlines = load_outline_texts(paths.outlines());
    std::optional<ShardWriter> prompt_features;
    if (!outlines.empty())
        prompt_features.emplace(paths.prompt_features(), feature_manifest, true);

    int64_t new_boundaries = 0, new_prompt_rows = 0;
    for (const GenerationRecord& record : records) {
        const std::string split = split_of(cfg, record.record_id);
        // One forward pass per record and shard covers every boundary that
        // still needs a row; captures at single positions would make the
        // stage quadratic in the record length.
        std::vector<int64_t> feature_positions, residual_positions;
        std::vector<size_t> feature_idx, residual_idx;
        for (size_t i = 0; i < record.boundary_positions.size(); ++i) {
            if (!evaluable_boundary(record, i)) continue;
            const std::string key = boundary_key(record.record_id, static_cast<int>(i));
            if (!features.contains(key)) {
                feature_positions.push_back(record.boundary_positions[i]);
                feature_idx.push_back(i);
            }
            if (!residuals.contains(key)) {
                residual_positions.push_back(record.boundary_positions[i]);
                residual_idx.push_back(i);
            }
        }
        if (!feature_positions.empty()) {
            const ResidualCapture cap = adapter->capture(
                record.token_ids,
                CaptureSpec{selection.streams, selection.layers, feature_positions});
            for (size_t n = 0; n < feature_idx.size(); ++n) {
                const size_t i = feature_idx[n];
                FeatureRecord rec;
                rec.record_id = boundary_key(record.record_id, static_cast<int>(i));
                rec.features = build_raw_features(cap, selection, feature_positions[n]);
                rec.target_embedding = tae->encode(record.paragraph_after_boundary(i));
                rec.split = split;
                features.append(rec);
            }
        }
        if (!residual_positions.empty()) {
            const ResidualCapture cap =
                adapter->capture(record.token_ids, CaptureSpec::all_layers(info, residual_positions));
            for (size_t n = 0; n < residual_idx.size(); ++n) {
                const size_t i = residual_idx[n];
                residuals.append_capture(boundary_key(record.record_id, static_cast<int>(i)),
                                         capture_slice(cap, residual_positions[n]));
            }
            new_boundaries += static_cast<int64_t>(residual_idx.size());
        }
        if (prompt_features && outlines.count(record.record_id) &&
            !prompt_features->contains(record.record_id)) {
            const int64_t position = record.prompt_boundary_position;
            const std::span<const TokenId> context(record.token_ids.data(),
                                                   static_cast<size_t>(position) + 1);
            const ResidualCapture cap = adapter->capture(
                context, CaptureSpec{selection.streams, selection.layers, {position}});
            FeatureRecord rec;
            rec.record_id = record.record_id;
            rec.features = build_raw_features(cap, selection);
            rec.target_embedding = tae->encode(outlines.at(record.record_id));
            rec.split = split;
            prompt_features->append(rec);
            ++new_prompt_rows;
        }
    }
    std::printf("[capture] records=%zu boundary_rows=%lld (new=%lld) prompt_rows=%lld (new=%lld)\n",
                records.size(), static_cast<long long>(features.count()),
                static_cast<long long>(new_boundaries),
                static_cast<long long>(prompt_features ? prompt_features->count() : 0),
                static_cast<long long>(new_prompt_rows));
}

// ---------------------------------------------------------------------------
// stats: Welford normalization statistics over training features
// ---------------------------------------------------------------------------

void write_stats_file(const std::string& path, const std::string& shard_dir,
                      const RunConfig& cfg, int64_t cap) {
    const ShardReader reader(shard_dir);
    NormStats stats(reader.manifest().dim);
    int64_t used = 0;
    for (int64_t i : reader.indices("train")) {
        if (used >= cap) break;
        stats.update(reader.read_feature(i).features);
        ++used;
    }
    if (stats.count < 2)
        throw DataError("only " + std::to_string(stats.count) +
                        " training feature vectors in " + shard_dir +
                        "; need at least 2 (run `capture` on more records)");
    const ArtifactHeader header = make_header("stats", cfg);
    Json j = header.to_json();
    j.erase("_kind");
    j["sample_count"] = stats.count;
    j["stats"] = stats.to_json();
    fs::create_directories(fs::path(path).parent_path());
    write_pretty_json(path, j);
    std::printf("[stats] %s: samples=%lld dim=%lld\n", path.c_str(),
                static_cast<long long>(stats.count), static_cast<long long>(stats.dim()));
}

void cmd_stats(const RunConfig& cfg, const CommandOptions& opts) {
    const RunPaths paths{cfg.out_dir};
    require_dir(paths.boundary_features(), "capture");
    const int64_t cap = opts.limit >= 0 ? opts.limit : cfg.dataset.stats_sample_cap;
    write_stats_file(paths.boundary_stats(), paths.boundary_features(), cfg, cap);
    if (fs::exists(paths.prompt_features()))
        write_stats_file(paths.prompt_stats(), paths.prompt_features(), cfg, cap);
}

// ---------------------------------------------------------------------------
// train-map: linear map from normalized features to target embeddings
// ---------------------------------------------------------------------------

void cmd_train_map(const RunConfig& cfg, const CommandOptions& opts, const std::string& kind) {
    const RunPaths paths{cfg.out_dir};
    std::string shard_dir, stats_path, map_dir;
    TrainConfig train_cfg;
    if (kind == "paragraph") {
        shard_dir = paths.boundary_features();
        stats_path = paths.boundary_stats();
        map_dir = paths.paragraph_map();
        train_cfg = cfg.train;
    } else if (kind == "outline") {
        shard_dir = paths.prompt_features();
        stats_path = paths.prompt_stats();
        map_dir = paths.outline_map();
        train_cfg = cfg.outline_train;
    } else {
        throw ConfigError("train-map kind must be `paragraph` or `outline`, got \"" + kind + "\"");
    }
    if (kind == "outline" && !fs::exists(shard_dir))
        throw StorageError("missing artifact " + shard_dir +
                           "; run the `outline` command and then `capture` first");
    require_dir(shard_dir, "capture");
    const LoadedStats stats = load_stats_file(stats_path, "stats");

    if (!opts.resume) fs::remove_all(map_dir);
    if (file_exists(map_dir + "/map.json")) {
        std::printf("[train-map] %s already trained at %s (use --no-resume to retrain)\n",
                    kind.c_str(), map_dir.c_str());
        return;
    }

    const ShardReader reader(shard_dir);
    const ShardManifest& manifest = reader.manifest();
    if (!manifest.model_info || !manifest.capture_spec)
        throw FormatError("feature shard " + shard_dir + " lacks model/capture metadata");

    std::vector<FeatureRecord> train, val;
    for (int64_t i : reader.indices()) {
        FeatureRecord rec = reader.read_feature(i);
        if (rec.split == "test") continue;
        if (rec.split == "train" && opts.limit >= 0 &&
            static_cast<int64_t>(train.size()) >= opts.limit)
            continue;
        rec.features = stats.stats.normalize(rec.features);
        (rec.split == "train" ? train : val).push_back(std::move(rec));
    }

    auto tae = make_autoencoder(cfg.autoencoder);
    MapSpec spec;
    spec.selection = LayerSelection{manifest.capture_spec->layers, manifest.capture_spec->streams};
    spec.hidden_dim = manifest.model_info->hidden_dim;
    spec.space_id = tae->space_id();
    spec.stats_digest = stats.digest;

    const TrainResult result = train_linear_map(train, val, train_cfg, spec);
    save_linear_map(result, map_dir);
    Json provenance = make_header("train-map", cfg).to_json();
    provenance.erase("_kind");
    provenance["kind"] = kind;
    provenance["train_count"] = result.report.train_count;
    provenance["val_count"] = result.report.val_count;
    provenance["final_val_cosine"] = result.report.final_val_cosine;
    write_pretty_json(map_dir + "/provenance.json", provenance);
    std::printf("[train-map] %s: train=%lld val=%lld final_val_cosine=%.4f -> %s\n", kind.c_str(),
                static_cast<long long>(result.report.train_count),
                static_cast<long long>(result.report.val_count), result.report.final_val_cosine,
                map_dir.c_str());
}

// ---------------------------------------------------------------------------
// decode: continuation (activation patching) and tae (linear map) decoders
// ---------------------------------------------------------------------------

void cmd_decode(const RunConfig& cfg, const CommandOptions& opts, const std::string& kind) {
    const RunPaths paths{cfg.out_dir};
    if (kind != "continuation" && kind != "tae")
        throw ConfigError("decode kind must be `continuation` or `tae`, got \"" + kind + "\"");
    const std::set<std::string> done =
        opts.resume ? existing_keys(paths.decodes(),
                                    [](const Json& row) {
                                        return row.value("record_id", "") + "#" +
                                               row.value("method", "");
                                    })
                    : std::set<std::string>{};
    JsonlWriter writer(paths.decodes(), make_header("decode", cfg), opts.resume);
    int64_t written = 0;

    if (kind == "continuation") {
        const std::vector<GenerationRecord> records = load_records(paths, -1);
        require_dir(paths.boundary_residuals(), "capture");
        const ShardReader residuals(paths.boundary_residuals());
        auto adapter = make_subject(cfg);
        RecordLimiter limiter(opts.limit);
        for (const GenerationRecord& record : records) {
            if (record.boundary_positions.empty()) continue;
            if (!limiter.admit(record.record_id)) continue;
            for (size_t i = 0; i < record.boundary_positions.size(); ++i) {
                if (!evaluable_boundary(record, i)) continue;
                const std::string key = boundary_key(record.record_id, static_cast<int>(i));
                if (done.count(key + "#continuation")) continue;
                const std::optional<int64_t> at = residuals.find(key);
                if (!at)
                    throw StorageError("no stored residual patch for " + key + " in " +
                                       paths.boundary_residuals() +
                                       "; run the `capture` command (check --limit)");
                ContinuationConfig decode_cfg = cfg.decode;
                decode_cfg.params.seed = row_seed(cfg, key + "#continuation");
                const std::vector<std::string> texts =
                    continuation_decode(residuals.read_capture(*at), *adapter, decode_cfg);
                writer.write_row(Json{{"record_id", key},
                                      {"source_record_id", record.record_id},
                                      {"boundary_index", static_cast<int>(i)},
                                      {"method", "continuation"},
                                      {"texts", texts}});
                ++written;
            }
        }
    } else {
        require_dir(paths.boundary_features(), "capture");
        const LoadedStats stats = load_stats_file(paths.boundary_stats(), "stats");
        require_file(paths.paragraph_map() + "/map.json", "train-map");
        const LoadedMap loaded = load_linear_map(paths.paragraph_map());
        if (loaded.map.stats_digest != stats.digest)
            throw CompatibilityError("paragraph map was trained against stats digest " +
                                     loaded.map.stats_digest + " but " + paths.boundary_stats() +
                                     " has digest " + stats.digest +
                                     "; rerun `train-map paragraph`");
        auto tae = make_autoencoder(cfg.autoencoder);
        if (loaded.map.space_id != tae->space_id())
            throw CompatibilityError("paragraph map predicts embeddings for space " +
                                     loaded.map.space_id + " but the configured autoencoder is " +
                                     tae->space_id());
        const ShardReader features(paths.boundary_features());
        RecordLimiter limiter(opts.limit);
        for (int64_t i : features.indices()) {
            const FeatureRecord rec = features.read_feature(i);
            const auto [source, boundary] = parse_boundary_key(rec.record_id);
            if (!limiter.admit(source)) continue;
            if (done.count(rec.record_id + "#tae")) continue;
            const EmbeddingVector emb =
                predict_embedding(stats.stats.normalize(rec.features), loaded.map);
            const std::string text = decode_embedding(emb, *tae);
            writer.write_row(Json{{"record_id", rec.record_id},
                                  {"source_record_id", source},
                                  {"boundary_index", boundary},
                                  {"method", "tae"},
                                  {"texts", std::vector<std::string>{text}},
                                  {"embedding", emb.values}});
            ++written;
        }
        // Outline decodes ride along when the outline map has been trained.
        if (file_exists(paths.outline_map() + "/map.json") &&
            fs::exists(paths.prompt_features())) {
            const LoadedStats prompt_stats = load_stats_file(paths.prompt_stats(), "stats");
            const LoadedMap outline_map = load_linear_map(paths.outline_map());
            if (outline_map.map.stats_digest != prompt_stats.digest)
                throw CompatibilityError("outline map stats digest does not match " +
                                         paths.prompt_stats() + "; rerun `train-map outline`");
            const ShardReader prompt_features(paths.prompt_features());
            RecordLimiter outline_limiter(opts.limit);
            for (int64_t i : prompt_features.indices()) {
                const FeatureRecord rec = prompt_features.read_feature(i);
                if (!outline_limiter.admit(rec.record_id)) continue;
                const std::string key = rec.record_id + "#outline";
                if (done.count(key + "#tae_outline")) continue;
                const EmbeddingVector emb = predict_embedding(
                    prompt_stats.stats.normalize(rec.features), outline_map.map);
                const std::string text = decode_embedding(emb, *tae);
                writer.write_row(Json{{"record_id", key},
                                      {"source_record_id", rec.record_id},
                                      {"boundary_index", -1},
                                      {"method", "tae_outline"},
                                      {"texts", std::vector<std::string>{text}},
                                      {"embedding", emb.values}});
                ++written;
            }
        }
    }
    std::printf("[decode] kind=%s new_rows=%lld -> %s\n", kind.c_str(),
                static_cast<long long>(written), paths.decodes().c_str());
}

// ---------------------------------------------------------------------------
// baseline: the comparison ladder
// ---------------------------------------------------------------------------

void cmd_baseline(const RunConfig& cfg, const CommandOptions& opts, const std::string& kind) {
    const RunPaths paths{cfg.out_dir};
    const std::vector<GenerationRecord> records = load_records(paths, opts.limit);
    std::vector<std::string> methods;
    if (kind.empty())
        methods = {"blind", "cheat_k", "regenerate", "auto_decode"};
    else if (kind == "blind")
        methods = {"blind"};
    else if (kind == "cheat-k")
        methods = {"cheat_k"};
    else if (kind == "regen")
        methods = {"regenerate"};
    else if (kind == "autodecode")
        methods = {"auto_decode"};
    else
        throw ConfigError(
            "baseline kind must be blind|cheat-k|regen|autodecode (or empty for all), got \"" +
            kind + "\"");

    const std::set<std::string> done =
        opts.resume
            ? existing_keys(paths.baselines(),
                            [](const Json& row) {
                                return boundary_key(row.value("record_id", ""),
                                                    row.value("boundary_index", -1)) +
                                       "#" + row.value("method", "");
                            })
            : std::set<std::string>{};
    JsonlWriter writer(paths.baselines(), make_header("baseline", cfg), opts.resume);
    auto adapter = make_subject(cfg);
    std::unique_ptr<TextAutoencoder> tae;
    if (std::find(methods.begin(), methods.end(), "auto_decode") != methods.end())
        tae = make_autoencoder(cfg.autoencoder);

    int64_t written = 0, filtered = 0;
    for (const GenerationRecord& record : records) {
        for (size_t i = 0; i < record.boundary_positions.size(); ++i) {
            if (!evaluable_boundary(record, i)) continue;
            const std::string key = boundary_key(record.record_id, static_cast<int>(i));
            const std::string& reference = record.paragraph_after_boundary(i);
            for (const std::string& method : methods) {
                if (done.count(key + "#" + method)) continue;
                GenerationParams params = cfg.baseline.generation;
                params.seed = row_seed(cfg, key + "#" + method);
                BaselineResult result;
                result.record_id = record.record_id;
                result.method = method;
                result.boundary_index = static_cast<int>(i);
                if (method == "blind") {
                    result.texts = blind_baseline(*adapter, params);
                } else if (method == "cheat_k") {
                    result = cheat_k_baseline(record.record_id, static_cast<int>(i), reference,
                                              cfg.baseline.cheat_k, *adapter, params);
                } else if (method == "regenerate") {
                    try {
                        result.texts = regenerate_baseline(record, i, *adapter, params);
                    } catch (const LengthError& e) {
                        result.filtered = true;
                        result.filter_reason = e.what();
                    }
                } else {
                    result.texts = {auto_decode_baseline(reference, *tae)};
                }
                result.validate();
                writer.write_row(result);
                ++written;
                if (result.filtered) ++filtered;
            }
        }
    }
    std::printf("[baseline] methods=%zu new_rows=%lld filtered=%lld\n", methods.size(),
                static_cast<long long>(written), static_cast<long long>(filtered));
}

// ---------------------------------------------------------------------------
// score and judge share the candidate/reference join
// ---------------------------------------------------------------------------

struct EvalJob {
    std::string composite;  // record_id key used in score/judgment rows
    std::string method;
    std::string source_record_id;
    int boundary_index = -1;
    std::vector<std::string> texts;
    bool outline = false;
    std::string reference;
};

std::vector<EvalJob> load_eval_jobs(const RunConfig& cfg, const CommandOptions& opts) {
    const RunPaths paths{cfg.out_dir};
    if (!file_exists(paths.decodes()) && !file_exists(paths.baselines()))
        missing_artifact(paths.decodes(), "decode");
    std::vector<EvalJob> jobs;
    if (file_exists(paths.decodes())) {
        for (const Json& row : read_jsonl(paths.decodes()).rows) {
            EvalJob job;
            job.composite = row.at("record_id").get<std::string>();
            job.method = row.at("method").get<std::string>();
            job.source_record_id = row.at("source_record_id").get<std::string>();
            job.boundary_index = row.at("boundary_index").get<int>();
            job.texts = row.at("texts").get<std::vector<std::string>>();
            job.outline = job.method == "tae_outline";
            jobs.push_back(std::move(job));
        }
    }
    if (file_exists(paths.baselines())) {
        for (const Json& row : read_jsonl(paths.baselines()).rows) {
            const auto result = row.get<BaselineResult>();
            if (result.filtered) continue;
            EvalJob job;
            job.composite = boundary_key(result.record_id, result.boundary_index);
            job.method = result.method;
            job.source_record_id = result.record_id;
            job.boundary_index = result.boundary_index;
            job.texts = result.texts;
            jobs.push_back(std::move(job));
        }
    }

    // Attach references; outline rows compare against the stored outline text.
    std::map<std::string, const GenerationRecord*> by_id;
    const std::vector<GenerationRecord> records = load_records(paths, -1);
    for (const GenerationRecord& r : records) by_id[r.record_id] = &r;
    const std::map<std::string, std::string> outlines = load_outline_texts(paths.outlines());

    std::vector<EvalJob> resolved;
    RecordLimiter limiter(opts.limit);
    for (EvalJob& job : jobs) {
        if (!limiter.admit(job.source_record_id)) continue;
        if (job.outline) {
            const auto it = outlines.find(job.source_record_id);
            if (it == outlines.end())
                missing_artifact(paths.outlines(), "outline");
            job.reference = it->second;
        } else {
            const auto it = by_id.find(job.source_record_id);
            if (it == by_id.end())
                throw DataError("row references unknown record " + job.source_record_id +
                                " (records.jsonl out of sync with decode/baseline artifacts)");
            job.reference =
                it->second->paragraph_after_boundary(static_cast<size_t>(job.boundary_index));
        }
        resolved.push_back(std::move(job));
    }
    return resolved;
}

void cmd_score(const RunConfig& cfg, const CommandOptions& opts) {
    const RunPaths paths{cfg.out_dir};
    std::vector<EvalJob> jobs = load_eval_jobs(cfg, opts);
    const std::set<std::string> done =
        opts.resume ? existing_keys(paths.scores(),
                                    [](const Json& row) {
                                        return row.value("record_id", "") + "#" +
                                               row.value("method", "") + "#" +
                                               row.value("metric", "");
                                    })
                    : std::set<std::string>{};
    JsonlWriter writer(paths.scores(), make_header("score", cfg), opts.resume);

    const int pool = std::max(1, cfg.workers);
    std::vector<std::unique_ptr<TextEmbedder>> embedders;
    std::vector<std::unique_ptr<PairScorer>> scorers;
    for (int w = 0; w < pool; ++w) {
        embedders.push_back(make_embedder(cfg.embedder));
        scorers.push_back(make_pair_scorer(cfg.pair_scorer));
    }
    const bool with_learned = scorers[0] != nullptr;

    // Drop jobs whose every metric row is already on disk before they reach
    // the (possibly remote) scorers.
    {
        std::vector<EvalJob> pending;
        for (EvalJob& job : jobs) {
            const std::string base = job.composite + "#" + job.method + "#";
            const bool embed_done =
                done.count(base + similarity_metric_name(SimilarityMetric::embed_cosine)) > 0;
            const bool learned_done =
                !with_learned ||
                done.count(base + similarity_metric_name(SimilarityMetric::learned_metric)) > 0;
            if (!embed_done || !learned_done) pending.push_back(std::move(job));
        }
        jobs = std::move(pending);
    }

    struct JobScores {
        std::optional<SimilarityScore> embed;
        std::optional<SimilarityScore> learned;
        bool empty_candidates = false;
    };
    const auto results = map_ordered<EvalJob, JobScores>(
        jobs, cfg.workers, [&](const EvalJob& job, int worker) {
            JobScores out;
            TextEmbedder& embedder = *embedders[static_cast<size_t>(worker)];
            std::vector<std::string> candidates;
            for (const std::string& text : job.texts) {
                const std::string unit = job.outline ? text : first_paragraph(text);
                if (!unit.empty()) candidates.push_back(unit);
            }
            if (candidates.empty()) {
                out.empty_candidates = true;
                return out;
            }
            SimilarityScore best;
            bool have = false;
            for (const std::string& candidate : candidates) {
                SimilarityScore s = embed_cosine(candidate, job.reference, embedder);
                if (!have || s.value > best.value) best = s, have = true;
            }
            best.record_id = job.composite;
            best.method = job.method;
            out.embed = best;
            if (with_learned) {
                PairScorer& scorer = *scorers[static_cast<size_t>(worker)];
                SimilarityScore best_learned;
                bool have_learned = false;
                SimilarityScore absent_row;
                bool have_absent = false;
                for (const std::string& candidate : candidates) {
                    SimilarityScore s = learned_metric(candidate, job.reference, scorer);
                    if (s.absent) {
                        absent_row = s;
                        have_absent = true;
                        continue;
                    }
                    if (!have_learned || s.value > best_learned.value)
                        best_learned = s, have_learned = true;
                }
                SimilarityScore row = have_learned ? best_learned : absent_row;
                if (have_learned || have_absent) {
                    row.record_id = job.composite;
                    row.method = job.method;
                    out.learned = row;
                }
            }
            return out;
        });

    int64_t written = 0, skipped_empty = 0;
    for (const JobScores& r : results) {
        if (r.empty_candidates) {
            ++skipped_empty;
            continue;
        }
        for (const auto& s : {r.embed, r.learned}) {
            if (!s) continue;
            const std::string key = s->record_id + "#" + s->method + "#" +
                                    similarity_metric_name(s->metric);
            if (done.count(key)) continue;
            s->validate();
            writer.write_row(*s);
            ++written;
        }
    }
    std::printf("[score] jobs=%zu new_rows=%lld empty_candidates=%lld\n", jobs.size(),
                static_cast<long long>(written), static_cast<long long>(skipped_empty));
}

void cmd_judge(const RunConfig& cfg, const CommandOptions& opts) {
    const RunPaths paths{cfg.out_dir};
    std::vector<EvalJob> jobs = load_eval_jobs(cfg, opts);
    const std::set<std::string> done =
        opts.resume ? existing_keys(paths.judgments(),
                                    [](const Json& row) {
                                        return row.value("record_id", "") + "#" +
                                               row.value("method", "") + "#" +
                                               row.value("kind", "");
                                    })
                    : std::set<std::string>{};
    JsonlWriter writer(paths.judgments(), make_header("judge", cfg), opts.resume);

    const int pool = std::max(1, cfg.workers);
    std::vector<std::unique_ptr<ChatClient>> judges;
    for (int w = 0; w < pool; ++w) judges.push_back(make_chat_client(cfg.judge, "judge"));
    JudgeConfig judge_cfg;
    judge_cfg.max_reasks = cfg.judge_max_reasks;
    judge_cfg.judge_id = judges[0]->client_id();

    struct Judged {
        Json row;
        bool skipped = false;
        bool failed = false;
    };
    std::vector<EvalJob> pending;
    for (EvalJob& job : jobs) {
        const RubricKind kind = job.outline ? RubricKind::outline : RubricKind::paragraph;
        const std::string key = job.composite + "#" + job.method + "#" + rubric_kind_name(kind);
        if (!done.count(key)) pending.push_back(std::move(job));
    }

    const auto results = map_ordered<EvalJob, Judged>(
        pending, cfg.workers, [&](const EvalJob& job, int worker) {
            Judged out;
            const RubricKind kind = job.outline ? RubricKind::outline : RubricKind::paragraph;
            const std::string candidate =
                job.texts.empty() ? std::string()
                                  : (job.outline ? job.texts.front()
                                                 : first_paragraph(job.texts.front()));
            if (candidate.empty()) {
                out.skipped = true;
                return out;
            }
            try {
                RubricRow row;
                row.record_id = job.composite;
                row.method = job.method;
                row.kind = kind;
                row.score = judge_texts(kind, *judges[static_cast<size_t>(worker)], candidate,
                                        job.reference, judge_cfg);
                to_json(out.row, row);
            } catch (const JudgeReplyError& e) {
                out.failed = true;
                out.row = Json{{"record_id", job.composite},
                               {"method", job.method},
                               {"kind", rubric_kind_name(kind)},
                               {"failed", true},
                               {"raw_reply", e.raw_reply}};
            }
            return out;
        });

    int64_t written = 0, failed = 0, skipped = 0;
    for (const Judged& r : results) {
        if (r.skipped) {
            ++skipped;
            continue;
        }
        writer.write_row(r.row);
        ++written;
        if (r.failed) ++failed;
    }
    std::printf("[judge] jobs=%zu new_rows=%lld failed=%lld empty_candidates=%lld\n", jobs.size(),
                static_cast<long long>(written), static_cast<long long>(failed),
                static_cast<long long>(skipped));
}

// ---------------------------------------------------------------------------
// experiments
// ---------------------------------------------------------------------------

void cmd_scrub(const RunConfig& cfg, const CommandOptions& opts) {
    const RunPaths paths{cfg.out_dir};
    const std::string out = paths.experiment("scrub");
    if (opts.resume && file_exists(out)) {
        std::printf("[scrub] %s already exists (use --no-resume to recompute)\n", out.c_str());
        return;
    }
    auto adapter = make_subject(cfg);
    auto embedder = make_embedder(cfg.embedder);
    ScrubSpec spec = cfg.scrub;
    if (spec.k_values.empty()) {
        spec.k_values.resize(static_cast<size_t>(adapter->info().num_layers) + 1);
        std::iota(spec.k_values.begin(), spec.k_values.end(), 0);
    }
    spec.validate(adapter->info().num_layers);
    const SweepCurve curve = scrub_sweep(spec, *adapter, *embedder);
    Json j = make_header("scrub", cfg).to_json();
    j.erase("_kind");
    j["spec"] = spec;
    j["curve"] = curve;
    fs::create_directories(fs::path(out).parent_path());
    write_pretty_json(out, j);
    std::printf("[scrub] k_values=%zu n_examples=%lld skipped=%lld -> %s\n", spec.k_values.size(),
                static_cast<long long>(curve.n_examples), static_cast<long long>(curve.skipped),
                out.c_str());
}

void cmd_token_sweep(const RunConfig& cfg, const CommandOptions& opts, bool replace) {
    const RunPaths paths{cfg.out_dir};
    const std::string name = replace ? "replace" : "tokenwise";
    const std::string out = paths.experiment(name);
    if (opts.resume && file_exists(out)) {
        std::printf("[%s] %s already exists (use --no-resume to recompute)\n", name.c_str(),
                    out.c_str());
        return;
    }
    const std::vector<GenerationRecord> all = load_records(paths, -1);
    std::vector<GenerationRecord> usable;
    const int64_t want = opts.limit >= 0 ? opts.limit : 1;
    for (const GenerationRecord& r : all) {
        if (static_cast<int64_t>(usable.size()) >= want) break;
        // The sweep compares against the paragraphs on both sides of the
        // record's first boundary, so both must be non-empty.
        if (!r.boundary_positions.empty() && !r.paragraphs.front().empty() &&
            !r.paragraph_after_boundary(0).empty())
            usable.push_back(r);
    }
    if (usable.empty())
        throw DataError("no generation record has an internal paragraph boundary; "
                        "generate more records first");
    auto adapter = make_subject(cfg);
    auto embedder = make_embedder(cfg.embedder);

    Json curves = Json::array();
    for (const GenerationRecord& record : usable) {
        const SweepCurve curve =
            replace ? replace_token_sweep(record, *adapter, *embedder, cfg.sweep_window, cfg.sweep)
                    : tokenwise_sweep(record, *adapter, *embedder, cfg.sweep_window, cfg.sweep);
        curves.push_back(Json{{"record_id", record.record_id}, {"curve", curve}});
    }
    Json j = make_header(replace ? "replace-sweep" : "tokenwise", cfg).to_json();
    j.erase("_kind");
    j["window"] = cfg.sweep_window;
    j["sampling"] = cfg.sweep;
    j["curves"] = curves;
    fs::create_directories(fs::path(out).parent_path());
    write_pretty_json(out, j);
    std::printf("[%s] records=%zu window=%d -> %s\n", name.c_str(), usable.size(),
                cfg.sweep_window, out.c_str());
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

std::optional<SweepCurve> load_experiment_curve(const std::string& path) {
    if (!file_exists(path)) return std::nullopt;
    const Json j = Json::parse(read_file(path));
    if (j.contains("curve")) return j.at("curve").get<SweepCurve>();
    if (j.contains("curves") && !j.at("curves").empty())
        return j.at("curves").at(0).at("curve").get<SweepCurve>();
    return std::nullopt;
}

void cmd_report(const RunConfig& cfg, const CommandOptions& opts) {
    (void)opts;  // report is cheap and deterministic; it always rebuilds
    const RunPaths paths{cfg.out_dir};
    require_file(paths.scores(), "score");
    std::vector<SimilarityScore> scores;
    for (const Json& row : read_jsonl(paths.scores()).rows)
        scores.push_back(row.get<SimilarityScore>());
    std::vector<RubricRow> rubric_rows;
    if (file_exists(paths.judgments())) {
        for (const Json& row : read_jsonl(paths.judgments()).rows) {
            if (row.value("failed", false)) continue;
            rubric_rows.push_back(row.get<RubricRow>());
        }
    }

    const ReportTables tables = aggregate_report(scores, rubric_rows);
    fs::create_directories(paths.report_dir());
    Json summary = make_header("report", cfg).to_json();
    summary.erase("_kind");
    summary["similarity_rows"] = scores.size();
    summary["rubric_rows"] = rubric_rows.size();
    summary["tables"] = tables.to_json();
    write_pretty_json(paths.report_dir() + "/summary.json", summary);

    int plots = 0;
    for (const SimilarityMetric metric :
         {SimilarityMetric::embed_cosine, SimilarityMetric::learned_metric}) {
        std::vector<MethodSummary> rows;
        for (const MethodSummary& m : tables.similarity)
            if (m.metric == metric && m.count > 0) rows.push_back(m);
        const std::string metric_name = similarity_metric_name(metric);
        if (!rows.empty()) {
            write_file(paths.report_dir() + "/similarity_box_" + metric_name + ".svg",
                       svg_box_plot("Similarity by method (" + metric_name + ")", rows));
            ++plots;
        }
        std::vector<TauEntry> taus;
        for (const TauEntry& t : tables.tau)
            if (t.metric == metric) taus.push_back(t);
        if (!taus.empty()) {
            write_file(paths.report_dir() + "/tau_" + metric_name + ".svg",
                       svg_tau_heatmap("Method agreement, Kendall tau (" + metric_name + ")",
                                       taus));
            ++plots;
        }
    }
    for (const RubricKind kind : {RubricKind::paragraph, RubricKind::outline}) {
        std::vector<ThresholdRow> rows;
        for (const ThresholdRow& r : tables.rubric_thresholds)
            if (r.kind == kind && r.dimension == "subject") rows.push_back(r);
        if (rows.empty()) continue;
        const std::string kind_name = rubric_kind_name(kind);
        write_file(paths.report_dir() + "/thresholds_" + kind_name + "_subject.svg",
                   svg_threshold_bars("Subject match thresholds (" + kind_name + ")", rows,
                                      "subject"));
        ++plots;
    }
    const struct {
        const char* file;
        const char* title;
    } sweeps[] = {{"scrub", "Layer scrubbing delta by k"},
                  {"tokenwise", "Similarity around the boundary token"},
                  {"replace", "Similarity with injected boundary token"}};
    for (const auto& sweep : sweeps) {
        const auto curve = load_experiment_curve(paths.experiment(sweep.file));
        if (!curve) continue;
        write_file(paths.report_dir() + "/curve_" + sweep.file + ".svg",
                   svg_sweep_curve(sweep.title, *curve));
        ++plots;
    }

    std::printf("[report] methods=%zu tau_pairs=%zu threshold_rows=%zu plots=%d -> %s\n",
                tables.similarity.size(), tables.tau.size(), tables.rubric_thresholds.size(),
                plots, paths.report_dir().c_str());
    for (const MethodSummary& m : tables.similarity)
        std::printf("  %-14s %-14s n=%-5lld mean=%.4f std=%.4f median=%.4f\n", m.method.c_str(),
                    similarity_metric_name(m.metric), static_cast<long long>(m.count), m.mean,
                    m.std, m.median);
}

}  // namespace

void run_command(const std::string& name, const std::string& kind, const RunConfig& config,
                 const CommandOptions& opts) {
    config.validate();
    fs::create_directories(config.out_dir);
    if (name == "prompts")
        cmd_prompts(config, opts);
    else if (name == "generate")
        cmd_generate(config, opts);
    else if (name == "outline")
        cmd_outline(config, opts);
    else if (name == "capture")
        cmd_capture(config, opts);
    else if (name == "stats")
        cmd_stats(config, opts);
    else if (name == "train-map")
        cmd_train_map(config, opts, kind);
    else if (name == "decode")
        cmd_decode(config, opts, kind);
    else if (name == "baseline")
        cmd_baseline(config, opts, kind);
    else if (name == "score")
        cmd_score(config, opts);
    else if (name == "judge")
        cmd_judge(config, opts);
    else if (name == "scrub")
        cmd_scrub(config, opts);
    else if (name == "tokenwise")
        cmd_token_sweep(config, opts, false);
    else if (name == "replace-sweep")
        cmd_token_sweep(config, opts, true);
    else if (name == "report")
        cmd_report(config, opts);
    else {
        std::string names;
        for (const std::string& n : command_names()) {
            if (!names.empty()) names += ", ";
            names += n;
        }
        throw ConfigError("unknown command `" + name + "` (expected one of: " + names + ")");
    }
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {
        "prompts", "generate", "outline",  "capture", "stats",    "train-map",     "decode",
        "baseline", "score",   "judge",    "scrub",   "tokenwise", "replace-sweep", "report"};
    return names;
}

}  // namespace parascope
