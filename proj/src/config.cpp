#include "parascope/config.hpp"

#include <cstdlib>
#include <numeric>

#include "parascope/errors.hpp"
#include "parascope/util.hpp"

namespace parascope {

void to_json(Json& j, const HttpClientConfig& c) {
    j = Json{{"base_url", c.base_url},
             {"model", c.model},
             {"api_key_env", c.api_key_env},
             {"temperature", c.temperature},
             {"timeout_seconds", c.timeout_seconds},
             {"max_retries", c.max_retries},
             {"retry_backoff_ms", c.retry_backoff_ms}};
}

void from_json(const Json& j, HttpClientConfig& c) {
    try {
        if (j.contains("base_url")) c.base_url = j.at("base_url").get<std::string>();
        if (j.contains("model")) c.model = j.at("model").get<std::string>();
        if (j.contains("api_key_env")) c.api_key_env = j.at("api_key_env").get<std::string>();
        if (j.contains("temperature")) c.temperature = j.at("temperature").get<double>();
        if (j.contains("timeout_seconds")) c.timeout_seconds = j.at("timeout_seconds").get<int>();
        if (j.contains("max_retries")) c.max_retries = j.at("max_retries").get<int>();
        if (j.contains("retry_backoff_ms"))
            c.retry_backoff_ms = j.at("retry_backoff_ms").get<int>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad http client config: ") + e.what());
    }
}

void to_json(Json& j, const ClientPreset& p) {
    j = Json{{"kind", p.kind}};
    if (p.kind == "http") j["http"] = p.http;
}

void from_json(const Json& j, ClientPreset& p) {
    try {
        p.kind = j.at("kind").get<std::string>();
        if (j.contains("http")) p.http = j.at("http").get<HttpClientConfig>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad client preset: ") + e.what());
    }
}

void to_json(Json& j, const TinyLmConfig& c) {
    j = Json{{"weight_seed", c.weight_seed},
             {"layers", c.layers},
             {"dim", c.dim},
             {"heads", c.heads},
             {"ffn_dim", c.ffn_dim},
             {"window", c.window},
             {"logit_scale", c.logit_scale},
             {"boundary_prob", c.boundary_prob},
             {"extra_merges", c.extra_merges},
             {"model_id", c.model_id}};
}

void from_json(const Json& j, TinyLmConfig& c) {
    try {
        if (j.contains("weight_seed")) c.weight_seed = j.at("weight_seed").get<uint64_t>();
        if (j.contains("layers")) c.layers = j.at("layers").get<int>();
        if (j.contains("dim")) c.dim = j.at("dim").get<int>();
        if (j.contains("heads")) c.heads = j.at("heads").get<int>();
        if (j.contains("ffn_dim")) c.ffn_dim = j.at("ffn_dim").get<int>();
        if (j.contains("window")) c.window = j.at("window").get<int>();
        if (j.contains("logit_scale")) c.logit_scale = j.at("logit_scale").get<float>();
        if (j.contains("boundary_prob")) c.boundary_prob = j.at("boundary_prob").get<double>();
        if (j.contains("extra_merges"))
            c.extra_merges = j.at("extra_merges").get<std::vector<std::string>>();
        if (j.contains("model_id")) c.model_id = j.at("model_id").get<std::string>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad tiny model config: ") + e.what());
    }
}

void to_json(Json& j, const ContinuationConfig& c) {
    j = Json{{"blank_context_text", c.blank_context_text},
             {"max_new_tokens", c.max_new_tokens},
             {"params", c.params}};
}

void from_json(const Json& j, ContinuationConfig& c) {
    try {
        if (j.contains("blank_context_text"))
            c.blank_context_text = j.at("blank_context_text").get<std::string>();
        if (j.contains("max_new_tokens")) c.max_new_tokens = j.at("max_new_tokens").get<int>();
        if (j.contains("params")) c.params = j.at("params").get<GenerationParams>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad continuation config: ") + e.what());
    }
}

void to_json(Json& j, const SweepSampling& s) {
    j = Json{{"samples", s.samples},
             {"temperature", s.temperature},
             {"max_new_tokens", s.max_new_tokens},
             {"seed", s.seed}};
}

void from_json(const Json& j, SweepSampling& s) {
    try {
        if (j.contains("samples")) s.samples = j.at("samples").get<int>();
        if (j.contains("temperature")) s.temperature = j.at("temperature").get<double>();
        if (j.contains("max_new_tokens")) s.max_new_tokens = j.at("max_new_tokens").get<int>();
        if (j.contains("seed")) s.seed = j.at("seed").get<uint64_t>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad sweep sampling config: ") + e.what());
    }
}

void DatasetConfig::validate() const {
    if (corpus_path.empty()) throw ConfigError("dataset corpus_path is empty");
    if (chunk_min_chars < 1 || chunk_max_chars < chunk_min_chars)
        throw ConfigError("chunk size bounds must satisfy 1 <= min <= max");
    if (max_records < 1) throw ConfigError("dataset max_records must be at least 1");
    if (train_frac <= 0.0 || val_frac < 0.0 || train_frac + val_frac > 1.0)
        throw ConfigError("split fractions must satisfy 0 < train, 0 <= val, train + val <= 1");
    if (client_retries < 0) throw ConfigError("client_retries must be non-negative");
    if (stats_sample_cap < 2) throw ConfigError("stats_sample_cap must be at least 2");
    generation.validate();
}

void to_json(Json& j, const DatasetConfig& c) {
    j = Json{{"corpus_path", c.corpus_path},
             {"chunk_min_chars", c.chunk_min_chars},
             {"chunk_max_chars", c.chunk_max_chars},
             {"max_records", c.max_records},
             {"train_frac", c.train_frac},
             {"val_frac", c.val_frac},
             {"client_retries", c.client_retries},
             {"stats_sample_cap", c.stats_sample_cap},
             {"generation", c.generation}};
}

void from_json(const Json& j, DatasetConfig& c) {
    try {
        if (j.contains("corpus_path")) c.corpus_path = j.at("corpus_path").get<std::string>();
        if (j.contains("chunk_min_chars")) c.chunk_min_chars = j.at("chunk_min_chars").get<int>();
        if (j.contains("chunk_max_chars")) c.chunk_max_chars = j.at("chunk_max_chars").get<int>();
        if (j.contains("max_records")) c.max_records = j.at("max_records").get<int>();
        if (j.contains("train_frac")) c.train_frac = j.at("train_frac").get<double>();
        if (j.contains("val_frac")) c.val_frac = j.at("val_frac").get<double>();
        if (j.contains("client_retries")) c.client_retries = j.at("client_retries").get<int>();
        if (j.contains("stats_sample_cap"))
            c.stats_sample_cap = j.at("stats_sample_cap").get<int>();
        if (j.contains("generation")) c.generation = j.at("generation").get<GenerationParams>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad dataset config: ") + e.what());
    }
}

void BaselineConfig::validate() const {
    if (cheat_k < 1) throw ConfigError("baseline cheat_k must be at least 1");
    generation.validate();
}

void to_json(Json& j, const BaselineConfig& c) {
    j = Json{{"cheat_k", c.cheat_k}, {"generation", c.generation}};
}

void from_json(const Json& j, BaselineConfig& c) {
    try {
        if (j.contains("cheat_k")) c.cheat_k = j.at("cheat_k").get<int>();
        if (j.contains("generation")) c.generation = j.at("generation").get<GenerationParams>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad baseline config: ") + e.what());
    }
}

namespace {

void check_preset(const ClientPreset& p, const std::string& role,
                  std::initializer_list<const char*> allowed) {
    for (const char* kind : allowed)
        if (p.kind == kind) {
            if (p.kind == "http" && p.http.base_url.empty())
                throw ConfigError(role + " preset kind is http but base_url is empty");
            return;
        }
    std::string kinds;
    for (const char* kind : allowed) {
        if (!kinds.empty()) kinds += ", ";
        kinds += kind;
    }
    throw ConfigError("unknown " + role + " preset kind \"" + p.kind + "\" (allowed: " + kinds +
                      ")");
}

}  // namespace

void RunConfig::validate() const {
    if (out_dir.empty()) throw ConfigError("out_dir is empty");
    if (workers < 1) throw ConfigError("workers must be at least 1");
    if (subject_kind != "tiny")
        throw ConfigError("unknown subject_kind \"" + subject_kind +
                          "\" (the bundled \"tiny\" model is the only built-in subject)");
    if (tiny.layers < 1 || tiny.dim < 1 || tiny.heads < 1 || tiny.ffn_dim < 1 || tiny.window < 2)
        throw ConfigError("tiny model dimensions must be positive");
    check_preset(prompt_writer, "prompt_writer", {"stub", "http"});
    check_preset(summarizer, "summarizer", {"stub", "http"});
    check_preset(judge, "judge", {"stub", "http"});
    check_preset(embedder, "embedder", {"bow", "http"});
    check_preset(autoencoder, "autoencoder", {"bow", "http"});
    check_preset(pair_scorer, "pair_scorer", {"stub", "http", "none"});
    dataset.validate();
    if (map_last_layers < 1) throw ConfigError("map_last_layers must be at least 1");
    train.validate();
    outline_train.validate();
    decode.validate();
    baseline.validate();
    ScrubSpec filled = scrub;  // empty k_values means "every k"; filled by the scrub stage
    if (filled.k_values.empty()) {
        filled.k_values.resize(static_cast<size_t>(tiny.layers) + 1);
        std::iota(filled.k_values.begin(), filled.k_values.end(), 0);
    }
    filled.validate(tiny.layers);
    if (sweep_window < 1) throw ConfigError("sweep_window must be at least 1");
    sweep.validate();
    if (judge_max_reasks < 0) throw ConfigError("judge_max_reasks must be non-negative");
}

Json RunConfig::to_json() const {
    return Json{{"out_dir", out_dir},
                {"seed", seed},
                {"workers", workers},
                {"subject_kind", subject_kind},
                {"tiny", tiny},
                {"prompt_writer", prompt_writer},
                {"summarizer", summarizer},
                {"judge", judge},
                {"embedder", embedder},
                {"autoencoder", autoencoder},
                {"pair_scorer", pair_scorer},
                {"dataset", dataset},
                {"map_last_layers", map_last_layers},
                {"train", train},
                {"outline_train", outline_train},
                {"decode", decode},
                {"baseline", baseline},
                {"scrub", scrub},
                {"sweep_window", sweep_window},
                {"sweep", sweep},
                {"judge_max_reasks", judge_max_reasks}};
}

std::string RunConfig::digest() const {
    // Worker count shapes scheduling, never artifact content, so it stays
    // out of the digest: reruns with a different --workers remain identical.
    Json j = to_json();
    j.erase("workers");
    return hex64(fnv1a64(j.dump()));
}

RunConfig config_from_json(const Json& j) {
    RunConfig cfg;
    try {
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
        if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
        if (j.contains("subject_kind")) cfg.subject_kind = j.at("subject_kind").get<std::string>();
        if (j.contains("tiny")) cfg.tiny = j.at("tiny").get<TinyLmConfig>();
        if (j.contains("prompt_writer"))
            cfg.prompt_writer = j.at("prompt_writer").get<ClientPreset>();
        if (j.contains("summarizer")) cfg.summarizer = j.at("summarizer").get<ClientPreset>();
        if (j.contains("judge")) cfg.judge = j.at("judge").get<ClientPreset>();
        if (j.contains("embedder")) cfg.embedder = j.at("embedder").get<ClientPreset>();
        if (j.contains("autoencoder")) cfg.autoencoder = j.at("autoencoder").get<ClientPreset>();
        if (j.contains("pair_scorer")) cfg.pair_scorer = j.at("pair_scorer").get<ClientPreset>();
        if (j.contains("dataset")) cfg.dataset = j.at("dataset").get<DatasetConfig>();
        if (j.contains("map_last_layers")) cfg.map_last_layers = j.at("map_last_layers").get<int>();
        if (j.contains("train")) cfg.train = j.at("train").get<TrainConfig>();
        if (j.contains("outline_train"))
            cfg.outline_train = j.at("outline_train").get<TrainConfig>();
        if (j.contains("decode")) cfg.decode = j.at("decode").get<ContinuationConfig>();
        if (j.contains("baseline")) cfg.baseline = j.at("baseline").get<BaselineConfig>();
        if (j.contains("scrub")) cfg.scrub = j.at("scrub").get<ScrubSpec>();
        if (j.contains("sweep_window")) cfg.sweep_window = j.at("sweep_window").get<int>();
        if (j.contains("sweep")) cfg.sweep = j.at("sweep").get<SweepSampling>();
        if (j.contains("judge_max_reasks"))
            cfg.judge_max_reasks = j.at("judge_max_reasks").get<int>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad run config: ") + e.what());
    }
    return cfg;
}

std::string interpolate_env(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    size_t at = 0;
    while (at < text.size()) {
        const size_t open = text.find("${", at);
        if (open == std::string::npos) {
            out.append(text, at, text.size() - at);
            break;
        }
        out.append(text, at, open - at);
        const size_t close = text.find('}', open + 2);
        if (close == std::string::npos)
            throw ConfigError("unterminated ${...} reference in config");
        const std::string name = text.substr(open + 2, close - open - 2);
        if (name.empty()) throw ConfigError("empty ${} reference in config");
        const char* value = std::getenv(name.c_str());
        if (value == nullptr)
            throw ConfigError("config references undefined environment variable " + name);
        out += value;
        at = close + 1;
    }
    return out;
}

RunConfig load_config(const std::string& path) {
    if (!file_exists(path)) throw ConfigError("config file not found: " + path);
    const std::string raw = interpolate_env(read_file(path));
    Json j;
    try {
        j = Json::parse(raw);
    } catch (const Json::exception& e) {
        throw FormatError("config file " + path + " is not valid json: " + e.what());
    }
    RunConfig cfg = config_from_json(j);
    cfg.validate();
    return cfg;
}

}  // namespace parascope
