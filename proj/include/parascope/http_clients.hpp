#pragma once

#include <memory>
#include <string>
#include <vector>

#include "parascope/chat.hpp"
#include "parascope/embedder.hpp"
#include "parascope/evaluation.hpp"
#include "parascope/tae_client.hpp"

namespace parascope {

struct HttpClientConfig {
    std::string base_url;     // e.g. "http://127.0.0.1:8089"
    std::string model;        // model identifier sent with chat requests
    std::string api_key_env;  // environment variable holding the bearer token; empty = none
    double temperature = 0.0;
    int timeout_seconds = 120;
    int max_retries = 2;
    int retry_backoff_ms = 250;
};

// Chat-completion client for an OpenAI-style endpoint:
// POST {base}/v1/chat/completions -> choices[0].message.content.
class HttpChatClient : public ChatClient {
public:
    explicit HttpChatClient(HttpClientConfig config);
    ~HttpChatClient() override;
    std::string complete(const std::vector<ChatMessage>& messages) override;
    std::string client_id() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Text autoencoder over HTTP:
// POST {base}/encode {"text"} -> {"embedding"}; POST {base}/decode {"embedding"} -> {"text"};
// GET {base}/space_id -> {"space_id"} (falls back to the base url when absent).
class HttpTextAutoencoder : public TextAutoencoder {
public:
    explicit HttpTextAutoencoder(HttpClientConfig config);
    ~HttpTextAutoencoder() override;
    std::vector<float> encode(const std::string& text) override;
    std::string decode(std::span<const float> embedding) override;
    std::string space_id() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Learned pairwise similarity over HTTP:
// POST {base}/score {"candidate","reference"} -> {"score"}.
class HttpPairScorer : public PairScorer {
public:
    explicit HttpPairScorer(HttpClientConfig config);
    ~HttpPairScorer() override;
    double score(const std::string& candidate, const std::string& reference) override;
    std::string scorer_id() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Sentence embedder over HTTP: POST {base}/embed {"text"} -> {"embedding"}.
class HttpEmbedder : public TextEmbedder {
public:
    explicit HttpEmbedder(HttpClientConfig config);
    ~HttpEmbedder() override;
    std::vector<float> embed(const std::string& text) override;
    std::string space_id() const override;
    int dim() const override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace parascope
