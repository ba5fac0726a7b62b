#include "parascope/http_clients.hpp"

#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <thread>

#include "parascope/errors.hpp"
#include "parascope/jsonl.hpp"

namespace parascope {

namespace {

struct Transport {
    HttpClientConfig cfg;
    httplib::Client client;

    explicit Transport(HttpClientConfig c) : cfg(std::move(c)), client(cfg.base_url) {
        if (cfg.base_url.empty()) throw ConfigError("http client: base_url is empty");
        client.set_connection_timeout(cfg.timeout_seconds);
        client.set_read_timeout(cfg.timeout_seconds);
        client.set_write_timeout(cfg.timeout_seconds);
        if (!cfg.api_key_env.empty()) {
            const char* key = std::getenv(cfg.api_key_env.c_str());
            if (!key || !*key)
                throw ConfigError("http client: environment variable " + cfg.api_key_env +
                                  " is not set (required for " + cfg.base_url + ")");
            client.set_default_headers({{"Authorization", std::string("Bearer ") + key}});
        }
    }

    // POST with bounded retries on transport errors and 5xx responses.
    Json post_json(const std::string& path, const Json& body) {
        std::string payload = body.dump();
        std::string last_error;
        for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
            if (attempt > 0 && cfg.retry_backoff_ms > 0)
                std::this_thread::sleep_for(std::chrono::milliseconds(cfg.retry_backoff_ms * attempt));
            httplib::Result res = client.Post(path, payload, "application/json");
            if (!res) {
                last_error = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500) {
                last_error = "server error " + std::to_string(res->status) + " from " + path;
                continue;
            }
            if (res->status != 200)
                throw ClientError("http " + std::to_string(res->status) + " from " + cfg.base_url +
                                  path + ": " + res->body);
            try {
                return Json::parse(res->body);
            } catch (const Json::exception& e) {
                throw ClientError("invalid json from " + cfg.base_url + path + ": " + e.what());
            }
        }
        throw ClientError("request to " + cfg.base_url + path + " failed after " +
                          std::to_string(cfg.max_retries + 1) + " attempts: " + last_error);
    }
};

}  // namespace

struct HttpChatClient::Impl {
    Transport transport;
    explicit Impl(HttpClientConfig c) : transport(std::move(c)) {}
};

HttpChatClient::HttpChatClient(HttpClientConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}
HttpChatClient::~HttpChatClient() = default;

std::string HttpChatClient::complete(const std::vector<ChatMessage>& messages) {
    Json body;
    body["model"] = impl_->transport.cfg.model;
    body["temperature"] = impl_->transport.cfg.temperature;
    Json msgs = Json::array();
    for (const ChatMessage& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    body["messages"] = msgs;

    Json reply = impl_->transport.post_json("/v1/chat/completions", body);
    try {
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const Json::exception& e) {
        throw ClientError("chat reply missing choices[0].message.content: " + std::string(e.what()));
    }
}

std::string HttpChatClient::client_id() const {
    return impl_->transport.cfg.model.empty() ? impl_->transport.cfg.base_url
                                              : impl_->transport.cfg.model;
}

struct HttpTextAutoencoder::Impl {
    Transport transport;
    explicit Impl(HttpClientConfig c) : transport(std::move(c)) {}
};

HttpTextAutoencoder::HttpTextAutoencoder(HttpClientConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}
HttpTextAutoencoder::~HttpTextAutoencoder() = default;

std::vector<float> HttpTextAutoencoder::encode(const std::string& text) {
    Json reply = impl_->transport.post_json("/encode", Json{{"text", text}});
    std::vector<float> out;
    try {
        out = reply.at("embedding").get<std::vector<float>>();
    } catch (const Json::exception& e) {
        throw ClientError("encode reply missing embedding: " + std::string(e.what()));
    }
    if (static_cast<int>(out.size()) != kTaeDim)
        throw ClientError("encode returned dimension " + std::to_string(out.size()) +
                          ", expected " + std::to_string(kTaeDim));
    return out;
}

std::string HttpTextAutoencoder::decode(std::span<const float> embedding) {
    Json body{{"embedding", std::vector<float>(embedding.begin(), embedding.end())}};
    Json reply = impl_->transport.post_json("/decode", body);
    try {
        return reply.at("text").get<std::string>();
    } catch (const Json::exception& e) {
        throw ClientError("decode reply missing text: " + std::string(e.what()));
    }
}

std::string HttpTextAutoencoder::space_id() const {
    httplib::Result res = impl_->transport.client.Get("/space_id");
    if (res && res->status == 200) {
        try {
            return Json::parse(res->body).at("space_id").get<std::string>();
        } catch (const Json::exception&) {
        }
    }
    return impl_->transport.cfg.base_url;
}

struct HttpPairScorer::Impl {
    Transport transport;
    explicit Impl(HttpClientConfig c) : transport(std::move(c)) {}
};

HttpPairScorer::HttpPairScorer(HttpClientConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}
HttpPairScorer::~HttpPairScorer() = default;

double HttpPairScorer::score(const std::string& candidate, const std::string& reference) {
    Json reply = impl_->transport.post_json(
        "/score", Json{{"candidate", candidate}, {"reference", reference}});
    try {
        return reply.at("score").get<double>();
    } catch (const Json::exception& e) {
        throw ClientError("score reply missing score: " + std::string(e.what()));
    }
}

std::string HttpPairScorer::scorer_id() const {
    return impl_->transport.cfg.model.empty() ? impl_->transport.cfg.base_url
                                              : impl_->transport.cfg.model;
}

struct HttpEmbedder::Impl {
    Transport transport;
    int dim = -1;
    explicit Impl(HttpClientConfig c) : transport(std::move(c)) {}
};

HttpEmbedder::HttpEmbedder(HttpClientConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}
HttpEmbedder::~HttpEmbedder() = default;

std::vector<float> HttpEmbedder::embed(const std::string& text) {
    Json reply = impl_->transport.post_json("/embed", Json{{"text", text}});
    std::vector<float> out;
    try {
        out = reply.at("embedding").get<std::vector<float>>();
    } catch (const Json::exception& e) {
        throw ClientError("embed reply missing embedding: " + std::string(e.what()));
    }
    if (out.empty()) throw ClientError("embed returned an empty vector");
    if (impl_->dim < 0) impl_->dim = static_cast<int>(out.size());
    if (static_cast<int>(out.size()) != impl_->dim)
        throw ClientError("embed dimension changed mid-run: " + std::to_string(out.size()) +
                          " vs " + std::to_string(impl_->dim));
    return out;
}

std::string HttpEmbedder::space_id() const {
    return impl_->transport.cfg.model.empty() ? impl_->transport.cfg.base_url
                                              : impl_->transport.cfg.model;
}

int HttpEmbedder::dim() const { return impl_->dim; }

}  // namespace parascope
