#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace parascope {

constexpr int kTaeDim = 1024;

// Text autoencoder client: text -> 1024-dim embedding -> text. The embedding
// space identity travels with every vector so maps trained against one space
// are never applied in another.
class TextAutoencoder {
public:
    virtual ~TextAutoencoder() = default;
    virtual std::vector<float> encode(const std::string& text) = 0;
    virtual std::string decode(std::span<const float> embedding) = 0;
    virtual std::string space_id() const = 0;
};

// Offline autoencoder: set-of-words encoding over salted-hash directions,
// decoded by matching pursuit against a fixed lexicon. Encoding handles any
// text; decoding recovers the distinct lexicon words, most prominent first.
class BowAutoencoder : public TextAutoencoder {
public:
    explicit BowAutoencoder(uint64_t salt = 0x7ae5'a17aULL, double stop_threshold = 0.06,
                            int max_words = 64);
    std::vector<float> encode(const std::string& text) override;
    std::string decode(std::span<const float> embedding) override;
    std::string space_id() const override;

private:
    uint64_t salt_;
    double stop_threshold_;
    int max_words_;
    std::vector<std::vector<float>> lexicon_vectors_;
};

}  // namespace parascope
