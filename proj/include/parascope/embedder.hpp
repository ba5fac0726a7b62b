#pragma once

#include <memory>
#include <string>
#include <vector>

namespace parascope {

// Sentence-embedding client used for similarity scoring. Implementations
// must be deterministic for a fixed configuration.
class TextEmbedder {
public:
    virtual ~TextEmbedder() = default;
    virtual std::vector<float> embed(const std::string& text) = 0;
    virtual std::string space_id() const = 0;
    virtual int dim() const = 0;
};

// Offline embedder: salted-hash bag-of-words directions, so cosine between
// two texts tracks the overlap of their distinct words.
class BowEmbedder : public TextEmbedder {
public:
    explicit BowEmbedder(int dim = 384, uint64_t salt = 0x5eed'e44bULL);
    std::vector<float> embed(const std::string& text) override;
    std::string space_id() const override;
    int dim() const override { return dim_; }

private:
    int dim_;
    uint64_t salt_;
};

}  // namespace parascope
