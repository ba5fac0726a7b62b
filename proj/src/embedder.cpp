#include "parascope/embedder.hpp"

#include "parascope/bow.hpp"
#include "parascope/errors.hpp"
#include "parascope/util.hpp"

namespace parascope {

BowEmbedder::BowEmbedder(int dim, uint64_t salt) : dim_(dim), salt_(salt) {
    if (dim < 8) throw ConfigError("embedder dimension too small");
}

std::vector<float> BowEmbedder::embed(const std::string& text) {
    return bow_encode_words(split_words(text), salt_, dim_);
}

std::string BowEmbedder::space_id() const {
    return "bow-embed-" + std::to_string(dim_) + "-" + hex64(salt_);
}

}  // namespace parascope
