#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parascope/adapter.hpp"

namespace parascope {

// Greedy longest-match tokenizer with raw-byte fallback.
//
// Ids 0..255 are single bytes, 256 is <bos>, and 257+ are string entries
// (the paragraph boundary "\n\n", space-prefixed words, optional extra
// merges such as ".\n\n"). Detokenize concatenates token texts, so
// detokenize(tokenize(s)) == s for any byte string.
class ByteFallbackTokenizer {
public:
    static constexpr TokenId kBosId = 256;
    static constexpr TokenId kBoundaryId = 257;

    explicit ByteFallbackTokenizer(std::vector<std::string> words,
                                   std::vector<std::string> extra_merges = {});

    std::vector<TokenId> tokenize(std::string_view text) const;
    std::string detokenize(std::span<const TokenId> tokens) const;
    const std::string& token_text(TokenId id) const;

    int vocab_size() const { return static_cast<int>(texts_.size()); }
    int word_count() const { return word_count_; }
    // First word entry id; words occupy [first_word_id, first_word_id + word_count).
    TokenId first_word_id() const { return first_word_id_; }
    uint64_t vocab_hash() const { return vocab_hash_; }

    bool token_contains_boundary(TokenId id) const;

private:
    std::vector<std::string> texts_;                // id -> text
    std::array<std::vector<TokenId>, 256> by_first_byte_;  // match candidates, longest first
    int word_count_ = 0;
    TokenId first_word_id_ = 0;
    uint64_t vocab_hash_ = 0;
};

}  // namespace parascope
