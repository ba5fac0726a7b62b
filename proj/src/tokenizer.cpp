#include "parascope/tokenizer.hpp"

#include <algorithm>

#include "parascope/util.hpp"

namespace parascope {

ByteFallbackTokenizer::ByteFallbackTokenizer(std::vector<std::string> words,
                                             std::vector<std::string> extra_merges) {
    texts_.reserve(258 + words.size() + extra_merges.size());
    for (int b = 0; b < 256; ++b) {
        texts_.push_back(std::string(1, static_cast<char>(b)));
    }
    texts_.push_back("<bos>");
    texts_.push_back("\n\n");
    for (const auto& m : extra_merges) {
        texts_.push_back(m);
    }
    first_word_id_ = static_cast<TokenId>(texts_.size());
    word_count_ = static_cast<int>(words.size());
    for (const auto& w : words) {
        texts_.push_back(" " + w);
    }

    for (TokenId id = kBoundaryId; id < static_cast<TokenId>(texts_.size()); ++id) {
        const std::string& t = texts_[static_cast<size_t>(id)];
        by_first_byte_[static_cast<unsigned char>(t[0])].push_back(id);
    }
    for (auto& bucket : by_first_byte_) {
        std::sort(bucket.begin(), bucket.end(), [this](TokenId a, TokenId b) {
            const auto& ta = texts_[static_cast<size_t>(a)];
            const auto& tb = texts_[static_cast<size_t>(b)];
            if (ta.size() != tb.size()) return ta.size() > tb.size();
            return a < b;
        });
    }

    uint64_t h = 1469598103934665603ULL;
    for (const auto& t : texts_) {
        h = mix64(h, fnv1a64(t));
    }
    vocab_hash_ = h;
}

std::vector<TokenId> ByteFallbackTokenizer::tokenize(std::string_view text) const {
    std::vector<TokenId> out;
    out.reserve(text.size() / 4 + 4);
    size_t pos = 0;
    while (pos < text.size()) {
        const unsigned char first = static_cast<unsigned char>(text[pos]);
        TokenId matched = -1;
        for (TokenId id : by_first_byte_[first]) {
            const std::string& t = texts_[static_cast<size_t>(id)];
            if (text.compare(pos, t.size(), t) == 0) {
                matched = id;
                break;  // candidates are longest-first
            }
        }
        if (matched >= 0) {
            out.push_back(matched);
            pos += texts_[static_cast<size_t>(matched)].size();
        } else {
            out.push_back(static_cast<TokenId>(first));
            pos += 1;
        }
    }
    return out;
}

std::string ByteFallbackTokenizer::detokenize(std::span<const TokenId> tokens) const {
    std::string out;
    for (TokenId id : tokens) {
        out += token_text(id);
    }
    return out;
}

const std::string& ByteFallbackTokenizer::token_text(TokenId id) const {
    if (id < 0 || id >= static_cast<TokenId>(texts_.size())) {
        throw AdapterError("token id out of range: " + std::to_string(id));
    }
    return texts_[static_cast<size_t>(id)];
}

bool ByteFallbackTokenizer::token_contains_boundary(TokenId id) const {
    return token_text(id).find("\n\n") != std::string::npos;
}

}  // namespace parascope
