#include "parascope/tae_client.hpp"

#include <cmath>

#include "parascope/bow.hpp"
#include "parascope/errors.hpp"
#include "parascope/util.hpp"
#include "parascope/wordlist.hpp"

namespace parascope {

BowAutoencoder::BowAutoencoder(uint64_t salt, double stop_threshold, int max_words)
    : salt_(salt), stop_threshold_(stop_threshold), max_words_(max_words) {
    const auto& words = builtin_wordlist();
    lexicon_vectors_.reserve(words.size());
    for (const auto& w : words) lexicon_vectors_.push_back(bow_word_vector(w, salt_, kTaeDim));
}

std::vector<float> BowAutoencoder::encode(const std::string& text) {
    return bow_encode_words(split_words(text), salt_, kTaeDim);
}

std::string BowAutoencoder::decode(std::span<const float> embedding) {
    if (static_cast<int>(embedding.size()) != kTaeDim)
        throw DecodeError("embedding length " + std::to_string(embedding.size()) + " != " +
                          std::to_string(kTaeDim));
    for (float x : embedding)
        if (!std::isfinite(x)) throw DecodeError("embedding contains non-finite values");

    // Matching pursuit: peel off the strongest lexicon direction until the
    // residual correlates with nothing.
    std::vector<double> residual(embedding.begin(), embedding.end());
    const auto& words = builtin_wordlist();
    std::vector<bool> used(words.size(), false);
    std::string out;
    for (int step = 0; step < max_words_; ++step) {
        double best = 0.0;
        size_t best_i = 0;
        for (size_t i = 0; i < lexicon_vectors_.size(); ++i) {
            if (used[i]) continue;
            double dot = 0.0;
            const auto& u = lexicon_vectors_[i];
            for (size_t k = 0; k < u.size(); ++k) dot += residual[k] * static_cast<double>(u[k]);
            if (dot > best) {
                best = dot;
                best_i = i;
            }
        }
        if (best < stop_threshold_) break;
        used[best_i] = true;
        const auto& u = lexicon_vectors_[best_i];
        for (size_t k = 0; k < u.size(); ++k) residual[k] -= best * static_cast<double>(u[k]);
        if (!out.empty()) out += ' ';
        out += words[best_i];
    }
    return out;
}

std::string BowAutoencoder::space_id() const { return "bow-tae-1024-" + hex64(salt_); }

}  // namespace parascope
