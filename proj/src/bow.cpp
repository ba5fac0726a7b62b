#include "parascope/bow.hpp"

#include <cmath>
#include <set>

#include "parascope/util.hpp"

namespace parascope {

std::vector<float> bow_word_vector(std::string_view word, uint64_t salt, int dim) {
    Rng rng = make_rng(mix64(salt, fnv1a64(word)));
    std::normal_distribution<float> dist(0.0f, 1.0f);
    std::vector<float> v(static_cast<size_t>(dim));
    double norm2 = 0.0;
    for (float& x : v) {
        x = dist(rng);
        norm2 += static_cast<double>(x) * x;
    }
    const float inv = static_cast<float>(1.0 / std::sqrt(norm2));
    for (float& x : v) x *= inv;
    return v;
}

std::vector<float> bow_encode_words(const std::vector<std::string>& words, uint64_t salt, int dim) {
    // Sum in sorted order and in double so the result is a pure function of
    // the distinct-word set, independent of word order in the source text.
    std::set<std::string> distinct(words.begin(), words.end());
    std::vector<double> acc(static_cast<size_t>(dim), 0.0);
    for (const std::string& w : distinct) {
        std::vector<float> u = bow_word_vector(w, salt, dim);
        for (size_t i = 0; i < acc.size(); ++i) acc[i] += static_cast<double>(u[i]);
    }
    double norm2 = 0.0;
    for (double x : acc) norm2 += x * x;
    const double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
    std::vector<float> out(static_cast<size_t>(dim));
    for (size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(acc[i] * inv);
    return out;
}

}  // namespace parascope
