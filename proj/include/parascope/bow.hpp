#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace parascope {

// Deterministic unit vector for a word, drawn from a salted hash. Words map
// to near-orthogonal directions, so a sum over distinct words behaves like a
// set embedding: cosine between two texts tracks their word overlap.
std::vector<float> bow_word_vector(std::string_view word, uint64_t salt, int dim);

// L2-normalized sum of the distinct words' vectors; zero vector for no words.
std::vector<float> bow_encode_words(const std::vector<std::string>& words, uint64_t salt, int dim);

}  // namespace parascope
