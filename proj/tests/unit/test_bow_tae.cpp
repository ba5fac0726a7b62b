#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "parascope/bow.hpp"
#include "parascope/embedder.hpp"
#include "parascope/errors.hpp"
#include "parascope/metrics.hpp"
#include "parascope/tae_client.hpp"
#include "parascope/util.hpp"
#include "parascope/wordlist.hpp"

using namespace parascope;

namespace {

std::span<const float> fs(const std::vector<float>& v) { return {v.data(), v.size()}; }

double l2_norm(const std::vector<float>& v) {
    double s = 0.0;
    for (float x : v) s += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("word vectors are deterministic unit vectors, near-orthogonal across words") {
    const uint64_t salt = 123;
    auto a = bow_word_vector("river", salt, 1024);
    auto b = bow_word_vector("river", salt, 1024);
    CHECK(a == b);
    CHECK(l2_norm(a) == doctest::Approx(1.0));

    auto c = bow_word_vector("stone", salt, 1024);
    CHECK(std::abs(cosine(fs(a), fs(c))) < 0.15);

    // Salt changes the direction for the same word.
    auto d = bow_word_vector("river", salt + 1, 1024);
    CHECK(std::abs(cosine(fs(a), fs(d))) < 0.15);
}

TEST_CASE("encoding is a set embedding: order and repetition do not matter") {
    const uint64_t salt = 9;
    auto v1 = bow_encode_words({"north", "wind", "cold"}, salt, 512);
    auto v2 = bow_encode_words({"cold", "north", "wind", "wind", "cold"}, salt, 512);
    CHECK(v1 == v2);
    CHECK(l2_norm(v1) == doctest::Approx(1.0));

    auto none = bow_encode_words({}, salt, 512);
    CHECK(l2_norm(none) == 0.0);
}

TEST_CASE("embedder cosine tracks distinct-word overlap") {
    BowEmbedder emb;
    CHECK(emb.dim() == 384);
    CHECK_FALSE(emb.space_id().empty());

    auto a = emb.embed("The river runs past the old mill.");
    CHECK(static_cast<int>(a.size()) == emb.dim());
    auto a_again = emb.embed("the river runs past the old MILL");  // case/punct insensitive
    CHECK(cosine(fs(a), fs(a_again)) == doctest::Approx(1.0));

    auto related = emb.embed("The river runs past the new bridge.");
    auto unrelated = emb.embed("Quantum chemistry models electron orbitals precisely.");
    CHECK(cosine(fs(a), fs(related)) > cosine(fs(a), fs(unrelated)));
    CHECK(cosine(fs(a), fs(unrelated)) < 0.2);

    auto empty = emb.embed("!!! ???");
    CHECK(l2_norm(empty) == 0.0);
    CHECK(cosine(fs(a), fs(empty)) == 0.0);
}

TEST_CASE("autoencoder encode produces unit vectors in the 1024-dim space") {
    BowAutoencoder tae;
    auto v = tae.encode("morning light over the water");
    CHECK(static_cast<int>(v.size()) == kTaeDim);
    CHECK(l2_norm(v) == doctest::Approx(1.0));
    CHECK_FALSE(tae.space_id().empty());

    // Deterministic across instances with the same salt.
    BowAutoencoder tae2;
    CHECK(tae2.encode("morning light over the water") == v);
    CHECK(tae2.space_id() == tae.space_id());
}

TEST_CASE("decode recovers the distinct lexicon words of a paragraph") {
    BowAutoencoder tae;
    const std::string text = "the river carries water over the old stone bridge";
    auto emb = tae.encode(text);
    std::string decoded = tae.decode(fs(emb));

    std::set<std::string> want;
    for (const auto& w : split_words(text)) want.insert(w);
    std::vector<std::string> got_words = split_words(decoded);
    std::set<std::string> got(got_words.begin(), got_words.end());
    CHECK(got == want);
    // No duplicates: matching pursuit marks words as used.
    CHECK(got_words.size() == got.size());
}

TEST_CASE("auto-decode round trip keeps cosine at or above 0.9") {
    BowAutoencoder tae;
    const std::vector<std::string> paragraphs = {
        "the river carries water over the old stone bridge",
        "the farmer brings bread to the market before the festival",
        "clouds gather over the valley and rain falls when the storm comes",
        "the small ship turns when the wind changes and waves rise",
        "children played games in the garden while the sun was high",
    };
    for (const std::string& text : paragraphs) {
        auto original = tae.encode(text);
        std::string decoded = tae.decode(fs(original));
        auto re_encoded = tae.encode(decoded);
        CHECK(cosine(fs(original), fs(re_encoded)) >= 0.9);
    }
}

TEST_CASE("decode rejects malformed embeddings") {
    BowAutoencoder tae;
    std::vector<float> wrong(512, 0.1f);
    CHECK_THROWS_AS(tae.decode(fs(wrong)), DecodeError);

    std::vector<float> bad(kTaeDim, 0.0f);
    bad[5] = std::numeric_limits<float>::quiet_NaN();
    CHECK_THROWS_AS(tae.decode(fs(bad)), DecodeError);

    // A zero embedding decodes to nothing rather than hallucinating words.
    std::vector<float> zero(kTaeDim, 0.0f);
    CHECK(tae.decode(fs(zero)).empty());
}

TEST_CASE("decode orders words by prominence") {
    BowAutoencoder tae;
    // Build a weighted mixture by hand: "storm" dominates "garden".
    auto w1 = bow_word_vector("storm", 0x7ae5'a17aULL, kTaeDim);
    auto w2 = bow_word_vector("garden", 0x7ae5'a17aULL, kTaeDim);
    std::vector<float> mix(kTaeDim);
    for (int i = 0; i < kTaeDim; ++i) mix[i] = 0.9f * w1[i] + 0.4f * w2[i];
    std::vector<std::string> words = split_words(tae.decode(fs(mix)));
    REQUIRE(words.size() >= 2);
    CHECK(words[0] == "storm");
    CHECK(words[1] == "garden");
}
