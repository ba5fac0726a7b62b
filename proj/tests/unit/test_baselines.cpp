#include <doctest.h>

#include <optional>
#include <string>
#include <vector>

#include "parascope/baselines.hpp"
#include "parascope/bow.hpp"
#include "parascope/dataset.hpp"
#include "parascope/errors.hpp"
#include "parascope/metrics.hpp"
#include "parascope/tiny_model.hpp"

using namespace parascope;

namespace {

TinyLmConfig small_config() {
    TinyLmConfig cfg;
    cfg.layers = 3;
    cfg.dim = 32;
    cfg.heads = 2;
    cfg.ffn_dim = 64;
    cfg.window = 512;
    cfg.logit_scale = 3.0f;
    cfg.extra_merges = {".\n\n"};
    return cfg;
}

GenerationParams greedy(int max_new_tokens) {
    GenerationParams p;
    p.max_new_tokens = max_new_tokens;
    p.temperature = 0.0;
    return p;
}

// A greedy generation with at least one paragraph break after the prompt.
// Greedy decoding is prompt-determined, so we scan prompts, not seeds.
std::optional<GenerationRecord> multi_paragraph_record(TinyLm& lm) {
    const std::vector<std::string> prompts = {
        "Write a piece, titled 'storm season', which includes clouds and rain. "
        "The full piece should be approximately three paragraphs.",
        "Write a piece, titled 'river trade', which includes ships and grain. "
        "The full piece should be approximately three paragraphs.",
        "Write an article, titled 'harvest festival', which includes bread and markets. "
        "The full piece should be approximately two paragraphs.",
        "Write a chapter, titled 'night watch', which includes towers and lanterns. "
        "The full piece should be approximately three paragraphs.",
    };
    for (size_t i = 0; i < prompts.size(); ++i) {
        PromptRecord prompt;
        prompt.prompt_id = "prompt-" + std::to_string(i);
        prompt.source_chunk_ref = "test-chunk";
        prompt.prompt_text = prompts[i];
        GenerationRecord rec = build_generation_record(prompt, lm, greedy(240), 7);
        if (!rec.boundary_positions.empty()) return rec;
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("blind baseline generates from the blank context alone") {
    TinyLm lm(small_config());

    std::vector<std::string> one = blind_baseline(lm, greedy(32));
    REQUIRE(one.size() == 1);
    CHECK_FALSE(one[0].empty());

    // Oracle: generating from [bos, boundary] by hand gives the same text.
    std::vector<TokenId> blank = {lm.bos_token_id(), lm.boundary_token_id()};
    std::vector<GenerationOutput> direct = lm.generate(blank, greedy(32));
    REQUIRE(direct.size() == 1);
    CHECK(one[0] == direct[0].text);

    GenerationParams sampled;
    sampled.max_new_tokens = 16;
    sampled.temperature = 0.7;
    sampled.seed = 42;
    sampled.num_samples = 64;
    std::vector<std::string> many = blind_baseline(lm, sampled);
    REQUIRE(many.size() == 64);
    CHECK(many == blind_baseline(lm, sampled));  // seeded, so reproducible

    bool any_differ = false;
    for (const std::string& t : many) any_differ = any_differ || t != many[0];
    CHECK(any_differ);  // at temperature 0.7 the samples spread out
}

TEST_CASE("cheat-k reveals at most half the reference tokens") {
    TinyLm lm(small_config());
    const std::string ref = "the river carries water over the old stone bridge";
    const std::vector<TokenId> ref_tokens = lm.tokenize(ref);
    const int n = static_cast<int>(ref_tokens.size());
    REQUIRE(n >= 4);

    // Exactly half is allowed; one more is not, whatever the parity.
    BaselineResult at_half =
        cheat_k_baseline("rec-1", 0, ref, n / 2, lm, greedy(24));
    CHECK_FALSE(at_half.filtered);
    CHECK(at_half.method == "cheat_k");
    CHECK(at_half.k == n / 2);
    CHECK(at_half.boundary_index == 0);
    REQUIRE(at_half.texts.size() == 1);
    at_half.validate();

    BaselineResult past_half =
        cheat_k_baseline("rec-1", 0, ref, n / 2 + 1, lm, greedy(24));
    CHECK(past_half.filtered);
    CHECK(past_half.texts.empty());
    CHECK_FALSE(past_half.filter_reason.empty());
    past_half.validate();

    // The retained text starts with the revealed prefix and continues with
    // exactly what the model generates from blank-context + prefix.
    const int k = n / 2;
    const std::string prefix = lm.detokenize(
        std::vector<TokenId>(ref_tokens.begin(), ref_tokens.begin() + k));
    CHECK(at_half.texts[0].rfind(prefix, 0) == 0);

    std::vector<TokenId> ctx = {lm.bos_token_id(), lm.boundary_token_id()};
    ctx.insert(ctx.end(), ref_tokens.begin(), ref_tokens.begin() + k);
    std::vector<GenerationOutput> direct = lm.generate(ctx, greedy(24));
    CHECK(at_half.texts[0] == prefix + direct[0].text);
}

TEST_CASE("cheat-k filter message names the numbers") {
    TinyLm lm(small_config());
    // Grow a reference that is exactly eight tokens long; k = 5 would then
    // reveal more than half.
    const std::vector<std::string> pool = {"river",  "water", "stone", "bridge", "grain",
                                           "market", "wind",  "rain",  "ship",   "storm",
                                           "cloud",  "road"};
    std::string ref;
    for (const std::string& word : pool) {
        const std::string longer = ref.empty() ? word : ref + " " + word;
        if (lm.tokenize(longer).size() <= 8) ref = longer;
        if (lm.tokenize(ref).size() == 8) break;
    }
    REQUIRE(lm.tokenize(ref).size() == 8);

    BaselineResult r = cheat_k_baseline("rec-2", 1, ref, 5, lm, greedy(8));
    CHECK(r.filtered);
    CHECK(r.k == 5);
    CHECK(r.filter_reason == "k=5 would reveal more than 50% of the 8-token reference");

    BaselineResult kept = cheat_k_baseline("rec-2", 1, ref, 4, lm, greedy(8));
    CHECK_FALSE(kept.filtered);

    BaselineResult empty_ref = cheat_k_baseline("rec-2", 1, "", 4, lm, greedy(8));
    CHECK(empty_ref.filtered);
    CHECK(empty_ref.filter_reason == "empty reference paragraph");

    CHECK_THROWS_AS(cheat_k_baseline("rec-2", 1, ref, 0, lm, greedy(8)), ConfigError);
    CHECK_THROWS_AS(cheat_k_baseline("rec-2", 1, ref, -3, lm, greedy(8)), ConfigError);
}

TEST_CASE("regenerate reproduces the original greedy continuation exactly") {
    TinyLm lm(small_config());
    std::optional<GenerationRecord> maybe = multi_paragraph_record(lm);
    REQUIRE(maybe.has_value());
    const GenerationRecord& rec = *maybe;

    const int64_t b0 = rec.boundary_positions[0];
    const int64_t remaining = static_cast<int64_t>(rec.token_ids.size()) - (b0 + 1);
    REQUIRE(remaining >= 1);

    // Greedy-on-greedy: with the budget set to the original remaining token
    // count, regeneration must reproduce the recorded text token for token.
    std::vector<std::string> texts =
        regenerate_baseline(rec, 0, lm, greedy(static_cast<int>(remaining)));
    REQUIRE(texts.size() == 1);
    const std::string expected = lm.detokenize(
        std::span<const TokenId>(rec.token_ids).subspan(static_cast<size_t>(b0) + 1));
    CHECK(texts[0] == expected);
    CHECK(first_paragraph(texts[0]) == rec.paragraph_after_boundary(0));

    // Deterministic under repetition.
    CHECK(regenerate_baseline(rec, 0, lm, greedy(static_cast<int>(remaining))) == texts);

    // Out-of-range boundary index.
    CHECK_THROWS_AS(regenerate_baseline(rec, rec.boundary_positions.size(), lm, greedy(8)),
                    IndexError);

    // A budget the context window cannot hold.
    CHECK_THROWS_AS(regenerate_baseline(rec, 0, lm, greedy(500)), LengthError);
}

TEST_CASE("auto-decode round trips through the embedding space faithfully") {
    BowAutoencoder tae;
    const std::vector<std::string> refs = {
        "the river carries water over the old stone bridge",
        "the farmer brings bread to the market before the festival",
        "clouds gather over the valley and rain falls when the storm comes",
    };
    for (const std::string& ref : refs) {
        const std::string decoded = auto_decode_baseline(ref, tae);
        CHECK_FALSE(decoded.empty());
        const double fidelity = cosine(tae.encode(decoded), tae.encode(ref));
        CHECK(fidelity >= 0.9);
    }

    CHECK_THROWS_AS(auto_decode_baseline("", tae), DataError);
}

TEST_CASE("first paragraph cuts at the first blank line") {
    CHECK(first_paragraph("aaa\n\nbbb\n\nccc") == "aaa");
    CHECK(first_paragraph("no breaks here") == "no breaks here");
    CHECK(first_paragraph("\n\nleading") == "");
    CHECK(first_paragraph("trailing\n\n") == "trailing");
    CHECK(first_paragraph("") == "");
}

TEST_CASE("baseline rows validate and round trip as json") {
    BaselineResult row;
    row.record_id = "rec-9";
    row.method = "cheat_k";
    row.k = 3;
    row.boundary_index = 2;
    row.texts = {"alpha", "beta"};
    row.validate();

    Json j;
    to_json(j, row);
    BaselineResult back;
    from_json(j, back);
    CHECK(back.record_id == row.record_id);
    CHECK(back.method == row.method);
    CHECK(back.k == row.k);
    CHECK(back.boundary_index == row.boundary_index);
    CHECK(back.texts == row.texts);
    CHECK(back.filtered == row.filtered);
    CHECK(back.filter_reason == row.filter_reason);

    BaselineResult filtered_row = row;
    filtered_row.texts.clear();
    filtered_row.filtered = true;
    filtered_row.filter_reason = "too revealing";
    filtered_row.validate();

    BaselineResult no_reason = filtered_row;
    no_reason.filter_reason.clear();
    CHECK_THROWS_AS(no_reason.validate(), DataError);

    BaselineResult contradictory = row;
    contradictory.filtered = true;  // filtered rows must not carry texts
    CHECK_THROWS_AS(contradictory.validate(), DataError);

    BaselineResult empty_not_filtered = row;
    empty_not_filtered.texts.clear();
    CHECK_THROWS_AS(empty_not_filtered.validate(), DataError);

    BaselineResult nameless = row;
    nameless.record_id.clear();
    CHECK_THROWS_AS(nameless.validate(), DataError);

    BaselineResult methodless = row;
    methodless.method.clear();
    CHECK_THROWS_AS(methodless.validate(), DataError);
}
