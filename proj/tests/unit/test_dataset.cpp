#include <doctest.h>

#include <string>
#include <vector>

#include "parascope/dataset.hpp"
#include "parascope/errors.hpp"
#include "parascope/stub_clients.hpp"
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

}  // namespace

TEST_CASE("paragraph split reconstructs the text and finds boundary tokens") {
    TinyLm lm(small_config());
    const std::string text = "the river moves\n\nunder the old bridge\n\nwater is cold";
    auto tokens = lm.tokenize(text);
    ParagraphSplit split = split_paragraphs(text, tokens, lm, 0);

    REQUIRE(split.paragraphs.size() == 3);
    CHECK(split.paragraphs[0] == "the river moves");
    CHECK(split.paragraphs[1] == "under the old bridge");
    CHECK(split.paragraphs[2] == "water is cold");
    REQUIRE(split.boundary_positions.size() == 2);
    for (int64_t p : split.boundary_positions) {
        std::string piece = lm.detokenize(std::vector<TokenId>{tokens[static_cast<size_t>(p)]});
        CHECK(piece.find("\n\n") != std::string::npos);
    }
}

TEST_CASE("merged boundary tokens split inside the token text") {
    TinyLm lm(small_config());  // tokenizer knows the ".\n\n" merge
    const std::string text = "the water rises.\n\nthe bridge holds";
    auto tokens = lm.tokenize(text);

    // The merge must actually be used for this test to mean anything.
    bool merged_used = false;
    for (TokenId t : tokens)
        if (lm.detokenize(std::vector<TokenId>{t}) == ".\n\n") merged_used = true;
    REQUIRE(merged_used);

    ParagraphSplit split = split_paragraphs(text, tokens, lm, 10);
    REQUIRE(split.paragraphs.size() == 2);
    CHECK(split.paragraphs[0] == "the water rises.");  // period stays with paragraph one
    CHECK(split.paragraphs[1] == "the bridge holds");
    REQUIRE(split.boundary_positions.size() == 1);
    // Offset shifts token indices into the caller's coordinate system.
    CHECK(split.boundary_positions[0] >= 10);
}

TEST_CASE("paragraph split rejects tokens that do not match the text") {
    TinyLm lm(small_config());
    auto tokens = lm.tokenize("some other words");
    CHECK_THROWS_AS(split_paragraphs("entirely different", tokens, lm, 0), AlignmentError);
}

TEST_CASE("corpus chunking respects the size window and keeps all content") {
    std::string corpus;
    std::vector<std::string> blocks;
    for (int i = 0; i < 12; ++i) {
        std::string block = "block " + std::to_string(i) + " ";
        for (int k = 0; k < 40; ++k) block += "word" + std::to_string(k % 7) + " ";
        blocks.push_back(block);
        corpus += block + "\n\n";
    }
    auto chunks = chunk_corpus_text(corpus, 500, 2000);
    CHECK(chunks.size() > 1);
    for (const auto& c : chunks) CHECK(c.size() <= 2000);
    // Greedy packing: every chunk except possibly the last reaches the floor.
    for (size_t i = 0; i + 1 < chunks.size(); ++i) CHECK(chunks[i].size() >= 500);
    // No block content is lost.
    std::string joined;
    for (const auto& c : chunks) joined += c + "\n\n";
    for (const auto& b : blocks) CHECK(joined.find(b) != std::string::npos);

    CHECK(chunk_corpus_text("", 500, 2000).empty());
    CHECK(chunk_corpus_text("   \n\n  \n\n", 500, 2000).empty());
    CHECK_THROWS_AS(chunk_corpus_text(corpus, 100, 50), ConfigError);
}

TEST_CASE("oversized single blocks are clipped to the ceiling") {
    std::string giant(5000, 'x');
    auto chunks = chunk_corpus_text(giant, 500, 2000);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].size() == 2000);
}

TEST_CASE("prompt synthesis produces a record and drops bad inputs with reasons") {
    StubPromptWriter writer;
    PromptSynthesisResult ok =
        synthesize_prompt("the river carries water over the old stone bridge", "chunk-0", writer, 1);
    REQUIRE(ok.record.has_value());
    CHECK(ok.drop_reason.empty());
    CHECK(ok.record->source_chunk_ref == "chunk-0");
    CHECK(ok.record->prompt_text.find("Write a") != std::string::npos);
    CHECK_FALSE(ok.record->prompt_id.empty());

    PromptSynthesisResult empty = synthesize_prompt("  \n ", "chunk-1", writer, 1);
    CHECK_FALSE(empty.record.has_value());
    CHECK(empty.drop_reason == "empty chunk");

    FailingChatClient always(-1);
    PromptSynthesisResult failed = synthesize_prompt("some words here", "chunk-2", always, 2);
    CHECK_FALSE(failed.record.has_value());
    CHECK(failed.drop_reason.find("client failure") == 0);
}

TEST_CASE("generation records satisfy their invariants and reconstruct exactly") {
    TinyLm lm(small_config());
    PromptRecord prompt;
    prompt.prompt_id = "prompt-test";
    prompt.source_chunk_ref = "chunk-test";
    prompt.prompt_text = "Write a piece, titled 'the river bridge', which includes water and "
                         "stone. The full piece should be approximately three paragraphs.";

    GenerationParams params;
    params.max_new_tokens = 96;
    params.temperature = 1.0;

    GenerationRecord rec = build_generation_record(prompt, lm, params, 42);
    rec.validate();
    CHECK(rec.prompt.prompt_id == "prompt-test");
    CHECK(rec.seed == 42);
    CHECK(rec.params.num_samples == 1);

    // Token layout: [bos] + prompt + boundary + generated.
    CHECK(rec.token_ids[0] == lm.bos_token_id());
    const auto prompt_tokens = lm.tokenize(prompt.prompt_text);
    CHECK(rec.prompt_boundary_position == static_cast<int64_t>(prompt_tokens.size()) + 1);
    CHECK(rec.token_ids[static_cast<size_t>(rec.prompt_boundary_position)] ==
          lm.boundary_token_id());

    // The generated suffix detokenizes to full_text.
    std::vector<TokenId> generated(rec.token_ids.begin() + rec.prompt_boundary_position + 1,
                                   rec.token_ids.end());
    CHECK(lm.detokenize(generated) == rec.full_text);

    // Rebuilding with the same seed is byte-identical; a new seed is not.
    GenerationRecord again = build_generation_record(prompt, lm, params, 42);
    CHECK(again.full_text == rec.full_text);
    CHECK(again.token_ids == rec.token_ids);
    GenerationRecord other = build_generation_record(prompt, lm, params, 43);
    CHECK(other.full_text != rec.full_text);
}

TEST_CASE("context through a boundary ends at that boundary token") {
    TinyLm lm(small_config());
    PromptRecord prompt;
    prompt.prompt_id = "p";
    prompt.prompt_text = "Write a piece, titled 'water', which includes rivers. The full piece "
                         "should be approximately two paragraphs.";
    GenerationParams params;
    params.max_new_tokens = 120;
    params.temperature = 1.0;

    // Seeds differ in paragraph counts; find one with an internal boundary.
    for (uint64_t seed = 1; seed <= 30; ++seed) {
        GenerationRecord rec = build_generation_record(prompt, lm, params, seed);
        if (rec.boundary_positions.empty()) continue;
        auto ctx = rec.context_through_boundary(0);
        CHECK(static_cast<int64_t>(ctx.size()) == rec.boundary_positions[0] + 1);
        CHECK(ctx.back() == rec.token_ids[static_cast<size_t>(rec.boundary_positions[0])]);
        CHECK_FALSE(rec.paragraph_after_boundary(0).empty());
        CHECK(rec.paragraph_after_boundary(0) == rec.paragraphs[1]);
        CHECK_THROWS_AS(rec.context_through_boundary(rec.boundary_positions.size()), IndexError);
        return;
    }
    FAIL("no seed produced a multi-paragraph generation");
}

TEST_CASE("record serialization round trips through json") {
    TinyLm lm(small_config());
    PromptRecord prompt;
    prompt.prompt_id = "p2";
    prompt.source_chunk_ref = "c2";
    prompt.prompt_text = "Write a piece, titled 'stone', which includes walls. The full piece "
                         "should be approximately two paragraphs.";
    GenerationParams params;
    params.max_new_tokens = 48;
    params.temperature = 1.0;
    GenerationRecord rec = build_generation_record(prompt, lm, params, 7);

    Json j = rec;
    GenerationRecord back = j.get<GenerationRecord>();
    back.validate();
    CHECK(back.record_id == rec.record_id);
    CHECK(back.token_ids == rec.token_ids);
    CHECK(back.full_text == rec.full_text);
    CHECK(back.prompt == rec.prompt);
    CHECK(back.params.max_new_tokens == rec.params.max_new_tokens);
    CHECK(back.params.seed == rec.params.seed);

    OutlineRecord outline{"o1", rec.record_id, "1. water\n2. stone\n", "stub-outliner-v1"};
    Json oj = outline;
    CHECK(oj.get<OutlineRecord>() == outline);

    Json broken = {{"record_id", "x"}};
    CHECK_THROWS_AS(broken.get<GenerationRecord>(), FormatError);
}

TEST_CASE("record validation catches corrupted fields") {
    TinyLm lm(small_config());
    PromptRecord prompt;
    prompt.prompt_id = "p3";
    prompt.prompt_text = "Write a piece, titled 'gardens', which includes flowers. The full "
                         "piece should be approximately two paragraphs.";
    GenerationParams params;
    params.max_new_tokens = 120;
    params.temperature = 1.0;

    GenerationRecord rec;
    for (uint64_t seed = 1; seed <= 30; ++seed) {
        rec = build_generation_record(prompt, lm, params, seed);
        if (!rec.boundary_positions.empty()) break;
    }
    REQUIRE_FALSE(rec.boundary_positions.empty());

    GenerationRecord bad = rec;
    bad.paragraphs[0] += " corrupted";
    CHECK_THROWS_AS(bad.validate(), DataError);

    bad = rec;
    bad.boundary_positions.push_back(bad.boundary_positions.back());
    CHECK_THROWS_AS(bad.validate(), DataError);

    bad = rec;
    bad.boundary_positions[0] = bad.prompt_boundary_position;
    CHECK_THROWS_AS(bad.validate(), DataError);
}

TEST_CASE("outline validation enforces the numbered shape") {
    CHECK_NOTHROW(validate_outline("1. rivers\n2. bridges\n"));
    CHECK_NOTHROW(validate_outline("1. rivers\n   - small streams\n   - deep water\n2. bridges\n"));
    CHECK_NOTHROW(validate_outline("1. one\n2. two\n3. three\n4. four\n5. five\n"));
    CHECK(is_valid_outline("1. a\n\n2. b"));  // blank lines are fine

    // More than five points.
    CHECK_THROWS_AS(validate_outline("1. a\n2. b\n3. c\n4. d\n5. e\n6. f\n"), FormatError);
    // Numbering must start at one and ascend without gaps.
    CHECK_THROWS_AS(validate_outline("2. a\n3. b\n"), FormatError);
    CHECK_THROWS_AS(validate_outline("1. a\n3. b\n"), FormatError);
    // More than two subpoints.
    CHECK_THROWS_AS(validate_outline("1. a\n - x\n - y\n - z\n"), FormatError);
    // Content before the first point.
    CHECK_THROWS_AS(validate_outline("intro text\n1. a\n"), FormatError);
    // No points at all.
    CHECK_THROWS_AS(validate_outline("just prose"), FormatError);
    CHECK_FALSE(is_valid_outline(""));
}

TEST_CASE("outline synthesis validates, retries once, then drops") {
    TinyLm lm(small_config());
    PromptRecord prompt;
    prompt.prompt_id = "p4";
    prompt.prompt_text = "Write a piece, titled 'markets', which includes trade. The full piece "
                         "should be approximately two paragraphs.";
    GenerationParams params;
    params.max_new_tokens = 64;
    params.temperature = 1.0;
    GenerationRecord rec = build_generation_record(prompt, lm, params, 5);

    StubOutliner outliner;
    OutlineSynthesisResult ok = make_outline(rec, outliner, 1);
    REQUIRE(ok.record.has_value());
    CHECK(is_valid_outline(ok.record->outline_text));
    CHECK(ok.record->source_record_id == rec.record_id);
    CHECK(ok.record->generator_id == "stub-outliner-v1");

    FailingChatClient always(-1);
    OutlineSynthesisResult failed = make_outline(rec, always, 1);
    CHECK_FALSE(failed.record.has_value());
    CHECK(failed.drop_reason.find("client failure") == 0);
}
