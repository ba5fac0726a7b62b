#include <doctest.h>

#include <vector>

#include "parascope/errors.hpp"
#include "parascope/tiny_model.hpp"

using namespace parascope;

namespace {

TinyLmConfig small_config() {
    TinyLmConfig cfg;
    cfg.layers = 3;
    cfg.dim = 32;
    cfg.heads = 2;
    cfg.ffn_dim = 64;
    cfg.window = 192;
    cfg.logit_scale = 3.0f;
    cfg.extra_merges = {".\n\n"};
    return cfg;
}

std::vector<TokenId> context_for(TinyLm& lm, const std::string& text) {
    std::vector<TokenId> ctx = {lm.bos_token_id()};
    auto body = lm.tokenize(text);
    ctx.insert(ctx.end(), body.begin(), body.end());
    ctx.push_back(lm.boundary_token_id());
    return ctx;
}

}  // namespace

TEST_CASE("capture shape, finiteness and repeatability") {
    TinyLm lm(small_config());
    auto ctx = context_for(lm, "the water moves under the bridge");
    int64_t p = static_cast<int64_t>(ctx.size()) - 1;

    CaptureSpec spec;
    spec.streams = {Stream::residual_post_layer, Stream::attn_out_diff, Stream::mlp_out_diff};
    spec.layers = {0, 1, 2};
    spec.positions = {0, p};

    ResidualCapture cap = lm.capture(ctx, spec);
    CHECK(cap.vector_count() == 3 * 3 * 2);
    CHECK(cap.data.size() == 3 * 3 * 2 * 32);
    CHECK(cap.all_finite());
    CHECK(cap.vector_at(Stream::attn_out_diff, 1, p).size() == 32);

    ResidualCapture again = lm.capture(ctx, spec);
    CHECK(cap.data == again.data);
    CHECK(cap.context_hash == again.context_hash);

    TinyLm twin(small_config());
    ResidualCapture other = twin.capture(ctx, spec);
    CHECK(cap.data == other.data);
}

TEST_CASE("causal masking: extending the context never changes earlier captures") {
    TinyLm lm(small_config());
    auto ctx = context_for(lm, "stone and sand along the river");
    int64_t p = static_cast<int64_t>(ctx.size()) - 1;
    CaptureSpec spec = CaptureSpec::all_layers(lm.info(), {p});

    ResidualCapture before = lm.capture(ctx, spec);
    auto longer = ctx;
    auto extra = lm.tokenize("more words follow here");
    longer.insert(longer.end(), extra.begin(), extra.end());
    ResidualCapture after = lm.capture(longer, spec);
    CHECK(before.data == after.data);
}

TEST_CASE("patching a capture back into its own context reproduces the greedy continuation") {
    TinyLm lm(small_config());
    auto ctx = context_for(lm, "light rain over the valley in the early morning");
    int64_t p = static_cast<int64_t>(ctx.size()) - 1;

    GenerationParams greedy;
    greedy.temperature = 0.0;
    greedy.max_new_tokens = 24;

    auto plain = lm.generate(ctx, greedy);
    ResidualCapture cap = lm.capture(ctx, CaptureSpec::all_layers(lm.info(), {p}));
    auto patched = lm.generate_with_patch(ctx, cap, p, greedy);

    REQUIRE(plain.size() == 1);
    REQUIRE(patched.size() == 1);
    CHECK(plain[0].tokens == patched[0].tokens);
    CHECK(plain[0].text == patched[0].text);
}

TEST_CASE("patching foreign captures steers the continuation away from the plain one") {
    TinyLm lm(small_config());
    auto target = context_for(lm, "music in the city hall");
    int64_t tp = static_cast<int64_t>(target.size()) - 1;

    GenerationParams greedy;
    greedy.temperature = 0.0;
    greedy.max_new_tokens = 24;

    auto plain = lm.generate(target, greedy);
    std::vector<std::string> sources = {
        "a long study of river stones and their slow movement",
        "the hospital opened a new wing for heart surgery patients",
        "engineers tested the bridge cables through the cold season",
        "farmers planted early grain across the northern fields",
    };
    int changed = 0;
    for (const auto& text : sources) {
        auto source = context_for(lm, text);
        int64_t sp = static_cast<int64_t>(source.size()) - 1;
        ResidualCapture cap = lm.capture(source, CaptureSpec::all_layers(lm.info(), {sp}));
        auto patched = lm.generate_with_patch(target, cap, tp, greedy);
        if (patched[0].tokens != plain[0].tokens) ++changed;
    }
    CHECK(changed >= 2);
}

TEST_CASE("generation is deterministic per seed and distinct across samples") {
    TinyLm lm(small_config());
    auto ctx = context_for(lm, "the market opens");

    GenerationParams params;
    params.temperature = 0.8;
    params.max_new_tokens = 20;
    params.seed = 41;
    params.num_samples = 4;

    auto a = lm.generate(ctx, params);
    auto b = lm.generate(ctx, params);
    REQUIRE(a.size() == 4);
    REQUIRE(b.size() == 4);
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].tokens == b[i].tokens);

    bool any_differ = false;
    for (size_t i = 1; i < a.size(); ++i) any_differ = any_differ || a[i].tokens != a[0].tokens;
    CHECK(any_differ);

    params.seed = 42;
    auto c = lm.generate(ctx, params);
    bool seed_changes = false;
    for (size_t i = 0; i < a.size(); ++i) seed_changes = seed_changes || c[i].tokens != a[i].tokens;
    CHECK(seed_changes);
}

TEST_CASE("every sample spends exactly the token budget") {
    TinyLm lm(small_config());
    auto ctx = context_for(lm, "winter");
    GenerationParams params;
    params.temperature = 0.3;
    params.max_new_tokens = 17;
    params.seed = 7;
    params.num_samples = 3;
    for (const auto& out : lm.generate(ctx, params)) {
        CHECK(out.tokens.size() == 17);
        CHECK(out.text == lm.detokenize(out.tokens));
    }
}

TEST_CASE("adapter enforces window, spec and compatibility rules") {
    TinyLm lm(small_config());
    auto ctx = context_for(lm, "noise");
    int64_t p = static_cast<int64_t>(ctx.size()) - 1;

    GenerationParams big;
    big.max_new_tokens = 500;  // window is 192
    CHECK_THROWS_AS(lm.generate(ctx, big), LengthError);

    CaptureSpec outside = CaptureSpec::all_layers(lm.info(), {static_cast<int64_t>(ctx.size())});
    CHECK_THROWS_AS(lm.capture(ctx, outside), IndexError);

    CaptureSpec bad_layer;
    bad_layer.streams = {Stream::residual_post_layer};
    bad_layer.layers = {0, 7};
    bad_layer.positions = {p};
    CHECK_THROWS_AS(lm.capture(ctx, bad_layer), SpecError);

    GenerationParams greedy;
    greedy.temperature = 0.0;
    greedy.max_new_tokens = 4;

    ResidualCapture cap = lm.capture(ctx, CaptureSpec::all_layers(lm.info(), {p}));
    CHECK_THROWS_AS(lm.generate_with_patch(ctx, cap, static_cast<int64_t>(ctx.size()), greedy),
                    IndexError);

    ResidualCapture partial = lm.capture(ctx, [&] {
        CaptureSpec s;
        s.streams = {Stream::residual_post_layer};
        s.layers = {0, 1};
        s.positions = {p};
        return s;
    }());
    CHECK_THROWS_AS(lm.generate_with_patch(ctx, partial, p, greedy), PatchError);

    TinyLmConfig other_cfg = small_config();
    other_cfg.weight_seed = 99;
    TinyLm other(other_cfg);
    ResidualCapture foreign = other.capture(ctx, CaptureSpec::all_layers(other.info(), {p}));
    CHECK_THROWS_AS(lm.generate_with_patch(ctx, foreign, p, greedy), CompatibilityError);

    GenerationParams invalid;
    invalid.max_new_tokens = 0;
    CHECK_THROWS_AS(lm.generate(ctx, invalid), SpecError);
    GenerationParams neg;
    neg.temperature = -0.5;
    CHECK_THROWS_AS(lm.generate(ctx, neg), SpecError);
}

TEST_CASE("model info reflects the configuration") {
    TinyLmConfig cfg = small_config();
    TinyLm lm(cfg);
    CHECK(lm.info().num_layers == 3);
    CHECK(lm.info().hidden_dim == 32);
    CHECK(lm.info().boundary_token_text == "\n\n");
    CHECK(lm.detokenize(std::vector<TokenId>{lm.boundary_token_id()}) == "\n\n");
    CHECK(lm.info().model_id == cfg.derived_model_id());

    TinyLmConfig bad = cfg;
    bad.heads = 5;  // 32 % 5 != 0
    CHECK_THROWS_AS(TinyLm{bad}, ConfigError);
}
