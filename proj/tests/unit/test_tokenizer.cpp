#include <doctest.h>

#include <string>
#include <vector>

#include "parascope/errors.hpp"
#include "parascope/tokenizer.hpp"
#include "parascope/wordlist.hpp"

using namespace parascope;

namespace {

ByteFallbackTokenizer make_tok() { return ByteFallbackTokenizer(builtin_wordlist(), {".\n\n"}); }

}  // namespace

TEST_CASE("tokenizer round-trips arbitrary byte strings exactly") {
    ByteFallbackTokenizer tok = make_tok();
    std::vector<std::string> cases = {
        "",
        "hello world",
        "the water flows through the valley.\n\nthe next paragraph",
        "MIXED Case With CAPS and 123 numbers!",
        "unicode: \xc3\xa9\xc3\xa8\xe2\x82\xac and raw bytes \x01\x02\xff",
        "\n\n\n\n",
        "word-with-dashes and_underscores",
        "trailing newline\n",
        ".\n\n",
        "tab\tand\rcarriage",
    };
    for (const std::string& s : cases) {
        auto ids = tok.tokenize(s);
        CHECK(tok.detokenize(ids) == s);
    }
}

TEST_CASE("tokenizer prefers the longest match at each step") {
    ByteFallbackTokenizer tok = make_tok();
    // ".\n\n" is a single merge token, not '.' followed by the boundary token.
    auto ids = tok.tokenize(".\n\n");
    REQUIRE(ids.size() == 1);
    CHECK(ids[0] > ByteFallbackTokenizer::kBoundaryId);
    CHECK(tok.token_contains_boundary(ids[0]));

    // A bare boundary is the dedicated token.
    auto b = tok.tokenize("\n\n");
    REQUIRE(b.size() == 1);
    CHECK(b[0] == ByteFallbackTokenizer::kBoundaryId);
    CHECK(tok.token_contains_boundary(b[0]));

    // Words tokenize as single space-prefixed entries where possible.
    auto w = tok.tokenize(" the water");
    CHECK(w.size() == 2);
}

TEST_CASE("tokenizer reserves fixed ids for bos and boundary") {
    ByteFallbackTokenizer tok = make_tok();
    CHECK(ByteFallbackTokenizer::kBosId == 256);
    CHECK(ByteFallbackTokenizer::kBoundaryId == 257);
    CHECK(tok.token_text(ByteFallbackTokenizer::kBosId) == "<bos>");
    CHECK(tok.token_text(ByteFallbackTokenizer::kBoundaryId) == "\n\n");
    CHECK(tok.vocab_size() > 256 + 2 + builtin_wordlist().size());
    CHECK_THROWS_AS(tok.token_text(static_cast<TokenId>(tok.vocab_size())), AdapterError);
    CHECK_THROWS_AS(tok.token_text(-1), AdapterError);
}

TEST_CASE("tokenizer falls back to bytes for unknown words") {
    ByteFallbackTokenizer tok = make_tok();
    auto ids = tok.tokenize("zyzzyva");
    for (TokenId id : ids) CHECK(id < 256);
    CHECK(tok.detokenize(ids) == "zyzzyva");
}

TEST_CASE("tokenizer vocab hash is stable and config-sensitive") {
    ByteFallbackTokenizer a = make_tok();
    ByteFallbackTokenizer b = make_tok();
    CHECK(a.vocab_hash() == b.vocab_hash());
    ByteFallbackTokenizer c(builtin_wordlist(), {});
    CHECK(a.vocab_hash() != c.vocab_hash());
}

TEST_CASE("boundary containment scan matches token text") {
    ByteFallbackTokenizer tok = make_tok();
    int with = 0;
    for (size_t id = 0; id < tok.vocab_size(); ++id) {
        bool flag = tok.token_contains_boundary(static_cast<TokenId>(id));
        bool expect = tok.token_text(static_cast<TokenId>(id)).find("\n\n") != std::string::npos;
        CHECK(flag == expect);
        if (flag) ++with;
    }
    CHECK(with >= 2);  // the boundary itself plus the ".\n\n" merge
}
