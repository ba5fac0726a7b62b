#include <doctest.h>

#include <string>
#include <vector>

#include "parascope/errors.hpp"
#include "parascope/rubric.hpp"
#include "parascope/stub_clients.hpp"

using namespace parascope;

namespace {

// Golden transcript: a well-formed paragraph-rubric reply with chatter
// around the fenced block, exactly as a cooperative judge would answer.
const char* kGoldenParagraphReply = R"(Looking at both texts carefully.

```json
{
  "complexity": {"reasoning": "Detailed paragraph with specifics.", "score": 3},
  "coherence": {"reasoning": "Flows logically.", "score": 3},
  "structure": {"reasoning": "Both are single paragraphs.", "score": 2},
  "subject": {"reasoning": "Same specific topic.", "score": 4},
  "entities": {"reasoning": "Most entities match.", "score": 3},
  "details": {"reasoning": "Shared supporting facts.", "score": 2},
  "terminology": {"reasoning": "Same domain terms.", "score": 2},
  "tone": {"reasoning": "Both neutral.", "score": 1},
  "identical": {"reasoning": "Similar but not the same.", "score": 0}
}
```

Overall a close match.)";

const char* kGoldenOutlineReply = R"(```json
{
  "complexity": {"reasoning": "r", "score": 1},
  "coherence": {"reasoning": "r", "score": 2},
  "hierarchy": {"reasoning": "r", "score": 3},
  "coverage": {"reasoning": "r", "score": 2},
  "ordering": {"reasoning": "r", "score": 3},
  "subject": {"reasoning": "r", "score": -1},
  "entities": {"reasoning": "r", "score": 0},
  "details": {"reasoning": "r", "score": 1},
  "conciseness": {"reasoning": "r", "score": 2},
  "identical": {"reasoning": "r", "score": 0}
}
```)";

}  // namespace

TEST_CASE("dimension tables carry the expected keys and ranges") {
    const auto& para = rubric_dimensions(RubricKind::paragraph);
    REQUIRE(para.size() == 9);
    CHECK(para[0].key == "complexity");
    CHECK(para[0].min == 0);
    CHECK(para[0].max == 3);
    CHECK(para[3].key == "subject");
    CHECK(para[3].min == -1);
    CHECK(para[3].max == 4);
    CHECK(para[8].key == "identical");
    CHECK(para[8].max == 1);

    const auto& outl = rubric_dimensions(RubricKind::outline);
    REQUIRE(outl.size() == 10);
    CHECK(outl[2].key == "hierarchy");
    CHECK(outl[3].key == "coverage");
    CHECK(outl[4].key == "ordering");
    CHECK(outl[8].key == "conciseness");
    CHECK(outl[8].max == 2);

    // Every dimension's heading appears verbatim in the rubric text.
    for (RubricKind kind : {RubricKind::paragraph, RubricKind::outline})
        for (const RubricDimension& d : rubric_dimensions(kind))
            CHECK(rubric_text(kind).find(d.title) != std::string::npos);

    CHECK(rubric_kind_from_name("paragraph") == RubricKind::paragraph);
    CHECK(rubric_kind_from_name("outline") == RubricKind::outline);
    CHECK_THROWS_AS(rubric_kind_from_name("haiku"), ConfigError);
}

TEST_CASE("judge messages embed the rubric and both texts") {
    auto messages = build_judge_messages(RubricKind::paragraph, "CANDIDATE BODY", "REFERENCE BODY");
    REQUIRE(messages.size() == 2);
    CHECK(messages[0].role == "system");
    CHECK(messages[1].role == "user");
    const std::string& u = messages[1].content;
    CHECK(u.find(rubric_text(RubricKind::paragraph)) != std::string::npos);
    CHECK(u.find("REFERENCE BODY") != std::string::npos);
    CHECK(u.find("CANDIDATE BODY") != std::string::npos);
    // Reference block comes first so the judge reads the ground truth first.
    CHECK(u.find("REFERENCE BODY") < u.find("CANDIDATE BODY"));
    CHECK(u.find("```json") != std::string::npos);
}

TEST_CASE("golden replies parse to exact scores") {
    RubricScore s = parse_judge_reply(RubricKind::paragraph, kGoldenParagraphReply);
    CHECK(s.at("complexity") == 3);
    CHECK(s.at("structure") == 2);
    CHECK(s.at("subject") == 4);
    CHECK(s.at("identical") == 0);
    CHECK(s.reasoning.at("tone") == "Both neutral.");
    CHECK_THROWS_AS(s.at("hierarchy"), EvalError);

    RubricScore o = parse_judge_reply(RubricKind::outline, kGoldenOutlineReply);
    CHECK(o.at("subject") == -1);
    CHECK(o.at("conciseness") == 2);

    // Round trip through json.
    RubricScore back = RubricScore::from_json(s.to_json());
    CHECK(back.values == s.values);
    back.validate(RubricKind::paragraph);
}

TEST_CASE("malformed judge replies are rejected with specific reasons") {
    // No fenced block at all.
    CHECK_THROWS_AS(parse_judge_reply(RubricKind::paragraph, "they look similar"), FormatError);
    // Unterminated fence.
    CHECK_THROWS_AS(parse_judge_reply(RubricKind::paragraph, "```json\n{\"a\": 1}"), FormatError);
    // Valid json but missing dimensions.
    CHECK_THROWS_AS(
        parse_judge_reply(RubricKind::paragraph,
                          "```json\n{\"complexity\": {\"reasoning\": \"r\", \"score\": 2}}\n```"),
        FormatError);
    // Score outside the dimension range.
    std::string out_of_range = kGoldenParagraphReply;
    const std::string needle = "\"tone\": {\"reasoning\": \"Both neutral.\", \"score\": 1}";
    const std::string bad = "\"tone\": {\"reasoning\": \"Both neutral.\", \"score\": 7}";
    out_of_range.replace(out_of_range.find(needle), needle.size(), bad);
    CHECK_THROWS_AS(parse_judge_reply(RubricKind::paragraph, out_of_range), FormatError);
    // Non-integer score.
    std::string fractional = kGoldenParagraphReply;
    const std::string frac = "\"tone\": {\"reasoning\": \"Both neutral.\", \"score\": 0.5}";
    fractional.replace(fractional.find(needle), needle.size(), frac);
    CHECK_THROWS_AS(parse_judge_reply(RubricKind::paragraph, fractional), FormatError);
}

TEST_CASE("stub judge scores identical texts at the ceiling") {
    StubJudge judge;
    JudgeConfig cfg;
    const std::string text = "the river carries water over the old stone bridge";
    RubricScore s = judge_paragraph(judge, text, text, cfg);
    CHECK(s.at("identical") == 1);
    CHECK(s.at("subject") == 4);
    CHECK(s.at("entities") == 4);
    CHECK(s.at("tone") == 1);
    s.validate(RubricKind::paragraph);
}

TEST_CASE("stub judge scores unrelated texts near the floor") {
    StubJudge judge;
    JudgeConfig cfg;
    RubricScore s = judge_paragraph(judge, "clouds gather over the valley before the storm",
                                    "markets price grain after the harvest", cfg);
    CHECK(s.at("identical") == 0);
    CHECK(s.at("subject") <= 1);
    CHECK(s.at("entities") <= 1);
    s.validate(RubricKind::paragraph);

    // Empty candidate: comparison dimensions fall back to the -1 sentinel.
    RubricScore empty = judge_paragraph(judge, "", "some reference text here", cfg);
    CHECK(empty.at("subject") == -1);
    CHECK(empty.at("details") == -1);
    CHECK(empty.at("complexity") == 0);
}

TEST_CASE("outline judging uses the outline dimensions") {
    StubJudge judge;
    JudgeConfig cfg;
    RubricScore s = judge_outline(judge, "1. rivers and bridges\n2. water levels\n",
                                  "1. rivers and bridges\n2. water levels\n", cfg);
    CHECK(s.at("identical") == 1);
    CHECK(s.at("coverage") == 3);
    s.validate(RubricKind::outline);
}

TEST_CASE("one malformed reply triggers a re-ask that succeeds") {
    StubJudge judge(1);  // first reply is prose, second is valid
    JudgeConfig cfg;
    const std::string text = "children played games in the garden";
    RubricScore s = judge_paragraph(judge, text, text, cfg);
    CHECK(s.at("identical") == 1);
}

TEST_CASE("persistent malformed replies fail with the raw reply preserved") {
    StubJudge judge(5);  // stays malformed past the single re-ask
    JudgeConfig cfg;
    try {
        judge_paragraph(judge, "a", "b", cfg);
        FAIL("expected JudgeReplyError");
    } catch (const JudgeReplyError& e) {
        CHECK(e.raw_reply == "The texts look fairly similar to me overall.");
        CHECK(std::string(e.what()).find("invalid") != std::string::npos);
    }
}

TEST_CASE("threshold fractions over scores drop -1 rows from the excluding denominator") {
    // Three scores with subject = 4, 2, -1.
    auto make = [](int subject) {
        RubricScore s;
        for (const RubricDimension& d : rubric_dimensions(RubricKind::paragraph))
            s.values[d.key] = d.key == "subject" ? subject : 0;
        return s;
    };
    std::vector<RubricScore> scores = {make(4), make(2), make(-1)};
    ThresholdFraction f = rubric_threshold_fraction(scores, RubricKind::paragraph, "subject", 3);
    CHECK(f.counted == 2);
    CHECK(f.excluded == 1);
    CHECK(f.fraction_excluding == doctest::Approx(0.5));
    CHECK(f.fraction_including == doctest::Approx(1.0 / 3.0));

    CHECK_THROWS_AS(rubric_threshold_fraction(scores, RubricKind::paragraph, "coverage", 2),
                    EvalError);
}
