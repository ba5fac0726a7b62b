#pragma once

#include <map>
#include <string>
#include <vector>

#include "parascope/chat.hpp"
#include "parascope/errors.hpp"
#include "parascope/jsonl.hpp"
#include "parascope/metrics.hpp"

namespace parascope {

enum class RubricKind { paragraph, outline };

const char* rubric_kind_name(RubricKind kind);
RubricKind rubric_kind_from_name(const std::string& name);

struct RubricDimension {
    std::string key;    // json key in judge replies
    std::string title;  // heading in the rubric text
    int min = 0;
    int max = 0;
};

// Dimension tables. Scores of -1 mean "nothing to compare" and are excluded
// from threshold denominators by default.
const std::vector<RubricDimension>& rubric_dimensions(RubricKind kind);

// Full rubric text included verbatim in every judging prompt.
const std::string& rubric_text(RubricKind kind);

struct RubricScore {
    std::map<std::string, int> values;
    std::map<std::string, std::string> reasoning;

    void validate(RubricKind kind) const;  // FormatError when incomplete or out of range
    int at(const std::string& key) const;  // EvalError on unknown key

    Json to_json() const;
    static RubricScore from_json(const Json& j);
};

// Thrown when the judge's reply cannot be parsed after the re-ask; carries
// the verbatim reply for the caller to store.
struct JudgeReplyError : JudgeError {
    std::string raw_reply;
    JudgeReplyError(const std::string& msg, std::string raw)
        : JudgeError(msg), raw_reply(std::move(raw)) {}
};

std::vector<ChatMessage> build_judge_messages(RubricKind kind, const std::string& candidate,
                                              const std::string& reference);

// Parses a fenced JSON reply into a validated score. FormatError on any
// missing dimension, wrong type, or out-of-range value.
RubricScore parse_judge_reply(RubricKind kind, const std::string& reply);

struct JudgeConfig {
    int max_reasks = 1;  // re-asks after an invalid reply
    std::string judge_id;
};

// Asks the judge, re-asking once on an invalid reply, then failing with the
// raw reply preserved.
RubricScore judge_texts(RubricKind kind, ChatClient& judge, const std::string& candidate,
                        const std::string& reference, const JudgeConfig& config);

RubricScore judge_paragraph(ChatClient& judge, const std::string& candidate,
                            const std::string& reference, const JudgeConfig& config);
RubricScore judge_outline(ChatClient& judge, const std::string& candidate,
                          const std::string& reference, const JudgeConfig& config);

// Threshold fraction over one dimension of many scores; -1 rows are dropped
// from the excluding denominator. EvalError on an unknown dimension.
ThresholdFraction rubric_threshold_fraction(const std::vector<RubricScore>& scores,
                                            RubricKind kind, const std::string& dimension,
                                            int threshold);

}  // namespace parascope
