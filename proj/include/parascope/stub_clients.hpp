#pragma once

#include <string>
#include <vector>

#include "parascope/chat.hpp"

namespace parascope {

// Offline chat clients used for desk-scale runs and tests. All are pure
// functions of their input messages, so reruns are byte-identical. Each one
// emits the exact reply shape its corresponding parser consumes.

// Answers a prompt-synthesis request: finds the source chunk in the request
// (the text above the instruction) and writes a "Write a ..., titled ..."
// prompt built from it.
class StubPromptWriter : public ChatClient {
public:
    std::string complete(const std::vector<ChatMessage>& messages) override;
    std::string client_id() const override { return "stub-prompt-writer-v1"; }
};

// Answers an outline-summarization request with a numbered outline of at
// most five points, one per paragraph of the given text.
class StubOutliner : public ChatClient {
public:
    std::string complete(const std::vector<ChatMessage>& messages) override;
    std::string client_id() const override { return "stub-outliner-v1"; }
};

// Answers a rubric-judging request with a fenced JSON score block. Scores
// are a deterministic function of word overlap between the reference and
// candidate sections of the request, so they rise with genuine similarity.
class StubJudge : public ChatClient {
public:
    // fail_first_replies > 0 makes that many leading replies malformed,
    // which exercises the judge's re-ask path.
    explicit StubJudge(int fail_first_replies = 0) : fail_remaining_(fail_first_replies) {}
    std::string complete(const std::vector<ChatMessage>& messages) override;
    std::string client_id() const override { return "stub-judge-v1"; }

private:
    int fail_remaining_ = 0;
};

// Chat client that always fails; for retry-path tests.
class FailingChatClient : public ChatClient {
public:
    explicit FailingChatClient(int fail_count = -1) : fail_remaining_(fail_count) {}
    std::string complete(const std::vector<ChatMessage>& messages) override;
    std::string client_id() const override { return "stub-failing-v1"; }

private:
    int fail_remaining_;  // -1 = always fail
};

}  // namespace parascope
