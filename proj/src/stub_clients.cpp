#include "parascope/stub_clients.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "parascope/errors.hpp"
#include "parascope/jsonl.hpp"
#include "parascope/rubric.hpp"
#include "parascope/util.hpp"

namespace parascope {

namespace {

const std::string& last_user_content(const std::vector<ChatMessage>& messages) {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it)
        if (it->role == "user") return it->content;
    throw ClientError("request has no user message");
}

std::vector<std::string> first_words(const std::string& text, size_t count) {
    std::vector<std::string> words = split_words(text);
    if (words.size() > count) words.resize(count);
    return words;
}

std::string join_words(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

}  // namespace

std::string StubPromptWriter::complete(const std::vector<ChatMessage>& messages) {
    const std::string& content = last_user_content(messages);
    // The chunk sits above the instruction in the same message.
    std::string chunk = content;
    size_t cut = content.find("Write a prompt based on the above text");
    if (cut != std::string::npos) chunk = content.substr(0, cut);

    std::vector<std::string> title_words = first_words(chunk, 4);
    if (title_words.empty()) return "I cannot find any text to base a prompt on.";
    std::vector<std::string> topic_words = split_words(chunk);
    std::string topics = topic_words.size() > 4
                             ? join_words({topic_words.begin() + 4,
                                           topic_words.begin() +
                                               static_cast<ptrdiff_t>(std::min<size_t>(10, topic_words.size()))})
                             : join_words(title_words);
    return "Write a piece, titled '" + join_words(title_words) + "', which includes " + topics +
           " and related ideas, kept very vague. The full piece should be approximately three "
           "paragraphs.";
}

std::string StubOutliner::complete(const std::vector<ChatMessage>& messages) {
    const std::string& text = last_user_content(messages);
    std::vector<std::string> paragraphs;
    size_t start = 0;
    while (start <= text.size()) {
        size_t brk = text.find("\n\n", start);
        if (brk == std::string::npos) {
            paragraphs.push_back(text.substr(start));
            break;
        }
        paragraphs.push_back(text.substr(start, brk - start));
        start = brk + 2;
    }
    std::string out;
    int point = 0;
    for (const std::string& p : paragraphs) {
        std::vector<std::string> words = first_words(p, 5);
        if (words.empty()) continue;
        if (point == 5) break;
        ++point;
        out += std::to_string(point) + ". " + join_words(words) + "\n";
    }
    if (out.empty()) out = "1. empty text\n";
    return out;
}

namespace {

struct JudgeRequestView {
    RubricKind kind = RubricKind::paragraph;
    std::string reference;
    std::string candidate;
};

JudgeRequestView parse_judge_request(const std::vector<ChatMessage>& messages) {
    // Work from the first user message: re-asks append correction turns.
    const ChatMessage* first_user = nullptr;
    for (const auto& m : messages)
        if (m.role == "user") {
            first_user = &m;
            break;
        }
    if (!first_user) throw ClientError("judge request has no user message");
    const std::string& c = first_user->content;

    JudgeRequestView view;
    view.kind = c.find("Conciseness of Headings") != std::string::npos ? RubricKind::outline
                                                                       : RubricKind::paragraph;
    size_t r0 = c.find("<<<\n");
    if (r0 == std::string::npos) throw ClientError("judge request has no reference block");
    size_t r1 = c.find("\n>>>", r0);
    view.reference = c.substr(r0 + 4, r1 - r0 - 4);
    size_t c0 = c.find("<<<\n", r1);
    if (c0 == std::string::npos) throw ClientError("judge request has no candidate block");
    size_t c1 = c.find("\n>>>", c0);
    view.candidate = c.substr(c0 + 4, c1 - c0 - 4);
    return view;
}

double word_overlap(const std::string& a, const std::string& b) {
    std::vector<std::string> wa = split_words(a);
    std::vector<std::string> wb = split_words(b);
    std::set<std::string> sa(wa.begin(), wa.end());
    std::set<std::string> sb(wb.begin(), wb.end());
    if (sa.empty() || sb.empty()) return 0.0;
    size_t inter = 0;
    for (const auto& w : sa) inter += sb.count(w);
    return static_cast<double>(inter) / static_cast<double>(std::min(sa.size(), sb.size()));
}

int scale_score(double overlap, int lo, int hi) {
    return lo + static_cast<int>(std::lround(overlap * (hi - lo)));
}

}  // namespace

std::string StubJudge::complete(const std::vector<ChatMessage>& messages) {
    if (fail_remaining_ > 0) {
        --fail_remaining_;
        return "The texts look fairly similar to me overall.";
    }
    JudgeRequestView req = parse_judge_request(messages);

    const std::vector<std::string> cand_words = split_words(req.candidate);
    const std::vector<std::string> ref_words = split_words(req.reference);
    const bool comparable = !cand_words.empty() && !ref_words.empty();
    const double overlap = word_overlap(req.candidate, req.reference);
    const bool identical = comparable && cand_words == ref_words;

    // Candidate-only axes.
    const size_t cn = cand_words.size();
    const int complexity = cn < 3 ? 0 : (cn < 8 ? 1 : (cn < 20 ? 2 : 3));
    std::set<std::string> distinct(cand_words.begin(), cand_words.end());
    const double diversity = cand_words.empty()
                                 ? 0.0
                                 : static_cast<double>(distinct.size()) / static_cast<double>(cn);
    const int coherence = cand_words.empty() ? 0 : (diversity < 0.45 ? 1 : (diversity < 0.65 ? 2 : 3));

    Json reply = Json::object();
    for (const RubricDimension& d : rubric_dimensions(req.kind)) {
        int score;
        if (d.key == "complexity") {
            score = complexity;
        } else if (d.key == "coherence") {
            score = coherence;
        } else if (d.key == "identical") {
            score = identical ? 1 : 0;
        } else if (d.min == -1) {
            score = comparable ? scale_score(overlap, 0, d.max) : -1;
        } else {
            score = comparable ? scale_score(overlap, d.min, d.max) : d.min;
        }
        char buf[96];
        std::snprintf(buf, sizeof(buf), "Word overlap %.2f over %zu candidate words.", overlap, cn);
        reply[d.key] = Json{{"reasoning", std::string(buf)}, {"score", score}};
    }
    return "Here is my assessment.\n```json\n" + reply.dump(2) + "\n```\n";
}

std::string FailingChatClient::complete(const std::vector<ChatMessage>&) {
    if (fail_remaining_ == 0) return "recovered";
    if (fail_remaining_ > 0) --fail_remaining_;
    throw ClientError("stub transport failure");
}

}  // namespace parascope
