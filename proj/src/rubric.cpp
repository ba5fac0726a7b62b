#include "parascope/rubric.hpp"

#include <algorithm>

namespace parascope {

const char* rubric_kind_name(RubricKind kind) {
    return kind == RubricKind::paragraph ? "paragraph" : "outline";
}

RubricKind rubric_kind_from_name(const std::string& name) {
    if (name == "paragraph") return RubricKind::paragraph;
    if (name == "outline") return RubricKind::outline;
    throw ConfigError("unknown rubric kind: " + name);
}

const std::vector<RubricDimension>& rubric_dimensions(RubricKind kind) {
    static const std::vector<RubricDimension> paragraph = {
        {"complexity", "Complexity Assessment", 0, 3},
        {"coherence", "Coherence", 0, 3},
        {"structure", "Structure", 0, 2},
        {"subject", "Subject Match", -1, 4},
        {"entities", "Entities", -1, 4},
        {"details", "Details", -1, 3},
        {"terminology", "Terminology", -1, 2},
        {"tone", "Tone", 0, 1},
        {"identical", "Identical Assessment", 0, 1},
    };
    static const std::vector<RubricDimension> outline = {
        {"complexity", "Complexity Assessment", 0, 3},
        {"coherence", "Coherence (Outline-Level)", 0, 3},
        {"hierarchy", "Hierarchy / Structure", 0, 3},
        {"coverage", "Coverage of Key Sections", 0, 3},
        {"ordering", "Ordering / Flow", 0, 3},
        {"subject", "Subject Match", -1, 4},
        {"entities", "Entities / Key Concepts", -1, 4},
        {"details", "Details", -1, 3},
        {"conciseness", "Conciseness of Headings", 0, 2},
        {"identical", "Identical Assessment", 0, 1},
    };
    return kind == RubricKind::paragraph ? paragraph : outline;
}

const std::string& rubric_text(RubricKind kind) {
    static const std::string paragraph = R"(Complexity Assessment
- 0: Trivial - Text contains minimal content (e.g., only section headers or placeholder text)
- 1: Simple - Basic content with minimal detail (e.g., simple section headers with brief descriptions)
- 2: Some detail - Contains short, undetailed sentences about the topic
- 3: Many details - Contains detailed paragraphs with specific information and nuanced content

Coherence
- 0: Completely incoherent - Text contains excessive repetition, nonsensical phrases, or strange symbols
- 1: Partially coherent - Text is repetitive or has formatting issues (e.g., repeated key phrases, awkward pauses)
- 2: Mostly coherent - Text has minor errors but maintains logical progression
- 3: Flawless flow - Text demonstrates logical progression, clear transitions, and no repetition

Structure
- 0: No alignment - Structural mismatch (e.g., one is a title, the other a paragraph)
- 1: Partial overlap - Some structural similarities but significant differences
- 2: Highly similar structure - Matching structural elements and organization

Subject Match
- -1: No subjects to compare - Insufficient content for comparison
- 0: Completely unrelated subjects - Topics from entirely different domains (e.g., "corporate law" vs. "particle physics")
- 1: Vaguely similar field - Subjects from broadly related areas (e.g., "biology" vs. "physics" as sciences)
- 2: Related general domain - Adjacent fields or related domains (e.g., "history" vs. "archaeology")
- 3: Same subject - Both discuss the same general topic (e.g., "ancient Mayans")
- 4: Identical focus - Both analyze the exact same specific topic (e.g., "ancient Mayan architecture")

Entities
- -1: No entities to compare - Insufficient entities for comparison
- 0: Completely unrelated - Entities from different categories (e.g., "Norway" vs. "smartphone")
- 1: Vaguely similar category - Entities of the same type (e.g., countries, people, cities)
- 2: Similar category - Entities with categorical similarities (e.g., related countries, similar professions)
- 3: Partial identical entities - Some matching entities with some differences
- 4: Almost all key entities match - High degree of entity overlap between texts

Details
- -1: Neither text has details to compare - Insufficient details for comparison
- 0: Details differ completely - No overlap in specific information provided
- 1: Minimal depth - Basic shared details without specifics
- 2: Moderate depth - Shared details with some supporting facts
- 3: Highly specific details - Precise, quantitative, or technical details match

Terminology
- -1: No terminology to compare - Insufficient terminology for comparison
- 0: No shared terms - Completely different vocabulary and terminology
- 1: Some overlap - Partial matching of domain-specific terms
- 2: Domain-specific alignment - Consistent use of field-appropriate terminology

Tone
- 0: Mismatched - Different registers or sentiment (e.g., clinical vs. casual, positive vs. negative)
- 1: Consistent - Similar register, formality level, and sentiment

Identical Assessment
- 0: Not identical - Texts differ in content, even if similar
- 1: Identical - Texts are essentially the same with only minor variations)";

    static const std::string outline = R"(Complexity Assessment
- 0: Trivial - Text contains minimal content (e.g., only section headers or placeholder text)
- 1: Simple - Basic content with minimal detail (e.g., simple section headers with brief descriptions)
- 2: Some detail - Contains short, undetailed sentences about the topic
- 3: Many details - Contains detailed paragraphs with specific information and nuanced content

Coherence (Outline-Level)
- 0: Completely incoherent - Excessive repetition, nonsensical phrases, or strange symbols
- 1: Partially coherent - Repetitive or has formatting issues (e.g., repeated key phrases, awkward pauses)
- 2: Mostly coherent - Minor grouping or ordering issues, but overall logical
- 3: Clear and coherent - Logical outline structure with clarity

Hierarchy / Structure
- 0: No recognizable hierarchy - Flat or malformed structure
- 1: Basic levels exist - Often inconsistent
- 2: Mostly correct hierarchy - Some mismatches present
- 3: Highly similar structure - Matches closely with minimal deviations

Coverage of Key Sections
- 0: Most key sections missing - Outline 2 omits or replaces core sections
- 1: About half present - Roughly 50% of major sections covered
- 2: Most sections present - Minor omissions or regroupings allowed
- 3: Full coverage - All major sections appear (synonyms/regrouping acceptable)

Ordering / Flow
- 0: Largely shuffled - Illogical or inconsistent ordering
- 1: Partial overlap - Frequent swaps in order
- 2: Mostly consistent - Minor order swaps only
- 3: Closely aligned - Order follows reference outline closely

Subject Match
- -1: No subjects to compare - Insufficient content for evaluation
- 0: Completely unrelated - Topics from entirely different domains (e.g., "corporate law" vs. "particle physics")
- 1: Vaguely similar field - Broad overlap only (e.g., "biology" vs. "physics")
- 2: Related general domain - Adjacent or related fields (e.g., "history" vs. "archaeology")
- 3: Same subject - Both discuss the same general topic (e.g., "ancient Mayans")
- 4: Identical focus - Both focus on the exact same subject (e.g., "ancient Mayan architecture")

Entities / Key Concepts
- -1: No entities to compare - Insufficient key terms/entities
- 0: Completely unrelated - Entities from unrelated categories
- 1: Same category, little overlap - Entities belong to same type but differ
- 2: Partial overlap - Some matching entities or synonyms
- 3: Mostly preserved - Majority of key entities retained
- 4: Nearly identical - Almost all entities preserved

Details
- -1: No details to compare - Neither outline provides details
- 0: Completely different - Details differ entirely (e.g., benefits vs. generic notes)
- 1: Minimal depth - Very limited overlap (e.g., one shared concept only)
- 2: Moderate depth - Shared details plus some supporting facts
- 3: Highly specific details - Quantitative or precise overlaps (e.g., percentages, statistics)

Conciseness of Headings
- 0: Verbose - Headings too wordy or sentence-like
- 1: Mixed clarity - Some concise, others verbose
- 2: Mostly concise - Headings generally outline-appropriate

Identical Assessment
- 0: Not identical - Outlines differ in content, even if similar
- 1: Identical - Outlines essentially the same (ignoring trivial formatting))";

    return kind == RubricKind::paragraph ? paragraph : outline;
}

void RubricScore::validate(RubricKind kind) const {
    for (const RubricDimension& d : rubric_dimensions(kind)) {
        auto it = values.find(d.key);
        if (it == values.end()) throw FormatError("rubric score missing dimension '" + d.key + "'");
        if (it->second < d.min || it->second > d.max)
            throw FormatError("rubric dimension '" + d.key + "' = " + std::to_string(it->second) +
                              " outside [" + std::to_string(d.min) + ", " + std::to_string(d.max) +
                              "]");
    }
}

int RubricScore::at(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw EvalError("unknown rubric dimension '" + key + "'");
    return it->second;
}

Json RubricScore::to_json() const {
    Json j = Json::object();
    for (const auto& [k, v] : values) {
        Json entry{{"score", v}};
        auto r = reasoning.find(k);
        entry["reasoning"] = r == reasoning.end() ? "" : r->second;
        j[k] = entry;
    }
    return j;
}

RubricScore RubricScore::from_json(const Json& j) {
    RubricScore s;
    if (!j.is_object()) throw FormatError("rubric score json must be an object");
    for (const auto& [k, v] : j.items()) {
        if (!v.is_object() || !v.contains("score") || !v.at("score").is_number_integer())
            throw FormatError("rubric score entry '" + k + "' must be {reasoning, score:int}");
        s.values[k] = v.at("score").get<int>();
        if (v.contains("reasoning") && v.at("reasoning").is_string())
            s.reasoning[k] = v.at("reasoning").get<std::string>();
    }
    return s;
}

std::vector<ChatMessage> build_judge_messages(RubricKind kind, const std::string& candidate,
                                              const std::string& reference) {
    const char* noun = kind == RubricKind::paragraph ? "paragraph" : "outline";
    const auto& dims = rubric_dimensions(kind);

    std::string keys;
    for (const RubricDimension& d : dims) {
        if (!keys.empty()) keys += ", ";
        keys += d.key;
    }

    std::string user;
    user += "Compare the candidate ";
    user += noun;
    user += " against the reference ";
    user += noun;
    user += " using the rubric below. For each dimension, provide brief reasoning before assigning a score.\n\n";
    user += rubric_text(kind);
    user += "\n\nReference ";
    user += noun;
    user += ":\n<<<\n";
    user += reference;
    user += "\n>>>\n\nCandidate ";
    user += noun;
    user += ":\n<<<\n";
    user += candidate;
    user += "\n>>>\n\nReply with a single fenced JSON block (```json ... ```) containing one object "
            "with exactly one entry per dimension, keyed by: ";
    user += keys;
    user += ". Each entry must have the form {\"reasoning\": \"<brief reasoning>\", \"score\": <integer>}.";

    return {
        {"system", "You are a meticulous text evaluation assistant. You follow scoring rubrics "
                   "exactly and reply only in the requested format."},
        {"user", user},
    };
}

namespace {

std::string extract_fenced_json(const std::string& reply) {
    size_t start = reply.find("```json");
    size_t body_off = 7;
    if (start == std::string::npos) {
        start = reply.find("```");
        body_off = 3;
    }
    if (start == std::string::npos) throw FormatError("judge reply has no fenced block");
    const size_t body = start + body_off;
    const size_t end = reply.find("```", body);
    if (end == std::string::npos) throw FormatError("judge reply fenced block is unterminated");
    return reply.substr(body, end - body);
}

}  // namespace

RubricScore parse_judge_reply(RubricKind kind, const std::string& reply) {
    Json j;
    try {
        j = Json::parse(extract_fenced_json(reply));
    } catch (const Json::exception& e) {
        throw FormatError(std::string("judge reply is not valid json: ") + e.what());
    }
    if (!j.is_object()) throw FormatError("judge reply json must be an object");

    RubricScore score;
    for (const RubricDimension& d : rubric_dimensions(kind)) {
        if (!j.contains(d.key)) throw FormatError("judge reply missing dimension '" + d.key + "'");
        const Json& entry = j.at(d.key);
        if (!entry.is_object() || !entry.contains("score"))
            throw FormatError("judge reply dimension '" + d.key + "' must be an object with a score");
        const Json& sv = entry.at("score");
        if (!sv.is_number_integer())
            throw FormatError("judge reply dimension '" + d.key + "' score must be an integer");
        score.values[d.key] = sv.get<int>();
        if (entry.contains("reasoning") && entry.at("reasoning").is_string())
            score.reasoning[d.key] = entry.at("reasoning").get<std::string>();
    }
    score.validate(kind);
    return score;
}

RubricScore judge_texts(RubricKind kind, ChatClient& judge, const std::string& candidate,
                        const std::string& reference, const JudgeConfig& config) {
    std::vector<ChatMessage> messages = build_judge_messages(kind, candidate, reference);
    std::string reply;
    std::string last_problem;
    for (int attempt = 0; attempt <= config.max_reasks; ++attempt) {
        if (attempt > 0) {
            // Re-ask with the previous reply and the validation failure attached.
            messages.push_back({"assistant", reply});
            messages.push_back({"user", "Your reply was invalid: " + last_problem +
                                            ". Reply again with only the fenced JSON block in the "
                                            "requested format."});
        }
        reply = judge.complete(messages);
        try {
            return parse_judge_reply(kind, reply);
        } catch (const FormatError& e) {
            last_problem = e.what();
        }
    }
    throw JudgeReplyError("judge reply invalid after re-ask: " + last_problem, reply);
}

RubricScore judge_paragraph(ChatClient& judge, const std::string& candidate,
                            const std::string& reference, const JudgeConfig& config) {
    return judge_texts(RubricKind::paragraph, judge, candidate, reference, config);
}

RubricScore judge_outline(ChatClient& judge, const std::string& candidate,
                          const std::string& reference, const JudgeConfig& config) {
    return judge_texts(RubricKind::outline, judge, candidate, reference, config);
}

ThresholdFraction rubric_threshold_fraction(const std::vector<RubricScore>& scores,
                                            RubricKind kind, const std::string& dimension,
                                            int threshold) {
    const auto& dims = rubric_dimensions(kind);
    const bool known = std::any_of(dims.begin(), dims.end(),
                                   [&](const RubricDimension& d) { return d.key == dimension; });
    if (!known) throw EvalError("unknown rubric dimension '" + dimension + "'");
    if (scores.empty()) throw EvalError("threshold_fraction: empty input");
    std::vector<int> vals;
    vals.reserve(scores.size());
    for (const RubricScore& s : scores) vals.push_back(s.at(dimension));
    return threshold_fraction(vals, threshold);
}

}  // namespace parascope
