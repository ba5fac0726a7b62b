#include "parascope/dataset.hpp"

#include <algorithm>

#include "parascope/errors.hpp"
#include "parascope/util.hpp"

namespace parascope {

const char* const kPromptSynthesisInstruction =
    "Write a prompt based on the above text, that is a single-paragraph, \n"
    "high-level description. Make the prompt in the format format similar to: \n"
    "\"Write a (news feed/chapter/piece/article/wiki entry/...),\n"
    "titled (document name)', which includes (1-2 sentence list \n"
    "of topics to cover, kept very vague). The full piece\n"
    "should be approximately (n-paragraphs or other unit of length)\".";

const char* const kOutlineInstruction =
    "Return a short, high-level bullet-point outline of the main ideas from \n"
    "the text you are given. Do NOT include any reasoning.\n"
    "\n"
    "Rules:\n"
    "- Make as 4-5 bullet points maximum\n"
    "- Use numbers to enumerate the bullet points\n"
    "- Aim to capture main ideas of the whole text in the bullet points\n"
    "- At most 2 short subpoints per point\n"
    "- Short phrases only (no lengthy sentences)\n"
    "- Specific to this text (not generic).";

void to_json(Json& j, const PromptRecord& p) {
    j = Json{{"prompt_id", p.prompt_id},
             {"source_chunk_ref", p.source_chunk_ref},
             {"prompt_text", p.prompt_text}};
}

void from_json(const Json& j, PromptRecord& p) {
    try {
        p.prompt_id = j.at("prompt_id").get<std::string>();
        p.source_chunk_ref = j.at("source_chunk_ref").get<std::string>();
        p.prompt_text = j.at("prompt_text").get<std::string>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad prompt record: ") + e.what());
    }
}

void to_json(Json& j, const GenerationParams& p) {
    j = Json{{"max_new_tokens", p.max_new_tokens},
             {"temperature", p.temperature},
             {"num_samples", p.num_samples}};
    j["seed"] = p.seed ? Json(*p.seed) : Json(nullptr);
}

void from_json(const Json& j, GenerationParams& p) {
    try {
        p.max_new_tokens = j.at("max_new_tokens").get<int>();
        p.temperature = j.at("temperature").get<double>();
        p.num_samples = j.at("num_samples").get<int>();
        if (j.contains("seed") && !j.at("seed").is_null())
            p.seed = j.at("seed").get<uint64_t>();
        else
            p.seed.reset();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad generation params: ") + e.what());
    }
}

void GenerationRecord::validate() const {
    if (record_id.empty()) throw DataError("generation record without record_id");
    std::string joined;
    for (size_t i = 0; i < paragraphs.size(); ++i) {
        if (i > 0) joined += "\n\n";
        joined += paragraphs[i];
    }
    if (joined != full_text)
        throw DataError("record " + record_id + ": paragraphs do not rejoin to full_text");
    if (paragraphs.empty()) throw DataError("record " + record_id + ": no paragraphs");
    if (boundary_positions.size() + 1 != paragraphs.size())
        throw DataError("record " + record_id + ": boundary/paragraph count mismatch");
    for (size_t i = 0; i < boundary_positions.size(); ++i) {
        if (boundary_positions[i] <= prompt_boundary_position)
            throw DataError("record " + record_id + ": boundary inside the prompt region");
        if (i > 0 && boundary_positions[i] <= boundary_positions[i - 1])
            throw DataError("record " + record_id + ": boundary positions not strictly increasing");
        if (boundary_positions[i] >= static_cast<int64_t>(token_ids.size()))
            throw DataError("record " + record_id + ": boundary position beyond token_ids");
    }
    if (prompt_boundary_position < 0 ||
        prompt_boundary_position >= static_cast<int64_t>(token_ids.size()))
        throw DataError("record " + record_id + ": prompt boundary position out of range");
}

std::vector<TokenId> GenerationRecord::context_through_boundary(size_t boundary_index) const {
    if (boundary_index >= boundary_positions.size())
        throw IndexError("boundary index " + std::to_string(boundary_index) +
                         " out of range (record has " + std::to_string(boundary_positions.size()) +
                         " boundaries)");
    const int64_t end = boundary_positions[boundary_index] + 1;
    return {token_ids.begin(), token_ids.begin() + end};
}

const std::string& GenerationRecord::paragraph_after_boundary(size_t boundary_index) const {
    if (boundary_index >= boundary_positions.size())
        throw IndexError("boundary index " + std::to_string(boundary_index) + " out of range");
    return paragraphs[boundary_index + 1];
}

void to_json(Json& j, const GenerationRecord& r) {
    j = Json{{"record_id", r.record_id},
             {"prompt", r.prompt},
             {"full_text", r.full_text},
             {"paragraphs", r.paragraphs},
             {"boundary_positions", r.boundary_positions},
             {"token_ids", r.token_ids},
             {"prompt_boundary_position", r.prompt_boundary_position},
             {"params", r.params},
             {"seed", r.seed},
             {"flagged_single_paragraph", r.flagged_single_paragraph}};
}

void from_json(const Json& j, GenerationRecord& r) {
    try {
        r.record_id = j.at("record_id").get<std::string>();
        r.prompt = j.at("prompt").get<PromptRecord>();
        r.full_text = j.at("full_text").get<std::string>();
        r.paragraphs = j.at("paragraphs").get<std::vector<std::string>>();
        r.boundary_positions = j.at("boundary_positions").get<std::vector<int64_t>>();
        r.token_ids = j.at("token_ids").get<std::vector<TokenId>>();
        r.prompt_boundary_position = j.at("prompt_boundary_position").get<int64_t>();
        r.params = j.at("params").get<GenerationParams>();
        r.seed = j.at("seed").get<uint64_t>();
        r.flagged_single_paragraph = j.at("flagged_single_paragraph").get<bool>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad generation record: ") + e.what());
    }
}

void to_json(Json& j, const OutlineRecord& o) {
    j = Json{{"record_id", o.record_id},
             {"source_record_id", o.source_record_id},
             {"outline_text", o.outline_text},
             {"generator_id", o.generator_id}};
}

void from_json(const Json& j, OutlineRecord& o) {
    try {
        o.record_id = j.at("record_id").get<std::string>();
        o.source_record_id = j.at("source_record_id").get<std::string>();
        o.outline_text = j.at("outline_text").get<std::string>();
        o.generator_id = j.at("generator_id").get<std::string>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad outline record: ") + e.what());
    }
}

ParagraphSplit split_paragraphs(const std::string& full_text, std::span<const TokenId> tokens,
                                const ModelAdapter& adapter, int64_t position_offset) {
    if (adapter.detokenize(tokens) != full_text)
        throw AlignmentError("tokens do not detokenize to the given text");

    ParagraphSplit out;
    std::string current;
    for (size_t i = 0; i < tokens.size(); ++i) {
        const std::string piece = adapter.detokenize(std::span<const TokenId>(&tokens[i], 1));
        const size_t brk = piece.find("\n\n");
        if (brk == std::string::npos) {
            current += piece;
            continue;
        }
        // Merged tokens like ".\n\n" close the current paragraph with their
        // prefix and open the next one with their suffix.
        current += piece.substr(0, brk);
        out.paragraphs.push_back(current);
        out.boundary_positions.push_back(static_cast<int64_t>(i) + position_offset);
        current = piece.substr(brk + 2);
    }
    out.paragraphs.push_back(current);

    std::string joined;
    for (size_t i = 0; i < out.paragraphs.size(); ++i) {
        if (i > 0) joined += "\n\n";
        joined += out.paragraphs[i];
    }
    if (joined != full_text)
        throw AlignmentError("paragraph split does not reconstruct the text (a token may contain "
                             "more than one paragraph break)");
    return out;
}

std::vector<std::string> chunk_corpus_text(const std::string& corpus_text, size_t min_chars,
                                           size_t max_chars) {
    if (min_chars < 1 || max_chars < min_chars) throw ConfigError("bad chunk size bounds");
    std::vector<std::string> blocks;
    size_t start = 0;
    while (start <= corpus_text.size()) {
        size_t brk = corpus_text.find("\n\n", start);
        std::string block = brk == std::string::npos ? corpus_text.substr(start)
                                                     : corpus_text.substr(start, brk - start);
        if (!block.empty() && block.find_first_not_of(" \t\r\n") != std::string::npos)
            blocks.push_back(std::move(block));
        if (brk == std::string::npos) break;
        start = brk + 2;
    }

    std::vector<std::string> chunks;
    std::string current;
    for (std::string& block : blocks) {
        if (!current.empty() && current.size() + 2 + block.size() > max_chars) {
            chunks.push_back(current);
            current.clear();
        }
        if (block.size() > max_chars) block.resize(max_chars);
        if (!current.empty()) current += "\n\n";
        current += block;
        if (current.size() >= min_chars) {
            chunks.push_back(current);
            current.clear();
        }
    }
    if (!current.empty()) chunks.push_back(current);
    return chunks;
}

PromptSynthesisResult synthesize_prompt(const std::string& chunk, const std::string& chunk_ref,
                                        ChatClient& generator, int max_retries) {
    PromptSynthesisResult result;
    if (split_words(chunk).empty()) {
        result.drop_reason = "empty chunk";
        return result;
    }
    std::vector<ChatMessage> messages = {
        {"user", chunk + "\n\n" + kPromptSynthesisInstruction},
    };
    std::string reply;
    try {
        reply = complete_with_retries(generator, messages, max_retries);
    } catch (const ClientError& e) {
        result.drop_reason = std::string("client failure: ") + e.what();
        return result;
    }
    if (reply.find("Write a") == std::string::npos) {
        result.drop_reason = "malformed prompt (missing 'Write a')";
        return result;
    }
    PromptRecord rec;
    rec.prompt_id = "prompt-" + hex64(fnv1a64(chunk_ref));
    rec.source_chunk_ref = chunk_ref;
    rec.prompt_text = reply;
    result.record = std::move(rec);
    return result;
}

GenerationRecord build_generation_record(const PromptRecord& prompt, ModelAdapter& adapter,
                                         const GenerationParams& params, uint64_t record_seed) {
    GenerationRecord rec;
    rec.record_id = "gen-" + hex64(fnv1a64(prompt.prompt_id));
    rec.prompt = prompt;

    std::vector<TokenId> context = {adapter.bos_token_id()};
    std::vector<TokenId> prompt_tokens = adapter.tokenize(prompt.prompt_text);
    context.insert(context.end(), prompt_tokens.begin(), prompt_tokens.end());
    context.push_back(adapter.boundary_token_id());
    rec.prompt_boundary_position = static_cast<int64_t>(context.size()) - 1;

    GenerationParams p = params;
    p.num_samples = 1;
    p.seed = record_seed;
    rec.params = p;
    rec.seed = record_seed;

    std::vector<GenerationOutput> outs = adapter.generate(context, p);
    const GenerationOutput& out = outs.at(0);

    rec.token_ids = context;
    rec.token_ids.insert(rec.token_ids.end(), out.tokens.begin(), out.tokens.end());
    rec.full_text = out.text;

    ParagraphSplit split = split_paragraphs(out.text, out.tokens, adapter,
                                            static_cast<int64_t>(context.size()));
    rec.paragraphs = std::move(split.paragraphs);
    rec.boundary_positions = std::move(split.boundary_positions);
    rec.flagged_single_paragraph = rec.paragraphs.size() < 2;
    rec.validate();
    return rec;
}

namespace {

bool is_top_level_point(const std::string& line, int* number_out) {
    size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i > 1) return false;  // top-level points sit at the margin
    size_t d = i;
    while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d]))) ++d;
    if (d == i) return false;
    if (d >= line.size() || (line[d] != '.' && line[d] != ')')) return false;
    *number_out = std::stoi(line.substr(i, d - i));
    return true;
}

bool is_blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

void validate_outline(const std::string& outline_text) {
    std::vector<std::string> lines;
    size_t start = 0;
    while (start <= outline_text.size()) {
        size_t brk = outline_text.find('\n', start);
        if (brk == std::string::npos) {
            lines.push_back(outline_text.substr(start));
            break;
        }
        lines.push_back(outline_text.substr(start, brk - start));
        start = brk + 1;
    }

    int points = 0;
    int subpoints = 0;
    bool seen_point = false;
    for (const std::string& line : lines) {
        if (is_blank(line)) continue;
        int number = 0;
        if (is_top_level_point(line, &number)) {
            ++points;
            subpoints = 0;
            seen_point = true;
            if (number != points)
                throw FormatError("outline points must be numbered consecutively from 1 (saw " +
                                  std::to_string(number) + " at point " + std::to_string(points) +
                                  ")");
            if (points > 5) throw FormatError("outline has more than 5 top-level points");
            continue;
        }
        if (!seen_point) throw FormatError("outline must start with a numbered point");
        ++subpoints;
        if (subpoints > 2)
            throw FormatError("outline point " + std::to_string(points) +
                              " has more than 2 subpoints");
    }
    if (points == 0) throw FormatError("outline has no numbered points");
}

bool is_valid_outline(const std::string& outline_text) {
    try {
        validate_outline(outline_text);
        return true;
    } catch (const FormatError&) {
        return false;
    }
}

OutlineSynthesisResult make_outline(const GenerationRecord& record, ChatClient& summarizer,
                                    int max_retries) {
    OutlineSynthesisResult result;
    if (record.full_text.empty()) {
        result.drop_reason = "empty source text";
        return result;
    }
    std::vector<ChatMessage> messages = {
        {"system", kOutlineInstruction},
        {"user", record.full_text},
    };
    // One retry on an invalid outline, mirroring the judge's re-ask rule.
    for (int attempt = 0; attempt < 2; ++attempt) {
        std::string reply;
        try {
            reply = complete_with_retries(summarizer, messages, max_retries);
        } catch (const ClientError& e) {
            result.drop_reason = std::string("client failure: ") + e.what();
            return result;
        }
        if (is_valid_outline(reply)) {
            OutlineRecord rec;
            rec.record_id = "outline-" + hex64(fnv1a64(record.record_id));
            rec.source_record_id = record.record_id;
            rec.outline_text = reply;
            rec.generator_id = summarizer.client_id();
            result.record = std::move(rec);
            return result;
        }
        result.drop_reason = "invalid outline after retry";
    }
    return result;
}

}  // namespace parascope
