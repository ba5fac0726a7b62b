#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "parascope/adapter.hpp"
#include "parascope/chat.hpp"
#include "parascope/jsonl.hpp"

namespace parascope {

// Instruction appended below each corpus chunk when synthesizing writing
// prompts. Protocol text; changing it invalidates stored prompt datasets.
extern const char* const kPromptSynthesisInstruction;

// Instruction given to the outline summarizer. Protocol text as above.
extern const char* const kOutlineInstruction;

struct PromptRecord {
    std::string prompt_id;
    std::string source_chunk_ref;
    std::string prompt_text;

    bool operator==(const PromptRecord&) const = default;
};

void to_json(Json& j, const PromptRecord& p);
void from_json(const Json& j, PromptRecord& p);

void to_json(Json& j, const GenerationParams& p);
void from_json(const Json& j, GenerationParams& p);

// One subject-model generation, split at paragraph boundaries. token_ids is
// the full token sequence fed to and produced by the model:
//   [bos] + prompt tokens + boundary + generated tokens.
// boundary_positions index into token_ids and point at the boundary tokens
// inside the generated region; prompt_boundary_position points at the
// boundary token that ends the prompt context.
struct GenerationRecord {
    std::string record_id;
    PromptRecord prompt;
    std::string full_text;  // generated text only
    std::vector<std::string> paragraphs;
    std::vector<int64_t> boundary_positions;
    std::vector<TokenId> token_ids;
    int64_t prompt_boundary_position = -1;
    GenerationParams params;
    uint64_t seed = 0;
    bool flagged_single_paragraph = false;

    void validate() const;  // reconstruction + monotonicity invariants

    // Context tokens up to and including the boundary at boundary_positions[i]
    // (everything the model saw when it emitted that boundary).
    std::vector<TokenId> context_through_boundary(size_t boundary_index) const;

    // The paragraph following boundary i is paragraphs[i + 1].
    const std::string& paragraph_after_boundary(size_t boundary_index) const;
};

void to_json(Json& j, const GenerationRecord& r);
void from_json(const Json& j, GenerationRecord& r);

struct OutlineRecord {
    std::string record_id;
    std::string source_record_id;
    std::string outline_text;
    std::string generator_id;

    bool operator==(const OutlineRecord&) const = default;
};

void to_json(Json& j, const OutlineRecord& o);
void from_json(const Json& j, OutlineRecord& o);

struct ParagraphSplit {
    std::vector<std::string> paragraphs;
    std::vector<int64_t> boundary_positions;
};

// Splits text at every token whose text contains "\n\n" (merged tokens such
// as ".\n\n" split inside the token). Positions are token indices plus
// position_offset. AlignmentError when tokens do not detokenize to the text.
ParagraphSplit split_paragraphs(const std::string& full_text, std::span<const TokenId> tokens,
                                const ModelAdapter& adapter, int64_t position_offset = 0);

// Greedily packs the corpus file's blank-line-separated blocks into chunks
// of min_chars..max_chars characters.
std::vector<std::string> chunk_corpus_text(const std::string& corpus_text, size_t min_chars = 500,
                                           size_t max_chars = 2000);

struct PromptSynthesisResult {
    std::optional<PromptRecord> record;
    std::string drop_reason;  // non-empty iff record is absent
};

// Asks the generator to turn one chunk into a writing prompt. Malformed
// replies (missing the "Write a" shape) and exhausted retries drop the chunk
// with a reason instead of failing the pipeline.
PromptSynthesisResult synthesize_prompt(const std::string& chunk, const std::string& chunk_ref,
                                        ChatClient& generator, int max_retries);

// Runs the subject model on one prompt and splits the result. The record
// seed makes reruns byte-identical per record.
GenerationRecord build_generation_record(const PromptRecord& prompt, ModelAdapter& adapter,
                                         const GenerationParams& params, uint64_t record_seed);

// Outline syntax: at most five top-level numbered points ("1. ..."), each
// followed by at most two indented subpoints. FormatError on violation.
void validate_outline(const std::string& outline_text);
bool is_valid_outline(const std::string& outline_text);

struct OutlineSynthesisResult {
    std::optional<OutlineRecord> record;
    std::string drop_reason;
};

// Asks the summarizer for an outline of the record's full text; invalid
// outlines are retried once, then the record is dropped with a reason.
OutlineSynthesisResult make_outline(const GenerationRecord& record, ChatClient& summarizer,
                                    int max_retries);

}  // namespace parascope
