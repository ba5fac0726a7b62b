#pragma once

#include <string>
#include <vector>

#include "parascope/adapter.hpp"
#include "parascope/dataset.hpp"
#include "parascope/jsonl.hpp"
#include "parascope/tae_client.hpp"

namespace parascope {

// One baseline job's output for a (record, boundary) pair. Method tags are a
// stable schema: "blind", "cheat_k", "regenerate", "auto_decode".
struct BaselineResult {
    std::string record_id;
    std::string method;
    int k = 0;               // revealed-token count; cheat_k rows only
    int boundary_index = -1;
    std::vector<std::string> texts;  // one entry per sample; empty iff filtered
    bool filtered = false;
    std::string filter_reason;

    void validate() const;  // DataError unless filtered <=> texts absent
};

void to_json(Json& j, const BaselineResult& r);
void from_json(const Json& j, BaselineResult& r);

// Generation from the blank context only: the lower bound of the ladder.
std::vector<std::string> blind_baseline(ModelAdapter& adapter, const GenerationParams& params);

// Blank context plus the first k tokens of the tokenized reference. Results
// where k would reveal more than 50% of the reference's tokens are filtered,
// not generated; retained texts include the revealed prefix.
BaselineResult cheat_k_baseline(const std::string& record_id, int boundary_index,
                                const std::string& reference_paragraph, int k,
                                ModelAdapter& adapter, const GenerationParams& params);

// Generation from the full previous context (prompt + all earlier paragraphs
// + boundary): the ground truth the decoders aim to match.
std::vector<std::string> regenerate_baseline(const GenerationRecord& record, size_t boundary_index,
                                             ModelAdapter& adapter, const GenerationParams& params);

// encode(text) then decode: the embedding-space upper bound.
std::string auto_decode_baseline(const std::string& reference_paragraph, TextAutoencoder& tae);

// The text before the first paragraph break (the whole text when there is
// none). Scoring compares this unit against the reference paragraph.
std::string first_paragraph(const std::string& text);

}  // namespace parascope
