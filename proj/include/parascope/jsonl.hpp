#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace parascope {

using Json = nlohmann::json;

// Provenance header written as the first line of every jsonl artifact.
// Reruns with identical config/seed must be byte-identical, so the header
// carries no timestamps.
struct ArtifactHeader {
    std::string command;
    std::string config_digest;
    uint64_t seed = 0;
    int schema_version = 1;

    Json to_json() const;
    static ArtifactHeader from_json(const Json& j);
};

// Append-friendly jsonl writer. The header is written once when the file is
// created; reopening an existing file for resume appends rows only.
class JsonlWriter {
public:
    JsonlWriter(const std::string& path, const ArtifactHeader& header, bool resume);
    ~JsonlWriter();

    void write_row(const Json& row);
    void flush();
    const std::string& path() const { return path_; }

private:
    std::string path_;
    void* out_;  // std::ofstream, kept opaque to keep the header light
};

struct JsonlFile {
    std::optional<ArtifactHeader> header;
    std::vector<Json> rows;
};

// Reads a whole jsonl artifact. Rows that fail to parse raise FormatError
// naming the line number.
JsonlFile read_jsonl(const std::string& path);

bool file_exists(const std::string& path);

}  // namespace parascope
