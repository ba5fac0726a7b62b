#include "parascope/jsonl.hpp"

#include <filesystem>
#include <fstream>

#include "parascope/errors.hpp"

namespace parascope {

Json ArtifactHeader::to_json() const {
    return Json{{"_kind", "header"},
                {"schema_version", schema_version},
                {"command", command},
                {"config_digest", config_digest},
                {"seed", seed}};
}

ArtifactHeader ArtifactHeader::from_json(const Json& j) {
    ArtifactHeader h;
    h.schema_version = j.value("schema_version", 1);
    h.command = j.value("command", "");
    h.config_digest = j.value("config_digest", "");
    h.seed = j.value("seed", uint64_t{0});
    return h;
}

JsonlWriter::JsonlWriter(const std::string& path, const ArtifactHeader& header, bool resume) : path_(path) {
    const bool existed = std::filesystem::exists(path);
    auto* out = new std::ofstream();
    if (resume && existed) {
        out->open(path, std::ios::binary | std::ios::app);
    } else {
        out->open(path, std::ios::binary | std::ios::trunc);
    }
    if (!*out) {
        delete out;
        throw StorageError("cannot open jsonl for writing: " + path);
    }
    out_ = out;
    if (!resume || !existed) {
        *out << header.to_json().dump() << "\n";
        out->flush();
    }
}

JsonlWriter::~JsonlWriter() {
    auto* out = static_cast<std::ofstream*>(out_);
    out->flush();
    delete out;
}

void JsonlWriter::write_row(const Json& row) {
    auto* out = static_cast<std::ofstream*>(out_);
    *out << row.dump() << "\n";
    out->flush();
    if (!*out) {
        throw StorageError("jsonl write failed: " + path_);
    }
}

void JsonlWriter::flush() {
    static_cast<std::ofstream*>(out_)->flush();
}

JsonlFile read_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw StorageError("cannot open jsonl for reading: " + path);
    }
    JsonlFile file;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        Json j;
        try {
            j = Json::parse(line);
        } catch (const std::exception& e) {
            throw FormatError(path + ":" + std::to_string(lineno) + ": bad json row: " + e.what());
        }
        if (j.is_object() && j.value("_kind", "") == "header") {
            file.header = ArtifactHeader::from_json(j);
        } else {
            file.rows.push_back(std::move(j));
        }
    }
    return file;
}

bool file_exists(const std::string& path) {
    return std::filesystem::exists(path);
}

}  // namespace parascope
