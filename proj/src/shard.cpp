#include "parascope/shard.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "parascope/errors.hpp"
#include "parascope/util.hpp"

namespace fs = std::filesystem;

namespace parascope {

namespace {

struct IndexRow {
    std::string id;
    int64_t off = 0;
    int64_t n = 0;  // float count
    // feature records
    std::string split;
    int64_t target_off = 0;
    int64_t target_n = 0;
    // capture records
    std::vector<int64_t> positions;
    uint64_t context_hash = 0;
};

IndexRow parse_row(const Json& j, const std::string& kind, const std::string& where) {
    IndexRow r;
    try {
        r.id = j.at("id").get<std::string>();
        r.off = j.at("off").get<int64_t>();
        r.n = j.at("n").get<int64_t>();
        if (kind == "feature") {
            r.split = j.at("split").get<std::string>();
            r.target_off = j.value("toff", int64_t{0});
            r.target_n = j.value("tn", int64_t{0});
        } else {
            r.positions = j.at("positions").get<std::vector<int64_t>>();
            r.context_hash = std::stoull(j.at("context_hash").get<std::string>(), nullptr, 16);
        }
    } catch (const std::exception& e) {
        throw FormatError(where + ": bad index row: " + e.what());
    }
    return r;
}

void check_split(const std::string& split) {
    if (split != "train" && split != "val" && split != "test")
        throw FormatError("unknown split '" + split + "' (expected train, val or test)");
}

std::vector<float> read_floats(std::ifstream& data, int64_t file_size, int64_t off, int64_t n,
                               const std::string& path) {
    if (n < 0 || off < 0 || off + n * 4 > file_size)
        throw StorageError("corrupt entry: " + std::to_string(n * 4) + " bytes at offset " +
                           std::to_string(off) + " exceed " + path + " size " +
                           std::to_string(file_size));
    std::vector<float> out(static_cast<size_t>(n));
    data.clear();
    data.seekg(off);
    data.read(reinterpret_cast<char*>(out.data()), n * 4);
    if (!data) throw StorageError("read failed at offset " + std::to_string(off) + " in " + path);
    return out;
}

}  // namespace

Json ShardManifest::to_json() const {
    Json j{{"schema_version", schema_version},
           {"kind", kind},
           {"dim", dim},
           {"stats_ref", stats_ref},
           {"closed", closed}};
    j["model_info"] = model_info ? Json(*model_info) : Json(nullptr);
    j["capture_spec"] = capture_spec ? Json(*capture_spec) : Json(nullptr);
    return j;
}

ShardManifest ShardManifest::from_json(const Json& j) {
    ShardManifest m;
    try {
        m.schema_version = j.at("schema_version").get<int>();
        m.kind = j.at("kind").get<std::string>();
        m.dim = j.at("dim").get<int64_t>();
        m.stats_ref = j.at("stats_ref").get<std::string>();
        m.closed = j.at("closed").get<bool>();
        if (!j.at("model_info").is_null()) m.model_info = j.at("model_info").get<ModelInfo>();
        if (!j.at("capture_spec").is_null()) m.capture_spec = j.at("capture_spec").get<CaptureSpec>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad shard manifest: ") + e.what());
    }
    if (m.kind != "feature" && m.kind != "capture")
        throw FormatError("shard manifest: unknown kind '" + m.kind + "'");
    return m;
}

namespace {

bool manifest_compatible(const ShardManifest& a, const ShardManifest& b) {
    return a.schema_version == b.schema_version && a.kind == b.kind && a.dim == b.dim &&
           a.model_info == b.model_info &&
           (a.capture_spec.has_value() == b.capture_spec.has_value()) &&
           (!a.capture_spec ||
            (a.capture_spec->streams == b.capture_spec->streams &&
             a.capture_spec->layers == b.capture_spec->layers));
}

}  // namespace

struct ShardWriter::Impl {
    std::string dir;
    ShardManifest manifest;
    std::ofstream data;
    std::ofstream index;
    int64_t offset = 0;
    int64_t records = 0;
    std::unordered_set<std::string> ids;

    std::string data_path() const { return dir + "/data.bin"; }
    std::string index_path() const { return dir + "/index.jsonl"; }
    std::string manifest_path() const { return dir + "/manifest.json"; }

    void write_manifest() { write_file(manifest_path(), manifest.to_json().dump(2) + "\n"); }

    void append_payload(const std::vector<float>& v) {
        for (float x : v)
            if (!std::isfinite(x)) throw StorageError("refusing to store non-finite payload");
        data.write(reinterpret_cast<const char*>(v.data()),
                   static_cast<std::streamsize>(v.size() * 4));
        if (!data) throw StorageError("write failed on " + data_path());
    }

    void commit_row(const Json& row) {
        data.flush();
        if (!data) throw StorageError("flush failed on " + data_path());
        index << row.dump() << "\n";
        index.flush();
        if (!index) throw StorageError("write failed on " + index_path());
        ++records;
    }

    void require_open() const {
        if (manifest.closed) throw StorageError("shard " + dir + " is closed; appends are not allowed");
    }
};

ShardWriter::ShardWriter(const std::string& dir, ShardManifest manifest, bool resume)
    : impl_(std::make_unique<Impl>()) {
    impl_->dir = dir;
    impl_->manifest = std::move(manifest);
    if (impl_->manifest.kind != "feature" && impl_->manifest.kind != "capture")
        throw StorageError("shard kind must be 'feature' or 'capture'");
    if (impl_->manifest.dim < 1) throw StorageError("shard dim must be positive");
    if (impl_->manifest.kind == "capture" &&
        (!impl_->manifest.model_info || !impl_->manifest.capture_spec))
        throw StorageError("capture shard manifest needs model_info and capture_spec");

    const bool have_manifest = fs::exists(impl_->manifest_path());
    if (!resume) {
        if (have_manifest)
            throw StorageError("shard already exists at " + dir + " (pass resume to reopen)");
        fs::create_directories(dir);
        impl_->manifest.closed = false;
        impl_->write_manifest();
        impl_->data.open(impl_->data_path(), std::ios::binary | std::ios::trunc);
        impl_->index.open(impl_->index_path(), std::ios::trunc);
    } else {
        if (!have_manifest) {
            // Nothing to resume: behave like a fresh shard.
            fs::create_directories(dir);
            impl_->manifest.closed = false;
            impl_->write_manifest();
            impl_->data.open(impl_->data_path(), std::ios::binary | std::ios::trunc);
            impl_->index.open(impl_->index_path(), std::ios::trunc);
        } else {
            ShardManifest existing = ShardManifest::from_json(Json::parse(read_file(impl_->manifest_path())));
            if (existing.closed) throw StorageError("shard " + dir + " is closed; appends are not allowed");
            if (!manifest_compatible(existing, impl_->manifest))
                throw StorageError("shard manifest at " + dir + " does not match the requested shape");
            int64_t end = 0;
            if (fs::exists(impl_->index_path())) {
                JsonlFile idx = read_jsonl(impl_->index_path());
                for (const Json& row : idx.rows) {
                    IndexRow r = parse_row(row, impl_->manifest.kind, impl_->index_path());
                    end = std::max(end, r.off + r.n * 4);
                    if (r.target_n > 0) end = std::max(end, r.target_off + r.target_n * 4);
                    impl_->ids.insert(r.id);
                    ++impl_->records;
                }
            }
            int64_t size = fs::exists(impl_->data_path())
                               ? static_cast<int64_t>(fs::file_size(impl_->data_path()))
                               : 0;
            if (size < end)
                throw StorageError("data.bin in " + dir + " is shorter than the index expects (" +
                                   std::to_string(size) + " < " + std::to_string(end) + ")");
            if (size > end) fs::resize_file(impl_->data_path(), static_cast<uintmax_t>(end));
            impl_->offset = end;
            impl_->data.open(impl_->data_path(), std::ios::binary | std::ios::app);
            impl_->index.open(impl_->index_path(), std::ios::app);
        }
    }
    if (!impl_->data || !impl_->index) throw StorageError("cannot open shard files under " + dir);
}

ShardWriter::~ShardWriter() = default;

void ShardWriter::append(const FeatureRecord& rec) {
    impl_->require_open();
    if (impl_->manifest.kind != "feature")
        throw StorageError("cannot append a feature record to a " + impl_->manifest.kind + " shard");
    if (static_cast<int64_t>(rec.features.size()) != impl_->manifest.dim)
        throw StorageError("feature length " + std::to_string(rec.features.size()) +
                           " does not match shard dim " + std::to_string(impl_->manifest.dim));
    if (rec.target_embedding && rec.target_embedding->size() != 1024)
        throw StorageError("target embedding must have length 1024, got " +
                           std::to_string(rec.target_embedding->size()));
    check_split(rec.split);
    if (rec.record_id.empty()) throw StorageError("record_id must be non-empty");
    if (impl_->ids.count(rec.record_id))
        throw StorageError("duplicate record_id '" + rec.record_id + "' in shard " + impl_->dir);

    int64_t off = impl_->offset;
    impl_->append_payload(rec.features);
    impl_->offset += static_cast<int64_t>(rec.features.size()) * 4;
    int64_t toff = impl_->offset;
    int64_t tn = 0;
    if (rec.target_embedding) {
        impl_->append_payload(*rec.target_embedding);
        tn = static_cast<int64_t>(rec.target_embedding->size());
        impl_->offset += tn * 4;
    }
    Json row{{"id", rec.record_id}, {"split", rec.split},          {"off", off},
             {"n", static_cast<int64_t>(rec.features.size())},     {"toff", toff},
             {"tn", tn}};
    impl_->commit_row(row);
    impl_->ids.insert(rec.record_id);
}

void ShardWriter::append_capture(const std::string& record_id, const ResidualCapture& cap) {
    impl_->require_open();
    if (impl_->manifest.kind != "capture")
        throw StorageError("cannot append a capture to a " + impl_->manifest.kind + " shard");
    if (record_id.empty()) throw StorageError("record_id must be non-empty");
    if (impl_->ids.count(record_id))
        throw StorageError("duplicate record_id '" + record_id + "' in shard " + impl_->dir);
    if (!(cap.model_info == *impl_->manifest.model_info))
        throw CompatibilityError("capture model '" + cap.model_info.model_id +
                                 "' does not match shard model '" +
                                 impl_->manifest.model_info->model_id + "'");
    if (cap.spec.streams != impl_->manifest.capture_spec->streams ||
        cap.spec.layers != impl_->manifest.capture_spec->layers)
        throw CompatibilityError("capture streams/layers do not match the shard capture spec");
    if (cap.model_info.hidden_dim != impl_->manifest.dim)
        throw CompatibilityError("capture hidden_dim does not match shard dim");

    int64_t off = impl_->offset;
    impl_->append_payload(cap.data);
    impl_->offset += static_cast<int64_t>(cap.data.size()) * 4;
    Json row{{"id", record_id},
             {"off", off},
             {"n", static_cast<int64_t>(cap.data.size())},
             {"positions", cap.spec.positions},
             {"context_hash", hex64(cap.context_hash)}};
    impl_->commit_row(row);
    impl_->ids.insert(record_id);
}

bool ShardWriter::contains(const std::string& record_id) const { return impl_->ids.count(record_id) > 0; }

int64_t ShardWriter::count() const { return impl_->records; }

void ShardWriter::close() {
    if (impl_->manifest.closed) return;
    impl_->data.flush();
    impl_->index.flush();
    impl_->manifest.closed = true;
    impl_->write_manifest();
}

struct ShardReader::Impl {
    std::string dir;
    ShardManifest manifest;
    std::vector<IndexRow> rows;
    std::unordered_map<std::string, int64_t> by_id;
    mutable std::ifstream data;
    int64_t data_size = 0;

    std::string data_path() const { return dir + "/data.bin"; }
};

ShardReader::ShardReader(const std::string& dir) : impl_(std::make_unique<Impl>()) {
    impl_->dir = dir;
    const std::string manifest_path = dir + "/manifest.json";
    if (!fs::exists(manifest_path)) throw StorageError("no shard at " + dir + " (missing manifest.json)");
    Json mj;
    try {
        mj = Json::parse(read_file(manifest_path));
    } catch (const Json::exception& e) {
        throw FormatError(manifest_path + ": " + e.what());
    }
    impl_->manifest = ShardManifest::from_json(mj);

    const std::string index_path = dir + "/index.jsonl";
    if (fs::exists(index_path)) {
        JsonlFile idx = read_jsonl(index_path);
        impl_->rows.reserve(idx.rows.size());
        for (const Json& row : idx.rows) {
            IndexRow r = parse_row(row, impl_->manifest.kind, index_path);
            impl_->by_id.emplace(r.id, static_cast<int64_t>(impl_->rows.size()));
            impl_->rows.push_back(std::move(r));
        }
    }
    if (fs::exists(impl_->data_path())) {
        impl_->data_size = static_cast<int64_t>(fs::file_size(impl_->data_path()));
        impl_->data.open(impl_->data_path(), std::ios::binary);
        if (!impl_->data) throw StorageError("cannot open " + impl_->data_path());
    }
}

ShardReader::~ShardReader() = default;

const ShardManifest& ShardReader::manifest() const { return impl_->manifest; }

int64_t ShardReader::count() const { return static_cast<int64_t>(impl_->rows.size()); }

std::string ShardReader::record_id(int64_t i) const {
    if (i < 0 || i >= count()) throw IndexError("shard record index out of range");
    return impl_->rows[static_cast<size_t>(i)].id;
}

FeatureRecord ShardReader::read_feature(int64_t i) const {
    if (impl_->manifest.kind != "feature")
        throw StorageError("shard " + impl_->dir + " does not hold feature records");
    if (i < 0 || i >= count()) throw IndexError("shard record index out of range");
    const IndexRow& r = impl_->rows[static_cast<size_t>(i)];
    FeatureRecord rec;
    rec.record_id = r.id;
    rec.split = r.split;
    rec.features = read_floats(impl_->data, impl_->data_size, r.off, r.n, impl_->data_path());
    if (r.target_n > 0)
        rec.target_embedding =
            read_floats(impl_->data, impl_->data_size, r.target_off, r.target_n, impl_->data_path());
    return rec;
}

ResidualCapture ShardReader::read_capture(int64_t i) const {
    if (impl_->manifest.kind != "capture")
        throw StorageError("shard " + impl_->dir + " does not hold captures");
    if (i < 0 || i >= count()) throw IndexError("shard record index out of range");
    const IndexRow& r = impl_->rows[static_cast<size_t>(i)];
    ResidualCapture cap;
    cap.model_info = *impl_->manifest.model_info;
    cap.spec.streams = impl_->manifest.capture_spec->streams;
    cap.spec.layers = impl_->manifest.capture_spec->layers;
    cap.spec.positions = r.positions;
    cap.context_hash = r.context_hash;
    cap.data = read_floats(impl_->data, impl_->data_size, r.off, r.n, impl_->data_path());
    const size_t expect = cap.spec.streams.size() * cap.spec.layers.size() *
                          cap.spec.positions.size() *
                          static_cast<size_t>(cap.model_info.hidden_dim);
    if (cap.data.size() != expect)
        throw StorageError("corrupt entry at offset " + std::to_string(r.off) + ": payload holds " +
                           std::to_string(cap.data.size()) + " floats, capture shape needs " +
                           std::to_string(expect));
    return cap;
}

std::vector<int64_t> ShardReader::indices(const std::optional<std::string>& split) const {
    if (split) check_split(*split);
    std::vector<int64_t> out;
    for (int64_t i = 0; i < count(); ++i)
        if (!split || impl_->rows[static_cast<size_t>(i)].split == *split) out.push_back(i);
    return out;
}

std::optional<int64_t> ShardReader::find(const std::string& record_id) const {
    auto it = impl_->by_id.find(record_id);
    if (it == impl_->by_id.end()) return std::nullopt;
    return it->second;
}

}  // namespace parascope
