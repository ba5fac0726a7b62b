#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "parascope/errors.hpp"
#include "parascope/shard.hpp"
#include "parascope/util.hpp"

using namespace parascope;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("parascope_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

FeatureRecord make_record(const std::string& id, int dim, uint64_t seed, bool with_target,
                          const std::string& split) {
    Rng rng = make_rng(seed);
    std::normal_distribution<float> dist(0.0f, 1.0f);
    FeatureRecord rec;
    rec.record_id = id;
    rec.split = split;
    rec.features.resize(static_cast<size_t>(dim));
    for (float& x : rec.features) x = dist(rng);
    if (with_target) {
        rec.target_embedding.emplace(1024);
        for (float& x : *rec.target_embedding) x = dist(rng);
    }
    return rec;
}

ShardManifest feature_manifest(int dim) {
    ShardManifest m;
    m.kind = "feature";
    m.dim = dim;
    return m;
}

}  // namespace

TEST_CASE("feature records round-trip bit-exactly in insertion order") {
    TempDir tmp("feat_roundtrip");
    const int dim = 33;
    std::vector<FeatureRecord> written;
    {
        ShardWriter w(tmp.str(), feature_manifest(dim));
        for (int i = 0; i < 200; ++i) {
            auto rec = make_record("rec-" + std::to_string(i), dim, 1000 + static_cast<uint64_t>(i),
                                   i % 3 == 0, i % 5 == 0 ? "val" : "train");
            w.append(rec);
            written.push_back(std::move(rec));
        }
        CHECK(w.count() == 200);
        w.close();
    }
    ShardReader r(tmp.str());
    REQUIRE(r.count() == 200);
    for (int i = 0; i < 200; ++i) {
        FeatureRecord got = r.read_feature(i);
        CHECK(got == written[static_cast<size_t>(i)]);
    }
}

TEST_CASE("split filter yields exactly the matching records") {
    TempDir tmp("split_filter");
    {
        ShardWriter w(tmp.str(), feature_manifest(4));
        for (int i = 0; i < 30; ++i)
            w.append(make_record("r" + std::to_string(i), 4, static_cast<uint64_t>(i), false,
                                 i % 3 == 0 ? "train" : (i % 3 == 1 ? "val" : "test")));
        w.close();
    }
    ShardReader r(tmp.str());
    CHECK(r.indices().size() == 30);
    CHECK(r.indices(std::string("train")).size() == 10);
    CHECK(r.indices(std::string("val")).size() == 10);
    CHECK(r.indices(std::string("test")).size() == 10);
    for (int64_t i : r.indices(std::string("val"))) CHECK(r.read_feature(i).split == "val");
    CHECK_THROWS_AS(r.indices(std::string("bogus")), FormatError);
}

TEST_CASE("shard enforces shape, split and lifecycle rules") {
    TempDir tmp("rules");
    ShardWriter w(tmp.str(), feature_manifest(8));
    auto rec = make_record("a", 8, 1, false, "train");
    w.append(rec);
    CHECK(w.contains("a"));
    CHECK_FALSE(w.contains("b"));

    SUBCASE("duplicate id") { CHECK_THROWS_AS(w.append(rec), StorageError); }
    SUBCASE("wrong dimension") {
        CHECK_THROWS_AS(w.append(make_record("b", 9, 2, false, "train")), StorageError);
    }
    SUBCASE("bad split") {
        CHECK_THROWS_AS(w.append(make_record("b", 8, 2, false, "holdout")), FormatError);
    }
    SUBCASE("bad target length") {
        auto bad = make_record("b", 8, 2, true, "train");
        bad.target_embedding->resize(512);
        CHECK_THROWS_AS(w.append(bad), StorageError);
    }
    SUBCASE("non-finite payload") {
        auto bad = make_record("b", 8, 2, false, "train");
        bad.features[3] = std::numeric_limits<float>::infinity();
        CHECK_THROWS_AS(w.append(bad), StorageError);
    }
    SUBCASE("append after close") {
        w.close();
        CHECK_THROWS_AS(w.append(make_record("b", 8, 2, false, "train")), StorageError);
    }
}

TEST_CASE("fresh writer refuses an existing shard without resume") {
    TempDir tmp("exists");
    {
        ShardWriter w(tmp.str(), feature_manifest(4));
        w.append(make_record("a", 4, 1, false, "train"));
    }
    CHECK_THROWS_AS(ShardWriter(tmp.str(), feature_manifest(4)), StorageError);
}

TEST_CASE("resume continues a shard and truncates a torn tail") {
    TempDir tmp("resume");
    {
        ShardWriter w(tmp.str(), feature_manifest(16));
        for (int i = 0; i < 5; ++i)
            w.append(make_record("r" + std::to_string(i), 16, static_cast<uint64_t>(i), false, "train"));
    }
    // Simulate a crash mid-payload: bytes in data.bin with no index row.
    {
        std::ofstream data(tmp.path / "data.bin", std::ios::binary | std::ios::app);
        const char junk[7] = {1, 2, 3, 4, 5, 6, 7};
        data.write(junk, sizeof junk);
    }
    {
        ShardWriter w(tmp.str(), feature_manifest(16), /*resume=*/true);
        CHECK(w.count() == 5);
        CHECK(w.contains("r3"));
        w.append(make_record("r5", 16, 5, false, "train"));
        w.close();
    }
    ShardReader r(tmp.str());
    REQUIRE(r.count() == 6);
    for (int i = 0; i < 6; ++i)
        CHECK(r.read_feature(i) == make_record("r" + std::to_string(i), 16, static_cast<uint64_t>(i),
                                               false, "train"));
    // Closed shards refuse further resumes.
    CHECK_THROWS_AS(ShardWriter(tmp.str(), feature_manifest(16), true), StorageError);
}

TEST_CASE("resume on a missing directory behaves like a fresh shard") {
    TempDir tmp("resume_fresh");
    ShardWriter w(tmp.str(), feature_manifest(4), /*resume=*/true);
    w.append(make_record("a", 4, 9, false, "test"));
    CHECK(w.count() == 1);
}

TEST_CASE("manifest mismatch on resume is a hard error") {
    TempDir tmp("mismatch");
    {
        ShardWriter w(tmp.str(), feature_manifest(8));
        w.append(make_record("a", 8, 1, false, "train"));
    }
    CHECK_THROWS_AS(ShardWriter(tmp.str(), feature_manifest(16), true), StorageError);
}

TEST_CASE("truncated data.bin surfaces the corrupt offset") {
    TempDir tmp("corrupt");
    {
        ShardWriter w(tmp.str(), feature_manifest(32));
        for (int i = 0; i < 3; ++i)
            w.append(make_record("r" + std::to_string(i), 32, static_cast<uint64_t>(i), false, "train"));
        w.close();
    }
    fs::resize_file(tmp.path / "data.bin", 32 * 4 + 10);  // r0 intact, r1 cut short
    ShardReader r(tmp.str());
    CHECK(r.read_feature(0).record_id == "r0");  // records before the damage still read
    CHECK_THROWS_WITH_AS(r.read_feature(1), doctest::Contains("offset"), StorageError);
}

TEST_CASE("empty shard iterates to nothing") {
    TempDir tmp("empty");
    {
        ShardWriter w(tmp.str(), feature_manifest(4));
        w.close();
    }
    ShardReader r(tmp.str());
    CHECK(r.count() == 0);
    CHECK(r.indices().empty());
    CHECK_FALSE(r.find("anything").has_value());
}

TEST_CASE("captures round-trip through a capture shard") {
    TempDir tmp("captures");
    ModelInfo info;
    info.model_id = "synthetic";
    info.num_layers = 3;
    info.hidden_dim = 5;
    info.tokenizer_id = "t0";

    CaptureSpec spec;
    spec.streams = {Stream::residual_post_layer, Stream::mlp_out_diff};
    spec.layers = {0, 1, 2};

    ShardManifest m;
    m.kind = "capture";
    m.dim = info.hidden_dim;
    m.model_info = info;
    m.capture_spec = spec;

    auto make_capture = [&](int64_t pos, uint64_t seed) {
        ResidualCapture cap;
        cap.model_info = info;
        cap.spec = spec;
        cap.spec.positions = {pos};
        cap.context_hash = seed * 31;
        Rng rng = make_rng(seed);
        std::normal_distribution<float> dist(0.0f, 1.0f);
        cap.data.resize(2 * 3 * 1 * 5);
        for (float& x : cap.data) x = dist(rng);
        return cap;
    };

    {
        ShardWriter w(tmp.str(), m);
        for (int i = 0; i < 10; ++i) w.append_capture("c" + std::to_string(i), make_capture(7 + i, 40 + static_cast<uint64_t>(i)));
        ResidualCapture other = make_capture(3, 99);
        other.model_info.model_id = "different";
        CHECK_THROWS_AS(w.append_capture("bad", other), CompatibilityError);
        w.close();
    }
    ShardReader r(tmp.str());
    REQUIRE(r.count() == 10);
    for (int i = 0; i < 10; ++i) {
        ResidualCapture got = r.read_capture(i);
        ResidualCapture want = make_capture(7 + i, 40 + static_cast<uint64_t>(i));
        CHECK(got.model_info == want.model_info);
        CHECK(got.spec.positions == want.spec.positions);
        CHECK(got.context_hash == want.context_hash);
        CHECK(got.data == want.data);
        CHECK(got.vector_at(Stream::mlp_out_diff, 1, 7 + i).size() == 5);
    }
    CHECK_THROWS_AS(r.read_feature(0), StorageError);
}

TEST_CASE("many appends keep count and order") {
    TempDir tmp("many");
    const int n = 2000;
    {
        ShardWriter w(tmp.str(), feature_manifest(3));
        for (int i = 0; i < n; ++i)
            w.append(make_record("id" + std::to_string(i), 3, static_cast<uint64_t>(i), false, "train"));
        w.close();
    }
    ShardReader r(tmp.str());
    REQUIRE(r.count() == n);
    for (int i = 0; i < n; i += 97) {
        CHECK(r.record_id(i) == "id" + std::to_string(i));
        CHECK(r.find("id" + std::to_string(i)) == i);
    }
}
