#include "parascope/welford.hpp"

#include <algorithm>
#include <cmath>

#include "parascope/errors.hpp"
#include "parascope/util.hpp"

namespace parascope {

NormStats::NormStats(int64_t d, double eps) : mean(static_cast<size_t>(d), 0.0), m2(static_cast<size_t>(d), 0.0), epsilon(eps) {
    if (d < 1) throw StatsError("stats dimension must be positive");
    if (eps <= 0.0) throw StatsError("stats epsilon must be positive");
}

namespace {

template <typename T>
void welford_step(NormStats& s, std::span<const T> sample) {
    if (static_cast<int64_t>(sample.size()) != s.dim())
        throw StatsError("sample dimension " + std::to_string(sample.size()) +
                         " does not match stats dimension " + std::to_string(s.dim()));
    for (const T& v : sample)
        if (!std::isfinite(static_cast<double>(v))) throw StatsError("non-finite sample value");
    s.count += 1;
    const double n = static_cast<double>(s.count);
    for (size_t i = 0; i < sample.size(); ++i) {
        const double x = static_cast<double>(sample[i]);
        const double delta = x - s.mean[i];
        s.mean[i] += delta / n;
        s.m2[i] += delta * (x - s.mean[i]);
    }
}

}  // namespace

void NormStats::update(std::span<const float> sample) { welford_step(*this, sample); }
void NormStats::update(std::span<const double> sample) { welford_step(*this, sample); }

std::vector<double> NormStats::variance() const {
    const double denom = static_cast<double>(std::max<int64_t>(count - 1, 1));
    std::vector<double> out(mean.size());
    for (size_t i = 0; i < m2.size(); ++i) out[i] = std::max(m2[i], 0.0) / denom;
    return out;
}

std::vector<double> NormStats::std() const {
    std::vector<double> out = variance();
    for (double& v : out) v = std::sqrt(v) + epsilon;
    return out;
}

std::vector<float> NormStats::normalize(std::span<const float> v) const {
    if (count < 2) throw StatsError("stats not finalized: need count >= 2, have " + std::to_string(count));
    if (static_cast<int64_t>(v.size()) != dim())
        throw StatsError("vector dimension " + std::to_string(v.size()) +
                         " does not match stats dimension " + std::to_string(dim()));
    const std::vector<double> sd = std();
    std::vector<float> out(v.size());
    for (size_t i = 0; i < v.size(); ++i)
        out[i] = static_cast<float>((static_cast<double>(v[i]) - mean[i]) / sd[i]);
    return out;
}

std::vector<float> NormStats::denormalize(std::span<const float> v) const {
    if (count < 2) throw StatsError("stats not finalized: need count >= 2, have " + std::to_string(count));
    if (static_cast<int64_t>(v.size()) != dim())
        throw StatsError("vector dimension " + std::to_string(v.size()) +
                         " does not match stats dimension " + std::to_string(dim()));
    const std::vector<double> sd = std();
    std::vector<float> out(v.size());
    for (size_t i = 0; i < v.size(); ++i)
        out[i] = static_cast<float>(static_cast<double>(v[i]) * sd[i] + mean[i]);
    return out;
}

Json NormStats::to_json() const {
    return Json{{"schema_version", 1},
                {"count", count},
                {"epsilon", epsilon},
                {"mean", mean},
                {"m2", m2}};
}

NormStats NormStats::from_json(const Json& j) {
    NormStats s;
    try {
        s.count = j.at("count").get<int64_t>();
        s.epsilon = j.at("epsilon").get<double>();
        s.mean = j.at("mean").get<std::vector<double>>();
        s.m2 = j.at("m2").get<std::vector<double>>();
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad stats json: ") + e.what());
    }
    if (s.mean.size() != s.m2.size()) throw FormatError("stats json: mean/m2 length mismatch");
    if (s.count < 0 || s.epsilon <= 0.0) throw FormatError("stats json: invalid count or epsilon");
    return s;
}

void NormStats::save(const std::string& path) const { write_file(path, to_json().dump() + "\n"); }

NormStats NormStats::load(const std::string& path) {
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const Json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    return from_json(j);
}

}  // namespace parascope
