#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "parascope/jsonl.hpp"

namespace parascope {

// Streaming per-dimension mean/variance accumulator. All state is kept in
// double precision; epsilon is added to the standard deviation so constant
// dimensions stay division-safe.
struct NormStats {
    int64_t count = 0;
    std::vector<double> mean;
    std::vector<double> m2;  // sum of squared deviations
    double epsilon = 1e-6;

    NormStats() = default;
    explicit NormStats(int64_t dim, double eps = 1e-6);

    int64_t dim() const { return static_cast<int64_t>(mean.size()); }

    void update(std::span<const float> sample);
    void update(std::span<const double> sample);

    std::vector<double> variance() const;  // m2_i / max(count - 1, 1)
    std::vector<double> std() const;       // sqrt(variance_i) + epsilon

    // (v - mean) / std, computed in double, returned as float32.
    // Requires count >= 2.
    std::vector<float> normalize(std::span<const float> v) const;
    std::vector<float> denormalize(std::span<const float> v) const;

    Json to_json() const;
    static NormStats from_json(const Json& j);

    void save(const std::string& path) const;
    static NormStats load(const std::string& path);
};

}  // namespace parascope
