#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "parascope/evaluation.hpp"
#include "parascope/experiments.hpp"
#include "parascope/rubric.hpp"

namespace parascope {

// One judged candidate tagged with the method that produced it.
struct RubricRow {
    std::string record_id;
    std::string method;
    RubricKind kind = RubricKind::paragraph;
    RubricScore score;
};

void to_json(Json& j, const RubricRow& r);
void from_json(const Json& j, RubricRow& r);

// Distribution of one similarity metric for one method.
struct MethodSummary {
    std::string method;
    SimilarityMetric metric = SimilarityMetric::embed_cosine;
    std::string scorer_id;
    int64_t count = 0;   // scored rows
    int64_t absent = 0;  // rows whose scorer was unavailable
    double mean = 0.0, std = 0.0;
    double min = 0.0, p25 = 0.0, median = 0.0, p75 = 0.0, max = 0.0;

    bool operator==(const MethodSummary&) const = default;
};

// One cumulative-threshold cell; both sentinel conventions side by side.
struct ThresholdRow {
    std::string method;
    RubricKind kind = RubricKind::paragraph;
    std::string dimension;
    int threshold = 0;
    double fraction_excluding = 0.0;
    double fraction_including = 0.0;
    int64_t counted = 0;
    int64_t excluded = 0;

    bool operator==(const ThresholdRow&) const = default;
};

// Kendall tau between two methods' per-record values under one metric.
struct TauEntry {
    SimilarityMetric metric = SimilarityMetric::embed_cosine;
    std::string method_x;
    std::string method_y;
    double tau = 0.0;
    int64_t n = 0;  // joined records

    bool operator==(const TauEntry&) const = default;
};

struct ReportTables {
    std::vector<MethodSummary> similarity;
    std::vector<ThresholdRow> rubric_thresholds;
    std::vector<TauEntry> tau;

    Json to_json() const;
};

// Linear-interpolated quantile of an ascending-sorted list; q in [0, 1].
// EvalError on an empty list, an unsorted list is the caller's bug.
double quantile_sorted(std::span<const double> sorted, double q);

// Builds every summary table. Rows may arrive in any order; the output is
// sorted, so permutations of the input produce identical tables.
// ReportError when there is nothing to aggregate.
ReportTables aggregate_report(std::vector<SimilarityScore> similarity,
                              std::vector<RubricRow> rubric_rows);

// Static SVG renderers. Deterministic for fixed inputs (no timestamps), so
// report artifacts are byte-identical across reruns.
std::string svg_box_plot(const std::string& title, const std::vector<MethodSummary>& rows);
std::string svg_threshold_bars(const std::string& title, const std::vector<ThresholdRow>& rows,
                               const std::string& dimension);
std::string svg_tau_heatmap(const std::string& title, const std::vector<TauEntry>& entries);
std::string svg_sweep_curve(const std::string& title, const SweepCurve& curve);

}  // namespace parascope
