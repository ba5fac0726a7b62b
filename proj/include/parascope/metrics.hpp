#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace parascope {

// Cosine of two equal-length vectors; 0.0 when either has zero norm (the
// neutral value for empty-text embeddings). Throws EvalError on length
// mismatch or non-finite input.
double cosine(std::span<const float> a, std::span<const float> b);
double cosine(std::span<const double> a, std::span<const double> b);

double mean_of(std::span<const double> xs);
double sample_std(std::span<const double> xs);  // n-1 denominator; 0 for n < 2

// Tie-corrected Kendall tau-b via merge-sort inversion counting (O(n log n)).
// Throws EvalError on length mismatch, n < 2, or a degenerate denominator
// (one of the lists entirely tied).
double kendall_tau(std::span<const double> xs, std::span<const double> ys);

struct BootstrapResult {
    double mean_diff = 0.0;
    double lo = 0.0;  // lower percentile bound
    double hi = 0.0;  // upper percentile bound
};

// Percentile bootstrap over paired differences a_i - b_i.
BootstrapResult paired_bootstrap_diff(std::span<const double> a, std::span<const double> b,
                                      int iterations, uint64_t seed, double confidence = 0.95);

struct ThresholdFraction {
    double fraction_excluding = 0.0;  // denominator drops sentinel values
    double fraction_including = 0.0;  // denominator keeps them
    int64_t counted = 0;              // rows in the excluding denominator
    int64_t excluded = 0;             // sentinel rows dropped
};

// Fraction of values >= threshold. Values equal to `sentinel` (the rubric's
// "nothing to compare" marker) are dropped from the excluding denominator;
// both conventions are reported.
ThresholdFraction threshold_fraction(std::span<const int> values, int threshold, int sentinel = -1);

}  // namespace parascope
