#include "parascope/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "parascope/errors.hpp"
#include "parascope/util.hpp"

namespace parascope {

namespace {

template <typename T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
    if (a.size() != b.size())
        throw EvalError("cosine: vector lengths differ (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double x = static_cast<double>(a[i]);
        const double y = static_cast<double>(b[i]);
        if (!std::isfinite(x) || !std::isfinite(y)) throw EvalError("cosine: non-finite input");
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double cosine(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }
double cosine(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }

double mean_of(std::span<const double> xs) {
    if (xs.empty()) throw EvalError("mean of empty list");
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double ssd = 0.0;
    for (double x : xs) ssd += (x - m) * (x - m);
    return std::sqrt(ssd / static_cast<double>(xs.size() - 1));
}

namespace {

// Merge sort counting inversions; ties (equal keys) are not inversions.
uint64_t count_inversions(std::vector<double>& v, std::vector<double>& buf, size_t lo, size_t hi) {
    if (hi - lo < 2) return 0;
    const size_t mid = lo + (hi - lo) / 2;
    uint64_t inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
    size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (v[j] < v[i]) {
            inv += mid - i;
            buf[k++] = v[j++];
        } else {
            buf[k++] = v[i++];
        }
    }
    while (i < mid) buf[k++] = v[i++];
    while (j < hi) buf[k++] = v[j++];
    std::copy(buf.begin() + static_cast<ptrdiff_t>(lo), buf.begin() + static_cast<ptrdiff_t>(hi),
              v.begin() + static_cast<ptrdiff_t>(lo));
    return inv;
}

uint64_t tie_pair_sum(const std::vector<double>& sorted_keys) {
    uint64_t total = 0;
    size_t i = 0;
    while (i < sorted_keys.size()) {
        size_t j = i;
        while (j < sorted_keys.size() && sorted_keys[j] == sorted_keys[i]) ++j;
        const uint64_t t = j - i;
        total += t * (t - 1) / 2;
        i = j;
    }
    return total;
}

}  // namespace

double kendall_tau(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw EvalError("kendall_tau: length mismatch (" + std::to_string(xs.size()) + " vs " +
                        std::to_string(ys.size()) + ")");
    const size_t n = xs.size();
    if (n < 2) throw EvalError("kendall_tau: need at least 2 observations");
    for (size_t i = 0; i < n; ++i)
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
            throw EvalError("kendall_tau: non-finite input");

    // Knight's algorithm: sort by x (y secondary), count y inversions.
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (xs[a] != xs[b]) return xs[a] < xs[b];
        return ys[a] < ys[b];
    });

    // n1: pairs tied in x; n3: pairs tied in both (within x groups, y sorted).
    uint64_t n1 = 0, n3 = 0;
    {
        size_t i = 0;
        while (i < n) {
            size_t j = i;
            while (j < n && xs[order[j]] == xs[order[i]]) ++j;
            const uint64_t t = j - i;
            n1 += t * (t - 1) / 2;
            size_t a = i;
            while (a < j) {
                size_t b = a;
                while (b < j && ys[order[b]] == ys[order[a]]) ++b;
                const uint64_t u = b - a;
                n3 += u * (u - 1) / 2;
                a = b;
            }
            i = j;
        }
    }

    std::vector<double> y_seq(n);
    for (size_t i = 0; i < n; ++i) y_seq[i] = ys[order[i]];
    std::vector<double> buf(n);
    const uint64_t swaps = count_inversions(y_seq, buf, 0, n);  // y_seq now sorted

    const uint64_t n2 = tie_pair_sum(y_seq);
    const uint64_t n0 = n * (n - 1) / 2;

    const double num = static_cast<double>(n0) - static_cast<double>(n1) - static_cast<double>(n2) +
                       static_cast<double>(n3) - 2.0 * static_cast<double>(swaps);
    const double denom = std::sqrt((static_cast<double>(n0) - static_cast<double>(n1)) *
                                   (static_cast<double>(n0) - static_cast<double>(n2)));
    if (denom == 0.0)
        throw EvalError("kendall_tau: undefined for a fully tied list");
    return num / denom;
}

BootstrapResult paired_bootstrap_diff(std::span<const double> a, std::span<const double> b,
                                      int iterations, uint64_t seed, double confidence) {
    if (a.size() != b.size()) throw EvalError("paired bootstrap: length mismatch");
    if (a.empty()) throw EvalError("paired bootstrap: empty input");
    if (iterations < 10) throw EvalError("paired bootstrap: too few iterations");
    if (confidence <= 0.0 || confidence >= 1.0) throw EvalError("paired bootstrap: bad confidence");

    const size_t n = a.size();
    std::vector<double> diffs(n);
    for (size_t i = 0; i < n; ++i) diffs[i] = a[i] - b[i];

    BootstrapResult res;
    res.mean_diff = mean_of(diffs);

    Rng rng = make_rng(seed);
    std::uniform_int_distribution<size_t> pick(0, n - 1);
    std::vector<double> means(static_cast<size_t>(iterations));
    for (int it = 0; it < iterations; ++it) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += diffs[pick(rng)];
        means[static_cast<size_t>(it)] = s / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    const double q = (1.0 - confidence) / 2.0;
    const auto at = [&](double quantile) {
        const double pos = quantile * static_cast<double>(means.size() - 1);
        return means[static_cast<size_t>(std::llround(std::floor(pos)))];
    };
    res.lo = at(q);
    res.hi = at(1.0 - q);
    return res;
}

ThresholdFraction threshold_fraction(std::span<const int> values, int threshold, int sentinel) {
    if (values.empty()) throw EvalError("threshold_fraction: empty input");
    ThresholdFraction out;
    int64_t hits = 0;
    for (int v : values) {
        if (v == sentinel) {
            ++out.excluded;
            continue;
        }
        ++out.counted;
        if (v >= threshold) ++hits;
    }
    out.fraction_excluding =
        out.counted > 0 ? static_cast<double>(hits) / static_cast<double>(out.counted) : 0.0;
    out.fraction_including = static_cast<double>(hits) / static_cast<double>(values.size());
    return out;
}

}  // namespace parascope
