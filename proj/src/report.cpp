#include "parascope/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "parascope/metrics.hpp"

namespace parascope {

void to_json(Json& j, const RubricRow& r) {
    j = Json{{"record_id", r.record_id},
             {"method", r.method},
             {"kind", rubric_kind_name(r.kind)},
             {"score", r.score.to_json()}};
}

void from_json(const Json& j, RubricRow& r) {
    try {
        r.record_id = j.at("record_id").get<std::string>();
        r.method = j.at("method").get<std::string>();
        r.kind = rubric_kind_from_name(j.at("kind").get<std::string>());
        r.score = RubricScore::from_json(j.at("score"));
    } catch (const Json::exception& e) {
        throw FormatError(std::string("bad rubric row: ") + e.what());
    }
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw EvalError("quantile of an empty list");
    if (q < 0.0 || q > 1.0) throw EvalError("quantile position outside [0, 1]");
    if (sorted.size() == 1) return sorted[0];
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

namespace {

MethodSummary summarize_group(const std::string& method, SimilarityMetric metric,
                              const std::string& scorer_id, std::vector<double> values,
                              int64_t absent) {
    MethodSummary s;
    s.method = method;
    s.metric = metric;
    s.scorer_id = scorer_id;
    s.absent = absent;
    s.count = static_cast<int64_t>(values.size());
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    s.mean = mean_of(values);
    s.std = sample_std(values);
    s.min = values.front();
    s.p25 = quantile_sorted(values, 0.25);
    s.median = quantile_sorted(values, 0.5);
    s.p75 = quantile_sorted(values, 0.75);
    s.max = values.back();
    return s;
}

}  // namespace

ReportTables aggregate_report(std::vector<SimilarityScore> similarity,
                              std::vector<RubricRow> rubric_rows) {
    if (similarity.empty() && rubric_rows.empty())
        throw ReportError("no scores to aggregate");
    for (const SimilarityScore& s : similarity) s.validate();

    // Canonical order first: every downstream table inherits permutation
    // invariance from this sort.
    std::sort(similarity.begin(), similarity.end(), [](const auto& a, const auto& b) {
        return std::tie(a.metric, a.method, a.record_id, a.value) <
               std::tie(b.metric, b.method, b.record_id, b.value);
    });
    std::sort(rubric_rows.begin(), rubric_rows.end(), [](const RubricRow& a, const RubricRow& b) {
        return std::tie(a.kind, a.method, a.record_id) < std::tie(b.kind, b.method, b.record_id);
    });

    ReportTables tables;

    // Per-(metric, method) distributions.
    for (size_t i = 0; i < similarity.size();) {
        const SimilarityMetric metric = similarity[i].metric;
        const std::string& method = similarity[i].method;
        std::vector<double> values;
        std::string scorer_id;
        int64_t absent = 0;
        size_t j = i;
        for (; j < similarity.size() && similarity[j].metric == metric &&
               similarity[j].method == method;
             ++j) {
            if (similarity[j].absent) {
                ++absent;
                continue;
            }
            if (scorer_id.empty()) scorer_id = similarity[j].scorer_id;
            values.push_back(similarity[j].value);
        }
        tables.similarity.push_back(
            summarize_group(method, metric, scorer_id, std::move(values), absent));
        i = j;
    }

    // Cumulative threshold fractions per (kind, method, dimension).
    for (size_t i = 0; i < rubric_rows.size();) {
        const RubricKind kind = rubric_rows[i].kind;
        const std::string& method = rubric_rows[i].method;
        std::vector<RubricScore> scores;
        size_t j = i;
        for (; j < rubric_rows.size() && rubric_rows[j].kind == kind &&
               rubric_rows[j].method == method;
             ++j)
            scores.push_back(rubric_rows[j].score);
        for (const RubricDimension& dim : rubric_dimensions(kind)) {
            for (int t = 1; t <= dim.max; ++t) {
                const ThresholdFraction f =
                    rubric_threshold_fraction(scores, kind, dim.key, t);
                tables.rubric_thresholds.push_back({method, kind, dim.key, t,
                                                    f.fraction_excluding, f.fraction_including,
                                                    f.counted, f.excluded});
            }
        }
        i = j;
    }

    // Inter-method rank agreement per metric, joined on record_id.
    std::map<SimilarityMetric, std::map<std::string, std::map<std::string, double>>> by_metric;
    for (const SimilarityScore& s : similarity) {
        if (s.absent) continue;
        by_metric[s.metric][s.method].emplace(s.record_id, s.value);  // first row wins
    }
    for (const auto& [metric, methods] : by_metric) {
        for (auto x = methods.begin(); x != methods.end(); ++x) {
            for (auto y = std::next(x); y != methods.end(); ++y) {
                std::vector<double> xs, ys;
                for (const auto& [record_id, value] : x->second) {
                    const auto hit = y->second.find(record_id);
                    if (hit == y->second.end()) continue;
                    xs.push_back(value);
                    ys.push_back(hit->second);
                }
                if (xs.size() < 2) continue;
                try {
                    tables.tau.push_back({metric, x->first, y->first, kendall_tau(xs, ys),
                                          static_cast<int64_t>(xs.size())});
                } catch (const EvalError&) {
                    // Degenerate (fully tied) pairing carries no rank signal.
                }
            }
        }
    }
    return tables;
}

Json ReportTables::to_json() const {
    Json sim = Json::array();
    for (const MethodSummary& s : similarity)
        sim.push_back(Json{{"method", s.method},
                           {"metric", similarity_metric_name(s.metric)},
                           {"scorer_id", s.scorer_id},
                           {"count", s.count},
                           {"absent", s.absent},
                           {"mean", s.mean},
                           {"std", s.std},
                           {"min", s.min},
                           {"p25", s.p25},
                           {"median", s.median},
                           {"p75", s.p75},
                           {"max", s.max}});
    Json thresh = Json::array();
    for (const ThresholdRow& r : rubric_thresholds)
        thresh.push_back(Json{{"method", r.method},
                              {"kind", rubric_kind_name(r.kind)},
                              {"dimension", r.dimension},
                              {"threshold", r.threshold},
                              {"fraction_excluding", r.fraction_excluding},
                              {"fraction_including", r.fraction_including},
                              {"counted", r.counted},
                              {"excluded", r.excluded}});
    Json taus = Json::array();
    for (const TauEntry& t : tau)
        taus.push_back(Json{{"metric", similarity_metric_name(t.metric)},
                            {"method_x", t.method_x},
                            {"method_y", t.method_y},
                            {"tau", t.tau},
                            {"n", t.n}});
    return Json{{"similarity", sim},
                {"rubric_thresholds", thresh},
                {"tau", taus},
                {"notes",
                 Json{{"sentinel_rule",
                       "dimension scores of -1 mean nothing to compare; fractions are "
                       "reported both excluding and including those rows"}}}};
}

// ---------------------------------------------------------------------------
// SVG rendering. Fixed canvas, no external assets, no timestamps.

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0, kRight = 30.0, kTop = 48.0, kBottom = 64.0;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Canvas {
    std::string body;
    double lo = 0.0, hi = 1.0;  // value range mapped onto the y axis

    double x_of(double frac) const { return kLeft + frac * (kWidth - kLeft - kRight); }
    double y_of(double value) const {
        const double span = hi - lo == 0.0 ? 1.0 : hi - lo;
        return kHeight - kBottom - (value - lo) / span * (kHeight - kTop - kBottom);
    }

    void line(double x1, double y1, double x2, double y2, const std::string& color,
              double width = 1.0) {
        body += "<line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
                "\" y2=\"" + fmt(y2) + "\" stroke=\"" + color + "\" stroke-width=\"" +
                fmt(width) + "\"/>\n";
    }
    void rect(double x, double y, double w, double h, const std::string& fill) {
        body += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) +
                "\" height=\"" + fmt(h) + "\" fill=\"" + fill + "\"/>\n";
    }
    void text(double x, double y, const std::string& s, int size = 12,
              const std::string& anchor = "middle", const std::string& color = "#222") {
        body += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" +
                std::to_string(size) + "\" text-anchor=\"" + anchor +
                "\" font-family=\"sans-serif\" fill=\"" + color + "\">" + escape_xml(s) +
                "</text>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
        std::string d;
        for (const auto& [x, y] : pts) d += fmt(x) + "," + fmt(y) + " ";
        body += "<polyline points=\"" + d + "\" fill=\"none\" stroke=\"" + color +
                "\" stroke-width=\"1.5\"/>\n";
    }

    void frame(const std::string& title) {
        text(kWidth / 2, kTop - 20, title, 15);
        line(kLeft, kTop, kLeft, kHeight - kBottom, "#222");
        line(kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom, "#222");
    }
    void y_axis() {
        for (int i = 0; i <= 4; ++i) {
            const double v = lo + (hi - lo) * i / 4.0;
            const double y = y_of(v);
            line(kLeft, y, kWidth - kRight, y, "#ddd");
            text(kLeft - 8, y + 4, fmt(v), 11, "end");
        }
    }
    std::string finish() const {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) +
               "\" height=\"" + fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) + " " +
               fmt(kHeight) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
               body + "</svg>\n";
    }
};

void fit_range(Canvas& c, double lo, double hi) {
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = (hi - lo) * 0.08;
    c.lo = lo - pad;
    c.hi = hi + pad;
}

const char* series_color(size_t i) {
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf"};
    return kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
}

}  // namespace

std::string svg_box_plot(const std::string& title, const std::vector<MethodSummary>& rows) {
    if (rows.empty()) throw ReportError("box plot needs at least one summary row");
    Canvas c;
    double lo = rows[0].min, hi = rows[0].max;
    for (const MethodSummary& r : rows) {
        lo = std::min(lo, r.min);
        hi = std::max(hi, r.max);
    }
    fit_range(c, lo, hi);
    c.frame(title);
    c.y_axis();
    const double slot = 1.0 / static_cast<double>(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        const MethodSummary& r = rows[i];
        const double cx = c.x_of((static_cast<double>(i) + 0.5) * slot);
        const double half = std::min(24.0, 120.0 * slot);
        c.line(cx, c.y_of(r.min), cx, c.y_of(r.max), "#888");
        c.rect(cx - half, c.y_of(r.p75), 2 * half, c.y_of(r.p25) - c.y_of(r.p75), "#9ecae1");
        c.line(cx - half, c.y_of(r.median), cx + half, c.y_of(r.median), "#d62728", 2.0);
        c.text(cx, kHeight - kBottom + 18,
               r.method + " (" + similarity_metric_name(r.metric) + ")", 11);
        c.text(cx, kHeight - kBottom + 34, "n=" + std::to_string(r.count), 10, "middle", "#666");
    }
    return c.finish();
}

std::string svg_threshold_bars(const std::string& title, const std::vector<ThresholdRow>& rows,
                               const std::string& dimension) {
    std::vector<ThresholdRow> picked;
    for (const ThresholdRow& r : rows)
        if (r.dimension == dimension) picked.push_back(r);
    if (picked.empty()) throw ReportError("no threshold rows for dimension '" + dimension + "'");

    std::vector<std::string> methods;
    int max_t = 1;
    for (const ThresholdRow& r : picked) {
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);
        max_t = std::max(max_t, r.threshold);
    }
    Canvas c;
    c.lo = 0.0;
    c.hi = 1.0;
    c.frame(title);
    c.y_axis();
    const double slot = 1.0 / static_cast<double>(methods.size());
    for (size_t m = 0; m < methods.size(); ++m) {
        const double left = (static_cast<double>(m) + 0.15) * slot;
        const double span = 0.7 * slot;
        for (const ThresholdRow& r : picked) {
            if (r.method != methods[m]) continue;
            const double w = span / static_cast<double>(max_t);
            const double x = c.x_of(left + (r.threshold - 1) * w);
            const double y = c.y_of(r.fraction_excluding);
            c.rect(x, y, c.x_of(w) - c.x_of(0.0) - 2.0, c.y_of(0.0) - y,
                   series_color(static_cast<size_t>(r.threshold - 1)));
        }
        c.text(c.x_of((static_cast<double>(m) + 0.5) * slot), kHeight - kBottom + 18,
               methods[m], 11);
    }
    c.text(kWidth / 2, kHeight - kBottom + 40,
           dimension + " >= threshold (colors: threshold 1.." + std::to_string(max_t) +
               ", sentinel rows excluded)",
           11, "middle", "#666");
    return c.finish();
}

std::string svg_tau_heatmap(const std::string& title, const std::vector<TauEntry>& entries) {
    if (entries.empty()) throw ReportError("tau heatmap needs at least one entry");
    std::set<std::string> method_set;
    for (const TauEntry& t : entries) {
        method_set.insert(t.method_x);
        method_set.insert(t.method_y);
    }
    const std::vector<std::string> methods(method_set.begin(), method_set.end());
    const size_t n = methods.size();
    auto index_of = [&](const std::string& m) {
        return static_cast<size_t>(std::find(methods.begin(), methods.end(), m) -
                                   methods.begin());
    };

    Canvas c;
    c.lo = 0.0;
    c.hi = 1.0;
    c.frame(title);
    const double cell_w = (kWidth - kLeft - kRight) / static_cast<double>(n);
    const double cell_h = (kHeight - kTop - kBottom) / static_cast<double>(n);
    auto cell_fill = [](double tau) {
        const double t = std::clamp(tau, -1.0, 1.0);
        const int r = static_cast<int>(t > 0 ? 255 - 155 * t : 255);
        const int b = static_cast<int>(t < 0 ? 255 + 155 * t : 255);
        const int g = static_cast<int>(255 - 120 * std::abs(t));
        char buf[16];
        std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
        return std::string(buf);
    };
    auto draw_cell = [&](size_t i, size_t j, double tau) {
        const double x = kLeft + static_cast<double>(j) * cell_w;
        const double y = kTop + static_cast<double>(i) * cell_h;
        c.rect(x, y, cell_w - 1.0, cell_h - 1.0, cell_fill(tau));
        c.text(x + cell_w / 2, y + cell_h / 2 + 4, fmt(tau), 11);
    };
    for (size_t i = 0; i < n; ++i) draw_cell(i, i, 1.0);
    for (const TauEntry& t : entries) {
        draw_cell(index_of(t.method_x), index_of(t.method_y), t.tau);
        draw_cell(index_of(t.method_y), index_of(t.method_x), t.tau);
    }
    for (size_t i = 0; i < n; ++i) {
        c.text(kLeft - 8, kTop + (static_cast<double>(i) + 0.5) * cell_h + 4, methods[i], 11,
               "end");
        c.text(kLeft + (static_cast<double>(i) + 0.5) * cell_w, kHeight - kBottom + 18,
               methods[i], 11);
    }
    return c.finish();
}

std::string svg_sweep_curve(const std::string& title, const SweepCurve& curve) {
    curve.validate();
    if (curve.positions.empty()) throw ReportError("sweep curve is empty");
    Canvas c;
    double lo = 0.0, hi = 0.0;
    bool first = true;
    auto widen = [&](double v) {
        lo = first ? v : std::min(lo, v);
        hi = first ? v : std::max(hi, v);
        first = false;
    };
    for (const MeanStd& m : curve.similarity_to_ref1) widen(m.mean);
    for (const MeanStd& m : curve.similarity_to_ref2) widen(m.mean);
    for (double d : curve.delta) widen(d);
    fit_range(c, lo, hi);
    c.frame(title);
    c.y_axis();

    const double xmin = curve.positions.front();
    const double xmax = curve.positions.back();
    const double span = xmax - xmin == 0.0 ? 1.0 : xmax - xmin;
    auto x_of = [&](double p) { return c.x_of((p - xmin) / span); };

    auto draw_series = [&](const std::vector<double>& ys, size_t color, const std::string& name,
                           double legend_x) {
        std::vector<std::pair<double, double>> pts;
        for (size_t i = 0; i < ys.size(); ++i)
            pts.emplace_back(x_of(curve.positions[i]), c.y_of(ys[i]));
        c.polyline(pts, series_color(color));
        c.text(legend_x, kTop + 14, name, 11, "start", series_color(color));
    };
    std::vector<double> m1, m2;
    for (const MeanStd& m : curve.similarity_to_ref1) m1.push_back(m.mean);
    for (const MeanStd& m : curve.similarity_to_ref2) m2.push_back(m.mean);
    draw_series(m1, 0, "ref1", kLeft + 8);
    draw_series(m2, 1, "ref2", kLeft + 68);
    if (!curve.delta.empty()) draw_series(curve.delta, 2, "delta", kLeft + 128);

    for (double p : curve.positions)
        c.text(x_of(p), kHeight - kBottom + 18, fmt(p), 10);
    c.text(kWidth / 2, kHeight - kBottom + 40,
           "n=" + std::to_string(curve.n_examples) + ", skipped=" + std::to_string(curve.skipped),
           11, "middle", "#666");
    return c.finish();
}

}  // namespace parascope
