#pragma once

// Static SVG charts from result CSVs: mean regret vs T, or error rate vs T
// with Wilson 95% bars, optionally overlaid with theory curves.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rbandit/csv.hpp"
#include "rbandit/errors.hpp"
#include "rbandit/stats.hpp"

namespace rbandit::plot {

enum class Metric { Regret, ErrorRate };

struct PlotSpec {
    Metric metric = Metric::Regret;
    bool log_x = true;
    bool log_y = true;
    /// Result columns whose values name a series.
    std::vector<std::string> series_by{"policy"};
    std::string title;
    int width = 720;
    int height = 480;
};

struct SeriesPoint {
    double x = 0.0;
    double y = 0.0;
    std::optional<stats::Interval> bar;
};

struct Series {
    std::string label;
    std::vector<SeriesPoint> points;
    bool dashed = false;
};

/// Groups result rows by series and T; y is mean regret or error rate.
inline std::vector<Series> series_from_results(const csv::Table& t, const PlotSpec& spec) {
    if (t.rows.empty()) fail(ErrorCode::CsvSchemaMismatch, "CSV has no data rows");
    const auto tcol = t.require_column("T");
    const auto ycol = t.require_column(spec.metric == Metric::Regret ? "regret" : "is_error");
    std::vector<std::size_t> keys;
    for (const auto& s : spec.series_by) keys.push_back(t.require_column(s));

    struct Acc {
        double sum = 0.0;
        std::size_t n = 0;
        std::size_t hits = 0;
    };
    std::map<std::string, std::map<double, Acc>> groups;
    for (const auto& row : t.rows) {
        std::string label;
        for (std::size_t j = 0; j < keys.size(); ++j) {
            if (j) label += ' ';
            label += spec.series_by[j] + "=" + row[keys[j]];
        }
        if (keys.size() == 1) label = row[keys[0]];
        if (row[ycol].empty()) continue;
        const double x = csv::parse_double(row[tcol]);
        const double y = csv::parse_double(row[ycol]);
        auto& a = groups[label][x];
        a.sum += y;
        a.n += 1;
        a.hits += y != 0.0 ? 1 : 0;
    }
    if (groups.empty()) fail(ErrorCode::CsvSchemaMismatch, "no rows carry a value for the requested metric");

    std::vector<Series> out;
    for (const auto& [label, pts] : groups) {
        Series s{label, {}, false};
        for (const auto& [x, a] : pts) {
            SeriesPoint p{x, a.sum / static_cast<double>(a.n), std::nullopt};
            if (spec.metric == Metric::ErrorRate) p.bar = stats::wilson(a.hits, a.n);
            s.points.push_back(p);
        }
        out.push_back(std::move(s));
    }
    return out;
}

/// One dashed series per (bound_id, p_star, delta, gamma_or_epsilon) in a curves CSV.
inline std::vector<Series> series_from_curves(const csv::Table& t) {
    const auto b = t.require_column("bound_id");
    const auto x = t.require_column("T");
    const auto p = t.require_column("p_star");
    const auto d = t.require_column("delta");
    const auto g = t.require_column("gamma_or_epsilon");
    const auto v = t.require_column("value");
    std::map<std::string, std::vector<SeriesPoint>> groups;
    for (const auto& row : t.rows) {
        const std::string label = row[b] + " p*=" + row[p] + " d=" + row[d] + " g/e=" + row[g];
        groups[label].push_back({csv::parse_double(row[x]), csv::parse_double(row[v]), std::nullopt});
    }
    std::vector<Series> out;
    for (auto& [label, pts] : groups) {
        std::sort(pts.begin(), pts.end(), [](const auto& l, const auto& r) { return l.x < r.x; });
        out.push_back(Series{label, std::move(pts), true});
    }
    return out;
}

namespace detail {

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    double map(double v, double a, double b) const {
        const double f = log ? (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo))
                             : (v - lo) / (hi - lo);
        return a + f * (b - a);
    }
};

inline Axis make_axis(std::vector<double> vals, bool log, const char* name) {
    if (log)
        for (double v : vals)
            if (!(v > 0.0))
                fail(ErrorCode::ParameterOutOfRange, std::string("log ") + name + " axis needs positive values");
    auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
    Axis a{*mn, *mx, log};
    if (a.hi == a.lo) {
        if (log) {
            a.lo /= 2.0;
            a.hi *= 2.0;
        } else {
            a.lo -= 0.5;
            a.hi += 0.5;
        }
    }
    return a;
}

inline std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        case '&': o += "&amp;"; break;
        case '"': o += "&quot;"; break;
        default: o += c;
        }
    }
    return o;
}

inline std::string num(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

inline const char* color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette[i % 10];
}

} // namespace detail

/// Writes the chart; every series becomes one <polyline>, legend entries follow series order.
inline void render_svg(std::ostream& out, const std::vector<Series>& series, const PlotSpec& spec) {
    if (series.empty()) fail(ErrorCode::CsvSchemaMismatch, "nothing to plot");
    std::vector<double> xs, ys;
    for (const auto& s : series)
        for (const auto& p : s.points) {
            xs.push_back(p.x);
            ys.push_back(p.y);
            if (p.bar) {
                if (!spec.log_y || p.bar->lo > 0.0) ys.push_back(p.bar->lo);
                ys.push_back(p.bar->hi);
            }
        }
    const auto ax = detail::make_axis(xs, spec.log_x, "x");
    const auto ay = detail::make_axis(ys, spec.log_y, "y");

    const double left = 70, right = spec.width - 220.0, top = 40, bottom = spec.height - 50.0;
    auto px = [&](double v) { return ax.map(v, left, right); };
    auto py = [&](double v) { return ay.map(v, bottom, top); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        out << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << detail::escape(spec.title) << "</text>\n";
    out << "<rect class=\"frame\" x=\"" << left << "\" y=\"" << top << "\" width=\"" << right - left << "\" height=\""
        << bottom - top << "\" fill=\"none\" stroke=\"black\"/>\n";

    auto ticks = [](const detail::Axis& a) {
        std::vector<double> t;
        if (a.log) {
            for (double e = std::floor(std::log10(a.lo)); e <= std::ceil(std::log10(a.hi)); e += 1.0) {
                const double v = std::pow(10.0, e);
                if (v >= a.lo && v <= a.hi) t.push_back(v);
            }
        }
        if (t.size() < 2) {
            t.clear();
            for (int i = 0; i <= 4; ++i) {
                const double f = i / 4.0;
                t.push_back(a.log ? std::pow(10.0, std::log10(a.lo) + f * (std::log10(a.hi) - std::log10(a.lo)))
                                  : a.lo + f * (a.hi - a.lo));
            }
        }
        return t;
    };
    for (double v : ticks(ax))
        out << "<text x=\"" << px(v) << "\" y=\"" << bottom + 16 << "\" text-anchor=\"middle\">" << detail::num(v)
            << "</text>\n";
    for (double v : ticks(ay))
        out << "<text x=\"" << left - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << detail::num(v)
            << "</text>\n";
    out << "<text x=\"" << (left + right) / 2 << "\" y=\"" << spec.height - 12
        << "\" text-anchor=\"middle\">T</text>\n";
    out << "<text x=\"16\" y=\"" << (top + bottom) / 2 << "\" transform=\"rotate(-90 16 " << (top + bottom) / 2
        << ")\" text-anchor=\"middle\">" << (spec.metric == Metric::Regret ? "mean regret" : "error rate")
        << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        out << "<polyline fill=\"none\" stroke=\"" << detail::color(i) << "\" stroke-width=\"2\""
            << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
        for (std::size_t j = 0; j < s.points.size(); ++j)
            out << (j ? " " : "") << px(s.points[j].x) << "," << py(s.points[j].y);
        out << "\"/>\n";
        for (const auto& p : s.points) {
            out << "<circle cx=\"" << px(p.x) << "\" cy=\"" << py(p.y) << "\" r=\"3\" fill=\"" << detail::color(i)
                << "\"/>\n";
            if (p.bar) {
                const double lo = spec.log_y && p.bar->lo <= 0.0 ? ay.lo : p.bar->lo;
                out << "<line class=\"errbar\" x1=\"" << px(p.x) << "\" x2=\"" << px(p.x) << "\" y1=\"" << py(lo)
                    << "\" y2=\"" << py(p.bar->hi) << "\" stroke=\"" << detail::color(i) << "\"/>\n";
            }
        }
    }

    out << "<g class=\"legend\">\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double y = top + 10 + 18.0 * static_cast<double>(i);
        out << "<line x1=\"" << right + 12 << "\" x2=\"" << right + 36 << "\" y1=\"" << y << "\" y2=\"" << y
            << "\" stroke=\"" << detail::color(i) << "\" stroke-width=\"2\""
            << (series[i].dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
        out << "<text x=\"" << right + 42 << "\" y=\"" << y + 4 << "\">" << detail::escape(series[i].label)
            << "</text>\n";
    }
    out << "</g>\n</svg>\n";
}

} // namespace rbandit::plot
