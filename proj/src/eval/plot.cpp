#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "forl/eval/eval.hpp"
#include "format.hpp"

namespace forl::eval {

using detail::fmt;

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

const char* color(std::size_t i) { return kPalette[i % (sizeof kPalette / sizeof kPalette[0])]; }

std::string escape(const std::string& s) {
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

/// Axis range [lo, hi] widened to multiples of a 1-2-5 tick step.
struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    double step = 0.2;
};

Axis nice_axis(double lo, double hi) {
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

class Svg {
public:
    Svg(const PlotData& data, const Axis& x, const Axis& y, bool x_ticks) : x_(x), y_(y) {
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
             << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
        out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        text(kWidth / 2, 22, data.title, "middle", 14);
        text(kLeft + plot_w() / 2, kHeight - 15, data.x_label, "middle", 12);
        out_ << "<text transform=\"translate(18," << fmt(kTop + plot_h() / 2)
             << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" << escape(data.y_label) << "</text>\n";
        for (double v = y.lo; v <= y.hi + 1e-9 * y.step; v += y.step) {
            const double py = sy(v);
            line(kLeft, py, kLeft + plot_w(), py, "#dddddd");
            text(kLeft - 6, py + 4, fmt(round_tick(v, y.step)), "end", 11);
        }
        if (x_ticks) {
            for (double v = x.lo; v <= x.hi + 1e-9 * x.step; v += x.step) {
                text(sx(v), kTop + plot_h() + 16, fmt(round_tick(v, x.step)), "middle", 11);
            }
        }
        line(kLeft, kTop + plot_h(), kLeft + plot_w(), kTop + plot_h(), "black");
        line(kLeft, kTop, kLeft, kTop + plot_h(), "black");
    }

    static double plot_w() { return kWidth - kLeft - kRight; }
    static double plot_h() { return kHeight - kTop - kBottom; }
    double sx(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * plot_w(); }
    double sy(double v) const { return kTop + plot_h() - (v - y_.lo) / (y_.hi - y_.lo) * plot_h(); }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1.0) {
        out_ << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2) << "\" y2=\"" << fmt(y2)
             << "\" stroke=\"" << stroke << "\" stroke-width=\"" << fmt(width) << "\"/>\n";
    }
    void rect(double x, double y, double w, double h, const std::string& fill, double opacity = 1.0) {
        out_ << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
             << "\" fill=\"" << fill << "\" fill-opacity=\"" << fmt(opacity) << "\"/>\n";
    }
    void text(double x, double y, const std::string& s, const std::string& anchor, int size) {
        out_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" text-anchor=\"" << anchor << "\" font-size=\""
             << size << "\">" << escape(s) << "</text>\n";
    }
    void polyline(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& stroke) {
        out_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) out_ << (i ? " " : "") << fmt(sx(xs[i])) << ',' << fmt(sy(ys[i]));
        out_ << "\"/>\n";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            out_ << "<circle cx=\"" << fmt(sx(xs[i])) << "\" cy=\"" << fmt(sy(ys[i])) << "\" r=\"3\" fill=\"" << stroke
                 << "\"/>\n";
        }
    }
    void legend(const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            const double y = kTop + 10 + 18.0 * static_cast<double>(i);
            rect(kLeft + plot_w() + 12, y - 9, 12, 12, color(i));
            text(kLeft + plot_w() + 30, y + 1, names[i], "start", 11);
        }
    }
    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

private:
    static double round_tick(double v, double step) { return std::round(v / step) * step; }

    Axis x_, y_;
    std::ostringstream out_;
};

std::string svg_path(const std::string& path) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + ".svg";
    return path.substr(0, dot) + ".svg";
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
    if (!out) throw std::runtime_error("error while writing '" + path + "'");
}

std::vector<std::size_t> histogram_counts(const std::vector<double>& samples, const std::vector<double>& edges) {
    const std::size_t bins = edges.size() - 1;
    std::vector<std::size_t> counts(bins, 0);
    const double lo = edges.front(), hi = edges.back();
    for (double v : samples) {
        auto b = static_cast<std::size_t>(std::floor((v - lo) / (hi - lo) * static_cast<double>(bins)));
        counts[std::min(b, bins - 1)] += 1;
    }
    return counts;
}

std::string render_bars(const PlotData& d) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        const double e = i < d.errors.size() && std::isfinite(d.errors[i]) ? d.errors[i] : 0.0;
        lo = std::min(lo, d.values[i] - e);
        hi = std::max(hi, d.values[i] + e);
    }
    const double n = static_cast<double>(std::max<std::size_t>(d.values.size(), 1));
    Svg svg(d, {0.0, n, 1.0}, nice_axis(lo, hi), false);
    const double slot = Svg::plot_w() / n;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        const double x0 = kLeft + slot * static_cast<double>(i) + slot * 0.15;
        const double y0 = svg.sy(std::max(d.values[i], 0.0));
        const double y1 = svg.sy(std::min(d.values[i], 0.0));
        svg.rect(x0, y0, slot * 0.7, y1 - y0, color(i));
        if (i < d.errors.size() && std::isfinite(d.errors[i]) && d.errors[i] > 0.0) {
            const double cx = x0 + slot * 0.35;
            svg.line(cx, svg.sy(d.values[i] - d.errors[i]), cx, svg.sy(d.values[i] + d.errors[i]), "black", 1.5);
        }
        if (i < d.labels.size()) svg.text(x0 + slot * 0.35, kTop + Svg::plot_h() + 16, d.labels[i], "middle", 10);
    }
    return svg.finish();
}

std::string render_lines(const PlotData& d) {
    double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
    bool first = true;
    for (const auto& l : d.lines) {
        for (std::size_t i = 0; i < l.x.size(); ++i) {
            if (first) {
                xlo = xhi = l.x[i];
                ylo = yhi = l.y[i];
                first = false;
            }
            xlo = std::min(xlo, l.x[i]);
            xhi = std::max(xhi, l.x[i]);
            ylo = std::min(ylo, l.y[i]);
            yhi = std::max(yhi, l.y[i]);
        }
    }
    Svg svg(d, nice_axis(xlo, xhi), nice_axis(std::min(ylo, 0.0), yhi), true);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < d.lines.size(); ++i) {
        svg.polyline(d.lines[i].x, d.lines[i].y, color(i));
        names.push_back(d.lines[i].name);
    }
    svg.legend(names);
    return svg.finish();
}

std::string render_histogram(const PlotData& d, const std::vector<double>& edges) {
    std::size_t top = 1;
    std::vector<std::vector<std::size_t>> counts;
    for (const auto& [name, s] : d.samples) {
        counts.push_back(histogram_counts(s, edges));
        for (auto c : counts.back()) top = std::max(top, c);
    }
    Svg svg(d, nice_axis(edges.front(), edges.back()), nice_axis(0.0, static_cast<double>(top)), true);
    std::vector<std::string> names;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
            if (counts[k][b] == 0) continue;
            const double x0 = svg.sx(edges[b]), x1 = svg.sx(edges[b + 1]);
            const double y0 = svg.sy(static_cast<double>(counts[k][b]));
            svg.rect(x0, y0, x1 - x0, svg.sy(0.0) - y0, color(k), 0.5);
        }
        names.push_back(d.samples[k].first);
    }
    svg.legend(names);
    return svg.finish();
}

}  // namespace

std::string to_string(PlotKind k) {
    switch (k) {
        case PlotKind::bars: return "bars";
        case PlotKind::lines: return "lines";
        case PlotKind::histogram: return "histogram";
    }
    throw std::invalid_argument("unknown plot kind");
}

PlotKind plot_kind_from_string(const std::string& s) {
    if (s == "bars") return PlotKind::bars;
    if (s == "lines") return PlotKind::lines;
    if (s == "histogram") return PlotKind::histogram;
    throw std::invalid_argument("unknown plot kind '" + s + "' (bars, lines, histogram)");
}

PlotData bars_from_summaries(const std::vector<RunSummary>& rows, const std::string& metric) {
    if (metric != "score" && metric != "error") throw std::invalid_argument("bars: metric must be score or error");
    PlotData d;
    d.title = metric == "score" ? "Mean score by mode" : "Mean prediction error by mode";
    d.x_label = "mode";
    d.y_label = metric == "score" ? "score" : "l2 error";
    std::vector<std::vector<double>> per_mode;
    for (const auto& r : rows) {
        auto it = std::find(d.labels.begin(), d.labels.end(), r.mode);
        if (it == d.labels.end()) {
            d.labels.push_back(r.mode);
            per_mode.emplace_back();
            it = d.labels.end() - 1;
        }
        per_mode[static_cast<std::size_t>(it - d.labels.begin())].push_back(metric == "score" ? r.score_mean
                                                                                             : r.err.mean);
    }
    for (const auto& v : per_mode) {
        const auto [m, s] = mean_std(v);
        d.values.push_back(m);
        d.errors.push_back(s);
    }
    return d;
}

PlotData lines_from_sweep(const SweepResult& sweep) {
    PlotData d;
    d.title = "Score against offset scale";
    d.x_label = "alpha";
    d.y_label = "score";
    for (const auto& p : sweep.points) {
        auto it = std::find_if(d.lines.begin(), d.lines.end(), [&](const auto& l) { return l.name == p.mode; });
        if (it == d.lines.end()) {
            d.lines.push_back({p.mode, {}, {}});
            it = d.lines.end() - 1;
        }
        it->x.push_back(p.alpha);
        it->y.push_back(p.score_mean);
    }
    return d;
}

PlotData histogram_from_logs(const std::vector<std::pair<std::string, std::vector<agent::EpisodeLog>>>& runs,
                             std::size_t bins) {
    PlotData d;
    d.title = "Prediction error distribution";
    d.x_label = "l2 error";
    d.y_label = "steps";
    d.bins = bins;
    for (const auto& [name, logs] : runs) d.samples.emplace_back(name, step_errors(logs));
    return d;
}

std::vector<double> histogram_edges(const PlotData& data) {
    if (data.bins < 1) throw std::invalid_argument("histogram: bins must be >= 1");
    bool any = false;
    double lo = 0.0, hi = 0.0;
    for (const auto& [name, s] : data.samples) {
        for (double v : s) {
            if (!std::isfinite(v)) throw std::invalid_argument("histogram: non-finite sample in '" + name + "'");
            if (!any) lo = hi = v;
            any = true;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!any) return {};
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    std::vector<double> edges(data.bins + 1);
    for (std::size_t i = 0; i <= data.bins; ++i) {
        edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(data.bins);
    }
    edges.back() = hi;
    return edges;
}

void emit_plot_data(const PlotData& data, PlotKind kind, const std::string& path, bool svg) {
    std::ostringstream csv;
    std::string picture;
    switch (kind) {
        case PlotKind::bars:
            csv << "label,value,error\n";
            for (std::size_t i = 0; i < data.values.size(); ++i) {
                csv << (i < data.labels.size() ? data.labels[i] : std::to_string(i)) << ',' << fmt(data.values[i])
                    << ',' << fmt(i < data.errors.size() ? data.errors[i] : 0.0) << '\n';
            }
            if (svg) picture = render_bars(data);
            break;
        case PlotKind::lines:
            csv << "series,x,y\n";
            for (const auto& l : data.lines) {
                if (l.x.size() != l.y.size()) throw std::invalid_argument("lines: x and y lengths differ");
                for (std::size_t i = 0; i < l.x.size(); ++i) csv << l.name << ',' << fmt(l.x[i]) << ',' << fmt(l.y[i]) << '\n';
            }
            if (svg) picture = render_lines(data);
            break;
        case PlotKind::histogram: {
            csv << "series,bin_lo,bin_hi,count\n";
            const auto edges = histogram_edges(data);
            if (!edges.empty()) {
                for (const auto& [name, s] : data.samples) {
                    const auto counts = histogram_counts(s, edges);
                    for (std::size_t b = 0; b < counts.size(); ++b) {
                        csv << name << ',' << fmt(edges[b]) << ',' << fmt(edges[b + 1]) << ',' << counts[b] << '\n';
                    }
                }
                if (svg) picture = render_histogram(data, edges);
            }
            break;
        }
    }
    write_file(path, csv.str());
    if (svg) {
        if (picture.empty()) picture = Svg(data, Axis{}, Axis{}, false).finish();
        write_file(svg_path(path), picture);
    }
}

}  // namespace forl::eval
