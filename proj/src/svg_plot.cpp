#include "chronosim/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "chronosim/errors.hpp"

namespace chronosim::scenario {

namespace {

constexpr double kLeft = 140.0;
constexpr double kRight = 30.0;
constexpr double kTop = 24.0;
constexpr double kBottom = 40.0;
constexpr double kPlotWidth = 760.0;
constexpr double kLaneHeight = 56.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string svg_header(double width, double height) {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
        << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return out.str();
}

std::string text(double x, double y, const std::string& s, const char* anchor = "start") {
    std::ostringstream out;
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-family=\"monospace\""
        << " font-size=\"11\" text-anchor=\"" << anchor << "\">" << s << "</text>\n";
    return out.str();
}

std::string line(double x1, double y1, double x2, double y2, const char* color,
                 double width = 1.0) {
    std::ostringstream out;
    out << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
        << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << color << "\" stroke-width=\""
        << fmt(width) << "\"/>\n";
    return out.str();
}

struct TimeAxis {
    double t0 = 0.0;
    double t1 = 1.0;

    double x(double t) const {
        double span = t1 > t0 ? t1 - t0 : 1.0;
        return kLeft + (t - t0) / span * kPlotWidth;
    }
};

std::string time_axis_marks(const TimeAxis& ax, double y) {
    std::string out;
    for (int i = 0; i <= 5; ++i) {
        double t = ax.t0 + (ax.t1 - ax.t0) * i / 5.0;
        double x = ax.x(t);
        out += line(x, y, x, y + 4, "#444444");
        out += text(x, y + 16, fmt(t) + "s", "middle");
    }
    return out;
}

// Generic stacked step plot over (lane label, time, offset) samples.
std::string stacked_steps(const std::vector<std::string>& lanes,
                          const std::vector<std::vector<std::pair<double, double>>>& steps,
                          double t0, double t1) {
    double height = kTop + kLaneHeight * std::max<std::size_t>(lanes.size(), 1) + kBottom;
    double width = kLeft + kPlotWidth + kRight;
    TimeAxis ax{t0, t1};
    std::string out = svg_header(width, height);
    double axis_y = kTop + kLaneHeight * std::max<std::size_t>(lanes.size(), 1);
    for (std::size_t i = 0; i < lanes.size(); ++i) {
        double base = kTop + kLaneHeight * static_cast<double>(i + 1) - 12.0;
        out += line(kLeft, base, kLeft + kPlotWidth, base, "#dddddd");
        out += text(kLeft - 8, base, lanes[i], "end");
        const auto& pts = steps[i];
        if (pts.empty()) continue;
        std::ostringstream path;
        double scale = (kLaneHeight - 16.0) / 0.5;  // offset 0.5 spans the lane
        path << "<path fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" d=\"";
        std::string prev_y;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            double x = ax.x(pts[k].first);
            std::string y = fmt(base - pts[k].second * scale);
            if (k == 0) {
                path << "M" << fmt(x) << " " << y;
            } else {
                path << " H" << fmt(x);
                if (y != prev_y) path << " V" << y;
            }
            prev_y = y;
        }
        path << " H" << fmt(ax.x(t1)) << "\"/>\n";
        out += path.str();
    }
    out += line(kLeft, axis_y, kLeft + kPlotWidth, axis_y, "#444444");
    out += time_axis_marks(ax, axis_y);
    out += "</svg>\n";
    return out;
}

double state_offset(const std::string& state) {
    if (state == "RUNNING" || state == "SENDING") return 0.5;
    if (state == "READY" || state == "WAITING") return 0.25;
    return 0.0;
}

std::string polyline(const TimeAxis& ax, const std::vector<double>& ts,
                     const std::vector<double>& vs, double y_base, double y_scale, double v0,
                     const char* color) {
    if (ts.empty()) return "";
    std::ostringstream out;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out << fmt(ax.x(ts[i])) << "," << fmt(y_base - (vs[i] - v0) * y_scale) << " ";
    }
    out << "\"/>\n";
    return out.str();
}

struct Range {
    double lo = 0.0, hi = 1.0;
    void grow(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double span() const { return hi > lo ? hi - lo : 1.0; }
};

}  // namespace

std::string render_schedule_svg(const std::vector<ScheduleRow>& rows) {
    std::vector<std::string> lanes;
    std::map<std::string, std::size_t> lane_of;
    std::vector<std::vector<std::pair<double, double>>> steps;
    double t1 = 0.0;
    for (const auto& r : rows) {
        std::string key = r.node + "." + r.task;
        auto it = lane_of.find(key);
        if (it == lane_of.end()) {
            it = lane_of.emplace(key, lanes.size()).first;
            lanes.push_back(key);
            steps.emplace_back();
        }
        steps[it->second].push_back({r.time, state_offset(r.state)});
        t1 = std::max(t1, r.time);
    }
    return stacked_steps(lanes, steps, 0.0, t1);
}

std::string render_network_svg(const std::vector<NetworkRow>& rows) {
    std::vector<std::string> lanes;
    std::map<std::string, std::size_t> lane_of;
    std::vector<std::vector<std::pair<double, double>>> steps;
    double t1 = 0.0;
    for (const auto& r : rows) {
        std::string key = "net" + std::to_string(r.network) + "." + r.node;
        auto it = lane_of.find(key);
        if (it == lane_of.end()) {
            it = lane_of.emplace(key, lanes.size()).first;
            lanes.push_back(key);
            steps.emplace_back();
        }
        steps[it->second].push_back({r.time, state_offset(r.state)});
        t1 = std::max(t1, r.time);
    }
    return stacked_steps(lanes, steps, 0.0, t1);
}

std::string render_response_svg(const std::vector<ResponseRow>& rows) {
    double panel = 180.0;
    double width = kLeft + kPlotWidth + kRight;
    double height = kTop + 2 * panel + 24.0 + kBottom;
    std::vector<double> ts, refs, ys, us;
    Range ry, ru;
    double t1 = 0.0;
    for (const auto& r : rows) {
        ts.push_back(r.time);
        refs.push_back(r.reference);
        ys.push_back(r.output);
        us.push_back(r.control);
        ry.grow(r.reference);
        ry.grow(r.output);
        ru.grow(r.control);
        t1 = std::max(t1, r.time);
    }
    TimeAxis ax{0.0, t1 > 0 ? t1 : 1.0};
    std::string out = svg_header(width, height);

    double y_base = kTop + panel;
    double y_scale = (panel - 20.0) / ry.span();
    out += text(kLeft - 8, kTop + 12, "reference/output", "end");
    out += line(kLeft, y_base, kLeft + kPlotWidth, y_base, "#444444");
    out += polyline(ax, ts, refs, y_base, y_scale, ry.lo, "#999999");
    out += polyline(ax, ts, ys, y_base, y_scale, ry.lo, "#1f4e9c");

    double u_base = kTop + 2 * panel + 24.0;
    double u_scale = (panel - 20.0) / ru.span();
    out += text(kLeft - 8, kTop + panel + 36.0, "control", "end");
    out += line(kLeft, u_base, kLeft + kPlotWidth, u_base, "#444444");
    out += polyline(ax, ts, us, u_base, u_scale, ru.lo, "#b03030");

    out += time_axis_marks(ax, u_base);
    out += "</svg>\n";
    return out;
}

std::string render_energy_svg(const std::vector<EnergyRow>& rows) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_node;
    Range range;
    double t1 = 0.0;
    std::vector<std::string> order;
    for (const auto& r : rows) {
        if (!per_node.count(r.node)) order.push_back(r.node);
        per_node[r.node].first.push_back(r.time);
        per_node[r.node].second.push_back(r.remaining);
        range.grow(r.remaining);
        t1 = std::max(t1, r.time);
    }
    double panel = 220.0;
    double width = kLeft + kPlotWidth + kRight;
    double height = kTop + panel + kBottom;
    TimeAxis ax{0.0, t1 > 0 ? t1 : 1.0};
    std::string out = svg_header(width, height);
    double base = kTop + panel;
    double scale = (panel - 20.0) / range.span();
    const char* colors[] = {"#1f4e9c", "#b03030", "#2e7d32", "#7b1fa2", "#f57c00"};
    int c = 0;
    for (const auto& name : order) {
        const auto& [ts, vs] = per_node[name];
        out += polyline(ax, ts, vs, base, scale, range.lo, colors[c % 5]);
        out += text(kLeft - 8, kTop + 12 + 14 * c, name + " (J)", "end");
        ++c;
    }
    out += line(kLeft, base, kLeft + kPlotWidth, base, "#444444");
    out += time_axis_marks(ax, base);
    out += "</svg>\n";
    return out;
}

std::vector<std::string> render_plots(const std::vector<std::string>& trace_files,
                                      const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> written;
    for (const std::string& file : trace_files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw MalformedTraceError("cannot open trace file: " + file);
        std::ostringstream ss;
        ss << in.rdbuf();
        std::string content = ss.str();
        std::string svg;
        switch (detect_trace_kind(content)) {
            case TraceKind::Schedule: svg = render_schedule_svg(parse_schedule_csv(content)); break;
            case TraceKind::Network: svg = render_network_svg(parse_network_csv(content)); break;
            case TraceKind::Response: svg = render_response_svg(parse_response_csv(content)); break;
            case TraceKind::Energy: svg = render_energy_svg(parse_energy_csv(content)); break;
            case TraceKind::Event: continue;  // not plottable
            case TraceKind::Unknown:
                throw MalformedTraceError("unrecognized trace header in " + file);
        }
        std::string name = fs::path(file).stem().string() + ".svg";
        std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
        out << svg;
        written.push_back(name);
    }
    return written;
}

}  // namespace chronosim::scenario
