#include "netdyn/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace netdyn {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> share_columns(int num_opinions, int num_classes) {
    std::vector<std::string> names;
    for (int m = 0; m < num_opinions; ++m)
        for (int k = 0; k < num_classes; ++k) names.push_back("c_" + std::to_string(m + 1) + "_" + std::to_string(k + 1));
    return names;
}

namespace {

void check_rows(const std::vector<CollectiveState>& rows, std::size_t times, std::size_t dim) {
    if (rows.size() != times) throw std::invalid_argument("csv: value count differs from time count");
    for (const auto& r : rows)
        if (r.size() != dim) throw std::invalid_argument("csv: row has the wrong dimension");
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, int num_opinions, int num_classes) {
    const auto names = share_columns(num_opinions, num_classes);
    check_rows(traj.values, traj.times.size(), names.size());
    out << 't';
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (std::size_t t = 0; t < traj.times.size(); ++t) {
        out << format_double(traj.times[t]);
        for (double v : traj.values[t]) out << ',' << format_double(v);
        out << '\n';
    }
}

void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats, int num_opinions, int num_classes) {
    const auto names = share_columns(num_opinions, num_classes);
    check_rows(stats.mean, stats.times.size(), names.size());
    check_rows(stats.stddev, stats.times.size(), names.size());
    out << 't';
    for (const auto& n : names) out << ',' << n;
    for (const auto& n : names) out << ",std" << n.substr(1);
    out << '\n';
    for (std::size_t t = 0; t < stats.times.size(); ++t) {
        out << format_double(stats.times[t]);
        for (double v : stats.mean[t]) out << ',' << format_double(v);
        for (double v : stats.stddev[t]) out << ',' << format_double(v);
        out << '\n';
    }
}

// --- reading -----------------------------------------------------------------

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw CsvError("csv: missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

std::vector<double> CsvTable::values(std::size_t col) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.at(col));
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && s[i] == ' ') ++i;
    return s.substr(i);
}

}  // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw CsvError("csv: empty input");
    for (auto& h : split(line)) table.header.push_back(trim(h));
    if (table.header.empty() || table.header.front().empty()) throw CsvError("csv: empty header");
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != table.header.size())
            throw CsvError("csv: line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                           " cells, expected " + std::to_string(table.header.size()));
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& raw : cells) {
            const std::string c = trim(raw);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
            if (c.empty() || ec != std::errc() || ptr != c.data() + c.size())
                throw CsvError("csv: line " + std::to_string(line_no) + ": cannot parse '" + c + "'");
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

// --- SVG ---------------------------------------------------------------------

namespace {

constexpr double kWidth = 720.0, kHeight = 440.0;
constexpr double kLeft = 60.0, kRight = 160.0, kTop = 40.0, kBottom = 50.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const std::string& title) {
    if (series.empty()) throw CsvError("plot: no input series");
    std::vector<double> times;
    std::vector<std::string> components;  // union of share columns, first-seen order
    for (const auto& s : series) {
        const auto t = s.table.values(s.table.column("t"));
        if (t.empty()) throw CsvError("plot: '" + s.label + "' has no rows");
        if (times.empty()) {
            times = t;
        } else {
            bool same = t.size() == times.size();
            for (std::size_t i = 0; same && i < t.size(); ++i) same = std::abs(t[i] - times[i]) <= 1e-9 * std::max(1.0, std::abs(t[i]));
            if (!same) throw CsvError("plot: '" + s.label + "' does not share the time column");
        }
        for (const auto& h : s.table.header)
            if (h.rfind("c_", 0) == 0 && std::find(components.begin(), components.end(), h) == components.end())
                components.push_back(h);
    }
    if (components.empty()) throw CsvError("plot: no share columns (c_*) to draw");

    const double t0 = times.front();
    const double t1 = times.back() > t0 ? times.back() : t0 + 1.0;
    const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
    auto x_of = [&](double t) { return kLeft + (t - t0) / (t1 - t0) * plot_w; };
    auto y_of = [&](double v) { return kTop + (1.0 - std::clamp(v, 0.0, 1.0)) * plot_h; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(kWidth) << "\" height=\""
        << fmt(kHeight) << "\" viewBox=\"0 0 " << fmt(kWidth) << ' ' << fmt(kHeight) << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << fmt(kWidth) << "\" height=\"" << fmt(kHeight) << "\" fill=\"white\"/>\n";
    if (!title.empty())
        svg << "<text x=\"" << fmt(kLeft) << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << escape(title)
            << "</text>\n";

    // axes and ticks
    svg << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
        << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(plot_w) << "\" height=\""
        << fmt(plot_h) << "\"/>\n</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double v = i / 5.0, y = y_of(v);
        svg << "<line x1=\"" << fmt(kLeft - 4) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
            << fmt(y) << "\" stroke=\"black\"/>\n<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(y + 4)
            << "\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
        const double t = t0 + (t1 - t0) * v, x = x_of(t);
        svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop + plot_h) << "\" x2=\"" << fmt(x) << "\" y2=\""
            << fmt(kTop + plot_h + 4) << "\" stroke=\"black\"/>\n<text x=\"" << fmt(x) << "\" y=\""
            << fmt(kTop + plot_h + 18) << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    }
    svg << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 8)
        << "\" text-anchor=\"middle\">t</text>\n</g>\n";

    auto polyline = [&](const std::vector<double>& v) {
        std::string pts;
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (i) pts += ' ';
            pts += fmt(x_of(times[i])) + ',' + fmt(y_of(v[i]));
        }
        return pts;
    };

    int legend_row = 0;
    for (const auto& s : series) {
        for (const auto& name : s.table.header) {
            const auto it = std::find(components.begin(), components.end(), name);
            if (it == components.end()) continue;
            const char* color = kPalette[static_cast<std::size_t>(it - components.begin()) % std::size(kPalette)];
            const auto mean = s.table.values(s.table.column(name));
            const std::string std_name = "std" + name.substr(1);
            const bool banded = s.table.has_column(std_name);
            if (banded) {
                const auto sd = s.table.values(s.table.column(std_name));
                std::string pts;
                for (std::size_t i = 0; i < times.size(); ++i)
                    pts += fmt(x_of(times[i])) + ',' + fmt(y_of(mean[i] + sd[i])) + ' ';
                for (std::size_t i = times.size(); i-- > 0;) {
                    pts += fmt(x_of(times[i])) + ',' + fmt(y_of(mean[i] - sd[i]));
                    if (i) pts += ' ';
                }
                svg << "<polygon points=\"" << pts << "\" fill=\"" << color
                    << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
            }
            svg << "<polyline points=\"" << polyline(mean) << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.5\"" << (banded ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
            const double ly = kTop + 12.0 + 16.0 * legend_row++;
            const double lx = kWidth - kRight + 12.0;
            svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 24) << "\" y2=\""
                << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\""
                << (banded ? " stroke-dasharray=\"6,4\"" : "") << "/>\n<text x=\"" << fmt(lx + 30) << "\" y=\""
                << fmt(ly + 4) << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label + " " + name)
                << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace netdyn
