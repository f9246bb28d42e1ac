#include "aoc/experiments/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace aoc::experiments {

void Csv::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCategory::missing_file, "cannot open for write: " + path);
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

std::string fmt6(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

bool Verdicts::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
}

void Verdicts::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCategory::missing_file, "cannot open for write: " + path);
    out << "{\n  \"checks\": {\n";
    for (size_t i = 0; i < checks.size(); ++i) {
        out << "    \"" << checks[i].first << "\": " << (checks[i].second ? "true" : "false")
            << (i + 1 < checks.size() ? "," : "") << "\n";
    }
    out << "  },\n  \"notes\": {\n";
    for (size_t i = 0; i < notes.size(); ++i) {
        out << "    \"" << notes[i].first << "\": \"" << notes[i].second << "\""
            << (i + 1 < notes.size() ? "," : "") << "\n";
    }
    out << "  },\n  \"all_pass\": " << (all_pass() ? "true" : "false") << "\n}\n";
}

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct Extent {
    double lo = 0.0, hi = 1.0;
    void fit(const std::vector<double>& xs) {
        for (double v : xs) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
};

}  // namespace

void svg_line_chart(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series) {
    const double W = 680, H = 440, ml = 70, mr = 150, mt = 40, mb = 50;
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (const Series& s : series) {
        for (double v : s.x) {
            xlo = std::min(xlo, v);
            xhi = std::max(xhi, v);
        }
        for (double v : s.y) {
            ylo = std::min(ylo, v);
            yhi = std::max(yhi, v);
        }
    }
    if (xlo > xhi) {
        xlo = 0;
        xhi = 1;
    }
    if (ylo > yhi) {
        ylo = 0;
        yhi = 1;
    }
    if (xhi - xlo < 1e-12) xhi = xlo + 1;
    if (yhi - ylo < 1e-12) yhi = ylo + 1;
    const auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (W - ml - mr); };
    const auto py = [&](double y) { return H - mb - (y - ylo) / (yhi - ylo) * (H - mt - mb); };

    std::ofstream out(path);
    if (!out) throw Error(ErrorCategory::missing_file, "cannot open for write: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
        << "</text>\n";
    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = xlo + (xhi - xlo) * i / 4.0;
        const double fy = ylo + (yhi - ylo) * i / 4.0;
        out << "<text x=\"" << px(fx) << "\" y=\"" << H - mb + 18
            << "\" text-anchor=\"middle\">" << fmt6(fx) << "</text>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << py(fy) + 4
            << "\" text-anchor=\"end\">" << fmt6(fy) << "</text>\n";
        out << "<line x1=\"" << ml << "\" y1=\"" << py(fy) << "\" x2=\"" << W - mr << "\" y2=\""
            << py(fy) << "\" stroke=\"#dddddd\"/>\n";
    }
    out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + H - mb) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (mt + H - mb) / 2 << ")\">" << y_label << "</text>\n";

    for (size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % 8];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
        for (size_t i = 0; i < series[s].x.size(); ++i) {
            out << px(series[s].x[i]) << "," << py(series[s].y[i]) << " ";
        }
        out << "\"/>\n";
        const double ly = mt + 16.0 * static_cast<double>(s);
        out << "<line x1=\"" << W - mr + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - mr + 34
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << W - mr + 40 << "\" y=\"" << ly + 4 << "\">" << series[s].label
            << "</text>\n";
    }
    out << "</svg>\n";
}

void svg_bar_chart(const std::string& path, const std::string& title,
                   const std::vector<std::string>& labels, const std::vector<double>& values) {
    const double W = 680, H = 440, ml = 70, mr = 30, mt = 40, mb = 70;
    double ylo = 0.0, yhi = 0.0;
    for (double v : values) {
        ylo = std::min(ylo, v);
        yhi = std::max(yhi, v);
    }
    if (yhi - ylo < 1e-12) yhi = ylo + 1;
    const double n = static_cast<double>(values.size());
    const double band = (W - ml - mr) / std::max(1.0, n);
    const auto py = [&](double y) { return H - mb - (y - ylo) / (yhi - ylo) * (H - mt - mb); };

    std::ofstream out(path);
    if (!out) throw Error(ErrorCategory::missing_file, "cannot open for write: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
        << "</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << py(0.0) << "\" x2=\"" << W - mr << "\" y2=\""
        << py(0.0) << "\" stroke=\"black\"/>\n";
    for (size_t i = 0; i < values.size(); ++i) {
        const double x = ml + band * static_cast<double>(i) + band * 0.15;
        const double y0 = py(std::max(0.0, values[i]));
        const double h = std::abs(py(values[i]) - py(0.0));
        out << "<rect x=\"" << x << "\" y=\"" << y0 << "\" width=\"" << band * 0.7 << "\" height=\""
            << h << "\" fill=\"" << kPalette[i % 8] << "\"/>\n";
        out << "<text x=\"" << x + band * 0.35 << "\" y=\"" << H - mb + 18
            << "\" text-anchor=\"middle\">" << labels[i] << "</text>\n";
        out << "<text x=\"" << x + band * 0.35 << "\" y=\"" << y0 - 6
            << "\" text-anchor=\"middle\">" << fmt6(values[i]) << "</text>\n";
    }
    out << "</svg>\n";
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

void ensure_dir(const std::string& path) {
    std::filesystem::create_directories(path);
}

}  // namespace aoc::experiments
