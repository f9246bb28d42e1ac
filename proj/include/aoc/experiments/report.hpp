#pragma once

#include "aoc/common.hpp"

#include <map>
#include <string>
#include <vector>

namespace aoc::experiments {

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    void save(const std::string& path) const;
};

std::string fmt6(double x);

// Verdicts are written in insertion order so reruns are byte-identical.
struct Verdicts {
    std::vector<std::pair<std::string, bool>> checks;
    std::vector<std::pair<std::string, std::string>> notes;

    void set(const std::string& name, bool pass) { checks.push_back({name, pass}); }
    void note(const std::string& key, const std::string& value) { notes.push_back({key, value}); }
    bool all_pass() const;
    void save(const std::string& path) const;
};

struct Series {
    std::string label;
    std::vector<double> x, y;
};

void svg_line_chart(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series);

void svg_bar_chart(const std::string& path, const std::string& title,
                   const std::vector<std::string>& labels, const std::vector<double>& values);

double mean_of(const std::vector<double>& xs);
double std_of(const std::vector<double>& xs);

void ensure_dir(const std::string& path);

}  // namespace aoc::experiments
