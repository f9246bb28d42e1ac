#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace aoc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorCategory {
    missing_file = 2,
    schema_mismatch = 3,
    numeric_divergence = 4,
    parse_error = 5,
    internal = 6,
    invalid_argument = 7,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const { return category_; }
    int exit_code() const { return static_cast<int>(category_); }

    const char* category_name() const {
        switch (category_) {
            case ErrorCategory::missing_file: return "missing-file";
            case ErrorCategory::schema_mismatch: return "schema-mismatch";
            case ErrorCategory::numeric_divergence: return "numeric-divergence";
            case ErrorCategory::parse_error: return "parse-error";
            case ErrorCategory::internal: return "internal";
            case ErrorCategory::invalid_argument: return "invalid-argument";
        }
        return "unknown";
    }

private:
    ErrorCategory category_;
};

inline double clip(double x, double lo, double hi) {
    return std::min(std::max(x, lo), hi);
}

// Shortest-text serialization used by every file format: 17 significant
// digits round-trips any IEEE double.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace aoc
