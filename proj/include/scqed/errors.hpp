#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace scqed {

// CLI exit codes: 0 success, 1 validation, 2 numerical failure, 3 no result.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RegimeError : NumericalError {
    using NumericalError::NumericalError;
};

struct NoRootError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigIssue {
    std::string key;
    int line = 0;  // 0 when not tied to a source line
    std::string message;
};

struct ConfigError : std::runtime_error {
    std::vector<ConfigIssue> issues;
    explicit ConfigError(std::vector<ConfigIssue> is)
        : std::runtime_error(summarize(is)), issues(std::move(is)) {}
    static std::string summarize(const std::vector<ConfigIssue>& is) {
        std::string s = "config error:";
        for (const auto& i : is) {
            s += "\n  " + i.key;
            if (i.line > 0) s += " (line " + std::to_string(i.line) + ")";
            s += ": " + i.message;
        }
        return s;
    }
};

}  // namespace scqed
