#pragma once

#include <stdexcept>
#include <string>

namespace wlns {

/// A precondition of an operation was violated by the caller.
struct ContractError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed configuration text; carries the offending key and 1-based line.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& msg, std::string key_, int line_)
        : std::runtime_error(msg), key(std::move(key_)), line(line_) {}
    std::string key;
    int line;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a time stepper produces non-finite values.
struct BlowUpError : std::runtime_error {
    BlowUpError(const std::string& msg, double t) : std::runtime_error(msg), last_valid_time(t) {}
    double last_valid_time;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ContractError(msg);
}

}  // namespace wlns
