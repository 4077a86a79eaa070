#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ambientlink {

// Maps one-to-one onto the process exit codes and C status values.
enum class ErrorKind {
    validation = 1,
    regime = 2,
    unreliable = 3,
    domain = 4,
    io = 5,
    argument = 6,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, double value = 0.0)
        : std::runtime_error(what), kind_(kind), value_(value) {}

    ErrorKind kind() const noexcept { return kind_; }
    // Numeric payload: required node count for Nyquist refusals, measured SNR for
    // unreliable signatures, offending alpha for bubble poles.
    double value() const noexcept { return value_; }

private:
    ErrorKind kind_;
    double value_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what, double value = 0.0)
{
    throw Error(kind, what, value);
}

inline std::string join_lines(const std::vector<std::string>& items)
{
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += "\n";
        out += s;
    }
    return out;
}

}
