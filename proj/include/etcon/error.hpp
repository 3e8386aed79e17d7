#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace etcon {

enum class ErrorKind {
    InvalidGraph,
    NotConnected,
    NotBalanced,
    DimensionMismatch,
    InvalidParameter,
    IsolatedAgent,
    ZenoAbort,
    NotHurwitz,
    NotSPD,
    Overflow,
    NoRootFound,
    InsufficientDecay,
    ParseError,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it onto an exit code without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace etcon
