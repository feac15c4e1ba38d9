#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace solarcast {

/// Failure categories. The CLI maps `validation` to exit code 1 and
/// everything else to exit code 2.
enum class ErrorKind {
    validation,
    parse,
    ordering,
    insufficient_data,
    alignment,
    unsupported,
    range,
    numeric_domain,
    degenerate_cycle,
    configuration,
};

inline constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::parse: return "parse";
    case ErrorKind::ordering: return "ordering";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::range: return "range";
    case ErrorKind::numeric_domain: return "numeric-domain";
    case ErrorKind::degenerate_cycle: return "degenerate-cycle";
    case ErrorKind::configuration: return "configuration";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> line = std::nullopt)
        : std::runtime_error(line ? "line " + std::to_string(*line) + ": " + message : message),
          kind_(kind), line_(line) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// 1-based input line, for errors raised while parsing text.
    std::optional<std::size_t> line() const noexcept { return line_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> line_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void require(bool condition, const std::string& message) {
    if (!condition) throw Error(ErrorKind::validation, message);
}

} // namespace detail
} // namespace solarcast
