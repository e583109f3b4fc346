#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wordnorms {

enum class ErrorKind {
    InvalidArgument,
    EmptyWord,
    InvalidScale,
    InvalidTemplate,
    UnknownFeature,
    FileUnreadable,
    MissingColumn,
    NotEnoughWords,
    NetworkError,
    LogprobsUnsupported,
    CacheMiss,
    StorageError,
    InvalidDistribution,
    NoValidToken,
    LengthMismatch,
    TooFewPairs,
    TooFewAxes,
    ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for everything the library throws on a contract violation.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace wordnorms
