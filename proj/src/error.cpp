#include "wordnorms/error.hpp"

namespace wordnorms {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::EmptyWord: return "EmptyWord";
        case ErrorKind::InvalidScale: return "InvalidScale";
        case ErrorKind::InvalidTemplate: return "InvalidTemplate";
        case ErrorKind::UnknownFeature: return "UnknownFeature";
        case ErrorKind::FileUnreadable: return "FileUnreadable";
        case ErrorKind::MissingColumn: return "MissingColumn";
        case ErrorKind::NotEnoughWords: return "NotEnoughWords";
        case ErrorKind::NetworkError: return "NetworkError";
        case ErrorKind::LogprobsUnsupported: return "LogprobsUnsupported";
        case ErrorKind::CacheMiss: return "CacheMiss";
        case ErrorKind::StorageError: return "StorageError";
        case ErrorKind::InvalidDistribution: return "InvalidDistribution";
        case ErrorKind::NoValidToken: return "NoValidToken";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::TooFewPairs: return "TooFewPairs";
        case ErrorKind::TooFewAxes: return "TooFewAxes";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace wordnorms
