#include "rowexit/error.hpp"

namespace rowexit {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingFile: return "MissingFile";
        case ErrorCode::DecodeError: return "DecodeError";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvalidMask: return "InvalidMask";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ImageTooSmall: return "ImageTooSmall";
        case ErrorCode::WindowOutOfBounds: return "WindowOutOfBounds";
        case ErrorCode::InsufficientDepth: return "InsufficientDepth";
        case ErrorCode::HeadlandTooShort: return "HeadlandTooShort";
        case ErrorCode::ContractViolation: return "ContractViolation";
        case ErrorCode::MaxFramesExceeded: return "MaxFramesExceeded";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::ManifestError: return "ManifestError";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::SchemaError: return "SchemaError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace rowexit
