#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rowexit {

enum class ErrorCode {
    MissingFile,
    DecodeError,
    DimensionMismatch,
    IoError,
    InvalidMask,
    InvalidArgument,
    ImageTooSmall,
    WindowOutOfBounds,
    InsufficientDepth,
    HeadlandTooShort,
    ContractViolation,
    MaxFramesExceeded,
    ConfigError,
    ManifestError,
    EmptyInput,
    SchemaError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (the trial harness, the CLI) can map it to an abort reason or exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace rowexit
