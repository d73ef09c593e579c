#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evoting {

enum class ErrorCode {
    MalformedLine,
    OffsetOutOfRange,
    SurfaceMismatch,
    UnknownLabel,
    SchemaError,
    ProbabilityError,
    DuplicateRow,
    EmptyInput,
    AlignmentError,
    EmptyEnsemble,
    WeightMismatch,
    LengthMismatch,
    UnsortedInput,
    UnknownDocument,
    IoError,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code.
/// Config errors map to exit status 2 in the CLI, everything else to 1.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    [[nodiscard]] const std::string &detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

enum class ViolationKind {
    DuplicateId,
    OverlapViolation,
    SurfaceMismatch,
    MissingRow,
    UnknownDocument,
    UnknownToken,
    OffsetMismatch,
};

std::string_view to_string(ViolationKind kind) noexcept;

/// Data-quality findings that are reported rather than thrown.
struct Violation {
    ViolationKind kind;
    std::string doc_id;
    std::string detail;

    bool operator==(const Violation &) const = default;
};

}  // namespace evoting
