#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chartforge {

enum class ErrorCode {
    // chart_core
    MalformedInput,
    NoNumericColumn,
    EmptyTable,
    ColumnMissing,
    MissingValue,
    NegativePieValue,
    IncompatibleVariant,
    IntegrityViolated,
    // semantics
    DimensionMismatch,
    MalformedLine,
    UnknownWord,
    ProviderUnavailable,
    // attention
    NonSquareImage,
    EmptyMask,
    // genclient
    BackendUnreachable,
    BackendTimeout,
    MissingAttention,
    InvalidRequest,
    // modification
    TooShort,
    SizeMismatch,
    // evaluation
    EmptyForeground,
    MarkNotFound,
    NoEdgesFound,
    // server
    NotFound,
    UnsupportedChartType,
    InvalidPlan,
    NoLayers,
    UnsupportedFormat,
    // shared
    InvalidArgument,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure surfaced by the library carries one of the codes above so
/// callers (the HTTP layer in particular) can branch without parsing text.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

} // namespace chartforge
