#include "chartforge/error.hpp"

namespace chartforge {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::NoNumericColumn: return "NoNumericColumn";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::ColumnMissing: return "ColumnMissing";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::NegativePieValue: return "NegativePieValue";
    case ErrorCode::IncompatibleVariant: return "IncompatibleVariant";
    case ErrorCode::IntegrityViolated: return "IntegrityViolated";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::UnknownWord: return "UnknownWord";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::NonSquareImage: return "NonSquareImage";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::BackendUnreachable: return "BackendUnreachable";
    case ErrorCode::BackendTimeout: return "BackendTimeout";
    case ErrorCode::MissingAttention: return "MissingAttention";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::EmptyForeground: return "EmptyForeground";
    case ErrorCode::MarkNotFound: return "MarkNotFound";
    case ErrorCode::NoEdgesFound: return "NoEdgesFound";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::UnsupportedChartType: return "UnsupportedChartType";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::NoLayers: return "NoLayers";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace chartforge
