#include "shapecore/error.hpp"

namespace shapecore {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::UnsupportedDtype: return "UnsupportedDtype";
        case ErrorCode::NotThreeDimensional: return "NotThreeDimensional";
        case ErrorCode::TruncatedPayload: return "TruncatedPayload";
        case ErrorCode::NonPositiveSpacing: return "NonPositiveSpacing";
        case ErrorCode::ShapeExceedsBounds: return "ShapeExceedsBounds";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::EmptyRoi: return "EmptyRoi";
        case ErrorCode::NoVertices: return "NoVertices";
        case ErrorCode::NoCasesFound: return "NoCasesFound";
        case ErrorCode::MissingBaseline: return "MissingBaseline";
        case ErrorCode::NoRecords: return "NoRecords";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace shapecore
