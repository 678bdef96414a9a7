#include "frechet/error.hpp"

namespace frechet {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::TooFewItems: return "TooFewItems";
        case ErrorCode::DegenerateSpace: return "DegenerateSpace";
        case ErrorCode::EmptyCurve: return "EmptyCurve";
        case ErrorCode::InvalidCurve: return "InvalidCurve";
        case ErrorCode::UnsplittableVariable: return "UnsplittableVariable";
        case ErrorCode::NodeTooSmall: return "NodeTooSmall";
        case ErrorCode::NoValidSplit: return "NoValidSplit";
        case ErrorCode::NotApplicable: return "NotApplicable";
        case ErrorCode::MissingVariable: return "MissingVariable";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::NoOOBCoverage: return "NoOOBCoverage";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::InvalidGrid: return "InvalidGrid";
        case ErrorCode::DuplicateSample: return "DuplicateSample";
        case ErrorCode::IncompleteObservation: return "IncompleteObservation";
        case ErrorCode::InvalidFraction: return "InvalidFraction";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace frechet
