#include "circuloop/core/error.hpp"

namespace circuloop {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DuplicateLabel: return "DUPLICATE_LABEL";
        case ErrorCode::InvalidQuantity: return "INVALID_QUANTITY";
        case ErrorCode::UnknownItem: return "UNKNOWN_ITEM";
        case ErrorCode::IllegalTransition: return "ILLEGAL_TRANSITION";
        case ErrorCode::QuantityOverflow: return "QUANTITY_OVERFLOW";
        case ErrorCode::StaleVersion: return "STALE_VERSION";
        case ErrorCode::CorruptLog: return "CORRUPT_LOG";
        case ErrorCode::Forbidden: return "FORBIDDEN_ROLE";
        case ErrorCode::InsufficientStock: return "INSUFFICIENT_STOCK";
        case ErrorCode::EmptyList: return "EMPTY_LIST";
        case ErrorCode::PreconditionFailed: return "PRECONDITION_FAILED";
        case ErrorCode::LinesFrozen: return "LINES_FROZEN";
        case ErrorCode::OverDisposition: return "OVER_DISPOSITION";
        case ErrorCode::IllegalState: return "ILLEGAL_STATE";
        case ErrorCode::IncompleteDispositions: return "INCOMPLETE_DISPOSITIONS";
        case ErrorCode::UnknownList: return "UNKNOWN_LIST";
        case ErrorCode::UnknownLine: return "UNKNOWN_LINE";
        case ErrorCode::UndefinedRate: return "UNDEFINED_RATE";
        case ErrorCode::EmptyScope: return "EMPTY_SCOPE";
        case ErrorCode::NotReconciled: return "NOT_RECONCILED";
        case ErrorCode::MissingFactor: return "MISSING_FACTOR";
        case ErrorCode::EmptyBatch: return "EMPTY_BATCH";
        case ErrorCode::OutOfRangeRating: return "OUT_OF_RANGE_RATING";
        case ErrorCode::InvalidCounts: return "INVALID_COUNTS";
        case ErrorCode::EmptyQuery: return "EMPTY_QUERY";
        case ErrorCode::UnknownMaterial: return "UNKNOWN_MATERIAL";
        case ErrorCode::ParseError: return "PARSE_ERROR";
        case ErrorCode::DuplicateInFile: return "DUPLICATE_IN_FILE";
        case ErrorCode::ReferencedEntity: return "REFERENCED_ENTITY";
        case ErrorCode::Validation: return "VALIDATION_ERROR";
        case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
        case ErrorCode::Unauthenticated: return "UNAUTHENTICATED";
    }
    return "UNKNOWN";
}

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::Unauthenticated:
            return 401;
        case ErrorCode::Forbidden:
            return 403;
        case ErrorCode::UnknownItem:
        case ErrorCode::UnknownList:
        case ErrorCode::UnknownLine:
        case ErrorCode::UnknownMaterial:
            return 404;
        case ErrorCode::StaleVersion:
        case ErrorCode::IllegalTransition:
        case ErrorCode::DuplicateLabel:
            return 409;
        case ErrorCode::Validation:
        case ErrorCode::ParseError:
        case ErrorCode::DuplicateInFile:
        case ErrorCode::EmptyQuery:
        case ErrorCode::InvalidConfig:
            return 400;
        default:
            return 422;
    }
}

}  // namespace circuloop
