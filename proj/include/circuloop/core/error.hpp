#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace circuloop {

// Closed taxonomy of domain failures. Every layer (HTTP, CLI, Python) maps
// these codes; nothing else is allowed to surface as a domain error.
enum class ErrorCode {
    DuplicateLabel,
    InvalidQuantity,
    UnknownItem,
    IllegalTransition,
    QuantityOverflow,
    StaleVersion,
    CorruptLog,
    Forbidden,
    InsufficientStock,
    EmptyList,
    PreconditionFailed,
    LinesFrozen,
    OverDisposition,
    IllegalState,
    IncompleteDispositions,
    UnknownList,
    UnknownLine,
    UndefinedRate,
    EmptyScope,
    NotReconciled,
    MissingFactor,
    EmptyBatch,
    OutOfRangeRating,
    InvalidCounts,
    EmptyQuery,
    UnknownMaterial,
    ParseError,
    DuplicateInFile,
    ReferencedEntity,
    Validation,
    InvalidConfig,
    Unauthenticated,
};

/// Machine-readable identifier, e.g. "FORBIDDEN_ROLE".
std::string_view error_code_name(ErrorCode code);

/// HTTP status the service shell answers with for this code.
int http_status(ErrorCode code);

class DomainError : public std::runtime_error {
public:
    DomainError(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view code_name() const { return error_code_name(code_); }

private:
    ErrorCode code_;
};

// Errors that carry the aggregate's current version (409 responses echo it).
class StaleVersionError : public DomainError {
public:
    StaleVersionError(const std::string& message, long long current_version)
        : DomainError(ErrorCode::StaleVersion, message), current_version_(current_version) {}

    long long current_version() const noexcept { return current_version_; }

private:
    long long current_version_;
};

// Ledger damage found during replay; names the offending record.
class CorruptLogError : public DomainError {
public:
    CorruptLogError(const std::string& message, long long offset, long long sequence)
        : DomainError(ErrorCode::CorruptLog, message), offset_(offset), sequence_(sequence) {}

    long long offset() const noexcept { return offset_; }
    long long sequence() const noexcept { return sequence_; }

private:
    long long offset_;
    long long sequence_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw DomainError(code, message);
}

}  // namespace circuloop
