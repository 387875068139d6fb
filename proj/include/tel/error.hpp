#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tel {

// Numeric values are mirrored by the tel_status codes in tel.h.
enum class ErrorCode : int {
    InvalidArgument = 1,
    InvalidRecord = 2,
    DuplicateReferenceKey = 3,
    UnbalancedRecord = 4,
    CurrencyMismatch = 5,
    UnparseableTimestamp = 6,
    SourceUnreadable = 7,
    MappingIncomplete = 8,
    DuplicateKeyWithinChain = 9,
    RuleTemplateUnbalanced = 10,
    InvalidRule = 11,
    EmptyInput = 12,
    AllMissingNumericColumn = 13,
    SingleClass = 14,
    KeepOutOfRange = 15,
    NonFiniteFeature = 16,
    KOutOfRange = 17,
    TooFewRows = 18,
    DegenerateTimeAxis = 19,
    LengthMismatch = 20,
    SingleCluster = 21,
    FractionOutOfRange = 22,
    SupportOutOfRange = 23,
    NotDownwardClosed = 24,
    MagnitudeTooLarge = 25,
    TooFewParties = 26,
    IncompleteShareSet = 27,
    MixedSessions = 28,
    UnknownPredicate = 29,
    Io = 30,
    Parse = 31,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace tel
