#include "tel/error.hpp"

namespace tel {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidRecord: return "InvalidRecord";
        case ErrorCode::DuplicateReferenceKey: return "DuplicateReferenceKey";
        case ErrorCode::UnbalancedRecord: return "UnbalancedRecord";
        case ErrorCode::CurrencyMismatch: return "CurrencyMismatch";
        case ErrorCode::UnparseableTimestamp: return "UnparseableTimestamp";
        case ErrorCode::SourceUnreadable: return "SourceUnreadable";
        case ErrorCode::MappingIncomplete: return "MappingIncomplete";
        case ErrorCode::DuplicateKeyWithinChain: return "DuplicateKeyWithinChain";
        case ErrorCode::RuleTemplateUnbalanced: return "RuleTemplateUnbalanced";
        case ErrorCode::InvalidRule: return "InvalidRule";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::AllMissingNumericColumn: return "AllMissingNumericColumn";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::KeepOutOfRange: return "KeepOutOfRange";
        case ErrorCode::NonFiniteFeature: return "NonFiniteFeature";
        case ErrorCode::KOutOfRange: return "KOutOfRange";
        case ErrorCode::TooFewRows: return "TooFewRows";
        case ErrorCode::DegenerateTimeAxis: return "DegenerateTimeAxis";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::SingleCluster: return "SingleCluster";
        case ErrorCode::FractionOutOfRange: return "FractionOutOfRange";
        case ErrorCode::SupportOutOfRange: return "SupportOutOfRange";
        case ErrorCode::NotDownwardClosed: return "NotDownwardClosed";
        case ErrorCode::MagnitudeTooLarge: return "MagnitudeTooLarge";
        case ErrorCode::TooFewParties: return "TooFewParties";
        case ErrorCode::IncompleteShareSet: return "IncompleteShareSet";
        case ErrorCode::MixedSessions: return "MixedSessions";
        case ErrorCode::UnknownPredicate: return "UnknownPredicate";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Parse: return "Parse";
    }
    return "Unknown";
}

}  // namespace tel
