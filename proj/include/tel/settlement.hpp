#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tel/ledger.hpp"

namespace tel {

/// One conjunct of a rule condition: a tag is present, or a metadata field
/// equals a value.
struct RuleClause {
    enum class Kind { TagPresent, FieldEquals };
    Kind kind = Kind::TagPresent;
    std::string field;  // FieldEquals only
    std::string value;  // tag name or expected field value
};

/// Leg amount = fixed + floor(trigger_total * trigger_bp / 10000).
struct LegTemplate {
    std::string account;  // "{party_from}" / "{party_to}" expand to the trigger's parties
    std::int64_t fixed = 0;
    std::int64_t trigger_bp = 0;
};

struct SettlementRule {
    std::string rule_id;
    std::vector<RuleClause> conditions;  // all must hold
    std::string party_from = "{party_to}";
    std::string party_to = "{party_from}";
    std::vector<LegTemplate> debits;
    std::vector<LegTemplate> credits;
};

/// Throws InvalidRule (empty id, no clauses, undeclared field, no legs) or
/// RuleTemplateUnbalanced (fixed or basis-point sums differ between sides).
void validate_rule(const SettlementRule& rule);

bool rule_matches(const SettlementRule& rule, const ContextMetadata& metadata);

/// Tag carried by the settlement of (rule_id, trigger_key); its presence
/// anywhere in the chain suppresses re-emission.
std::string settlement_tag(const std::string& rule_id, const std::string& trigger_key);

/// Settlement records for every (record, rule) match not yet settled in the
/// chain, in chain order then rule order. Settlement records are never
/// triggers. Legs that evaluate to zero are omitted, and a trigger whose
/// debit or credit side evaluates to nothing emits no record. Emitted records
/// are unsealed; append them to seal.
/// Throws RuleTemplateUnbalanced if rounding leaves the sides unequal.
std::vector<TripleEntryRecord> evaluate_settlement_rules(const LedgerChain& chain,
                                                         const std::vector<SettlementRule>& rules);

SettlementRule rule_from_json(const nlohmann::json& j);
std::vector<SettlementRule> rules_from_json(const nlohmann::json& j);

}  // namespace tel
