#include "tel/settlement.hpp"

#include <set>
#include <unordered_set>

#include "tel/error.hpp"

namespace tel {

namespace {

using nlohmann::json;

const std::set<std::string> kConditionFields = {"party_from", "party_to",  "location",
                                                "item_description", "rationale", "occurred_at"};

constexpr const char* kSettlementTagPrefix = "settles:";

std::optional<std::string> field_value(const ContextMetadata& m, const std::string& field) {
    if (field == "party_from") return m.party_from;
    if (field == "party_to") return m.party_to;
    if (field == "location") return m.location;
    if (field == "item_description") return m.item_description;
    if (field == "rationale") return m.rationale;
    if (field == "occurred_at") return m.occurred_at;
    return std::nullopt;
}

std::string expand(std::string text, const ContextMetadata& m) {
    auto replace_all = [&](const std::string& token, const std::string& value) {
        for (auto pos = text.find(token); pos != std::string::npos; pos = text.find(token, pos + value.size())) {
            text.replace(pos, token.size(), value);
        }
    };
    replace_all("{party_from}", m.party_from);
    replace_all("{party_to}", m.party_to);
    return text;
}

bool is_settlement(const TripleEntryRecord& r) {
    for (const auto& tag : r.metadata().tags) {
        if (tag.rfind(kSettlementTagPrefix, 0) == 0) return true;
    }
    return false;
}

std::vector<EntryLeg> build_legs(const std::vector<LegTemplate>& templates, const TripleEntryRecord& trigger) {
    std::vector<EntryLeg> legs;
    for (const auto& t : templates) {
        const __int128 scaled = static_cast<__int128>(trigger.total()) * t.trigger_bp / 10000;
        const __int128 amount = t.fixed + scaled;
        if (amount <= 0) continue;
        if (amount > kMaxMinorUnits) throw Error(ErrorCode::InvalidRule, "settlement leg exceeds 2^53 minor units");
        legs.push_back({expand(t.account, trigger.metadata()), {static_cast<std::int64_t>(amount), trigger.currency()}});
    }
    return legs;
}

}  // namespace

void validate_rule(const SettlementRule& rule) {
    if (rule.rule_id.empty()) throw Error(ErrorCode::InvalidRule, "rule_id is empty");
    if (rule.conditions.empty()) throw Error(ErrorCode::InvalidRule, "rule '" + rule.rule_id + "' has no condition");
    for (const auto& c : rule.conditions) {
        if (c.kind == RuleClause::Kind::FieldEquals && !kConditionFields.contains(c.field)) {
            throw Error(ErrorCode::InvalidRule, "rule '" + rule.rule_id + "' references undeclared field '" + c.field + "'");
        }
        if (c.kind == RuleClause::Kind::TagPresent && c.value.empty()) {
            throw Error(ErrorCode::InvalidRule, "rule '" + rule.rule_id + "' tests an empty tag");
        }
    }
    if (rule.debits.empty() || rule.credits.empty()) {
        throw Error(ErrorCode::InvalidRule, "rule '" + rule.rule_id + "' needs debit and credit legs");
    }
    std::int64_t fixed = 0;
    std::int64_t bp = 0;
    for (const auto& leg : rule.debits) {
        if (leg.account.empty() || leg.fixed < 0 || leg.trigger_bp < 0) {
            throw Error(ErrorCode::InvalidRule, "rule '" + rule.rule_id + "' has a malformed debit leg");
        }
        fixed += leg.fixed;
        bp += leg.trigger_bp;
    }
    for (const auto& leg : rule.credits) {
        if (leg.account.empty() || leg.fixed < 0 || leg.trigger_bp < 0) {
            throw Error(ErrorCode::InvalidRule, "rule '" + rule.rule_id + "' has a malformed credit leg");
        }
        fixed -= leg.fixed;
        bp -= leg.trigger_bp;
    }
    if (fixed != 0 || bp != 0) {
        throw Error(ErrorCode::RuleTemplateUnbalanced, "rule '" + rule.rule_id + "' template does not balance");
    }
}

bool rule_matches(const SettlementRule& rule, const ContextMetadata& metadata) {
    for (const auto& c : rule.conditions) {
        if (c.kind == RuleClause::Kind::TagPresent) {
            if (!metadata.tags.contains(c.value)) return false;
        } else {
            const auto v = field_value(metadata, c.field);
            if (!v || *v != c.value) return false;
        }
    }
    return true;
}

std::string settlement_tag(const std::string& rule_id, const std::string& trigger_key) {
    return kSettlementTagPrefix + rule_id + ":" + trigger_key;
}

std::vector<TripleEntryRecord> evaluate_settlement_rules(const LedgerChain& chain,
                                                         const std::vector<SettlementRule>& rules) {
    for (const auto& rule : rules) validate_rule(rule);

    std::unordered_set<std::string> settled;
    for (const auto& r : chain.records()) {
        for (const auto& tag : r.metadata().tags) {
            if (tag.rfind(kSettlementTagPrefix, 0) == 0) settled.insert(tag);
        }
    }

    std::vector<TripleEntryRecord> emitted;
    for (const auto& trigger : chain.records()) {
        if (is_settlement(trigger)) continue;
        for (const auto& rule : rules) {
            if (!rule_matches(rule, trigger.metadata())) continue;
            const std::string tag = settlement_tag(rule.rule_id, trigger.reference_key());
            if (settled.contains(tag)) continue;

            TripleEntryRecord s;
            s.debits = build_legs(rule.debits, trigger);
            s.credits = build_legs(rule.credits, trigger);
            if (s.debits.empty() || s.credits.empty()) continue;
            const BalanceResult balance = balance_check(s);
            if (!balance.pass) {
                throw Error(ErrorCode::RuleTemplateUnbalanced, "rule '" + rule.rule_id + "' is off by " +
                                                                   std::to_string(balance.imbalance) + " on '" +
                                                                   trigger.reference_key() + "' after rounding");
            }
            s.third.reference_key = "settle:" + rule.rule_id + ":" + trigger.reference_key();
            ContextMetadata& m = s.third.metadata;
            m.party_from = expand(rule.party_from, trigger.metadata());
            m.party_to = expand(rule.party_to, trigger.metadata());
            m.occurred_at = trigger.metadata().occurred_at;
            m.location = trigger.metadata().location;
            m.tags = {"settlement", tag};
            m.rationale = "rule " + rule.rule_id + " fired on " + trigger.reference_key();
            settled.insert(tag);
            emitted.push_back(std::move(s));
        }
    }
    return emitted;
}

SettlementRule rule_from_json(const json& j) {
    try {
        SettlementRule rule;
        rule.rule_id = j.at("rule_id").get<std::string>();
        for (const auto& c : j.at("when")) {
            RuleClause clause;
            if (c.contains("tag")) {
                clause.kind = RuleClause::Kind::TagPresent;
                clause.value = c.at("tag").get<std::string>();
            } else {
                clause.kind = RuleClause::Kind::FieldEquals;
                clause.field = c.at("field").get<std::string>();
                clause.value = c.at("equals").get<std::string>();
            }
            rule.conditions.push_back(std::move(clause));
        }
        const json& then = j.at("then");
        rule.party_from = then.value("party_from", rule.party_from);
        rule.party_to = then.value("party_to", rule.party_to);
        auto legs = [](const json& arr) {
            std::vector<LegTemplate> out;
            for (const auto& l : arr) {
                out.push_back({l.at("account").get<std::string>(), l.value("fixed", std::int64_t{0}),
                               l.value("trigger_bp", std::int64_t{0})});
            }
            return out;
        };
        rule.debits = legs(then.at("debits"));
        rule.credits = legs(then.at("credits"));
        return rule;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidRule, std::string("malformed rule: ") + e.what());
    }
}

std::vector<SettlementRule> rules_from_json(const json& j) {
    std::vector<SettlementRule> rules;
    if (j.is_array()) {
        for (const auto& r : j) rules.push_back(rule_from_json(r));
    } else {
        rules.push_back(rule_from_json(j));
    }
    return rules;
}

}  // namespace tel
