#include "tel/mining.hpp"

#include <algorithm>
#include <cmath>

#include "tel/error.hpp"

namespace tel {

namespace {

bool contains_all(const Transaction& t, const Itemset& items) {
    return std::all_of(items.begin(), items.end(), [&](const Item& i) { return t.contains(i); });
}

// Subsets of size |s| - 1.
std::vector<Itemset> drop_one(const Itemset& s) {
    std::vector<Itemset> out;
    for (std::size_t skip = 0; skip < s.size(); ++skip) {
        Itemset sub;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i != skip) sub.push_back(s[i]);
        }
        out.push_back(std::move(sub));
    }
    return out;
}

struct Eclat {
    std::size_t min_count;
    FrequentItemsets& out;

    void expand(const Itemset& prefix, const std::vector<std::pair<Item, std::vector<std::size_t>>>& klass) {
        for (std::size_t i = 0; i < klass.size(); ++i) {
            Itemset itemset = prefix;
            itemset.push_back(klass[i].first);
            out[itemset] = klass[i].second.size();
            std::vector<std::pair<Item, std::vector<std::size_t>>> next;
            for (std::size_t j = i + 1; j < klass.size(); ++j) {
                auto tids = intersect_tids(klass[i].second, klass[j].second);
                if (tids.size() >= min_count) next.emplace_back(klass[j].first, std::move(tids));
            }
            if (!next.empty()) expand(itemset, next);
        }
    }
};

}  // namespace

TransactionDB transactions_from_records(const std::vector<TripleEntryRecord>& records) {
    TransactionDB db;
    db.transactions.reserve(records.size());
    for (const auto& r : records) {
        const ContextMetadata& m = r.metadata();
        Transaction t;
        t.insert("party_from=" + m.party_from);
        t.insert("party_to=" + m.party_to);
        if (m.location) t.insert("location=" + *m.location);
        if (!r.debits.empty()) t.insert("currency=" + r.currency());
        for (const auto& tag : m.tags) t.insert("tag=" + tag);
        db.transactions.push_back(std::move(t));
    }
    return db;
}

std::size_t min_support_count(double min_support, std::size_t db_size) {
    if (!(min_support > 0.0 && min_support <= 1.0)) {
        throw Error(ErrorCode::SupportOutOfRange, "min_support must lie in (0, 1]");
    }
    // The epsilon keeps fractions such as 2/3 * 3 from rounding up to 3.
    const double raw = std::ceil(min_support * static_cast<double>(db_size) - 1e-9);
    return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

FrequentItemsets frequent_itemsets_apriori(const TransactionDB& db, double min_support) {
    const std::size_t min_count = min_support_count(min_support, db.size());
    FrequentItemsets result;

    std::map<Item, std::size_t> singles;
    for (const auto& t : db.transactions) {
        for (const auto& item : t) ++singles[item];
    }
    std::vector<Itemset> level;
    for (const auto& [item, count] : singles) {
        if (count >= min_count) {
            result[{item}] = count;
            level.push_back({item});
        }
    }

    while (level.size() > 1) {
        // Join itemsets that share all but the last item; level is sorted.
        std::vector<Itemset> candidates;
        for (std::size_t i = 0; i < level.size(); ++i) {
            for (std::size_t j = i + 1; j < level.size(); ++j) {
                if (!std::equal(level[i].begin(), level[i].end() - 1, level[j].begin())) break;
                Itemset c = level[i];
                c.push_back(level[j].back());
                const auto subsets = drop_one(c);
                if (std::all_of(subsets.begin(), subsets.end(), [&](const Itemset& s) { return result.contains(s); })) {
                    candidates.push_back(std::move(c));
                }
            }
        }
        std::vector<Itemset> next;
        for (auto& c : candidates) {
            std::size_t count = 0;
            for (const auto& t : db.transactions) count += contains_all(t, c) ? 1 : 0;
            if (count >= min_count) {
                result[c] = count;
                next.push_back(std::move(c));
            }
        }
        level = std::move(next);
    }
    return result;
}

std::vector<std::size_t> intersect_tids(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::vector<std::size_t> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

FrequentItemsets frequent_itemsets_eclat(const TransactionDB& db, double min_support) {
    const std::size_t min_count = min_support_count(min_support, db.size());
    std::map<Item, std::vector<std::size_t>> vertical;
    for (std::size_t tid = 0; tid < db.size(); ++tid) {
        for (const auto& item : db.transactions[tid]) vertical[item].push_back(tid);
    }
    std::vector<std::pair<Item, std::vector<std::size_t>>> root;
    for (auto& [item, tids] : vertical) {
        if (tids.size() >= min_count) root.emplace_back(item, std::move(tids));
    }
    FrequentItemsets result;
    Eclat{min_count, result}.expand({}, root);
    return result;
}

std::vector<AssociationRule> generate_rules(const FrequentItemsets& frequent, std::size_t db_size,
                                            double min_confidence) {
    if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "min_confidence must lie in [0, 1]");
    }
    for (const auto& [itemset, count] : frequent) {
        if (itemset.size() < 2) continue;
        for (const auto& sub : drop_one(itemset)) {
            auto it = frequent.find(sub);
            if (it == frequent.end()) throw Error(ErrorCode::NotDownwardClosed, "a subset of a frequent itemset is missing");
        }
    }
    if (frequent.empty()) return {};
    if (db_size == 0) throw Error(ErrorCode::InvalidArgument, "db_size must be positive");

    const double n = static_cast<double>(db_size);
    std::vector<AssociationRule> rules;
    for (const auto& [itemset, count] : frequent) {
        if (itemset.size() < 2) continue;
        const std::size_t m = itemset.size();
        // Every non-empty proper subset via bitmask; itemsets stay small.
        for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << m); ++mask) {
            AssociationRule rule;
            for (std::size_t i = 0; i < m; ++i) {
                ((mask >> i) & 1 ? rule.antecedent : rule.consequent).push_back(itemset[i]);
            }
            const auto ante = frequent.find(rule.antecedent);
            const auto cons = frequent.find(rule.consequent);
            if (ante == frequent.end() || cons == frequent.end()) {
                throw Error(ErrorCode::NotDownwardClosed, "a subset of a frequent itemset is missing");
            }
            rule.count = count;
            rule.support = static_cast<double>(count) / n;
            rule.confidence = static_cast<double>(count) / static_cast<double>(ante->second);
            rule.lift = rule.confidence / (static_cast<double>(cons->second) / n);
            if (rule.confidence >= min_confidence) rules.push_back(std::move(rule));
        }
    }
    std::sort(rules.begin(), rules.end(), [](const AssociationRule& a, const AssociationRule& b) {
        if (a.count != b.count) return a.count > b.count;
        if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
        return a.consequent < b.consequent;
    });
    return rules;
}

nlohmann::json to_json(const AssociationRule& rule) {
    return nlohmann::json{{"antecedent", rule.antecedent}, {"consequent", rule.consequent}, {"count", rule.count},
                          {"support", rule.support},       {"confidence", rule.confidence}, {"lift", rule.lift}};
}

nlohmann::json rules_to_json(const std::vector<AssociationRule>& rules) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rules) out.push_back(to_json(r));
    return out;
}

nlohmann::json itemsets_to_json(const FrequentItemsets& frequent, std::size_t db_size) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& [itemset, count] : frequent) {
        out.push_back({{"items", itemset},
                       {"count", count},
                       {"support", db_size == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(db_size)}});
    }
    return out;
}

}  // namespace tel
