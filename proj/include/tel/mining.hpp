#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tel/record.hpp"

namespace tel {

using Item = std::string;
using Itemset = std::vector<Item>;  // sorted, unique
using Transaction = std::set<Item>;

struct TransactionDB {
    std::vector<Transaction> transactions;
    std::size_t size() const noexcept { return transactions.size(); }
};

using FrequentItemsets = std::map<Itemset, std::size_t>;

/// One transaction per record: "party_from=..", "party_to=..", "location=..",
/// "currency=.." and "tag=.." for each tag.
TransactionDB transactions_from_records(const std::vector<TripleEntryRecord>& records);

/// Smallest count meeting the fraction: ceil(min_support * db_size).
/// Throws SupportOutOfRange unless 0 < min_support <= 1.
std::size_t min_support_count(double min_support, std::size_t db_size);

FrequentItemsets frequent_itemsets_apriori(const TransactionDB& db, double min_support);
FrequentItemsets frequent_itemsets_eclat(const TransactionDB& db, double min_support);

/// Sorted intersection of two sorted tid lists.
std::vector<std::size_t> intersect_tids(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

struct AssociationRule {
    Itemset antecedent;
    Itemset consequent;
    std::size_t count = 0;  // transactions containing antecedent and consequent
    double support = 0.0;
    double confidence = 0.0;
    double lift = 0.0;
};

/// Rules from every frequent itemset of size >= 2, ordered by support
/// descending, then antecedent, then consequent.
/// Throws NotDownwardClosed, InvalidArgument (min_confidence outside [0, 1]
/// or db_size 0).
std::vector<AssociationRule> generate_rules(const FrequentItemsets& frequent, std::size_t db_size,
                                            double min_confidence);

nlohmann::json to_json(const AssociationRule& rule);
nlohmann::json rules_to_json(const std::vector<AssociationRule>& rules);
nlohmann::json itemsets_to_json(const FrequentItemsets& frequent, std::size_t db_size);

}  // namespace tel
