#pragma once

#include "catinsight/dataset.hpp"
#include "catinsight/graph.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace catinsight {

struct MiningConfig {
    double min_support = 0.2;    // fraction of the mined transactions, in (0, 1]
    double min_confidence = 0.5; // in (0, 1]
    std::optional<std::size_t> max_itemset_size;
    std::size_t workers = 1;

    void validate() const;
};

struct FrequentItemset {
    Itemset items;
    std::size_t support_count = 0;
    double support = 0.0;
};

/// Frequent itemsets ordered by size, then lexicographically by items.
struct FrequentItemsets {
    std::size_t transaction_count = 0;
    std::vector<FrequentItemset> itemsets;
};

struct AssociationRule {
    Itemset antecedent;
    Itemset consequent;
    std::size_t support_count = 0;
    double support = 0.0;
    double confidence = 0.0;
    double lift = 0.0;
};

/// Smallest count c with c / n >= fraction (never below 1).
std::size_t min_count_for(double fraction, std::size_t n);

/// Level-wise apriori: prefix join of frequent k-sets, subset pruning and
/// exact counting on transaction bitsets. Items of each transaction must be
/// sorted. Output does not depend on config.workers.
FrequentItemsets apriori(std::span<const Itemset> transactions, const MiningConfig& config);
FrequentItemsets apriori(std::span<const Transaction> transactions, const MiningConfig& config);

/// Every X -> Z\X over frequent Z with |Z| >= 2 whose confidence reaches
/// min_confidence. Metrics come from stored counts only. Rules are ordered
/// by (antecedent, consequent).
std::vector<AssociationRule> generate_rules(const FrequentItemsets& frequent,
                                            const MiningConfig& config);

/// Restricts to the member rows, then runs apriori and generate_rules.
/// Supports are fractions of the member count.
std::vector<AssociationRule> mine_community(std::span<const Transaction> transactions,
                                            std::span<const NodeId> members,
                                            const MiningConfig& config);

} // namespace catinsight
