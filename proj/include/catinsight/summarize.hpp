#pragma once

#include "catinsight/mining.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace catinsight {

struct Range {
    double min = 0.0;
    double max = 0.0;

    bool operator==(const Range&) const = default;
};

struct RankedAntecedent {
    ItemId item = 0;
    std::size_t count = 0;

    bool operator==(const RankedAntecedent&) const = default;
};

/// All single-consequent rules sharing one consequent, folded together.
struct RuleSummary {
    std::int64_t community = -1; // -1 when not mined per community
    ItemId consequent = 0;
    std::vector<RankedAntecedent> antecedents; // count descending, then item id ascending
    Range support;
    Range confidence;
    Range lift;
    std::size_t rule_count = 0;
};

enum class SummaryRank { rule_count, max_lift, max_confidence };

SummaryRank parse_summary_rank(std::string_view name);
std::string_view to_string(SummaryRank rank);

/// Rules with exactly one consequent item, order preserved.
std::vector<AssociationRule> filter_single_consequent(std::span<const AssociationRule> rules);

/// One summary per distinct consequent, ordered by consequent id. Every rule
/// must have a single consequent item.
std::vector<RuleSummary> summarize(std::span<const AssociationRule> rules);

/// Stable descending sort by `key`; ties by consequent id.
std::vector<RuleSummary> rank_summaries(std::vector<RuleSummary> summaries, SummaryRank key);

} // namespace catinsight
