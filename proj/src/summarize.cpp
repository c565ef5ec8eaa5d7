#include "catinsight/summarize.hpp"

#include "catinsight/error.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace catinsight {

namespace {

void widen(Range& range, double value, bool first) {
    if (first) {
        range = Range{value, value};
        return;
    }
    range.min = std::min(range.min, value);
    range.max = std::max(range.max, value);
}

} // namespace

SummaryRank parse_summary_rank(std::string_view name) {
    if (name == "rule_count") {
        return SummaryRank::rule_count;
    }
    if (name == "max_lift") {
        return SummaryRank::max_lift;
    }
    if (name == "max_confidence") {
        return SummaryRank::max_confidence;
    }
    throw ConfigError("unknown summary ranking '" + std::string(name) +
                      "' (expected rule_count, max_lift or max_confidence)");
}

std::string_view to_string(SummaryRank rank) {
    switch (rank) {
    case SummaryRank::rule_count:
        return "rule_count";
    case SummaryRank::max_lift:
        return "max_lift";
    case SummaryRank::max_confidence:
        return "max_confidence";
    }
    return "rule_count";
}

std::vector<AssociationRule> filter_single_consequent(std::span<const AssociationRule> rules) {
    std::vector<AssociationRule> out;
    for (const auto& rule : rules) {
        if (rule.consequent.size() == 1) {
            out.push_back(rule);
        }
    }
    return out;
}

std::vector<RuleSummary> summarize(std::span<const AssociationRule> rules) {
    struct Group {
        RuleSummary summary;
        std::map<ItemId, std::size_t> antecedent_counts;
    };
    std::map<ItemId, Group> groups;
    for (const auto& rule : rules) {
        if (rule.consequent.size() != 1) {
            throw InvariantError("summarize: rule with " + std::to_string(rule.consequent.size()) +
                                 " consequent items; filter to single consequents first");
        }
        auto& group = groups[rule.consequent.front()];
        auto& s = group.summary;
        const bool first = s.rule_count == 0;
        s.consequent = rule.consequent.front();
        widen(s.support, rule.support, first);
        widen(s.confidence, rule.confidence, first);
        widen(s.lift, rule.lift, first);
        ++s.rule_count;
        for (const auto item : rule.antecedent) {
            ++group.antecedent_counts[item];
        }
    }

    std::vector<RuleSummary> out;
    out.reserve(groups.size());
    for (auto& [consequent, group] : groups) {
        auto& s = group.summary;
        for (const auto& [item, count] : group.antecedent_counts) {
            s.antecedents.push_back(RankedAntecedent{item, count});
        }
        // Map iteration already yields ascending ids, so a stable sort keeps
        // them as the tie-breaker.
        std::stable_sort(s.antecedents.begin(), s.antecedents.end(),
                         [](const RankedAntecedent& a, const RankedAntecedent& b) {
                             return a.count > b.count;
                         });
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<RuleSummary> rank_summaries(std::vector<RuleSummary> summaries, SummaryRank key) {
    auto value = [key](const RuleSummary& s) {
        switch (key) {
        case SummaryRank::rule_count:
            return static_cast<double>(s.rule_count);
        case SummaryRank::max_lift:
            return s.lift.max;
        case SummaryRank::max_confidence:
            return s.confidence.max;
        }
        return 0.0;
    };
    std::stable_sort(summaries.begin(), summaries.end(),
                     [&](const RuleSummary& a, const RuleSummary& b) {
                         const double va = value(a);
                         const double vb = value(b);
                         if (va != vb) {
                             return va > vb;
                         }
                         return a.consequent < b.consequent;
                     });
    return summaries;
}

} // namespace catinsight
