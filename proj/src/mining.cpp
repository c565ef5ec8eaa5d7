#include "catinsight/mining.hpp"

#include "catinsight/error.hpp"
#include "catinsight/format.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>

namespace catinsight {

namespace {

using Word = std::uint64_t;

std::size_t popcount_and(const Word* a, const Word* b, std::size_t words) {
    std::size_t count = 0;
    for (std::size_t w = 0; w < words; ++w) {
        count += static_cast<std::size_t>(std::popcount(a[w] & b[w]));
    }
    return count;
}

// Runs body(i) for i in [0, n) on up to `workers` threads, strided.
template <typename Body>
void parallel_for(std::size_t n, std::size_t workers, Body&& body) {
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                body(i);
            }
        });
    }
}

struct Level {
    std::vector<Itemset> sets; // lexicographically sorted
    std::vector<std::size_t> counts;
    std::vector<Word> bits; // sets.size() * words, row-major
};

bool contains(const std::vector<Itemset>& sorted_sets, const Itemset& key) {
    return std::binary_search(sorted_sets.begin(), sorted_sets.end(), key);
}

// Candidate (k+1)-sets from pairs sharing a k-1 prefix, with every k-subset
// frequent. Pairs are emitted in lexicographic order of the joined set.
std::vector<std::pair<std::uint32_t, std::uint32_t>> join_and_prune(const Level& level) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> candidates;
    const auto& sets = level.sets;
    Itemset joined;
    Itemset subset;
    std::size_t group_begin = 0;
    while (group_begin < sets.size()) {
        const auto& head = sets[group_begin];
        std::size_t group_end = group_begin + 1;
        while (group_end < sets.size() &&
               std::equal(head.begin(), head.end() - 1, sets[group_end].begin())) {
            ++group_end;
        }
        for (std::size_t i = group_begin; i < group_end; ++i) {
            for (std::size_t j = i + 1; j < group_end; ++j) {
                joined = sets[i];
                joined.push_back(sets[j].back());
                // Subsets dropping one of the last two items are sets[i], sets[j].
                bool all_frequent = true;
                for (std::size_t drop = 0; drop + 2 < joined.size() && all_frequent; ++drop) {
                    subset.clear();
                    for (std::size_t p = 0; p < joined.size(); ++p) {
                        if (p != drop) {
                            subset.push_back(joined[p]);
                        }
                    }
                    all_frequent = contains(sets, subset);
                }
                if (all_frequent) {
                    candidates.emplace_back(static_cast<std::uint32_t>(i),
                                            static_cast<std::uint32_t>(j));
                }
            }
        }
        group_begin = group_end;
    }
    return candidates;
}

std::vector<FrequentItemset>::const_iterator find_itemset(const FrequentItemsets& frequent,
                                                          const Itemset& key) {
    const auto& all = frequent.itemsets;
    const auto it = std::lower_bound(all.begin(), all.end(), key,
                                     [](const FrequentItemset& f, const Itemset& k) {
                                         if (f.items.size() != k.size()) {
                                             return f.items.size() < k.size();
                                         }
                                         return f.items < k;
                                     });
    if (it == all.end() || it->items != key) {
        return all.end();
    }
    return it;
}

} // namespace

void MiningConfig::validate() const {
    if (!(min_support > 0.0 && min_support <= 1.0)) {
        throw ConfigError("min_support must lie in (0, 1], got " + format_number(min_support));
    }
    if (!(min_confidence > 0.0 && min_confidence <= 1.0)) {
        throw ConfigError("min_confidence must lie in (0, 1], got " +
                          format_number(min_confidence));
    }
    if (max_itemset_size && *max_itemset_size < 1) {
        throw ConfigError("max_itemset_size must be at least 1");
    }
    if (workers == 0) {
        throw ConfigError("workers must be at least 1");
    }
}

std::size_t min_count_for(double fraction, std::size_t n) {
    const auto ratio = [n](std::size_t c) {
        return static_cast<double>(c) / static_cast<double>(n);
    };
    auto c = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    while (c > 1 && ratio(c - 1) >= fraction) {
        --c;
    }
    while (c < n && ratio(c) < fraction) {
        ++c;
    }
    return std::max<std::size_t>(c, 1);
}

FrequentItemsets apriori(std::span<const Itemset> transactions, const MiningConfig& config) {
    config.validate();
    const std::size_t n = transactions.size();
    if (n == 0) {
        throw DataError("apriori: no transactions to mine");
    }
    const std::size_t min_count = min_count_for(config.min_support, n);
    const std::size_t max_size = config.max_itemset_size.value_or(SIZE_MAX);
    const std::size_t words = (n + 63) / 64;

    FrequentItemsets result;
    result.transaction_count = n;
    auto emit = [&](const Level& level) {
        for (std::size_t i = 0; i < level.sets.size(); ++i) {
            result.itemsets.push_back(FrequentItemset{
                level.sets[i], level.counts[i],
                static_cast<double>(level.counts[i]) / static_cast<double>(n)});
        }
    };

    ItemId max_item = 0;
    for (const auto& t : transactions) {
        if (!std::is_sorted(t.begin(), t.end()) ||
            std::adjacent_find(t.begin(), t.end()) != t.end()) {
            throw InvariantError("apriori: transaction items must be sorted and unique");
        }
        if (!t.empty()) {
            max_item = std::max(max_item, t.back());
        }
    }
    std::vector<std::size_t> item_counts(static_cast<std::size_t>(max_item) + 1, 0);
    for (const auto& t : transactions) {
        for (const auto item : t) {
            ++item_counts[item];
        }
    }

    Level level;
    std::vector<std::size_t> slot(item_counts.size(), SIZE_MAX);
    for (ItemId item = 0; item < item_counts.size(); ++item) {
        if (item_counts[item] >= min_count) {
            slot[item] = level.sets.size();
            level.sets.push_back(Itemset{item});
            level.counts.push_back(item_counts[item]);
        }
    }
    level.bits.assign(level.sets.size() * words, 0);
    for (std::size_t r = 0; r < n; ++r) {
        for (const auto item : transactions[r]) {
            if (slot[item] != SIZE_MAX) {
                level.bits[slot[item] * words + r / 64] |= Word{1} << (r % 64);
            }
        }
    }
    emit(level);

    for (std::size_t size = 2; size <= max_size && level.sets.size() > 1; ++size) {
        const auto candidates = join_and_prune(level);
        std::vector<std::size_t> counts(candidates.size());
        parallel_for(candidates.size(), config.workers, [&](std::size_t c) {
            const auto [i, j] = candidates[c];
            counts[c] = popcount_and(&level.bits[i * words], &level.bits[j * words], words);
        });

        Level next;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (counts[c] < min_count) {
                continue;
            }
            const auto [i, j] = candidates[c];
            Itemset joined = level.sets[i];
            joined.push_back(level.sets[j].back());
            next.sets.push_back(std::move(joined));
            next.counts.push_back(counts[c]);
            const std::size_t base = next.bits.size();
            next.bits.resize(base + words);
            for (std::size_t w = 0; w < words; ++w) {
                next.bits[base + w] = level.bits[i * words + w] & level.bits[j * words + w];
            }
        }
        level = std::move(next);
        emit(level);
    }
    return result;
}

FrequentItemsets apriori(std::span<const Transaction> transactions, const MiningConfig& config) {
    std::vector<Itemset> sets;
    sets.reserve(transactions.size());
    for (const auto& t : transactions) {
        sets.push_back(t.items);
    }
    return apriori(std::span<const Itemset>(sets), config);
}

std::vector<AssociationRule> generate_rules(const FrequentItemsets& frequent,
                                            const MiningConfig& config) {
    config.validate();
    const auto n = static_cast<double>(frequent.transaction_count);
    std::vector<AssociationRule> rules;
    Itemset antecedent;
    Itemset consequent;

    auto count_of = [&](const Itemset& key) {
        const auto it = find_itemset(frequent, key);
        if (it == frequent.itemsets.end()) {
            throw InvariantError("generate_rules: subset of a frequent itemset is missing");
        }
        return it->support_count;
    };

    for (const auto& z : frequent.itemsets) {
        const std::size_t k = z.items.size();
        if (k < 2) {
            continue;
        }
        if (k > 62) {
            throw DataError("generate_rules: itemset of size " + std::to_string(k) +
                            " is too large to enumerate; set max_itemset_size");
        }
        const std::uint64_t full = (std::uint64_t{1} << k) - 1;
        for (std::uint64_t mask = 1; mask < full; ++mask) {
            antecedent.clear();
            consequent.clear();
            for (std::size_t b = 0; b < k; ++b) {
                ((mask >> b) & 1u ? antecedent : consequent).push_back(z.items[b]);
            }
            const auto x_count = count_of(antecedent);
            const double confidence =
                static_cast<double>(z.support_count) / static_cast<double>(x_count);
            if (!(confidence >= config.min_confidence)) {
                continue;
            }
            const double y_support = static_cast<double>(count_of(consequent)) / n;
            rules.push_back(AssociationRule{antecedent, consequent, z.support_count, z.support,
                                            confidence, confidence / y_support});
        }
    }
    std::sort(rules.begin(), rules.end(), [](const AssociationRule& a, const AssociationRule& b) {
        if (a.antecedent != b.antecedent) {
            return a.antecedent < b.antecedent;
        }
        return a.consequent < b.consequent;
    });
    return rules;
}

std::vector<AssociationRule> mine_community(std::span<const Transaction> transactions,
                                            std::span<const NodeId> members,
                                            const MiningConfig& config) {
    if (members.empty()) {
        throw DataError("mine_community: empty member list");
    }
    std::vector<Itemset> sets;
    sets.reserve(members.size());
    for (const auto member : members) {
        if (member >= transactions.size()) {
            throw InvariantError("mine_community: member " + std::to_string(member) +
                                 " is not a row of the dataset");
        }
        sets.push_back(transactions[member].items);
    }
    return generate_rules(apriori(std::span<const Itemset>(sets), config), config);
}

} // namespace catinsight
