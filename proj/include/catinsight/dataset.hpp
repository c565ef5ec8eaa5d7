#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace catinsight {

using ItemId = std::uint32_t;
using Itemset = std::vector<ItemId>; // sorted ascending, no duplicates

enum class ColumnKind { categorical, numeric };

struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::categorical;
    // Interval boundaries, strictly ascending. Present iff kind == numeric.
    std::optional<std::vector<double>> bins;
};

struct CsvOptions {
    char delimiter = ',';
    std::string missing = "NA";
};

/// A categorical table. Cells are stored trimmed; a cell that is empty or
/// equal to `missing` counts as missing and yields no item when encoded.
struct Dataset {
    std::vector<ColumnSchema> schema;
    std::vector<std::vector<std::string>> rows;
    std::string missing = "NA";

    std::size_t row_count() const { return rows.size(); }
    std::size_t column_count() const { return schema.size(); }
    bool is_missing(std::string_view cell) const { return cell.empty() || cell == missing; }
    std::optional<std::size_t> column_index(std::string_view name) const;
};

/// Reads an RFC-4180 style CSV with a header row. Without a schema every
/// column is categorical. With a schema the header must match it name for
/// name, and numeric columns are binned with their boundaries.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {},
                 const std::optional<std::vector<ColumnSchema>>& schema = std::nullopt);

/// Same as load_csv but from in-memory text; `source` names the input in errors.
Dataset parse_csv(std::string_view text, const CsvOptions& options = {},
                  const std::optional<std::vector<ColumnSchema>>& schema = std::nullopt,
                  std::string_view source = "<memory>");

/// Writes a header row and the cells, quoting where needed.
void write_csv(std::ostream& out, const Dataset& dataset, char delimiter = ',');

/// Label of the half-open interval containing `value`: "min-b0", "bi-bj" or "bk-max".
std::string interval_label(double value, const std::vector<double>& boundaries);

/// Replaces every non-missing cell of `column` by its interval label.
Dataset bin_numeric(const Dataset& dataset, std::string_view column,
                    const std::vector<double>& boundaries);

struct Item {
    std::size_t column;
    std::string value;

    bool operator==(const Item&) const = default;
};

/// Dense bijection between (column, value) pairs and item ids. Ids are laid
/// out column by column, values in first-appearance order within a column.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> column_names);

    ItemId add(std::size_t column, const std::string& value);
    std::optional<ItemId> find(std::size_t column, std::string_view value) const;
    const Item& item(ItemId id) const { return items_.at(id); }
    std::size_t size() const { return items_.size(); }

    const std::vector<std::string>& column_names() const { return column_names_; }
    std::size_t column_count() const { return column_names_.size(); }
    // Half-open id range [first, second) owned by a column.
    std::pair<ItemId, ItemId> column_range(std::size_t column) const;
    std::size_t column_of(ItemId id) const { return items_.at(id).column; }

    // "column=value"
    std::string label(ItemId id) const;
    std::optional<ItemId> parse_label(std::string_view label) const;

private:
    struct KeyHash {
        std::size_t operator()(const std::pair<std::size_t, std::string>& key) const noexcept;
    };

    std::vector<std::string> column_names_;
    std::vector<Item> items_;
    std::unordered_map<std::pair<std::size_t, std::string>, ItemId, KeyHash> index_;
};

struct Transaction {
    std::size_t row_id = 0;
    Itemset items;
};

struct EncodedDataset {
    Vocabulary vocabulary;
    std::vector<Transaction> transactions;
};

EncodedDataset encode(const Dataset& dataset);

/// Inverse of encode for one transaction; missing columns come back as "".
std::vector<std::string> decode(const Vocabulary& vocabulary, const Transaction& transaction);

} // namespace catinsight
