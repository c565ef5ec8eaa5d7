#include "catinsight/dataset.hpp"

#include "catinsight/error.hpp"
#include "catinsight/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace catinsight {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

struct Record {
    std::size_t line = 0;
    std::vector<std::string> cells;
};

// Splits CSV text into records. Quoted fields may contain delimiters,
// doubled quotes and newlines. Blank lines are skipped.
std::vector<Record> split_records(std::string_view text, char delimiter, std::string_view source) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") {
        text.remove_prefix(3);
    }

    std::vector<Record> records;
    Record current;
    std::string cell;
    bool in_quotes = false;
    bool cell_was_quoted = false;
    bool record_has_content = false;
    std::size_t line = 1;
    current.line = 1;

    auto finish_cell = [&] {
        current.cells.emplace_back(cell_was_quoted ? cell : std::string(trim(cell)));
        cell.clear();
        cell_was_quoted = false;
    };
    auto finish_record = [&] {
        if (record_has_content) {
            finish_cell();
            records.push_back(std::move(current));
        }
        current = Record{};
        cell.clear();
        cell_was_quoted = false;
        record_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                cell.push_back(c);
            }
            continue;
        }
        if (c == '"' && trim(cell).empty() && !cell_was_quoted) {
            in_quotes = true;
            cell_was_quoted = true;
            cell.clear();
            record_has_content = true;
        } else if (c == delimiter) {
            record_has_content = true;
            finish_cell();
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
                ++i;
            }
            finish_record();
            ++line;
            current.line = line;
        } else {
            if (cell_was_quoted) {
                if (c == ' ' || c == '\t') {
                    continue;
                }
                throw DataError(std::string(source) + ": line " + std::to_string(line) +
                                ": unexpected character after closing quote");
            }
            if (!record_has_content && c != ' ' && c != '\t') {
                record_has_content = true;
            }
            cell.push_back(c);
        }
    }
    if (in_quotes) {
        throw DataError(std::string(source) + ": line " + std::to_string(current.line) +
                        ": unterminated quoted field");
    }
    finish_record();
    return records;
}

bool parse_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

void check_boundaries(const std::vector<double>& boundaries, std::string_view column) {
    if (boundaries.empty()) {
        throw ConfigError("binning for column '" + std::string(column) + "': empty boundary list");
    }
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
        if (!std::isfinite(boundaries[i])) {
            throw ConfigError("binning for column '" + std::string(column) +
                              "': boundaries must be finite");
        }
        if (i > 0 && !(boundaries[i - 1] < boundaries[i])) {
            throw ConfigError("binning for column '" + std::string(column) +
                              "': boundaries must be strictly ascending");
        }
    }
}

} // namespace

std::optional<std::size_t> Dataset::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (schema[i].name == name) {
            return i;
        }
    }
    return std::nullopt;
}

Dataset parse_csv(std::string_view text, const CsvOptions& options,
                  const std::optional<std::vector<ColumnSchema>>& schema, std::string_view source) {
    if (options.delimiter == '"' || options.delimiter == '\n' || options.delimiter == '\r') {
        throw ConfigError("invalid CSV delimiter");
    }
    auto records = split_records(text, options.delimiter, source);
    if (records.empty()) {
        throw DataError(std::string(source) + ": missing header row");
    }

    Dataset dataset;
    dataset.missing = options.missing;
    const auto& header = records.front().cells;
    std::unordered_set<std::string> seen;
    for (const auto& name : header) {
        if (!seen.insert(name).second) {
            throw DataError(std::string(source) + ": duplicate column name '" + name + "'");
        }
        dataset.schema.push_back(ColumnSchema{name, ColumnKind::categorical, std::nullopt});
    }

    if (schema) {
        if (schema->size() != header.size()) {
            throw DataError(std::string(source) + ": header has " + std::to_string(header.size()) +
                            " columns but the schema has " + std::to_string(schema->size()));
        }
        for (std::size_t i = 0; i < header.size(); ++i) {
            if ((*schema)[i].name != header[i]) {
                throw DataError(std::string(source) + ": header column " + std::to_string(i + 1) +
                                " is '" + header[i] + "', schema expects '" + (*schema)[i].name +
                                "'");
            }
        }
    }

    dataset.rows.reserve(records.size() - 1);
    for (std::size_t r = 1; r < records.size(); ++r) {
        auto& record = records[r];
        if (record.cells.size() != header.size()) {
            throw DataError(std::string(source) + ": line " + std::to_string(record.line) +
                            " (data row " + std::to_string(r) + ") has " +
                            std::to_string(record.cells.size()) + " cells, header has " +
                            std::to_string(header.size()));
        }
        dataset.rows.push_back(std::move(record.cells));
    }

    if (schema) {
        for (const auto& column : *schema) {
            if (column.kind == ColumnKind::numeric) {
                if (!column.bins) {
                    throw ConfigError("numeric column '" + column.name + "' has no bins");
                }
                dataset = bin_numeric(dataset, column.name, *column.bins);
            } else if (column.bins) {
                throw ConfigError("categorical column '" + column.name + "' must not carry bins");
            }
        }
    }
    return dataset;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options,
                 const std::optional<std::vector<ColumnSchema>>& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open input file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str(), options, schema, path.string());
}

namespace {

void write_cell(std::ostream& out, const std::string& cell, char delimiter) {
    const bool quote = cell.find_first_of(std::string("\"\r\n") + delimiter) != std::string::npos ||
                       (!cell.empty() && (cell.front() == ' ' || cell.back() == ' '));
    if (!quote) {
        out << cell;
        return;
    }
    out << '"';
    for (const char c : cell) {
        if (c == '"') {
            out << '"';
        }
        out << c;
    }
    out << '"';
}

} // namespace

void write_csv(std::ostream& out, const Dataset& dataset, char delimiter) {
    for (std::size_t c = 0; c < dataset.column_count(); ++c) {
        if (c > 0) {
            out << delimiter;
        }
        write_cell(out, dataset.schema[c].name, delimiter);
    }
    out << '\n';
    for (const auto& row : dataset.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) {
                out << delimiter;
            }
            write_cell(out, row[c], delimiter);
        }
        out << '\n';
    }
}

std::string interval_label(double value, const std::vector<double>& boundaries) {
    const auto upper = std::upper_bound(boundaries.begin(), boundaries.end(), value);
    if (upper == boundaries.begin()) {
        return "min-" + format_number(boundaries.front());
    }
    const std::string lo = format_number(*(upper - 1));
    if (upper == boundaries.end()) {
        return lo + "-max";
    }
    return lo + "-" + format_number(*upper);
}

Dataset bin_numeric(const Dataset& dataset, std::string_view column,
                    const std::vector<double>& boundaries) {
    const auto index = dataset.column_index(column);
    if (!index) {
        throw ConfigError("binning: no column named '" + std::string(column) + "'");
    }
    check_boundaries(boundaries, column);

    Dataset out = dataset;
    for (std::size_t r = 0; r < out.rows.size(); ++r) {
        auto& cell = out.rows[r][*index];
        if (out.is_missing(cell)) {
            continue;
        }
        double value = 0.0;
        if (!parse_double(cell, value)) {
            throw DataError("binning column '" + std::string(column) + "': data row " +
                            std::to_string(r + 1) + " value '" + cell + "' is not numeric");
        }
        cell = interval_label(value, boundaries);
    }
    out.schema[*index].kind = ColumnKind::numeric;
    out.schema[*index].bins = boundaries;
    return out;
}

std::size_t Vocabulary::KeyHash::operator()(
    const std::pair<std::size_t, std::string>& key) const noexcept {
    return std::hash<std::string>{}(key.second) ^ (key.first * 0x9E3779B97F4A7C15ull);
}

Vocabulary::Vocabulary(std::vector<std::string> column_names)
    : column_names_(std::move(column_names)) {}

ItemId Vocabulary::add(std::size_t column, const std::string& value) {
    if (column >= column_names_.size()) {
        throw InvariantError("vocabulary: column index out of range");
    }
    if (auto found = find(column, value)) {
        return *found;
    }
    if (!items_.empty() && items_.back().column > column) {
        throw InvariantError("vocabulary: items must be added in column order");
    }
    const auto id = static_cast<ItemId>(items_.size());
    items_.push_back(Item{column, value});
    index_.emplace(std::make_pair(column, value), id);
    return id;
}

std::optional<ItemId> Vocabulary::find(std::size_t column, std::string_view value) const {
    const auto it = index_.find(std::make_pair(column, std::string(value)));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::pair<ItemId, ItemId> Vocabulary::column_range(std::size_t column) const {
    const auto lower = std::partition_point(items_.begin(), items_.end(),
                                            [&](const Item& it) { return it.column < column; });
    const auto upper = std::partition_point(lower, items_.end(),
                                            [&](const Item& it) { return it.column <= column; });
    return {static_cast<ItemId>(lower - items_.begin()),
            static_cast<ItemId>(upper - items_.begin())};
}

std::string Vocabulary::label(ItemId id) const {
    const auto& it = item(id);
    return column_names_.at(it.column) + "=" + it.value;
}

std::optional<ItemId> Vocabulary::parse_label(std::string_view label) const {
    // Column names may themselves contain '=', so try every split point.
    for (auto pos = label.find('='); pos != std::string_view::npos;
         pos = label.find('=', pos + 1)) {
        const auto name = label.substr(0, pos);
        for (std::size_t c = 0; c < column_names_.size(); ++c) {
            if (column_names_[c] == name) {
                if (auto id = find(c, label.substr(pos + 1))) {
                    return id;
                }
            }
        }
    }
    return std::nullopt;
}

EncodedDataset encode(const Dataset& dataset) {
    std::vector<std::string> names;
    names.reserve(dataset.column_count());
    for (const auto& column : dataset.schema) {
        names.push_back(column.name);
    }

    EncodedDataset out{Vocabulary(std::move(names)), {}};
    const std::size_t columns = dataset.column_count();
    out.transactions.resize(dataset.row_count());
    for (std::size_t r = 0; r < dataset.row_count(); ++r) {
        if (dataset.rows[r].size() != columns) {
            throw InvariantError("encode: row " + std::to_string(r) + " has the wrong cell count");
        }
        out.transactions[r].row_id = r;
        out.transactions[r].items.reserve(columns);
    }
    // Column-major pass keeps each column's ids contiguous and ascending, so
    // appending per column leaves every transaction sorted.
    for (std::size_t c = 0; c < columns; ++c) {
        for (std::size_t r = 0; r < dataset.row_count(); ++r) {
            const auto& cell = dataset.rows[r][c];
            if (dataset.is_missing(cell)) {
                continue;
            }
            out.transactions[r].items.push_back(out.vocabulary.add(c, cell));
        }
    }
    return out;
}

std::vector<std::string> decode(const Vocabulary& vocabulary, const Transaction& transaction) {
    std::vector<std::string> row(vocabulary.column_count());
    for (const auto id : transaction.items) {
        const auto& it = vocabulary.item(id);
        row.at(it.column) = it.value;
    }
    return row;
}

} // namespace catinsight
