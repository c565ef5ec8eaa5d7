#include "catinsight/pipeline.hpp"

#include "catinsight/error.hpp"
#include "catinsight/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace catinsight {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void log_stage(const std::string& stage, const std::string& message, double seconds) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.2f", seconds);
    std::cerr << "[" << stage << "] " << message << " (" << buffer << " s)\n";
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write '" + path.string() + "'");
    }
    out << content;
    if (!out) {
        throw DataError("failed while writing '" + path.string() + "'");
    }
}

std::ofstream open_output(const fs::path& dir, const char* name) {
    fs::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot write '" + (dir / name).string() + "'");
    }
    return out;
}

std::ifstream open_artifact(const fs::path& dir, const char* name) {
    const auto path = dir / name;
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("missing upstream artifact '" + path.string() +
                        "'; run the earlier stages first");
    }
    return in;
}

std::string read_artifact(const fs::path& dir, const char* name) {
    auto in = open_artifact(dir, name);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos &&
        (s.empty() || (s.front() != ' ' && s.back() != ' ' && s.front() != '\t' &&
                       s.back() != '\t'))) {
        return s;
    }
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out += c;
        }
    }
    out += '"';
    return out;
}

std::string json_string(const std::string& s) {
    return json(s).dump();
}

std::string percent(double fraction) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.2f", fraction * 100.0);
    std::string s = buffer;
    while (!s.empty() && s.back() == '0') {
        s.pop_back();
    }
    if (!s.empty() && s.back() == '.') {
        s.pop_back();
    }
    return s;
}

std::string fixed(double value, int digits) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
    return buffer;
}

std::string itemset_json(const Itemset& items, const Vocabulary& vocabulary) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += json_string(vocabulary.label(items[i]));
    }
    return out + "]";
}

const std::vector<std::string> kConfigKeys = {"input",     "csv",          "binning",
                                              "epsilon",   "selection",    "mining",
                                              "summary_rank", "output_dir"};

void reject_unknown(const json& object, const std::vector<std::string>& known,
                    const std::string& where) {
    for (const auto& [key, _] : object.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("config: unknown key '" + where + key + "'");
        }
    }
}

void write_encode_artifacts(const fs::path& dir, const EncodeResult& result) {
    {
        json columns = json::array();
        for (const auto& c : result.schema) {
            json column = {{"name", c.name},
                           {"kind", c.kind == ColumnKind::numeric ? "numeric" : "categorical"}};
            if (c.bins) {
                column["bins"] = *c.bins;
            }
            columns.push_back(std::move(column));
        }
        const json dataset = {{"rows", result.row_count},
                              {"columns", std::move(columns)},
                              {"items", result.encoded.vocabulary.size()}};
        auto out = open_output(dir, artifact::dataset);
        out << dataset.dump(2) << '\n';
    }
    {
        auto out = open_output(dir, artifact::vocabulary);
        const auto& vocabulary = result.encoded.vocabulary;
        out << "item_id,column_index,column,value\n";
        for (ItemId id = 0; id < vocabulary.size(); ++id) {
            const auto& item = vocabulary.item(id);
            out << id << ',' << item.column << ','
                << csv_field(vocabulary.column_names()[item.column]) << ','
                << csv_field(item.value) << '\n';
        }
    }
    {
        auto out = open_output(dir, artifact::transactions);
        out << "# rows " << result.row_count << '\n';
        for (const auto& t : result.encoded.transactions) {
            out << t.row_id;
            for (const auto id : t.items) {
                out << ' ' << id;
            }
            out << '\n';
        }
    }
}

void write_cluster_artifacts(const fs::path& dir, const ClusterResult& result) {
    {
        auto out = open_output(dir, artifact::partition);
        write_partition(out, result.partition);
    }
    auto out = open_output(dir, artifact::communities);
    out << "community_id,size,intra_weight,incident_weight,strength,selection_rank\n";
    for (const auto& s : result.stats) {
        const auto rank = std::find(result.selected.begin(), result.selected.end(), s.id);
        out << s.id << ',' << s.size << ',' << format_number(s.intra_weight) << ','
            << format_number(s.incident_weight) << ',' << format_number(s.strength) << ',';
        if (rank != result.selected.end()) {
            out << (rank - result.selected.begin());
        }
        out << '\n';
    }
}

void write_rules(const fs::path& dir, const std::vector<CommunityRules>& mined,
                 const Vocabulary& vocabulary) {
    auto out = open_output(dir, artifact::rules);
    for (const auto& community : mined) {
        const std::string prefix = "{\"community\":" + std::to_string(community.community) +
                                   ",\"antecedent\":";
        for (const auto& rule : community.rules) {
            out << prefix << itemset_json(rule.antecedent, vocabulary)
                << ",\"consequent\":" << itemset_json(rule.consequent, vocabulary)
                << ",\"support_count\":" << rule.support_count
                << ",\"support\":" << format_number(rule.support)
                << ",\"confidence\":" << format_number(rule.confidence)
                << ",\"lift\":" << format_number(rule.lift) << "}\n";
        }
    }
}

json range_json(const Range& r) {
    return json{{"min", r.min}, {"max", r.max}};
}

void write_summaries(const fs::path& dir, const std::vector<CommunitySummaries>& mined,
                     const Vocabulary& vocabulary) {
    auto csv = open_output(dir, artifact::summaries_csv);
    csv << "community_id,consequent,ranked_antecedents,support_min,support_max,"
           "confidence_min,confidence_max,lift_min,lift_max,rule_count\n";
    json all = json::array();
    for (const auto& community : mined) {
        for (const auto& s : community.summaries) {
            std::string ranked;
            json antecedents = json::array();
            for (const auto& a : s.antecedents) {
                if (!ranked.empty()) {
                    ranked += ';';
                }
                ranked += vocabulary.label(a.item) + ":" + std::to_string(a.count);
                antecedents.push_back({{"item", vocabulary.label(a.item)}, {"count", a.count}});
            }
            csv << community.community << ',' << csv_field(vocabulary.label(s.consequent)) << ','
                << csv_field(ranked) << ',' << format_number(s.support.min) << ','
                << format_number(s.support.max) << ',' << format_number(s.confidence.min) << ','
                << format_number(s.confidence.max) << ',' << format_number(s.lift.min) << ','
                << format_number(s.lift.max) << ',' << s.rule_count << '\n';
            all.push_back({{"community", community.community},
                           {"consequent", vocabulary.label(s.consequent)},
                           {"antecedents", std::move(antecedents)},
                           {"support", range_json(s.support)},
                           {"confidence", range_json(s.confidence)},
                           {"lift", range_json(s.lift)},
                           {"rule_count", s.rule_count}});
        }
    }
    auto out = open_output(dir, artifact::summaries_json);
    out << json{{"summaries", std::move(all)}}.dump(2) << '\n';
}

Dataset read_csv_artifact(const fs::path& dir, const char* name) {
    // Artifacts never use the missing sentinel; pick one that cannot occur.
    CsvOptions options;
    options.missing = std::string("\x01");
    return parse_csv(read_artifact(dir, name), options, std::nullopt, (dir / name).string());
}

std::size_t to_size(const std::string& text, const std::string& what) {
    const auto value = parse_integer(text, what);
    if (value < 0) {
        throw DataError(what + ": negative value");
    }
    return static_cast<std::size_t>(value);
}

} // namespace

// --- config -----------------------------------------------------------------

void PipelineConfig::validate() const {
    graph_config().validate();
    selection.validate();
    mining_config().validate();
    std::set<std::string> seen;
    for (const auto& spec : binning) {
        if (!seen.insert(spec.column).second) {
            throw ConfigError("binning configured twice for column '" + spec.column + "'");
        }
    }
    if (output_dir.empty()) {
        throw ConfigError("no output directory configured");
    }
}

PipelineConfig PipelineConfig::from_json_text(std::string_view text, const fs::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!root.is_object()) {
        throw ConfigError("config: top level must be an object");
    }
    reject_unknown(root, kConfigKeys, "");

    auto resolve = [&](const std::string& p) {
        fs::path path(p);
        return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    };

    PipelineConfig config;
    try {
        if (root.contains("input")) {
            config.input = resolve(root.at("input").get<std::string>());
        }
        if (root.contains("csv")) {
            const auto& csv = root.at("csv");
            reject_unknown(csv, {"delimiter", "missing"}, "csv.");
            if (csv.contains("delimiter")) {
                const auto d = csv.at("delimiter").get<std::string>();
                if (d.size() != 1) {
                    throw ConfigError("config: csv.delimiter must be a single character");
                }
                config.csv.delimiter = d.front();
            }
            if (csv.contains("missing")) {
                config.csv.missing = csv.at("missing").get<std::string>();
            }
        }
        if (root.contains("binning")) {
            for (const auto& spec : root.at("binning")) {
                reject_unknown(spec, {"column", "boundaries"}, "binning[].");
                config.binning.push_back(BinningSpec{spec.at("column").get<std::string>(),
                                                     spec.at("boundaries").get<std::vector<double>>()});
            }
        }
        if (root.contains("epsilon")) {
            config.epsilon = root.at("epsilon").get<double>();
        }
        if (root.contains("selection")) {
            const auto& sel = root.at("selection");
            reject_unknown(sel, {"min_size_fraction", "top_k"}, "selection.");
            if (sel.contains("min_size_fraction")) {
                config.selection.min_size_fraction = sel.at("min_size_fraction").get<double>();
            }
            if (sel.contains("top_k")) {
                config.selection.top_k = sel.at("top_k").get<std::size_t>();
            }
        }
        if (root.contains("mining")) {
            const auto& mining = root.at("mining");
            reject_unknown(mining, {"min_support", "min_confidence", "max_itemset_size"},
                           "mining.");
            if (mining.contains("min_support")) {
                config.min_support = mining.at("min_support").get<double>();
            }
            if (mining.contains("min_confidence")) {
                config.min_confidence = mining.at("min_confidence").get<double>();
            }
            if (mining.contains("max_itemset_size") && !mining.at("max_itemset_size").is_null()) {
                config.max_itemset_size = mining.at("max_itemset_size").get<std::size_t>();
            }
        }
        if (root.contains("summary_rank")) {
            config.rank = parse_summary_rank(root.at("summary_rank").get<std::string>());
        }
        if (root.contains("output_dir")) {
            config.output_dir = resolve(root.at("output_dir").get<std::string>());
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return config;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str(), path.parent_path());
}

std::string PipelineConfig::to_json_text() const {
    json binning_json = json::array();
    for (const auto& spec : binning) {
        binning_json.push_back({{"column", spec.column}, {"boundaries", spec.boundaries}});
    }
    json root = {
        {"input", input.string()},
        {"csv", {{"delimiter", std::string(1, csv.delimiter)}, {"missing", csv.missing}}},
        {"binning", std::move(binning_json)},
        {"epsilon", epsilon},
        {"selection",
         {{"min_size_fraction", selection.min_size_fraction}, {"top_k", selection.top_k}}},
        {"mining",
         {{"min_support", min_support},
          {"min_confidence", min_confidence},
          {"max_itemset_size",
           max_itemset_size ? json(*max_itemset_size) : json(nullptr)}}},
        {"summary_rank", std::string(to_string(rank))},
    };
    return root.dump(2) + "\n";
}

// --- stages -----------------------------------------------------------------

EncodeResult run_encode_stage(const PipelineConfig& config) {
    in_stage("config", [&] {
        config.validate();
        if (config.input.empty()) {
            throw ConfigError("no input file configured");
        }
    });
    Stopwatch clock;
    Dataset dataset = in_stage("ingest", [&] {
        Dataset d = load_csv(config.input, config.csv);
        for (const auto& spec : config.binning) {
            d = bin_numeric(d, spec.column, spec.boundaries);
        }
        return d;
    });
    return in_stage("encode", [&] {
        EncodeResult result;
        result.schema = dataset.schema;
        result.row_count = dataset.row_count();
        result.encoded = encode(dataset);
        fs::create_directories(config.output_dir);
        write_text(config.output_dir / artifact::config, config.to_json_text());
        write_encode_artifacts(config.output_dir, result);
        log_stage("encode",
                  std::to_string(result.row_count) + " rows, " +
                      std::to_string(result.schema.size()) + " columns, " +
                      std::to_string(result.encoded.vocabulary.size()) + " items",
                  clock.seconds());
        return result;
    });
}

SimilarityGraph run_graph_stage(const PipelineConfig& config, const EncodeResult& encoded) {
    return in_stage("graph", [&] {
        Stopwatch clock;
        if (encoded.encoded.transactions.empty()) {
            throw DataError("dataset has no rows");
        }
        auto graph = build_graph(encoded.encoded.transactions, config.graph_config());
        {
            auto out = open_output(config.output_dir, artifact::graph);
            write_edge_list(out, graph);
        }
        const auto stats = graph_stats(graph, config.epsilon);
        const json j = {{"nodes", stats.nodes},
                        {"edges", stats.edges},
                        {"total_weight", stats.total_weight},
                        {"mean_degree", stats.mean_degree},
                        {"epsilon", stats.epsilon}};
        write_text(config.output_dir / artifact::graph_stats, j.dump(2) + "\n");
        log_stage("graph",
                  std::to_string(graph.node_count()) + " nodes, " +
                      std::to_string(graph.edge_count()) + " edges",
                  clock.seconds());
        return graph;
    });
}

ClusterResult run_cluster_stage(const PipelineConfig& config, const SimilarityGraph& graph) {
    return in_stage("cluster", [&] {
        Stopwatch clock;
        ClusterResult result;
        result.partition = louvain(graph);
        result.stats = community_stats(graph, result.partition);
        // Artifacts go out before selection so a failing size floor still
        // leaves the partition on disk for inspection.
        write_cluster_artifacts(config.output_dir, result);
        result.selected = select_communities(result.stats, config.selection);
        write_cluster_artifacts(config.output_dir, result);
        log_stage("cluster",
                  std::to_string(result.partition.community_count()) + " communities, " +
                      std::to_string(result.selected.size()) + " selected",
                  clock.seconds());
        return result;
    });
}

std::vector<CommunityRules> run_mine_stage(const PipelineConfig& config,
                                           const EncodeResult& encoded,
                                           const ClusterResult& clusters) {
    return in_stage("mine", [&] {
        Stopwatch clock;
        std::vector<CommunityRules> mined;
        std::size_t total = 0;
        for (const auto id : clusters.selected) {
            const auto& members = clusters.partition.communities.at(id);
            mined.push_back(CommunityRules{
                id, mine_community(encoded.encoded.transactions, members, config.mining_config())});
            total += mined.back().rules.size();
        }
        write_rules(config.output_dir, mined, encoded.encoded.vocabulary);
        log_stage("mine",
                  std::to_string(total) + " rules from " + std::to_string(mined.size()) +
                      " communities",
                  clock.seconds());
        return mined;
    });
}

RunReport run_summarize_stage(const PipelineConfig& config, const EncodeResult& encoded,
                              const GraphStats& graph, const ClusterResult& clusters,
                              const std::vector<CommunityRules>& rules) {
    return in_stage("summarize", [&] {
        Stopwatch clock;
        RunReport report;
        report.rows = encoded.row_count;
        report.columns = encoded.schema.size();
        report.items = encoded.encoded.vocabulary.size();
        report.graph = graph;
        report.communities = clusters.stats;
        report.selected = clusters.selected;
        std::size_t summaries = 0;
        for (const auto& community : rules) {
            CommunitySummaries s;
            s.community = community.community;
            s.raw_rules = community.rules.size();
            const auto single = filter_single_consequent(community.rules);
            s.single_consequent_rules = single.size();
            s.summaries = rank_summaries(summarize(single), config.rank);
            for (auto& summary : s.summaries) {
                summary.community = community.community;
            }
            summaries += s.summaries.size();
            report.mined.push_back(std::move(s));
        }
        const auto& vocabulary = encoded.encoded.vocabulary;
        write_summaries(config.output_dir, report.mined, vocabulary);
        write_text(config.output_dir / artifact::report_json, report.to_json_text());
        write_text(config.output_dir / artifact::report_text,
                   report.to_text(vocabulary, config.selection));
        log_stage("summarize", std::to_string(summaries) + " rule summaries", clock.seconds());
        return report;
    });
}

GraphStats graph_stats(const SimilarityGraph& graph, double epsilon) {
    GraphStats s;
    s.nodes = graph.node_count();
    s.edges = graph.edge_count();
    s.total_weight = graph.total_weight();
    s.mean_degree = s.nodes == 0 ? 0.0
                                 : 2.0 * static_cast<double>(s.edges) / static_cast<double>(s.nodes);
    s.epsilon = epsilon;
    return s;
}

RunReport run_pipeline(const PipelineConfig& config) {
    std::vector<StageTiming> timing;
    auto timed = [&](const char* stage, auto&& body) {
        Stopwatch clock;
        auto result = body();
        timing.push_back(StageTiming{stage, clock.seconds()});
        return result;
    };
    const auto encoded = timed("encode", [&] { return run_encode_stage(config); });
    GraphStats stats;
    ClusterResult clusters;
    {
        const auto graph = timed("graph", [&] { return run_graph_stage(config, encoded); });
        stats = graph_stats(graph, config.epsilon);
        clusters = timed("cluster", [&] { return run_cluster_stage(config, graph); });
    }
    const auto rules = timed("mine", [&] { return run_mine_stage(config, encoded, clusters); });
    auto report = timed("summarize", [&] {
        return run_summarize_stage(config, encoded, stats, clusters, rules);
    });
    report.timing = timing;

    json t = json::object();
    for (const auto& entry : timing) {
        t[entry.stage] = entry.seconds;
    }
    in_stage("report", [&] {
        write_text(config.output_dir / artifact::timing, t.dump(2) + "\n");
    });
    return report;
}

// --- artifact readers -------------------------------------------------------

EncodeResult load_encode_artifacts(const fs::path& dir) {
    EncodeResult result;
    const auto dataset_path = (dir / artifact::dataset).string();
    try {
        const json dataset = json::parse(read_artifact(dir, artifact::dataset));
        result.row_count = dataset.at("rows").get<std::size_t>();
        for (const auto& c : dataset.at("columns")) {
            ColumnSchema column;
            column.name = c.at("name").get<std::string>();
            column.kind = c.at("kind").get<std::string>() == "numeric" ? ColumnKind::numeric
                                                                       : ColumnKind::categorical;
            if (c.contains("bins")) {
                column.bins = c.at("bins").get<std::vector<double>>();
            }
            result.schema.push_back(std::move(column));
        }
    } catch (const json::exception& e) {
        throw DataError(dataset_path + ": " + e.what());
    }

    std::vector<std::string> names;
    for (const auto& c : result.schema) {
        names.push_back(c.name);
    }
    Vocabulary vocabulary(names);
    const auto vocab_path = (dir / artifact::vocabulary).string();
    const auto table = read_csv_artifact(dir, artifact::vocabulary);
    if (table.column_count() != 4 || table.schema[0].name != "item_id") {
        throw DataError(vocab_path + ": unexpected header");
    }
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const auto& row = table.rows[r];
        const auto what = vocab_path + ": row " + std::to_string(r + 1);
        const auto id = to_size(row[0], what);
        const auto column = to_size(row[1], what);
        if (id != vocabulary.size() || column >= names.size() || names[column] != row[2]) {
            throw DataError(what + ": does not match " + dataset_path);
        }
        vocabulary.add(column, row[3]);
        if (vocabulary.size() != id + 1) {
            throw DataError(what + ": duplicate item");
        }
    }

    const auto tx_path = (dir / artifact::transactions).string();
    auto in = open_artifact(dir, artifact::transactions);
    std::string line;
    std::size_t line_no = 0;
    auto& transactions = result.encoded.transactions;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto what = tx_path + ": line " + std::to_string(line_no);
        std::istringstream fields(line);
        std::string token;
        fields >> token;
        Transaction t;
        t.row_id = to_size(token, what);
        while (fields >> token) {
            const auto id = to_size(token, what);
            if (id >= vocabulary.size()) {
                throw DataError(what + ": item " + token + " is not in " + vocab_path);
            }
            t.items.push_back(static_cast<ItemId>(id));
        }
        if (t.row_id != transactions.size() || !std::is_sorted(t.items.begin(), t.items.end())) {
            throw DataError(what + ": malformed transaction");
        }
        transactions.push_back(std::move(t));
    }
    if (transactions.size() != result.row_count) {
        throw DataError(tx_path + ": has " + std::to_string(transactions.size()) +
                        " transactions, " + dataset_path + " declares " +
                        std::to_string(result.row_count));
    }
    result.encoded.vocabulary = std::move(vocabulary);
    return result;
}

SimilarityGraph load_graph_artifact(const fs::path& dir) {
    auto in = open_artifact(dir, artifact::graph);
    return read_edge_list(in, (dir / artifact::graph).string());
}

GraphStats load_graph_stats(const fs::path& dir) {
    const auto path = (dir / artifact::graph_stats).string();
    try {
        const json j = json::parse(read_artifact(dir, artifact::graph_stats));
        GraphStats s;
        s.nodes = j.at("nodes").get<std::size_t>();
        s.edges = j.at("edges").get<std::size_t>();
        s.total_weight = j.at("total_weight").get<double>();
        s.mean_degree = j.at("mean_degree").get<double>();
        s.epsilon = j.at("epsilon").get<double>();
        return s;
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

ClusterResult load_cluster_artifacts(const fs::path& dir) {
    ClusterResult result;
    {
        auto in = open_artifact(dir, artifact::partition);
        result.partition = read_partition(in, (dir / artifact::partition).string());
    }
    const auto path = (dir / artifact::communities).string();
    const auto table = read_csv_artifact(dir, artifact::communities);
    if (table.column_count() != 6 || table.schema[0].name != "community_id") {
        throw DataError(path + ": unexpected header");
    }
    if (table.row_count() != result.partition.community_count()) {
        throw DataError(path + ": community count does not match " +
                        (dir / artifact::partition).string());
    }
    std::vector<std::pair<std::size_t, CommunityId>> ranked;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        const auto& row = table.rows[r];
        const auto what = path + ": row " + std::to_string(r + 1);
        CommunityStats s;
        s.id = static_cast<CommunityId>(to_size(row[0], what));
        s.size = to_size(row[1], what);
        s.intra_weight = parse_number(row[2], what);
        s.incident_weight = parse_number(row[3], what);
        s.strength = parse_number(row[4], what);
        if (s.id != r || s.size != result.partition.communities[r].size()) {
            throw DataError(what + ": does not match " + (dir / artifact::partition).string());
        }
        if (!row[5].empty()) {
            ranked.emplace_back(to_size(row[5], what), s.id);
        }
        result.stats.push_back(s);
    }
    std::sort(ranked.begin(), ranked.end());
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (ranked[i].first != i) {
            throw DataError(path + ": selection ranks are not consecutive");
        }
        result.selected.push_back(ranked[i].second);
    }
    if (result.selected.empty()) {
        throw DataError(path + ": no community is selected; rerun the cluster stage");
    }
    return result;
}

std::vector<CommunityRules> load_rules_artifact(const fs::path& dir,
                                                const Vocabulary& vocabulary,
                                                const std::vector<CommunityId>& selected) {
    const auto path = (dir / artifact::rules).string();
    auto in = open_artifact(dir, artifact::rules);
    std::vector<CommunityRules> mined;
    for (const auto id : selected) {
        mined.push_back(CommunityRules{id, {}});
    }
    std::string line;
    std::size_t line_no = 0;
    auto to_items = [&](const json& labels, const std::string& what) {
        Itemset items;
        for (const auto& label : labels) {
            const auto id = vocabulary.parse_label(label.get<std::string>());
            if (!id) {
                throw DataError(what + ": unknown item '" + label.get<std::string>() + "'");
            }
            items.push_back(*id);
        }
        std::sort(items.begin(), items.end());
        return items;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto what = path + ": line " + std::to_string(line_no);
        try {
            const json j = json::parse(line);
            const auto community = j.at("community").get<CommunityId>();
            const auto target = std::find_if(mined.begin(), mined.end(), [&](const auto& m) {
                return m.community == community;
            });
            if (target == mined.end()) {
                throw DataError(what + ": community " + std::to_string(community) +
                                " is not selected in " + artifact::communities);
            }
            AssociationRule rule;
            rule.antecedent = to_items(j.at("antecedent"), what);
            rule.consequent = to_items(j.at("consequent"), what);
            rule.support_count = j.at("support_count").get<std::size_t>();
            rule.support = j.at("support").get<double>();
            rule.confidence = j.at("confidence").get<double>();
            rule.lift = j.at("lift").get<double>();
            target->rules.push_back(std::move(rule));
        } catch (const json::exception& e) {
            throw DataError(what + ": " + e.what());
        }
    }
    return mined;
}

// --- report -----------------------------------------------------------------

std::string RunReport::to_json_text() const {
    json communities_json = json::array();
    for (const auto& s : communities) {
        const auto rank = std::find(selected.begin(), selected.end(), s.id);
        json c = {{"id", s.id},
                  {"size", s.size},
                  {"strength", s.strength},
                  {"intra_weight", s.intra_weight},
                  {"incident_weight", s.incident_weight},
                  {"selected", rank != selected.end()}};
        for (const auto& m : mined) {
            if (m.community == s.id) {
                c["raw_rules"] = m.raw_rules;
                c["single_consequent_rules"] = m.single_consequent_rules;
                c["summaries"] = m.summaries.size();
            }
        }
        communities_json.push_back(std::move(c));
    }
    std::size_t raw = 0;
    std::size_t summaries = 0;
    for (const auto& m : mined) {
        raw += m.raw_rules;
        summaries += m.summaries.size();
    }
    const json root = {
        {"dataset", {{"rows", rows}, {"columns", columns}, {"items", items}}},
        {"graph",
         {{"nodes", graph.nodes},
          {"edges", graph.edges},
          {"mean_degree", graph.mean_degree},
          {"total_weight", graph.total_weight},
          {"epsilon", graph.epsilon}}},
        {"communities", std::move(communities_json)},
        {"selected", selected},
        {"totals",
         {{"communities", communities.size()},
          {"selected", selected.size()},
          {"raw_rules", raw},
          {"summaries", summaries}}},
    };
    return root.dump(2) + "\n";
}

std::string RunReport::to_text(const Vocabulary& vocabulary,
                               const SelectionCriteria& criteria) const {
    std::ostringstream out;
    out << "Dataset: " << rows << " rows x " << columns << " columns, " << items << " items\n";
    out << "Graph:   " << graph.nodes << " nodes, " << graph.edges << " edges, mean degree "
        << fixed(graph.mean_degree, 2) << " (epsilon " << format_number(graph.epsilon) << ")\n";

    std::size_t total_nodes = 0;
    for (const auto& s : communities) {
        total_nodes += s.size;
    }
    const double floor = criteria.min_size_fraction * static_cast<double>(total_nodes);
    out << "\nCommunities: " << communities.size() << " (size floor "
        << fixed(floor, 1) << " nodes)\n";
    out << "  id      size  strength  selected\n";
    std::size_t small = 0;
    std::size_t small_nodes = 0;
    for (const auto& s : communities) {
        const bool is_selected =
            std::find(selected.begin(), selected.end(), s.id) != selected.end();
        if (!is_selected && static_cast<double>(s.size) < floor) {
            ++small;
            small_nodes += s.size;
            continue;
        }
        char line[96];
        std::snprintf(line, sizeof line, "  %-6u %5zu  %8.4f  %s\n", s.id, s.size, s.strength,
                      is_selected ? "yes" : "");
        out << line;
    }
    if (small > 0) {
        out << "  (" << small << " communities below the size floor, " << small_nodes
            << " nodes)\n";
    }

    for (const auto& m : mined) {
        out << "\nCommunity " << m.community << ": " << m.raw_rules << " rules, "
            << m.single_consequent_rules << " with one consequent, " << m.summaries.size()
            << " summaries\n";
        for (const auto& s : m.summaries) {
            out << "  -> " << vocabulary.label(s.consequent) << "  [" << s.rule_count
                << " rules]\n";
            out << "     antecedents: ";
            const std::size_t shown = std::min<std::size_t>(s.antecedents.size(), 6);
            for (std::size_t i = 0; i < shown; ++i) {
                out << (i ? ", " : "") << "(" << vocabulary.label(s.antecedents[i].item) << ", "
                    << s.antecedents[i].count << ")";
            }
            if (shown < s.antecedents.size()) {
                out << ", ... (" << s.antecedents.size() - shown << " more)";
            }
            out << "\n     support [" << percent(s.support.min) << ", " << percent(s.support.max)
                << "]%  confidence [" << percent(s.confidence.min) << ", "
                << percent(s.confidence.max) << "]%  lift [" << fixed(s.lift.min, 3) << ", "
                << fixed(s.lift.max, 3) << "]\n";
        }
    }
    return out.str();
}

} // namespace catinsight
