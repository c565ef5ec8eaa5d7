// catinsight: categorical data -> similarity graph -> communities -> rules -> rule summaries.

#include "catinsight/format.hpp"
#include "catinsight/pipeline.hpp"
#include "catinsight/synthetic.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace ci = catinsight;

namespace {

constexpr const char* kWorkersEnv = "CATINSIGHT_WORKERS";

struct Overrides {
    std::string config;
    std::optional<std::string> input;
    std::optional<std::string> output_dir;
    std::optional<std::string> delimiter;
    std::optional<std::string> missing;
    std::vector<std::string> bins;
    std::optional<double> epsilon;
    std::optional<double> min_size_fraction;
    std::optional<std::size_t> top_k;
    std::optional<double> min_support;
    std::optional<double> min_confidence;
    std::optional<std::size_t> max_itemset_size;
    std::optional<std::string> rank_by;
    std::optional<std::size_t> workers;
};

void add_pipeline_options(CLI::App& cmd, Overrides& o) {
    cmd.add_option("-c,--config", o.config, "JSON pipeline config file");
    cmd.add_option("-i,--input", o.input, "input CSV file");
    cmd.add_option("-o,--output-dir", o.output_dir, "directory for stage artifacts");
    cmd.add_option("--delimiter", o.delimiter, "CSV delimiter (one character)");
    cmd.add_option("--missing", o.missing, "missing-value token (default NA)");
    cmd.add_option("--bin", o.bins, "bin a numeric column: NAME=b1,b2,...")->take_all();
    cmd.add_option("--epsilon", o.epsilon, "similarity threshold, edges need sim > epsilon");
    cmd.add_option("--min-size-fraction", o.min_size_fraction,
                   "smallest community kept, as a fraction of all rows");
    cmd.add_option("--top-k", o.top_k, "number of communities to mine");
    cmd.add_option("--min-support", o.min_support, "apriori support threshold");
    cmd.add_option("--min-confidence", o.min_confidence, "rule confidence threshold");
    cmd.add_option("--max-itemset-size", o.max_itemset_size, "largest itemset mined");
    cmd.add_option("--rank-by", o.rank_by, "summary order: rule_count, max_lift, max_confidence");
    cmd.add_option("--workers", o.workers,
                   std::string("worker threads (default from ") + kWorkersEnv + ", else 1)");
}

ci::BinningSpec parse_bin(const std::string& text) {
    const auto eq = text.rfind('=');
    if (eq == std::string::npos || eq == 0) {
        throw ci::ConfigError("--bin expects NAME=b1,b2,..., got '" + text + "'");
    }
    ci::BinningSpec spec{text.substr(0, eq), {}};
    std::string rest = text.substr(eq + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
        const auto comma = rest.find(',', start);
        const auto token = rest.substr(start, comma == std::string::npos ? std::string::npos
                                                                         : comma - start);
        try {
            spec.boundaries.push_back(ci::parse_number(token, "--bin " + spec.column));
        } catch (const ci::DataError& e) {
            throw ci::ConfigError(e.what());
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return spec;
}

std::size_t default_workers() {
    const char* env = std::getenv(kWorkersEnv);
    if (env == nullptr || *env == '\0') {
        return 1;
    }
    try {
        const auto n = ci::parse_integer(env, kWorkersEnv);
        if (n < 1) {
            throw ci::ConfigError(std::string(kWorkersEnv) + " must be at least 1");
        }
        return static_cast<std::size_t>(n);
    } catch (const ci::DataError& e) {
        throw ci::ConfigError(e.what());
    }
}

ci::PipelineConfig resolve_config(const Overrides& o) {
    ci::PipelineConfig config =
        o.config.empty() ? ci::PipelineConfig{} : ci::PipelineConfig::load(o.config);
    if (o.input) {
        config.input = *o.input;
    }
    if (o.output_dir) {
        config.output_dir = *o.output_dir;
    }
    if (o.delimiter) {
        if (o.delimiter->size() != 1) {
            throw ci::ConfigError("--delimiter must be a single character");
        }
        config.csv.delimiter = o.delimiter->front();
    }
    if (o.missing) {
        config.csv.missing = *o.missing;
    }
    for (const auto& text : o.bins) {
        auto spec = parse_bin(text);
        auto existing = std::find_if(config.binning.begin(), config.binning.end(),
                                     [&](const auto& b) { return b.column == spec.column; });
        if (existing != config.binning.end()) {
            *existing = std::move(spec);
        } else {
            config.binning.push_back(std::move(spec));
        }
    }
    if (o.epsilon) {
        config.epsilon = *o.epsilon;
    }
    if (o.min_size_fraction) {
        config.selection.min_size_fraction = *o.min_size_fraction;
    }
    if (o.top_k) {
        config.selection.top_k = *o.top_k;
    }
    if (o.min_support) {
        config.min_support = *o.min_support;
    }
    if (o.min_confidence) {
        config.min_confidence = *o.min_confidence;
    }
    if (o.max_itemset_size) {
        config.max_itemset_size = *o.max_itemset_size;
    }
    if (o.rank_by) {
        config.rank = ci::parse_summary_rank(*o.rank_by);
    }
    config.workers = o.workers ? *o.workers : default_workers();
    config.validate();
    return config;
}

int run_command(const std::string& command, const Overrides& o) {
    const auto config = ci::in_stage("config", [&] { return resolve_config(o); });
    const auto& dir = config.output_dir;

    if (command == "run") {
        ci::run_pipeline(config);
    } else if (command == "encode") {
        ci::run_encode_stage(config);
    } else if (command == "graph") {
        const auto encoded = ci::in_stage("graph", [&] { return ci::load_encode_artifacts(dir); });
        ci::run_graph_stage(config, encoded);
    } else if (command == "cluster") {
        const auto graph = ci::in_stage("cluster", [&] { return ci::load_graph_artifact(dir); });
        ci::run_cluster_stage(config, graph);
    } else if (command == "mine") {
        const auto [encoded, clusters] = ci::in_stage("mine", [&] {
            return std::make_pair(ci::load_encode_artifacts(dir), ci::load_cluster_artifacts(dir));
        });
        ci::run_mine_stage(config, encoded, clusters);
    } else if (command == "summarize") {
        auto encoded = ci::in_stage("summarize", [&] { return ci::load_encode_artifacts(dir); });
        const auto stats = ci::in_stage("summarize", [&] { return ci::load_graph_stats(dir); });
        const auto clusters =
            ci::in_stage("summarize", [&] { return ci::load_cluster_artifacts(dir); });
        const auto rules = ci::in_stage("summarize", [&] {
            return ci::load_rules_artifact(dir, encoded.encoded.vocabulary, clusters.selected);
        });
        ci::run_summarize_stage(config, encoded, stats, clusters, rules);
    }
    return 0;
}

int run_synth(const ci::PlantedBlocksSpec& spec, const std::string& output) {
    const auto planted = ci::in_stage("synth", [&] { return ci::make_planted_blocks(spec); });
    std::ofstream out(output, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ci::StageError("synth", 2, "cannot write '" + output + "'");
    }
    ci::write_csv(out, planted.dataset);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Community-based association rule mining and summarization for categorical "
                 "data"};
    app.require_subcommand(1);

    Overrides overrides;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"run", "run every stage end to end"},
        {"encode", "load, bin and encode the input into transactions"},
        {"graph", "build the epsilon-ball similarity graph"},
        {"cluster", "detect communities and select the strongest"},
        {"mine", "mine association rules inside the selected communities"},
        {"summarize", "summarize rules by consequent and write the report"},
    };
    std::vector<CLI::App*> pipeline_commands;
    for (const auto& [name, help] : commands) {
        auto* cmd = app.add_subcommand(name, help);
        add_pipeline_options(*cmd, overrides);
        pipeline_commands.push_back(cmd);
    }

    ci::PlantedBlocksSpec spec;
    std::string synth_output;
    auto* synth = app.add_subcommand("synth", "write a synthetic planted-block CSV");
    synth->add_option("-o,--output", synth_output, "output CSV path")->required();
    synth->add_option("--rows", spec.rows, "row count");
    synth->add_option("--columns", spec.columns, "column count");
    synth->add_option("--blocks", spec.blocks, "number of planted blocks");
    synth->add_option("--noise-values", spec.noise_values, "non-dominant values per column");
    synth->add_option("--noise-rows", spec.noise_row_fraction, "fraction of random rows");
    synth->add_option("--cell-noise", spec.cell_noise, "chance a free cell is randomized");
    synth->add_option("--seed", spec.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed()) {
            return run_synth(spec, synth_output);
        }
        for (auto* cmd : pipeline_commands) {
            if (cmd->parsed()) {
                return run_command(cmd->get_name(), overrides);
            }
        }
    } catch (const ci::StageError& e) {
        std::cerr << "catinsight: error in " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "catinsight: internal error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
