#include "catinsight/pipeline.hpp"
#include "catinsight/synthetic.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

namespace ci = catinsight;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const auto dir =
        fs::temp_directory_path() / ("catinsight-test-" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

std::map<std::string, std::string> artifacts(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().filename() != ci::artifact::timing) {
            out[entry.path().filename().string()] = slurp(entry.path());
        }
    }
    return out;
}

fs::path planted_csv(const fs::path& dir, std::size_t rows = 300) {
    ci::PlantedBlocksSpec spec;
    spec.rows = rows;
    const auto path = dir / "planted.csv";
    std::ofstream out(path, std::ios::binary);
    ci::write_csv(out, ci::make_planted_blocks(spec).dataset);
    return path;
}

struct CliResult {
    int code;
    std::string err;
};

CliResult cli(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    const auto err_path = fs::temp_directory_path() /
                          ("catinsight-test-" + std::to_string(::getpid()) + "-err" +
                           std::to_string(counter++));
    const auto command = env + " " + CATINSIGHT_CLI + " " + args + " > /dev/null 2> " +
                         err_path.string();
    const int status = std::system(command.c_str());
    CliResult out{WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err_path)};
    fs::remove(err_path);
    return out;
}

const std::string kPlantedFlags = " --epsilon 0.6 --min-support 0.3 --min-confidence 0.6 --top-k 2";

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config file parsing") {
    const auto config = ci::PipelineConfig::from_json_text(R"({
        "input": "data/in.csv",
        "csv": {"delimiter": ";", "missing": "?"},
        "binning": [{"column": "price", "boundaries": [50, 100, 200]}],
        "epsilon": 0.7,
        "selection": {"min_size_fraction": 0.1, "top_k": 3},
        "mining": {"min_support": 0.25, "min_confidence": 0.6, "max_itemset_size": 4},
        "summary_rank": "max_lift",
        "output_dir": "out"
    })", "/base");
    CHECK(config.input == fs::path("/base/data/in.csv"));
    CHECK(config.output_dir == fs::path("/base/out"));
    CHECK(config.csv.delimiter == ';');
    CHECK(config.csv.missing == "?");
    REQUIRE(config.binning.size() == 1);
    CHECK(config.binning[0].boundaries == std::vector<double>{50, 100, 200});
    CHECK(config.epsilon == 0.7);
    CHECK(config.selection.top_k == 3);
    CHECK(config.max_itemset_size == std::size_t{4});
    CHECK(config.rank == ci::SummaryRank::max_lift);
    CHECK_NOTHROW(config.validate());

    const auto again = ci::PipelineConfig::from_json_text(config.to_json_text());
    CHECK(again.to_json_text() == config.to_json_text());

    CHECK_THROWS_AS(ci::PipelineConfig::from_json_text(R"({"epsilon": 0.5, "typo": 1})"),
                    ci::ConfigError);
    CHECK_THROWS_AS(ci::PipelineConfig::from_json_text(R"({"mining": {"support": 0.5}})"),
                    ci::ConfigError);
    CHECK_THROWS_AS(ci::PipelineConfig::from_json_text("{not json"), ci::ConfigError);
    CHECK_THROWS_AS(ci::PipelineConfig::from_json_text(R"({"epsilon": "high"})"),
                    ci::ConfigError);
    CHECK_THROWS_AS(ci::PipelineConfig::from_json_text(R"({"epsilon": 0})").validate(),
                    ci::ConfigError);
}

TEST_CASE("run_pipeline report matches its artifacts") {
    const auto dir = fresh_dir("report");
    ci::PipelineConfig config;
    config.input = planted_csv(dir);
    config.output_dir = dir / "out";
    config.epsilon = 0.6;
    config.min_support = 0.3;
    config.min_confidence = 0.6;
    config.selection.top_k = 2;
    const auto report = ci::run_pipeline(config);

    CHECK(report.rows == 300);
    CHECK(report.columns == 8);
    CHECK(report.selected.size() == 2);
    for (const char* name : {ci::artifact::config, ci::artifact::dataset, ci::artifact::vocabulary,
                             ci::artifact::transactions, ci::artifact::graph,
                             ci::artifact::graph_stats, ci::artifact::partition,
                             ci::artifact::communities, ci::artifact::rules,
                             ci::artifact::summaries_csv, ci::artifact::summaries_json,
                             ci::artifact::report_json, ci::artifact::report_text,
                             ci::artifact::timing}) {
        CHECK_MESSAGE(fs::exists(config.output_dir / name), name);
    }

    std::size_t raw = 0, summaries = 0;
    for (const auto& m : report.mined) {
        raw += m.raw_rules;
        summaries += m.summaries.size();
        std::size_t folded = 0;
        for (const auto& s : m.summaries) folded += s.rule_count;
        CHECK(folded == m.single_consequent_rules);
    }
    std::ifstream rules(config.output_dir / ci::artifact::rules);
    std::size_t lines = 0;
    for (std::string line; std::getline(rules, line);) ++lines;
    CHECK(lines == raw);

    const auto summary_json = nlohmann::json::parse(slurp(config.output_dir / ci::artifact::summaries_json));
    CHECK(summary_json.at("summaries").size() == summaries);
    std::ifstream csv(config.output_dir / ci::artifact::summaries_csv);
    std::string header;
    std::getline(csv, header);
    CHECK(header ==
          "community_id,consequent,ranked_antecedents,support_min,support_max,confidence_min,"
          "confidence_max,lift_min,lift_max,rule_count");

    const auto report_json = nlohmann::json::parse(slurp(config.output_dir / ci::artifact::report_json));
    CHECK(report_json.dump() == nlohmann::json::parse(report.to_json_text()).dump());
    CHECK(report.graph.edges == ci::load_graph_artifact(config.output_dir).edge_count());

    const auto text = slurp(config.output_dir / ci::artifact::report_text);
    CHECK(text.find("]%") != std::string::npos);
    CHECK(text.find("selected") != std::string::npos);

    const auto timing = nlohmann::json::parse(slurp(config.output_dir / ci::artifact::timing));
    CHECK(timing.size() >= 5);
}

TEST_CASE("stage artifacts load back") {
    const auto dir = fresh_dir("reload");
    ci::PipelineConfig config;
    config.input = planted_csv(dir, 120);
    config.output_dir = dir / "out";
    config.epsilon = 0.6;
    const auto encoded = ci::run_encode_stage(config);
    const auto back = ci::load_encode_artifacts(config.output_dir);
    CHECK(back.row_count == encoded.row_count);
    CHECK(back.encoded.vocabulary.size() == encoded.encoded.vocabulary.size());
    for (std::size_t i = 0; i < encoded.encoded.transactions.size(); ++i) {
        CHECK(back.encoded.transactions[i].items == encoded.encoded.transactions[i].items);
    }
    const auto graph = ci::run_graph_stage(config, encoded);
    const auto clusters = ci::run_cluster_stage(config, graph);
    const auto reloaded = ci::load_cluster_artifacts(config.output_dir);
    CHECK(reloaded.partition.assignment == clusters.partition.assignment);
    CHECK(reloaded.selected == clusters.selected);
    REQUIRE(reloaded.stats.size() == clusters.stats.size());
    for (std::size_t i = 0; i < clusters.stats.size(); ++i) {
        CHECK(reloaded.stats[i].strength == clusters.stats[i].strength);
        CHECK(reloaded.stats[i].intra_weight == clusters.stats[i].intra_weight);
    }
    const auto rules = ci::run_mine_stage(config, encoded, clusters);
    const auto rules_back =
        ci::load_rules_artifact(config.output_dir, encoded.encoded.vocabulary, clusters.selected);
    REQUIRE(rules_back.size() == rules.size());
    for (std::size_t i = 0; i < rules.size(); ++i) {
        REQUIRE(rules_back[i].rules.size() == rules[i].rules.size());
        for (std::size_t j = 0; j < rules[i].rules.size(); ++j) {
            CHECK(rules_back[i].rules[j].antecedent == rules[i].rules[j].antecedent);
            CHECK(rules_back[i].rules[j].lift == rules[i].rules[j].lift);
            CHECK(rules_back[i].rules[j].confidence == rules[i].rules[j].confidence);
        }
    }
}

TEST_CASE("numeric binning through the pipeline") {
    const auto dir = fresh_dir("binning");
    spit(dir / "shop.csv",
         "kind,price\nlamp,250\nlamp,260\nlamp,300\nmug,20\nmug,30\nmug,NA\n");
    ci::PipelineConfig config;
    config.input = dir / "shop.csv";
    config.output_dir = dir / "out";
    config.binning.push_back({"price", {50, 100, 200}});
    config.selection.min_size_fraction = 0.0;
    config.selection.top_k = 10;
    const auto report = ci::run_pipeline(config);
    const auto vocab = slurp(config.output_dir / ci::artifact::vocabulary);
    CHECK(vocab.find("200-max") != std::string::npos);
    CHECK(vocab.find("min-50") != std::string::npos);
    CHECK(report.items == 4);
}

}

TEST_SUITE("cli") {

TEST_CASE("unreadable input fails in the ingestion stage") {
    const auto dir = fresh_dir("unreadable");
    const auto r = cli("run -i " + (dir / "missing.csv").string() + " -o " + (dir / "out").string());
    CHECK(r.code == 2);
    CHECK(r.err.find("ingest") != std::string::npos);
}

TEST_CASE("exit codes for usage, config and data errors") {
    const auto dir = fresh_dir("codes");
    CHECK(cli("").code == 1);
    CHECK(cli("run --no-such-flag").code == 1);
    CHECK(cli("--help").code == 0);
    const auto input = planted_csv(dir, 50);
    auto r = cli("run -i " + input.string() + " -o " + (dir / "a").string() + " --epsilon 2");
    CHECK(r.code == 1);
    CHECK(r.err.find("config") != std::string::npos);
    r = cli("run -c " + (dir / "none.json").string());
    CHECK(r.code == 1);
    spit(dir / "ragged.csv", "a,b\n1,2\n1,2,3\n");
    r = cli("run -i " + (dir / "ragged.csv").string() + " -o " + (dir / "b").string());
    CHECK(r.code == 2);
    CHECK(r.err.find("line 3") != std::string::npos);
    r = cli("run -i " + input.string() + " -o " + (dir / "c").string(), "CATINSIGHT_WORKERS=abc");
    CHECK(r.code == 1);
}

TEST_CASE("a stage without its upstream artifact names the file") {
    const auto dir = fresh_dir("upstream");
    const auto r = cli("graph -o " + dir.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("dataset.json") != std::string::npos);
    const auto r2 = cli("summarize -o " + dir.string());
    CHECK(r2.code == 2);
}

TEST_CASE("support too high gives zero rules and success") {
    const auto dir = fresh_dir("high-support");
    spit(dir / "cycle.csv", "a,b\nx,p\nx,q\ny,q\ny,p\n");
    const auto r = cli("run -i " + (dir / "cycle.csv").string() + " -o " + (dir / "out").string() +
                       " --epsilon 0.4 --min-support 1 --min-size-fraction 0.3 --top-k 4");
    CHECK(r.code == 0);
    CHECK(slurp(dir / "out" / ci::artifact::rules).empty());
    const auto report = nlohmann::json::parse(slurp(dir / "out" / ci::artifact::report_json));
    CHECK(nlohmann::json::parse(slurp(dir / "out" / ci::artifact::summaries_json)).at("summaries").empty());
    CHECK(report.dump().find("\"raw_rules\":0") != std::string::npos);
}

TEST_CASE("chained stages reproduce run byte for byte") {
    const auto dir = fresh_dir("chain");
    const auto input = planted_csv(dir);
    const auto flags = " -i " + input.string() + kPlantedFlags;
    REQUIRE(cli("run" + flags + " -o " + (dir / "run").string()).code == 0);
    for (const char* stage : {"encode", "graph", "cluster", "mine", "summarize"}) {
        REQUIRE(cli(std::string(stage) + flags + " -o " + (dir / "chain").string()).code == 0);
    }
    const auto a = artifacts(dir / "run");
    const auto b = artifacts(dir / "chain");
    CHECK(a.size() == 13);
    for (const auto& [name, bytes] : a) {
        REQUIRE_MESSAGE(b.count(name) == 1, name);
        CHECK_MESSAGE(b.at(name) == bytes, name);
    }
}

TEST_CASE("flags override the config file and workers never change bytes") {
    const auto dir = fresh_dir("overrides");
    const auto input = planted_csv(dir);
    spit(dir / "config.json", "{\"input\": \"planted.csv\", \"epsilon\": 0.9,"
                              " \"mining\": {\"min_support\": 0.3, \"min_confidence\": 0.6},"
                              " \"selection\": {\"top_k\": 2}}");
    REQUIRE(cli("run -c " + (dir / "config.json").string() + " --epsilon 0.6 -o " +
                (dir / "a").string())
                .code == 0);
    const auto written = nlohmann::json::parse(slurp(dir / "a" / ci::artifact::config));
    CHECK(written.at("epsilon").get<double>() == 0.6);

    REQUIRE(cli("run -c " + (dir / "config.json").string() + " --epsilon 0.6 -o " +
                    (dir / "b").string(),
                "CATINSIGHT_WORKERS=3")
                .code == 0);
    REQUIRE(cli("run -c " + (dir / "config.json").string() + " --epsilon 0.6 --workers 2 -o " +
                (dir / "c").string())
                .code == 0);
    CHECK(artifacts(dir / "a") == artifacts(dir / "b"));
    CHECK(artifacts(dir / "a") == artifacts(dir / "c"));
}

TEST_CASE("synth writes a planted CSV") {
    const auto dir = fresh_dir("synth");
    REQUIRE(cli("synth -o " + (dir / "s.csv").string() + " --rows 40 --columns 5 --seed 3").code == 0);
    const auto d = ci::load_csv(dir / "s.csv");
    CHECK(d.row_count() == 40);
    CHECK(d.column_count() == 5);
}

}
