#pragma once

#include "catinsight/community.hpp"
#include "catinsight/dataset.hpp"
#include "catinsight/error.hpp"
#include "catinsight/graph.hpp"
#include "catinsight/mining.hpp"
#include "catinsight/summarize.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace catinsight {

struct BinningSpec {
    std::string column;
    std::vector<double> boundaries;
};

struct PipelineConfig {
    std::filesystem::path input;
    CsvOptions csv;
    std::vector<BinningSpec> binning;
    double epsilon = 0.5;
    SelectionCriteria selection;
    double min_support = 0.2;
    double min_confidence = 0.5;
    std::optional<std::size_t> max_itemset_size;
    SummaryRank rank = SummaryRank::rule_count;
    std::filesystem::path output_dir = "catinsight-out";
    std::size_t workers = 1; // execution knob only; never changes output bytes

    void validate() const;
    GraphConfig graph_config() const { return GraphConfig{epsilon, workers}; }
    MiningConfig mining_config() const {
        return MiningConfig{min_support, min_confidence, max_itemset_size, workers};
    }

    /// Parses the JSON config format. Relative paths resolve against `base_dir`.
    static PipelineConfig from_json_text(std::string_view text,
                                         const std::filesystem::path& base_dir = {});
    static PipelineConfig load(const std::filesystem::path& path);
    /// JSON form written to the output directory. Leaves out output_dir and
    /// workers so that where and how a run executes does not change its bytes.
    std::string to_json_text() const;
};

/// A failure inside one pipeline stage. exit_code follows the CLI contract:
/// 1 config, 2 data, 3 internal invariant.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, int exit_code, const std::string& message)
        : std::runtime_error("stage '" + stage + "': " + message), stage_(std::move(stage)),
          exit_code_(exit_code) {}

    const std::string& stage() const { return stage_; }
    int exit_code() const { return exit_code_; }

private:
    std::string stage_;
    int exit_code_;
};

/// Runs `body`, converting library errors into a StageError for `stage`.
template <typename F>
auto in_stage(const std::string& stage, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const ConfigError& e) {
        throw StageError(stage, 1, e.what());
    } catch (const DataError& e) {
        throw StageError(stage, 2, e.what());
    } catch (const std::filesystem::filesystem_error& e) {
        throw StageError(stage, 2, e.what());
    } catch (const std::exception& e) {
        throw StageError(stage, 3, e.what());
    }
}

// In-memory results handed from one stage to the next.

struct EncodeResult {
    std::vector<ColumnSchema> schema;
    std::size_t row_count = 0;
    EncodedDataset encoded;
};

struct ClusterResult {
    Partition partition;
    std::vector<CommunityStats> stats;
    std::vector<CommunityId> selected; // strongest first
};

struct CommunityRules {
    CommunityId community = 0;
    std::vector<AssociationRule> rules;
};

struct CommunitySummaries {
    CommunityId community = 0;
    std::size_t raw_rules = 0;
    std::size_t single_consequent_rules = 0;
    std::vector<RuleSummary> summaries;
};

struct GraphStats {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    double total_weight = 0.0;
    double mean_degree = 0.0;
    double epsilon = 0.0;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunReport {
    std::size_t rows = 0;
    std::size_t columns = 0;
    std::size_t items = 0;
    GraphStats graph;
    std::vector<CommunityStats> communities;
    std::vector<CommunityId> selected;
    std::vector<CommunitySummaries> mined;
    std::vector<StageTiming> timing;

    std::string to_json_text() const; // timing excluded
    std::string to_text(const Vocabulary& vocabulary, const SelectionCriteria& criteria) const;
};

// Stages. Each writes its artifacts into config.output_dir.
EncodeResult run_encode_stage(const PipelineConfig& config);
SimilarityGraph run_graph_stage(const PipelineConfig& config, const EncodeResult& encoded);
ClusterResult run_cluster_stage(const PipelineConfig& config, const SimilarityGraph& graph);
std::vector<CommunityRules> run_mine_stage(const PipelineConfig& config,
                                           const EncodeResult& encoded,
                                           const ClusterResult& clusters);
RunReport run_summarize_stage(const PipelineConfig& config, const EncodeResult& encoded,
                              const GraphStats& graph, const ClusterResult& clusters,
                              const std::vector<CommunityRules>& rules);

// Artifact readers used when stages are invoked one at a time.
EncodeResult load_encode_artifacts(const std::filesystem::path& dir);
SimilarityGraph load_graph_artifact(const std::filesystem::path& dir);
GraphStats load_graph_stats(const std::filesystem::path& dir);
ClusterResult load_cluster_artifacts(const std::filesystem::path& dir);
std::vector<CommunityRules> load_rules_artifact(const std::filesystem::path& dir,
                                                const Vocabulary& vocabulary,
                                                const std::vector<CommunityId>& selected);

GraphStats graph_stats(const SimilarityGraph& graph, double epsilon);

/// load -> bin -> encode -> graph -> louvain -> select -> mine -> summarize,
/// writing every stage's artifacts plus report.json, report.txt and timing.json.
RunReport run_pipeline(const PipelineConfig& config);

// File names inside the output directory.
namespace artifact {
inline constexpr const char* config = "config.json";
inline constexpr const char* dataset = "dataset.json";
inline constexpr const char* vocabulary = "vocabulary.csv";
inline constexpr const char* transactions = "transactions.txt";
inline constexpr const char* graph = "graph.edges";
inline constexpr const char* graph_stats = "graph_stats.json";
inline constexpr const char* partition = "partition.txt";
inline constexpr const char* communities = "communities.csv";
inline constexpr const char* rules = "rules.jsonl";
inline constexpr const char* summaries_csv = "summaries.csv";
inline constexpr const char* summaries_json = "summaries.json";
inline constexpr const char* report_json = "report.json";
inline constexpr const char* report_text = "report.txt";
inline constexpr const char* timing = "timing.json";
} // namespace artifact

} // namespace catinsight
