#include "catinsight/community.hpp"
#include "catinsight/dataset.hpp"
#include "catinsight/graph.hpp"
#include "catinsight/mining.hpp"
#include "catinsight/pipeline.hpp"
#include "catinsight/summarize.hpp"
#include "catinsight/synthetic.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <fstream>
#include <tuple>

namespace py = pybind11;
namespace ci = catinsight;

namespace {

std::vector<ci::Itemset> itemsets_of(const std::vector<ci::Transaction>& transactions) {
    std::vector<ci::Itemset> out;
    out.reserve(transactions.size());
    for (const auto& t : transactions) {
        out.push_back(t.items);
    }
    return out;
}

void bind_dataset(py::module_& m) {
    py::enum_<ci::ColumnKind>(m, "ColumnKind")
        .value("categorical", ci::ColumnKind::categorical)
        .value("numeric", ci::ColumnKind::numeric);

    py::class_<ci::ColumnSchema>(m, "ColumnSchema")
        .def(py::init<>())
        .def(py::init([](std::string name, ci::ColumnKind kind,
                         std::optional<std::vector<double>> bins) {
                 return ci::ColumnSchema{std::move(name), kind, std::move(bins)};
             }),
             py::arg("name"), py::arg("kind") = ci::ColumnKind::categorical,
             py::arg("bins") = py::none())
        .def_readwrite("name", &ci::ColumnSchema::name)
        .def_readwrite("kind", &ci::ColumnSchema::kind)
        .def_readwrite("bins", &ci::ColumnSchema::bins);

    py::class_<ci::CsvOptions>(m, "CsvOptions")
        .def(py::init([](char delimiter, std::string missing) {
                 return ci::CsvOptions{delimiter, std::move(missing)};
             }),
             py::arg("delimiter") = ',', py::arg("missing") = "NA")
        .def_readwrite("delimiter", &ci::CsvOptions::delimiter)
        .def_readwrite("missing", &ci::CsvOptions::missing);

    py::class_<ci::Dataset>(m, "Dataset")
        .def(py::init<>())
        .def_readwrite("schema", &ci::Dataset::schema)
        .def_readwrite("rows", &ci::Dataset::rows)
        .def_readwrite("missing", &ci::Dataset::missing)
        .def_property_readonly("row_count", &ci::Dataset::row_count)
        .def_property_readonly("column_count", &ci::Dataset::column_count)
        .def_property_readonly("column_names", [](const ci::Dataset& d) {
            std::vector<std::string> names;
            for (const auto& c : d.schema) {
                names.push_back(c.name);
            }
            return names;
        });

    m.def("load_csv", &ci::load_csv, py::arg("path"), py::arg("options") = ci::CsvOptions{},
          py::arg("schema") = py::none());
    m.def("parse_csv",
          [](const std::string& text, const ci::CsvOptions& options,
             const std::optional<std::vector<ci::ColumnSchema>>& schema) {
              return ci::parse_csv(text, options, schema);
          },
          py::arg("text"), py::arg("options") = ci::CsvOptions{}, py::arg("schema") = py::none());
    m.def("bin_numeric", &ci::bin_numeric, py::arg("dataset"), py::arg("column"),
          py::arg("boundaries"));
    m.def("interval_label", &ci::interval_label, py::arg("value"), py::arg("boundaries"));

    py::class_<ci::Vocabulary>(m, "Vocabulary")
        .def("__len__", &ci::Vocabulary::size)
        .def("label", &ci::Vocabulary::label)
        .def("parse_label", &ci::Vocabulary::parse_label)
        .def("find", &ci::Vocabulary::find, py::arg("column"), py::arg("value"))
        .def("item", [](const ci::Vocabulary& v, ci::ItemId id) {
            const auto& item = v.item(id);
            return std::make_tuple(item.column, item.value);
        })
        .def("column_range", &ci::Vocabulary::column_range)
        .def_property_readonly("column_names", &ci::Vocabulary::column_names);

    py::class_<ci::Transaction>(m, "Transaction")
        .def(py::init([](std::size_t row_id, ci::Itemset items) {
                 return ci::Transaction{row_id, std::move(items)};
             }),
             py::arg("row_id"), py::arg("items"))
        .def_readwrite("row_id", &ci::Transaction::row_id)
        .def_readwrite("items", &ci::Transaction::items);

    m.def("encode", [](const ci::Dataset& d) {
        auto e = ci::encode(d);
        return std::make_tuple(std::move(e.vocabulary), std::move(e.transactions));
    });
    m.def("decode", &ci::decode, py::arg("vocabulary"), py::arg("transaction"));
}

void bind_graph(py::module_& m) {
    py::class_<ci::SimilarityGraph>(m, "SimilarityGraph")
        .def_static(
            "from_edges",
            [](std::size_t n, const std::vector<std::tuple<ci::NodeId, ci::NodeId, double>>& es) {
                std::vector<ci::Edge> edges;
                for (const auto& [u, v, w] : es) {
                    edges.push_back(ci::Edge{u, v, w});
                }
                return ci::SimilarityGraph::from_edges(n, std::move(edges));
            },
            py::arg("node_count"), py::arg("edges"))
        .def_property_readonly("node_count", &ci::SimilarityGraph::node_count)
        .def_property_readonly("edge_count", &ci::SimilarityGraph::edge_count)
        .def_property_readonly("total_weight", &ci::SimilarityGraph::total_weight)
        .def_property_readonly("edges", [](const ci::SimilarityGraph& g) {
            std::vector<std::tuple<ci::NodeId, ci::NodeId, double>> out;
            for (const auto& e : g.edges()) {
                out.emplace_back(e.u, e.v, e.weight);
            }
            return out;
        });

    m.def("cosine_similarity",
          [](const ci::Itemset& a, const ci::Itemset& b) { return ci::cosine_similarity(a, b); },
          py::arg("a"), py::arg("b"));
    m.def("build_graph",
          [](const std::vector<ci::Transaction>& transactions, double epsilon, std::size_t workers) {
              return ci::build_graph(transactions, ci::GraphConfig{epsilon, workers});
          },
          py::arg("transactions"), py::arg("epsilon"), py::arg("workers") = 1);
}

void bind_community(py::module_& m) {
    py::class_<ci::Partition>(m, "Partition")
        .def_static("from_labels",
                    [](const std::vector<std::uint32_t>& labels) {
                        return ci::Partition::from_labels(labels);
                    })
        .def_readonly("assignment", &ci::Partition::assignment)
        .def_readonly("communities", &ci::Partition::communities)
        .def_property_readonly("community_count", &ci::Partition::community_count);

    py::class_<ci::CommunityStats>(m, "CommunityStats")
        .def(py::init<>())
        .def_readwrite("id", &ci::CommunityStats::id)
        .def_readwrite("size", &ci::CommunityStats::size)
        .def_readwrite("strength", &ci::CommunityStats::strength)
        .def_readwrite("intra_weight", &ci::CommunityStats::intra_weight)
        .def_readwrite("incident_weight", &ci::CommunityStats::incident_weight);

    m.def("modularity",
          py::overload_cast<const ci::SimilarityGraph&, const ci::Partition&>(&ci::modularity),
          py::arg("graph"), py::arg("partition"));
    m.def("louvain", [](const ci::SimilarityGraph& g) { return ci::louvain(g); },
          py::arg("graph"));
    m.def("community_stats", &ci::community_stats, py::arg("graph"), py::arg("partition"));
    m.def("select_communities",
          [](const std::vector<ci::CommunityStats>& stats, double min_size_fraction,
             std::size_t top_k) {
              return ci::select_communities(stats, ci::SelectionCriteria{min_size_fraction, top_k});
          },
          py::arg("stats"), py::arg("min_size_fraction") = 0.05, py::arg("top_k") = 1);
}

void bind_mining(py::module_& m) {
    py::class_<ci::MiningConfig>(m, "MiningConfig")
        .def(py::init([](double min_support, double min_confidence,
                         std::optional<std::size_t> max_itemset_size, std::size_t workers) {
                 return ci::MiningConfig{min_support, min_confidence, max_itemset_size, workers};
             }),
             py::arg("min_support") = 0.2, py::arg("min_confidence") = 0.5,
             py::arg("max_itemset_size") = py::none(), py::arg("workers") = 1)
        .def_readwrite("min_support", &ci::MiningConfig::min_support)
        .def_readwrite("min_confidence", &ci::MiningConfig::min_confidence)
        .def_readwrite("max_itemset_size", &ci::MiningConfig::max_itemset_size)
        .def_readwrite("workers", &ci::MiningConfig::workers);

    py::class_<ci::FrequentItemset>(m, "FrequentItemset")
        .def_readonly("items", &ci::FrequentItemset::items)
        .def_readonly("support_count", &ci::FrequentItemset::support_count)
        .def_readonly("support", &ci::FrequentItemset::support);

    py::class_<ci::FrequentItemsets>(m, "FrequentItemsets")
        .def_readonly("transaction_count", &ci::FrequentItemsets::transaction_count)
        .def_readonly("itemsets", &ci::FrequentItemsets::itemsets);

    py::class_<ci::AssociationRule>(m, "AssociationRule")
        .def(py::init([](ci::Itemset antecedent, ci::Itemset consequent, double support,
                         double confidence, double lift, std::size_t support_count) {
                 return ci::AssociationRule{std::move(antecedent), std::move(consequent),
                                            support_count, support, confidence, lift};
             }),
             py::arg("antecedent"), py::arg("consequent"), py::arg("support"),
             py::arg("confidence"), py::arg("lift"), py::arg("support_count") = 0)
        .def_readwrite("antecedent", &ci::AssociationRule::antecedent)
        .def_readwrite("consequent", &ci::AssociationRule::consequent)
        .def_readwrite("support_count", &ci::AssociationRule::support_count)
        .def_readwrite("support", &ci::AssociationRule::support)
        .def_readwrite("confidence", &ci::AssociationRule::confidence)
        .def_readwrite("lift", &ci::AssociationRule::lift);

    m.def("apriori",
          [](const std::vector<ci::Itemset>& transactions, const ci::MiningConfig& config) {
              return ci::apriori(std::span<const ci::Itemset>(transactions), config);
          },
          py::arg("transactions"), py::arg("config") = ci::MiningConfig{});
    m.def("generate_rules", &ci::generate_rules, py::arg("frequent"),
          py::arg("config") = ci::MiningConfig{});
    m.def("mine_community",
          [](const std::vector<ci::Transaction>& transactions,
             const std::vector<ci::NodeId>& members, const ci::MiningConfig& config) {
              return ci::mine_community(transactions, members, config);
          },
          py::arg("transactions"), py::arg("members"), py::arg("config") = ci::MiningConfig{});
    m.def("itemsets_of", &itemsets_of);
}

void bind_summarize(py::module_& m) {
    py::class_<ci::Range>(m, "Range")
        .def_readonly("min", &ci::Range::min)
        .def_readonly("max", &ci::Range::max)
        .def("__iter__", [](const ci::Range& r) {
            return py::iter(py::make_tuple(r.min, r.max));
        });

    py::class_<ci::RuleSummary>(m, "RuleSummary")
        .def_readonly("community", &ci::RuleSummary::community)
        .def_readonly("consequent", &ci::RuleSummary::consequent)
        .def_property_readonly("antecedents", [](const ci::RuleSummary& s) {
            std::vector<std::pair<ci::ItemId, std::size_t>> out;
            for (const auto& a : s.antecedents) {
                out.emplace_back(a.item, a.count);
            }
            return out;
        })
        .def_readonly("support", &ci::RuleSummary::support)
        .def_readonly("confidence", &ci::RuleSummary::confidence)
        .def_readonly("lift", &ci::RuleSummary::lift)
        .def_readonly("rule_count", &ci::RuleSummary::rule_count);

    m.def("filter_single_consequent",
          [](const std::vector<ci::AssociationRule>& rules) {
              return ci::filter_single_consequent(rules);
          },
          py::arg("rules"));
    m.def("summarize",
          [](const std::vector<ci::AssociationRule>& rules) { return ci::summarize(rules); },
          py::arg("rules"));
    m.def("rank_summaries",
          [](std::vector<ci::RuleSummary> summaries, const std::string& key) {
              return ci::rank_summaries(std::move(summaries), ci::parse_summary_rank(key));
          },
          py::arg("summaries"), py::arg("key") = "rule_count");
}

void bind_pipeline(py::module_& m) {
    py::class_<ci::PipelineConfig>(m, "PipelineConfig")
        .def(py::init<>())
        .def_static("from_json", &ci::PipelineConfig::from_json_text, py::arg("text"),
                    py::arg("base_dir") = std::filesystem::path{})
        .def_static("load", &ci::PipelineConfig::load, py::arg("path"))
        .def("to_json", &ci::PipelineConfig::to_json_text)
        .def_readwrite("input", &ci::PipelineConfig::input)
        .def_readwrite("output_dir", &ci::PipelineConfig::output_dir)
        .def_readwrite("epsilon", &ci::PipelineConfig::epsilon)
        .def_readwrite("min_support", &ci::PipelineConfig::min_support)
        .def_readwrite("min_confidence", &ci::PipelineConfig::min_confidence)
        .def_readwrite("max_itemset_size", &ci::PipelineConfig::max_itemset_size)
        .def_readwrite("workers", &ci::PipelineConfig::workers)
        .def_property(
            "min_size_fraction",
            [](const ci::PipelineConfig& c) { return c.selection.min_size_fraction; },
            [](ci::PipelineConfig& c, double v) { c.selection.min_size_fraction = v; })
        .def_property(
            "top_k", [](const ci::PipelineConfig& c) { return c.selection.top_k; },
            [](ci::PipelineConfig& c, std::size_t v) { c.selection.top_k = v; });

    py::class_<ci::RunReport>(m, "RunReport")
        .def("to_json", &ci::RunReport::to_json_text)
        .def_readonly("rows", &ci::RunReport::rows)
        .def_readonly("columns", &ci::RunReport::columns)
        .def_readonly("communities", &ci::RunReport::communities)
        .def_readonly("selected", &ci::RunReport::selected)
        .def_property_readonly("timing", [](const ci::RunReport& r) {
            std::vector<std::pair<std::string, double>> out;
            for (const auto& t : r.timing) {
                out.emplace_back(t.stage, t.seconds);
            }
            return out;
        });

    m.def("run_pipeline", &ci::run_pipeline, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    m.def("make_planted_blocks",
          [](std::size_t rows, std::size_t columns, std::size_t blocks, std::uint64_t seed) {
              ci::PlantedBlocksSpec spec;
              spec.rows = rows;
              spec.columns = columns;
              spec.blocks = blocks;
              spec.seed = seed;
              auto planted = ci::make_planted_blocks(spec);
              return std::make_tuple(std::move(planted.dataset), std::move(planted.block));
          },
          py::arg("rows") = 1000, py::arg("columns") = 8, py::arg("blocks") = 2,
          py::arg("seed") = 7);
    m.def("write_csv", [](const ci::Dataset& d, const std::string& path) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ci::DataError("cannot write '" + path + "'");
        }
        ci::write_csv(out, d);
    });
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Community-based association rule mining for categorical data";

    py::register_exception<ci::ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ci::DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<ci::InvariantError>(m, "InvariantError", PyExc_RuntimeError);
    py::register_exception<ci::StageError>(m, "StageError", PyExc_RuntimeError);

    bind_dataset(m);
    bind_graph(m);
    bind_community(m);
    bind_mining(m);
    bind_summarize(m);
    bind_pipeline(m);
}
