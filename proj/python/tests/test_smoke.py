import json
import math

import pytest

import catinsight as ci


def test_cars_table_one():
    rules = [
        ci.AssociationRule([0, 1], [2], support=0.2, confidence=0.5, lift=1.5),
        ci.AssociationRule([0], [2, 3], support=0.25, confidence=0.6, lift=1.8),
        ci.AssociationRule([0], [2], support=0.3, confidence=0.7, lift=2.4),
    ]
    (summary,) = ci.summarize(ci.filter_single_consequent(rules))
    assert summary.consequent == 2
    assert summary.antecedents == [(0, 2), (1, 1)]
    assert tuple(summary.support) == (0.2, 0.3)
    assert tuple(summary.confidence) == (0.5, 0.7)
    assert tuple(summary.lift) == (1.5, 2.4)
    assert summary.rule_count == 2


def test_encode_graph_louvain():
    data = ci.parse_csv("a,b,c\nx,y,z\nx,y,w\nq,r,s\nq,r,t\n")
    vocab, transactions = ci.encode(data)
    assert len(vocab) == 8
    assert vocab.label(0) == "a=x"
    assert ci.decode(vocab, transactions[1]) == ["x", "y", "w"]
    assert math.isclose(ci.cosine_similarity(transactions[0].items, transactions[1].items), 2 / 3)

    graph = ci.build_graph(transactions, epsilon=0.5)
    assert graph.edges == [(0, 1, pytest.approx(2 / 3)), (2, 3, pytest.approx(2 / 3))]
    partition = ci.louvain(graph)
    assert partition.assignment == [0, 0, 1, 1]
    assert ci.modularity(graph, partition) == pytest.approx(0.5)
    stats = ci.community_stats(graph, partition)
    assert [s.strength for s in stats] == [1.0, 1.0]
    assert ci.select_communities(stats, min_size_fraction=0.0, top_k=2) == [0, 1]


def test_mining_and_binning():
    frequent = ci.apriori([[0, 1], [0, 1], [0], [1, 2]], ci.MiningConfig(min_support=0.5))
    assert [(f.items, f.support_count) for f in frequent.itemsets] == [([0], 3), ([1], 3), ([0, 1], 2)]
    rules = ci.generate_rules(frequent, ci.MiningConfig(min_support=0.5, min_confidence=0.5))
    assert [(r.antecedent, r.consequent) for r in rules] == [([0], [1]), ([1], [0])]
    assert ci.interval_label(250, [50, 100, 200]) == "200-max"
    data = ci.bin_numeric(ci.parse_csv("price\n250\n75\n"), "price", [50, 100, 200])
    assert data.rows == [["200-max"], ["50-100"]]


def test_errors_map_to_python_exceptions():
    with pytest.raises(ci.DataError):
        ci.parse_csv("a,b\n1,2,3\n")
    with pytest.raises(ci.ConfigError):
        ci.apriori([[0]], ci.MiningConfig(min_support=0.0))
    with pytest.raises(ValueError):
        ci.build_graph([], epsilon=2.0)


def test_run_pipeline(tmp_path):
    data, blocks = ci.make_planted_blocks(rows=200, seed=5)
    assert len(blocks) == 200
    ci.write_csv(data, str(tmp_path / "planted.csv"))
    config = ci.PipelineConfig.from_json(
        json.dumps(
            {
                "input": "planted.csv",
                "epsilon": 0.6,
                "mining": {"min_support": 0.3, "min_confidence": 0.6},
                "selection": {"top_k": 2},
                "output_dir": "out",
            }
        ),
        str(tmp_path),
    )
    report = ci.run_pipeline(config)
    assert report.rows == 200
    assert len(report.selected) == 2
    assert (tmp_path / "out" / "summaries.csv").exists()
    assert json.loads(report.to_json())["dataset"]["rows"] == 200
    assert {stage for stage, _ in report.timing} >= {"encode", "graph", "cluster", "mine", "summarize"}
