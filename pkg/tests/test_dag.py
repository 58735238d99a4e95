import random
import string

import pytest

from proofkit.dagcheck import (
    compute_layers,
    computed_from_dag,
    critical_path,
    detect_cycles,
    entry_points,
    leaf_nodes,
    reconcile,
    recount_loc_diffs,
)
from proofkit.model import ComputedValues, DagDecl, Unit, parse_bundle

from conftest import FIXTURE_ROOT
from oracles import enumerate_critical_path


def make_dag(spec):
    """spec: {unit_id: (deps, loc)}"""
    return DagDecl(tuple(
        Unit(id=uid, name=uid, deps=tuple(deps), loc=loc)
        for uid, (deps, loc) in spec.items()))


@pytest.fixture(scope="module")
def fixture_dag():
    return parse_bundle(FIXTURE_ROOT).dag


def test_fixture_has_no_cycle(fixture_dag):
    assert detect_cycles(fixture_dag) is None


def test_two_node_cycle_detected():
    dag = make_dag({"A": (["B"], 1), "B": (["A"], 1)})
    cycle = detect_cycles(dag)
    assert cycle is not None and set(cycle) == {"A", "B"}


def test_single_unit_no_cycle():
    assert detect_cycles(make_dag({"X": ([], 1)})) is None


def test_fixture_layers(fixture_dag):
    layers = compute_layers(fixture_dag)
    expected_zero = {"U01", "U02", "U03", "U04", "U05", "U07", "U08", "U09"}
    assert {u for u, l in layers.layer_of.items() if l == 0} == expected_zero
    assert layers.layer_of["U06"] == 1
    assert layers.histogram() == {0: 8, 1: 1}


def test_chain_layers():
    dag = make_dag({"A": ([], 1), "B": (["A"], 1), "C": (["B"], 1)})
    assert compute_layers(dag).layer_of == {"A": 0, "B": 1, "C": 2}


def test_empty_dag_layers():
    assert compute_layers(DagDecl(())).layer_of == {}


def test_fixture_entry_points(fixture_dag):
    assert entry_points(fixture_dag) == {
        "U01", "U02", "U03", "U04", "U05", "U07", "U08", "U09"}


def test_chain_entry_points():
    dag = make_dag({"A": ([], 1), "B": (["A"], 1), "C": (["B"], 1)})
    assert entry_points(dag) == {"A"}


def test_isolated_units_are_all_entries_and_leaves():
    dag = make_dag({"A": ([], 1), "B": ([], 1), "C": ([], 1)})
    assert entry_points(dag) == {"A", "B", "C"}
    assert leaf_nodes(dag) == {"A", "B", "C"}


def test_fixture_leaf_nodes(fixture_dag):
    assert leaf_nodes(fixture_dag) == {"U06", "U07", "U09"}


def test_chain_leaf():
    dag = make_dag({"A": ([], 1), "B": (["A"], 1), "C": (["B"], 1)})
    assert leaf_nodes(dag) == {"C"}


def test_fixture_critical_path(fixture_dag):
    result = critical_path(fixture_dag)
    assert result.path == ("U05", "U06")
    assert result.total_loc == 138


def test_single_unit_critical_path():
    result = critical_path(make_dag({"X": ([], 10)}))
    assert result.path == ("X",) and result.total_loc == 10


def _random_dag(rng):
    n = rng.randint(1, 10)
    ids = rng.sample([a + b for a in string.ascii_uppercase[:6]
                      for b in string.digits], n)
    order = list(ids)
    rng.shuffle(order)
    spec = {}
    for index, uid in enumerate(order):
        possible = order[:index]
        deps = [d for d in possible if rng.random() < 0.35]
        spec[uid] = (deps, rng.randint(1, 50))
    return spec


def test_critical_path_matches_bruteforce_oracle_on_200_random_dags():
    rng = random.Random(20260823)
    for _ in range(200):
        spec = _random_dag(rng)
        dag = make_dag(spec)
        expected_path, expected_weight = enumerate_critical_path(
            list(spec), {u: d for u, (d, _) in spec.items()},
            {u: l for u, (_, l) in spec.items()})
        result = critical_path(dag)
        assert result.total_loc == expected_weight
        assert result.path == expected_path


def test_entry_and_leaf_nonempty_and_histogram_sums_on_random_dags():
    rng = random.Random(7)
    for _ in range(50):
        spec = _random_dag(rng)
        dag = make_dag(spec)
        assert entry_points(dag) and leaf_nodes(dag)
        assert sum(compute_layers(dag).histogram().values()) == len(spec)
        assert critical_path(dag).total_loc >= max(l for _, l in spec.values())


def test_fixture_reconcile_is_clean(fixture_dag):
    assert reconcile(fixture_dag.declared_computed, fixture_dag) == []


def test_reconcile_flags_layer_counts(fixture_dag):
    declared = fixture_dag.declared_computed
    tampered = ComputedValues(
        unit_count=declared.unit_count,
        layer_counts=((0, 7), (1, 2)),
        entry_points=declared.entry_points,
        leaf_nodes=declared.leaf_nodes,
        critical_path=declared.critical_path,
        critical_path_loc=declared.critical_path_loc)
    diffs = reconcile(tampered, fixture_dag)
    assert [d.field for d in diffs] == ["layer_counts"]


def test_reconcile_flags_critical_path_loc(fixture_dag):
    declared = fixture_dag.declared_computed
    tampered = ComputedValues(
        unit_count=declared.unit_count,
        layer_counts=declared.layer_counts,
        entry_points=declared.entry_points,
        leaf_nodes=declared.leaf_nodes,
        critical_path=declared.critical_path,
        critical_path_loc=137)
    diffs = reconcile(tampered, fixture_dag)
    assert [d.field for d in diffs] == ["critical_path_loc"]
    assert diffs[0].declared == 137 and diffs[0].computed == 138


def test_reconcile_self_consistency_on_random_dags():
    rng = random.Random(99)
    for _ in range(50):
        dag = make_dag(_random_dag(rng))
        assert reconcile(computed_from_dag(dag), dag) == []


def test_strict_loc_recount(tmp_path):
    (tmp_path / "a.txt").write_text("one\ntwo\nthree\n")
    dag = DagDecl((Unit(id="A", name="a", loc=3, source_paths=("a.txt",)),
                   Unit(id="B", name="b", loc=9, source_paths=("a.txt",))))
    diffs = recount_loc_diffs(dag, tmp_path)
    assert [(d.field, d.declared, d.computed) for d in diffs] == [("loc[B]", 9, 3)]
