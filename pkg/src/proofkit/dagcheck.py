"""Graph-derived values of an implementation DAG and their reconciliation.

Layer is longest-path depth from sources: layer(u) = 0 for units without
dependencies, otherwise 1 + max over dependency layers. The critical path is
the source-to-sink path maximizing summed unit LOC, ties broken by the
lexicographically smallest unit-id sequence.
"""

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .errors import CycleError
from .model import ComputedValues, DagDecl


@dataclass(frozen=True)
class LayerAssignment:
    layer_of: Dict[str, int]

    def histogram(self) -> Dict[int, int]:
        return dict(Counter(self.layer_of.values()))


@dataclass(frozen=True)
class CriticalPathResult:
    path: Tuple[str, ...]
    total_loc: int


@dataclass(frozen=True)
class ReconcileDiff:
    field: str
    declared: object
    computed: object


def detect_cycles(dag: DagDecl) -> Optional[List[str]]:
    """Return one witness cycle as an ordered unit-id list, or None."""
    deps = {u.id: list(u.deps) for u in dag.units}
    color: Dict[str, int] = {}  # 0 unseen, 1 on stack, 2 done
    stack: List[str] = []

    def visit(uid: str) -> Optional[List[str]]:
        color[uid] = 1
        stack.append(uid)
        for dep in deps.get(uid, []):
            state = color.get(dep, 0)
            if state == 1:
                return stack[stack.index(dep):]
            if state == 0:
                found = visit(dep)
                if found is not None:
                    return found
        stack.pop()
        color[uid] = 2
        return None

    for uid in deps:
        if color.get(uid, 0) == 0:
            cycle = visit(uid)
            if cycle is not None:
                return cycle
    return None


def _topo_order(dag: DagDecl) -> List[str]:
    cycle = detect_cycles(dag)
    if cycle is not None:
        raise CycleError(cycle)
    deps = {u.id: u.deps for u in dag.units}
    order: List[str] = []
    done: Dict[str, bool] = {}

    def visit(uid: str) -> None:
        if done.get(uid):
            return
        for dep in deps[uid]:
            visit(dep)
        done[uid] = True
        order.append(uid)

    for uid in sorted(deps):
        visit(uid)
    return order


def compute_layers(dag: DagDecl) -> LayerAssignment:
    order = _topo_order(dag)
    deps = {u.id: u.deps for u in dag.units}
    layer: Dict[str, int] = {}
    for uid in order:
        layer[uid] = 1 + max(layer[d] for d in deps[uid]) if deps[uid] else 0
    return LayerAssignment(layer)


def entry_points(dag: DagDecl) -> set:
    """Units with no dependencies."""
    return {u.id for u in dag.units if not u.deps}


def leaf_nodes(dag: DagDecl) -> set:
    """Units no other unit depends on. A unit may be both entry and leaf."""
    depended_on = {d for u in dag.units for d in u.deps}
    return {u.id for u in dag.units if u.id not in depended_on}


def critical_path(dag: DagDecl) -> CriticalPathResult:
    if not dag.units:
        return CriticalPathResult((), 0)
    order = _topo_order(dag)
    units = dag.by_id()
    # best path from any source ending at uid: (total loc, lexicographically
    # smallest id sequence among maximal-weight candidates)
    best: Dict[str, Tuple[int, Tuple[str, ...]]] = {}
    for uid in order:
        unit = units[uid]
        candidates = [(best[d][0] + unit.loc, best[d][1] + (uid,)) for d in unit.deps]
        candidates.append((unit.loc, (uid,)))
        best[uid] = max(candidates, key=lambda c: (c[0], _neg_lex(c[1])))
    sinks = leaf_nodes(dag)
    total, path = max((best[s] for s in sinks), key=lambda c: (c[0], _neg_lex(c[1])))
    return CriticalPathResult(path, total)


class _neg_lex:
    """Orders sequences so that max() picks the lexicographically smallest."""

    def __init__(self, seq):
        self.seq = tuple(seq)

    def __lt__(self, other):
        return self.seq > other.seq

    def __gt__(self, other):
        return self.seq < other.seq

    def __eq__(self, other):
        return self.seq == other.seq


def reconcile(declared: ComputedValues, dag: DagDecl) -> List[ReconcileDiff]:
    """Diff every declared computed value against recomputation from the DAG."""
    diffs: List[ReconcileDiff] = []

    def check(field: str, declared_value, computed_value) -> None:
        if declared_value != computed_value:
            diffs.append(ReconcileDiff(field, declared_value, computed_value))

    layers = compute_layers(dag)
    cp = critical_path(dag)
    check("unit_count", declared.unit_count, len(dag.units))
    check("layer_counts", dict(declared.layer_counts), layers.histogram())
    check("entry_points", set(declared.entry_points), entry_points(dag))
    check("leaf_nodes", set(declared.leaf_nodes), leaf_nodes(dag))
    check("critical_path", tuple(declared.critical_path), cp.path)
    check("critical_path_loc", declared.critical_path_loc, cp.total_loc)
    return diffs


def computed_from_dag(dag: DagDecl) -> ComputedValues:
    layers = compute_layers(dag)
    cp = critical_path(dag)
    return ComputedValues(
        unit_count=len(dag.units),
        layer_counts=tuple(sorted(layers.histogram().items())),
        entry_points=tuple(sorted(entry_points(dag))),
        leaf_nodes=tuple(sorted(leaf_nodes(dag))),
        critical_path=cp.path,
        critical_path_loc=cp.total_loc,
    )


def recount_loc_diffs(dag: DagDecl, root) -> List[ReconcileDiff]:
    """Strict mode: recount physical source lines per unit and diff vs declared.

    The counting convention (all physical lines, trailing newline or not) is
    artifact-local; declared values remain authoritative for reconcile().
    """
    root = Path(root)
    diffs: List[ReconcileDiff] = []
    for unit in dag.units:
        if not unit.source_paths:
            continue
        counted = 0
        for rel in unit.source_paths:
            data = (root / rel).read_bytes()
            counted += len(data.splitlines())
        if counted != unit.loc:
            diffs.append(ReconcileDiff(f"loc[{unit.id}]", unit.loc, counted))
    return diffs
