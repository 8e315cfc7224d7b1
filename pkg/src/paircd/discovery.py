"""PC structure search with pluggable CI oracles.

The skeleton phase is classic order-fixed PC: starting from the complete
undirected graph, ordered pairs are scanned in ascending index order, and
for each pair every conditioning subset of the current adjacency (at the
current depth, in lexicographic order) is queried until one yields a
p-value above alpha; the edge is then removed and that subset recorded.
The depth loop ends when no pair admits a test at the current depth.
Orientation identifies unshielded colliders from the recorded separating
sets (conflicting demands leave the contested edge undirected) and then
propagates with the four Meek rules to a fixed point.

Oracles wrap the paired test over a cached imputation, or Fisher-Z over
complete cases / test-wise deletion / completed datasets. A query that
cannot be evaluated (too few rows, singular design) is treated as
"dependent": the edge is kept rather than fabricating independence.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import baselines
from .ci_test import CITestConfig, fast_config, pair_ci
from .data_model import ImputedStack, IncompleteDataset
from .errors import ConfigurationError, ContractError, InsufficientDataError
from .graphs import MixedGraph, d_separated
from .imputation import MiceConfig, build_cache, mean_impute, marginal_impute, mice_impute

DISCOVERY_METHODS = ("pairci", "complete_case", "testwise", "fz_single",
                     "fz_rubin", "fz_vote")


class CIOracle:
    """Base class: a p-value per (i, j, cond) query, plus a method tag."""

    tag = "oracle"

    def query(self, i: int, j: int, cond: tuple[int, ...]) -> float:
        raise NotImplementedError

    def __call__(self, i, j, cond):
        return self.query(i, j, tuple(cond))


class DSeparationOracle(CIOracle):
    """Perfect oracle reading a known DAG: p = 1 when d-separated, else 0."""

    tag = "d_separation"

    def __init__(self, dag: MixedGraph):
        self.dag = dag

    def query(self, i, j, cond):
        return 1.0 if d_separated(self.dag, i, j, cond) else 0.0


class PairCIOracle(CIOracle):
    """The paired test over one cached imputation stack.

    Queries are canonicalized to (min, max, sorted cond) and memoized, so
    each unordered hypothesis costs one evaluation. Per-query seeds are
    derived from the configured seed and the query itself, which makes the
    oracle order-independent and safe to share.
    """

    tag = "pairci"

    def __init__(self, stack: ImputedStack, config: CITestConfig):
        self.stack = stack
        self.config = config
        self.cache: dict[tuple, object] = {}

    def result(self, i: int, j: int, cond: tuple[int, ...]):
        z, y = (i, j) if i < j else (j, i)
        key = (z, y, tuple(sorted(cond)))
        if key not in self.cache:
            seed = int(np.random.SeedSequence(
                (self.config.seed, z, y) + key[2]).generate_state(1)[0])
            cfg = dataclasses.replace(self.config, seed=seed)
            self.cache[key] = pair_ci(self.stack, z, y, key[2], cfg)
        return self.cache[key]

    def query(self, i, j, cond):
        return self.result(i, j, cond).p_value


class FisherZOracle(CIOracle):
    """Fisher-Z on one fixed complete matrix (complete-case or single
    imputation). Untestable queries report p = 0 (edge kept)."""

    tag = "fisher_z"

    def __init__(self, rows: np.ndarray):
        self.rows = np.asarray(rows, dtype=float)
        self.cache: dict[tuple, float] = {}
        self.untestable = 0

    def query(self, i, j, cond):
        z, y = (i, j) if i < j else (j, i)
        key = (z, y, tuple(sorted(cond)))
        if key not in self.cache:
            try:
                res = baselines.fisher_z(self.rows, z, y, key[2])
                p = res.p_value
                if res.singular:
                    self.untestable += 1
                    p = 0.0
            except InsufficientDataError:
                self.untestable += 1
                p = 0.0
            self.cache[key] = p
        return self.cache[key]


class TestwiseOracle(CIOracle):
    """Fisher-Z on the rows complete for each query's own variables."""

    tag = "testwise"

    def __init__(self, data: IncompleteDataset):
        self.data = data
        self.cache: dict[tuple, float] = {}
        self.untestable = 0

    def query(self, i, j, cond):
        z, y = (i, j) if i < j else (j, i)
        key = (z, y, tuple(sorted(cond)))
        if key not in self.cache:
            try:
                rows = baselines.testwise_delete(self.data, z, y, key[2])
                res = baselines.fisher_z(rows, z, y, key[2])
                p = 0.0 if res.singular else res.p_value
                if res.singular:
                    self.untestable += 1
            except InsufficientDataError:
                self.untestable += 1
                p = 0.0
            self.cache[key] = p
        return self.cache[key]


class FZRubinOracle(CIOracle):
    """Rubin-pooled Fisher-Z across the imputations of a cached stack."""

    tag = "fz_rubin"

    def __init__(self, stack: ImputedStack):
        self.stack = stack
        self.cache: dict[tuple, float] = {}
        self.untestable = 0

    def query(self, i, j, cond):
        z, y = (i, j) if i < j else (j, i)
        key = (z, y, tuple(sorted(cond)))
        if key not in self.cache:
            res = baselines.fz_rubin(self.stack, z, y, key[2])
            p = res.p_value
            if res.singular:
                self.untestable += 1
                p = 0.0
            self.cache[key] = p
        return self.cache[key]


def pc_skeleton(oracle: CIOracle, p: int, alpha: float,
                names: tuple[str, ...] | None = None,
                ) -> tuple[MixedGraph, dict[tuple[int, int], set[int]]]:
    """Skeleton search; returns the undirected graph and separating sets."""
    graph = MixedGraph.complete_undirected(p, names)
    sepsets: dict[tuple[int, int], set[int]] = {}
    depth = 0
    while True:
        any_possible = False
        for i in range(p):
            for j in range(p):
                if i == j or not graph.adjacent(i, j):
                    continue
                others = sorted(graph.neighbors(i) - {j})
                if len(others) < depth:
                    continue
                any_possible = True
                removed = False
                for subset in combinations(others, depth):
                    if oracle(i, j, subset) > alpha:
                        graph.remove_edge(i, j)
                        key = (i, j) if i < j else (j, i)
                        sepsets[key] = set(subset)
                        removed = True
                        break
                if removed:
                    continue
        if not any_possible:
            break
        depth += 1
    return graph, sepsets


def _apply_collider_demands(graph: MixedGraph,
                            demands: set[tuple[int, int]]) -> MixedGraph:
    """Orient demanded edges, reverting both directions to undirected when a
    pair is demanded both ways."""
    out = graph.copy()
    for (a, b) in sorted(demands):
        if (b, a) in demands:
            continue
        e = (a, b) if a < b else (b, a)
        if e in out.undirected:
            out.orient(a, b)
    return out


def orient_v_structures(skeleton: MixedGraph,
                        sepsets: dict[tuple[int, int], set[int]]) -> MixedGraph:
    """Orient x -> z <- y for every unshielded triple whose separating set
    excludes z; conflicting orientations leave the contested edge undirected."""
    demands: set[tuple[int, int]] = set()
    for z in range(skeleton.p):
        nbrs = sorted(skeleton.neighbors(z))
        for a in range(len(nbrs)):
            for b in range(a + 1, len(nbrs)):
                x, y = nbrs[a], nbrs[b]
                if skeleton.adjacent(x, y):
                    continue
                key = (x, y)
                if key in sepsets and z not in sepsets[key]:
                    demands.add((x, z))
                    demands.add((y, z))
    return _apply_collider_demands(skeleton, demands)


def meek_rules(graph: MixedGraph) -> MixedGraph:
    """Propagate orientations with rules R1-R4 to a fixed point.

    R1: a -> b, b - c, a and c non-adjacent        => b -> c
    R2: a -> b -> c, a - c                         => a -> c
    R3: a - b, a - c, a - d, c -> b, d -> b,
        c and d non-adjacent                       => a -> b
    R4: a - b, chain c -> d -> b, c and b
        non-adjacent, a adjacent to both c and d   => a -> b

    A directed cycle in the input or output is a contract error.
    """
    g = graph.copy()
    if not g.directed_is_acyclic():
        raise ContractError("input contains a directed cycle")
    changed = True
    while changed:
        changed = False
        for (a, b) in sorted(g.undirected):
            for (x, y) in ((a, b), (b, a)):
                # R1: z -> x, x - y, z and y non-adjacent
                if any(not g.adjacent(z, y) for z in g.parents(x)):
                    g.orient(x, y)
                    changed = True
                    break
                # R2: x -> w -> y and x - y
                if g.children(x) & g.parents(y):
                    g.orient(x, y)
                    changed = True
                    break
                # R3: x - c, x - d, c -> y, d -> y, c and d non-adjacent
                und = g.undirected_neighbors(x)
                into_y = sorted(und & g.parents(y))
                found = False
                for ci in range(len(into_y)):
                    for di in range(ci + 1, len(into_y)):
                        if not g.adjacent(into_y[ci], into_y[di]):
                            found = True
                            break
                    if found:
                        break
                if found:
                    g.orient(x, y)
                    changed = True
                    break
                # R4: chain c -> d -> y with c, y non-adjacent and x adjacent
                # to both c and d
                found = False
                for d_node in g.parents(y):
                    if not g.adjacent(x, d_node):
                        continue
                    for c_node in g.parents(d_node):
                        if g.adjacent(x, c_node) and not g.adjacent(c_node, y):
                            found = True
                            break
                    if found:
                        break
                if found:
                    g.orient(x, y)
                    changed = True
                    break
            if changed:
                break
    if not g.directed_is_acyclic():
        raise ContractError("orientation propagation produced a directed cycle")
    return g


def dag_to_cpdag(dag: MixedGraph) -> MixedGraph:
    """Equivalence-class pattern of a DAG: skeleton plus its unshielded
    colliders, completed by the Meek rules."""
    if dag.undirected:
        raise ConfigurationError("expected a fully directed DAG")
    if not dag.directed_is_acyclic():
        raise ConfigurationError("graph has a directed cycle")
    skel = dag.skeleton()
    demands: set[tuple[int, int]] = set()
    for (x, z, y) in dag.v_structures():
        demands.add((x, z))
        demands.add((y, z))
    return meek_rules(_apply_collider_demands(skel, demands))


@dataclass(frozen=True)
class DiscoveryConfig:
    """Settings shared by every discovery method.

    The paired oracle defaults to the fast variant: a graph search issues
    hundreds of CI queries, which is exactly the regime that variant and
    its early stopping were built for.
    """

    alpha: float = 0.05
    ci: CITestConfig = field(default_factory=fast_config)
    mice: MiceConfig = field(default_factory=MiceConfig)
    imputer: str = "mice"   # mice | mean | marginal
    seed: int = 0


def _impute_stack(data: IncompleteDataset, config: DiscoveryConfig,
                  m: int | None = None) -> ImputedStack:
    m = m if m is not None else config.mice.m_imputations
    mice_cfg = dataclasses.replace(config.mice, m_imputations=m, seed=config.seed)
    if config.imputer == "mice":
        return build_cache(data, mice_cfg)
    if config.imputer == "mean":
        return mean_impute(data, m)
    if config.imputer == "marginal":
        return marginal_impute(data, m, config.seed)
    raise ConfigurationError(f"unknown imputer {config.imputer!r}")


def _finish(skeleton: MixedGraph, sepsets) -> MixedGraph:
    return meek_rules(orient_v_structures(skeleton, sepsets))


def discover(data: IncompleteDataset, method: str,
             config: DiscoveryConfig | None = None) -> MixedGraph:
    """Run PC with the requested CI method and return the estimated CPDAG."""
    config = config or DiscoveryConfig()
    if method not in DISCOVERY_METHODS:
        raise ConfigurationError(
            f"unknown method {method!r}; expected one of {DISCOVERY_METHODS}")
    p = data.p
    names = data.column_names

    if method == "pairci":
        stack = _impute_stack(data, config)
        ci_cfg = dataclasses.replace(config.ci, alpha=config.alpha, seed=config.seed)
        oracle: CIOracle = PairCIOracle(stack, ci_cfg)
    elif method == "complete_case":
        rows = baselines.complete_cases(data)
        if rows.shape[0] < 5:
            raise ConfigurationError(
                f"only {rows.shape[0]} complete rows; cannot run complete-case PC")
        oracle = FisherZOracle(rows)
    elif method == "testwise":
        oracle = TestwiseOracle(data)
    elif method == "fz_single":
        stack = _impute_stack(data, config, m=1)
        oracle = FisherZOracle(stack.datasets[0])
    elif method == "fz_rubin":
        stack = _impute_stack(data, config)
        oracle = FZRubinOracle(stack)
    else:  # fz_vote
        stack = _impute_stack(data, config)

        def pc_run(rows: np.ndarray):
            g, seps = pc_skeleton(FisherZOracle(rows), p, config.alpha, names)
            return g.skeleton_edges(), seps

        agg_edges, demands = baselines.fz_vote(stack, pc_run)
        agg = MixedGraph(p, set(), agg_edges, names)
        return meek_rules(_apply_collider_demands(agg, demands))

    skeleton, sepsets = pc_skeleton(oracle, p, config.alpha, names)
    return _finish(skeleton, sepsets)
