"""Independent reference implementations shared by the test suite.

Everything in here is deliberately brute-force: exhaustive enumerations and
definition-by-cases computations against which the package's efficient
implementations are checked.
"""

import itertools

from paircd.graphs import MixedGraph


def brute_force_cpdag(dag: MixedGraph) -> MixedGraph:
    """Pattern of a DAG via exhaustive Markov-equivalence enumeration:
    orient the true skeleton every possible way, keep acyclic orientations
    with identical v-structures, and take the union of their arrows."""
    edges = sorted(dag.skeleton_edges())
    target_v = dag.v_structures()
    members = []
    for choice in itertools.product([0, 1], repeat=len(edges)):
        directed = {(i, j) if c == 0 else (j, i)
                    for c, (i, j) in zip(choice, edges)}
        g = MixedGraph(dag.p, directed, set())
        if g.directed_is_acyclic() and g.v_structures() == target_v:
            members.append(directed)
    assert members, "equivalence class cannot be empty"
    always = set.intersection(*map(set, members))
    skel = {tuple(sorted(e)) for e in edges}
    directed = {e for e in always if (e[1], e[0]) not in always}
    undirected = {e for e in skel
                  if e not in directed and (e[1], e[0]) not in directed}
    return MixedGraph(dag.p, directed, undirected)


def enumerate_cpdags(p: int) -> list[MixedGraph]:
    """Every CPDAG over p nodes (pattern of every DAG)."""
    from paircd.discovery import dag_to_cpdag

    pairs = list(itertools.combinations(range(p), 2))
    seen = {}
    for mask in range(3 ** len(pairs)):
        directed = set()
        rest = mask
        for (i, j) in pairs:
            state = rest % 3
            rest //= 3
            if state == 1:
                directed.add((i, j))
            elif state == 2:
                directed.add((j, i))
        g = MixedGraph(p, directed, set())
        if g.directed_is_acyclic():
            cp = dag_to_cpdag(g)
            seen[(frozenset(cp.directed), frozenset(cp.undirected))] = cp
    return list(seen.values())


def shd_by_cases(a: MixedGraph, b: MixedGraph) -> tuple[int, int]:
    """(total SHD, skeleton SHD) straight from the definition, pair by pair."""

    def state(g, i, j):
        if (i, j) in g.directed:
            return ">"
        if (j, i) in g.directed:
            return "<"
        if (i, j) in g.undirected or (j, i) in g.undirected:
            return "-"
        return "."

    total = 0
    skeleton = 0
    for i in range(a.p):
        for j in range(i + 1, a.p):
            sa, sb = state(a, i, j), state(b, i, j)
            if sa == sb:
                continue
            if (sa == ".") != (sb == "."):
                skeleton += 1
                total += 1
            elif sa != "." and sb != ".":
                total += 1
    return total, skeleton
