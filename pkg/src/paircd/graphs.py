"""Mixed graphs (directed + undirected edges) and d-separation.

One graph type serves every role in the pipeline: DAGs (directed edges
only), skeletons (undirected only), and CPDAGs (both). Undirected edges are
stored as sorted pairs; a pair may appear in at most one of the two sets.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ContractError, ValidationError


def _und(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


class MixedGraph:
    """Adjacency over ``p`` nodes with directed and undirected edge sets."""

    def __init__(self, p: int,
                 directed: set[tuple[int, int]] | None = None,
                 undirected: set[tuple[int, int]] | None = None,
                 names: tuple[str, ...] | None = None):
        if p < 1:
            raise ValidationError("graph needs at least one node")
        self.p = p
        self.directed: set[tuple[int, int]] = set(directed or ())
        self.undirected: set[tuple[int, int]] = {_und(*e) for e in (undirected or ())}
        self.names = tuple(names) if names is not None else tuple(f"X{i}" for i in range(p))
        self.validate()

    # -- construction helpers -------------------------------------------------

    @classmethod
    def complete_undirected(cls, p: int, names=None) -> "MixedGraph":
        edges = {(i, j) for i in range(p) for j in range(i + 1, p)}
        return cls(p, set(), edges, names)

    def copy(self) -> "MixedGraph":
        return MixedGraph(self.p, set(self.directed), set(self.undirected), self.names)

    def validate(self) -> None:
        for (i, j) in self.directed | self.undirected:
            if not (0 <= i < self.p and 0 <= j < self.p):
                raise ValidationError("edge endpoint out of range")
            if i == j:
                raise ValidationError("self-loops are not allowed")
        for (i, j) in self.directed:
            if (j, i) in self.directed:
                raise ContractError(f"bidirected pair {(i, j)}")
            if _und(i, j) in self.undirected:
                raise ContractError(f"edge {(i, j)} both directed and undirected")

    # -- queries ---------------------------------------------------------------

    def adjacent(self, i: int, j: int) -> bool:
        return ((i, j) in self.directed or (j, i) in self.directed
                or _und(i, j) in self.undirected)

    def neighbors(self, i: int) -> set[int]:
        out = {j for (a, j) in self.directed if a == i}
        out |= {a for (a, j) in self.directed if j == i}
        out |= {a if b == i else b for (a, b) in self.undirected if i in (a, b)}
        return out

    def undirected_neighbors(self, i: int) -> set[int]:
        return {a if b == i else b for (a, b) in self.undirected if i in (a, b)}

    def parents(self, i: int) -> set[int]:
        return {a for (a, b) in self.directed if b == i}

    def children(self, i: int) -> set[int]:
        return {b for (a, b) in self.directed if a == i}

    def skeleton_edges(self) -> set[tuple[int, int]]:
        return {_und(i, j) for (i, j) in self.directed} | set(self.undirected)

    def skeleton(self) -> "MixedGraph":
        return MixedGraph(self.p, set(), self.skeleton_edges(), self.names)

    def n_edges(self) -> int:
        return len(self.directed) + len(self.undirected)

    # -- mutation (used by the skeleton search and orientation passes) ---------

    def remove_edge(self, i: int, j: int) -> None:
        self.undirected.discard(_und(i, j))
        self.directed.discard((i, j))
        self.directed.discard((j, i))

    def orient(self, i: int, j: int) -> None:
        """Turn the undirected edge i-j into i->j."""
        e = _und(i, j)
        if e not in self.undirected:
            raise ContractError(f"cannot orient non-undirected pair {(i, j)}")
        self.undirected.discard(e)
        self.directed.add((i, j))

    # -- structure checks -------------------------------------------------------

    def directed_is_acyclic(self) -> bool:
        indeg = {i: 0 for i in range(self.p)}
        for (_, j) in self.directed:
            indeg[j] += 1
        queue = [i for i in range(self.p) if indeg[i] == 0]
        seen = 0
        while queue:
            u = queue.pop()
            seen += 1
            for v in self.children(u):
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
        return seen == self.p

    def topological_order(self) -> list[int]:
        indeg = {i: 0 for i in range(self.p)}
        for (_, j) in self.directed:
            indeg[j] += 1
        queue = sorted(i for i in range(self.p) if indeg[i] == 0)
        order = []
        while queue:
            u = queue.pop(0)
            order.append(u)
            for v in sorted(self.children(u)):
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
        if len(order) != self.p:
            raise ValidationError("graph contains a directed cycle")
        return order

    def v_structures(self) -> set[tuple[int, int, int]]:
        """Unshielded colliders (x, z, y) with x < y and x->z<-y."""
        out = set()
        for z in range(self.p):
            pars = sorted(self.parents(z))
            for a in range(len(pars)):
                for b in range(a + 1, len(pars)):
                    x, y = pars[a], pars[b]
                    if not self.adjacent(x, y):
                        out.add((x, z, y))
        return out

    # -- equality and serialization ----------------------------------------------

    def __eq__(self, other) -> bool:
        return (isinstance(other, MixedGraph) and self.p == other.p
                and self.directed == other.directed
                and self.undirected == other.undirected)

    def __repr__(self) -> str:
        return (f"MixedGraph(p={self.p}, directed={sorted(self.directed)}, "
                f"undirected={sorted(self.undirected)})")

    def to_json(self) -> str:
        return json.dumps({
            "p": self.p,
            "names": list(self.names),
            "directed": sorted(list(e) for e in self.directed),
            "undirected": sorted(list(e) for e in self.undirected),
        }, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "MixedGraph":
        obj = json.loads(text)
        return cls(obj["p"], {tuple(e) for e in obj["directed"]},
                   {tuple(e) for e in obj["undirected"]},
                   tuple(obj.get("names") or ()) or None)


def d_separated(dag: MixedGraph, x: int, y: int, cond: tuple[int, ...] | set[int]) -> bool:
    """Whether x and y are d-separated by ``cond`` in a DAG.

    Uses the ancestral-moralization criterion: restrict to ancestors of
    {x, y} union cond, moralize, delete cond, and test connectivity.
    """
    if self_loops := {x, y} & set(cond):
        raise ValidationError(f"conditioning set contains an endpoint: {self_loops}")
    if dag.undirected:
        raise ValidationError("d-separation is defined on a DAG (directed edges only)")
    cond = set(cond)

    # ancestors of x, y and cond
    relevant = {x, y} | cond
    anc = set(relevant)
    frontier = list(relevant)
    while frontier:
        u = frontier.pop()
        for v in dag.parents(u):
            if v not in anc:
                anc.add(v)
                frontier.append(v)

    # moral graph on the ancestral set
    adj: dict[int, set[int]] = {u: set() for u in anc}
    for (a, b) in dag.directed:
        if a in anc and b in anc:
            adj[a].add(b)
            adj[b].add(a)
    for z in anc:
        pars = [u for u in dag.parents(z) if u in anc]
        for i in range(len(pars)):
            for j in range(i + 1, len(pars)):
                adj[pars[i]].add(pars[j])
                adj[pars[j]].add(pars[i])

    # connectivity avoiding cond
    seen = {x}
    frontier = [x]
    while frontier:
        u = frontier.pop()
        for v in adj[u]:
            if v == y:
                return False
            if v not in seen and v not in cond:
                seen.add(v)
                frontier.append(v)
    return True


def save_graph(graph: MixedGraph, path: str | Path) -> None:
    Path(path).write_text(graph.to_json() + "\n")


def load_graph(path: str | Path) -> MixedGraph:
    return MixedGraph.from_json(Path(path).read_text())
