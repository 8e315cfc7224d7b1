"""Edge-list topology loading for real-network benchmarks.

Format: '#' comment lines, then a node-count header line, then one "i j"
line per directed edge (0-based). Synthetic SEM data is generated on these
topologies with the same edge mechanisms as the random-graph experiments;
no real-world measurements are ever ingested.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from ..errors import ValidationError
from ..graphs import MixedGraph

BUNDLED = ("sachs", "alarm", "hailfinder")


def load_topology(path: str | Path) -> MixedGraph:
    """Read a directed edge list and validate it is a DAG."""
    lines = Path(path).read_text().splitlines()
    body = [ln.strip() for ln in lines
            if ln.strip() and not ln.lstrip().startswith("#")]
    if not body:
        raise ValidationError(f"{path}: empty topology file")
    try:
        p = int(body[0])
    except ValueError:
        raise ValidationError(f"{path}: header must be the node count") from None
    edges = set()
    for ln in body[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValidationError(f"{path}: malformed edge line {ln!r}")
        i, j = int(parts[0]), int(parts[1])
        if i == j:
            raise ValidationError(f"{path}: self-loop at node {i}")
        if not (0 <= i < p and 0 <= j < p):
            raise ValidationError(f"{path}: edge {ln!r} out of range")
        if (j, i) in edges:
            raise ValidationError(f"{path}: nodes {i} and {j} form a 2-cycle")
        edges.add((i, j))
    graph = MixedGraph(p, edges, set())
    if not graph.directed_is_acyclic():
        raise ValidationError(f"{path}: edge list contains a directed cycle")
    return graph


def bundled_topology(name: str) -> MixedGraph:
    """Load one of the topologies shipped with the package."""
    if name not in BUNDLED:
        raise ValidationError(f"unknown topology {name!r}; bundled: {BUNDLED}")
    ref = resources.files("paircd") / "topologies" / f"{name}.txt"
    with resources.as_file(ref) as path:
        return load_topology(path)
