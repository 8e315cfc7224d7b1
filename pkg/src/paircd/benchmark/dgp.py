"""Synthetic data-generating processes.

Standalone DGPs produce a (Z, Y, X1..Xd) layout for testing the CI question
"Z independent of Y given X"; the signal parameter scales Y's influence on
Z (or the shared latent factor). Graph DGPs sample a structural equation
model over a DAG in topological order, with linear or nonlinear edge
mechanisms. Adversarial hub DGPs stress the imputation-error cancellation:
one incomplete hub drives both test variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import expit

from ..errors import ConfigurationError, ValidationError
from ..graphs import MixedGraph

SIGNALS = (0.0, 0.3, 0.6, 1.0)


class StandaloneFamily(Enum):
    LINEAR_GAUSSIAN = "linear_gaussian"
    POST_NONLINEAR = "post_nonlinear"
    LATENT_CONFOUNDER = "latent_confounder"


class EdgeKind(Enum):
    LINEAR = "linear"
    NONLINEAR = "nonlinear"


# the four nonlinear edge mechanisms, keyed by their tag
def _quadratic(x, w):
    return w * x ** 2


def _sinusoidal(x, w):
    return w * np.sin(2.0 * x)


def _absolute(x, w):
    return w * np.abs(x)


def _saturating(x, w):
    return w * np.tanh(1.5 * x)


EDGE_FUNCTIONS = {
    "f1": _quadratic,
    "f2": _sinusoidal,
    "f3": _absolute,
    "f4": _saturating,
}


@dataclass(frozen=True)
class StandaloneDGPSpec:
    family: StandaloneFamily
    signal: float
    n: int
    d: int
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise ValidationError("n and d must be positive")
        if self.family == StandaloneFamily.LATENT_CONFOUNDER and self.d < 3:
            raise ValidationError("the latent-confounder family needs d >= 3")


@dataclass(frozen=True)
class StandaloneData:
    """Complete data with the designated test columns: Z at 0, Y at 1,
    conditioning columns X1..Xd afterwards."""

    values: np.ndarray
    names: tuple[str, ...]
    z_col: int = 0
    y_col: int = 1

    @property
    def x_cols(self) -> tuple[int, ...]:
        return tuple(range(2, self.values.shape[1]))


def _signed_uniform(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.uniform(0.5, 1.5, size=size) * rng.choice([-1.0, 1.0], size=size)


def gen_standalone(spec: StandaloneDGPSpec) -> StandaloneData:
    """Sample one complete dataset from a standalone family.

    linear_gaussian:   Y = X g + e_y;  Z = X b + signal * Y + e_z
    post_nonlinear:    Y = X g + e_y;  Z = logistic(X b + signal * Y + e)
    latent_confounder: Z = sin(X1) + X2^2 + 0.5 L + e_z;
                       Y = signal * L + cos(X3) + e_y;  L hidden

    Coefficients are uniform on [0.5, 1.5] with random signs; all noise is
    standard normal; at signal 0 each family satisfies Z indep Y given X.
    """
    rng = np.random.default_rng(spec.seed)
    x = rng.standard_normal((spec.n, spec.d))
    if spec.family == StandaloneFamily.LINEAR_GAUSSIAN:
        gamma = _signed_uniform(rng, spec.d)
        beta = _signed_uniform(rng, spec.d)
        y = x @ gamma + rng.standard_normal(spec.n)
        z = x @ beta + spec.signal * y + rng.standard_normal(spec.n)
    elif spec.family == StandaloneFamily.POST_NONLINEAR:
        gamma = _signed_uniform(rng, spec.d)
        beta = _signed_uniform(rng, spec.d)
        y = x @ gamma + rng.standard_normal(spec.n)
        z = expit(x @ beta + spec.signal * y + rng.standard_normal(spec.n))
    else:
        latent = rng.standard_normal(spec.n)
        z = (np.sin(x[:, 0]) + x[:, 1] ** 2 + 0.5 * latent
             + rng.standard_normal(spec.n))
        y = spec.signal * latent + np.cos(x[:, 2]) + rng.standard_normal(spec.n)
    values = np.column_stack([z, y, x])
    names = ("Z", "Y") + tuple(f"X{i + 1}" for i in range(spec.d))
    return StandaloneData(values, names)


@dataclass(frozen=True)
class GraphDGPSpec:
    graph: MixedGraph
    edge_kind: EdgeKind
    edge_weights: dict = field(default_factory=dict)
    edge_functions: dict = field(default_factory=dict)
    noise_scale: float = 1.0
    n: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.graph.undirected:
            raise ConfigurationError("graph DGPs need a fully directed DAG")
        if not self.graph.directed_is_acyclic():
            raise ConfigurationError("graph contains a directed cycle")
        if self.noise_scale <= 0:
            raise ValidationError("noise_scale must be positive")
        for e in self.graph.directed:
            if e not in self.edge_weights:
                raise ValidationError(f"edge {e} has no weight")
            if (self.edge_kind == EdgeKind.NONLINEAR
                    and self.edge_functions.get(e) not in EDGE_FUNCTIONS):
                raise ValidationError(f"edge {e} has no nonlinear mechanism")


def sample_graph_dgp(graph: MixedGraph, edge_kind: EdgeKind, n: int,
                     seed: int, noise_scale: float = 1.0) -> GraphDGPSpec:
    """Draw weights (uniform [0.5, 1.5], random sign) and, for nonlinear
    SEMs, one of the four mechanisms per edge."""
    rng = np.random.default_rng(seed)
    edges = sorted(graph.directed)
    weights = dict(zip(edges, _signed_uniform(rng, len(edges))))
    tags = list(EDGE_FUNCTIONS)
    functions = {e: tags[rng.integers(0, len(tags))] for e in edges} \
        if edge_kind == EdgeKind.NONLINEAR else {}
    return GraphDGPSpec(graph, edge_kind, weights, functions, noise_scale, n, seed)


def gen_graph_data(spec: GraphDGPSpec) -> np.ndarray:
    """Ancestral sampling of the SEM: each node is the sum of its parent
    contributions plus Gaussian noise; roots are pure noise."""
    rng = np.random.default_rng(spec.seed)
    p = spec.graph.p
    values = np.empty((spec.n, p))
    for node in spec.graph.topological_order():
        total = rng.normal(0.0, spec.noise_scale, size=spec.n)
        for parent in sorted(spec.graph.parents(node)):
            w = spec.edge_weights[(parent, node)]
            if spec.edge_kind == EdgeKind.LINEAR:
                total += w * values[:, parent]
            else:
                fn = EDGE_FUNCTIONS[spec.edge_functions[(parent, node)]]
                total += fn(values[:, parent], w)
        values[:, node] = total
    return values


def erdos_renyi_dag(p: int, edge_prob: float, seed: int) -> MixedGraph:
    """Random DAG: a random topological order, each forward pair included
    independently with the given probability."""
    if p < 1:
        raise ValidationError("p must be >= 1")
    if not 0.0 <= edge_prob <= 1.0:
        raise ValidationError("edge_prob must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    order = rng.permutation(p)
    edges = set()
    for i in range(p):
        for j in range(i + 1, p):
            if rng.random() < edge_prob:
                edges.add((int(order[i]), int(order[j])))
    return MixedGraph(p, edges, set())


@dataclass(frozen=True)
class HubData:
    """Adversarial hub layout: Z at 0, Y at 1, the incomplete hub at 2,
    weakly correlated children afterwards."""

    values: np.ndarray
    names: tuple[str, ...]
    z_col: int = 0
    y_col: int = 1
    hub_col: int = 2


def gen_hub(kind: str, n: int, seed: int, n_children: int = 10,
            child_strength: float = 0.5, noise_scale: float = 0.5) -> HubData:
    """Hub DGP: both test variables are driven solely by one hub variable,
    so conditioning on the true hub renders them independent.

    kind "linear":    Y = hub + e,      Z = hub + e
    kind "nonlinear": Y = sin(hub) + e, Z = hub^2 + e
    """
    if kind not in ("linear", "nonlinear"):
        raise ConfigurationError(f"unknown hub kind {kind!r}")
    rng = np.random.default_rng(seed)
    hub = rng.standard_normal(n)
    children = (child_strength * hub[:, None]
                + rng.standard_normal((n, n_children)))
    if kind == "linear":
        y = hub + noise_scale * rng.standard_normal(n)
        z = hub + noise_scale * rng.standard_normal(n)
    else:
        y = np.sin(hub) + noise_scale * rng.standard_normal(n)
        z = hub ** 2 + noise_scale * rng.standard_normal(n)
    values = np.column_stack([z, y, hub, children])
    names = ("Z", "Y", "X0") + tuple(f"C{i + 1}" for i in range(n_children))
    return HubData(values, names)
