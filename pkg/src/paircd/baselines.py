"""Fisher-Z partial-correlation testing and its deployment modes on
incomplete data: complete-case, test-wise deletion, single imputation,
Rubin-pooled multiple imputation, and majority-vote edge aggregation.

The partial correlation is computed by correlating OLS residuals rather
than inverting a correlation matrix; rank-deficient conditioning sets are
reported through the ``singular`` flag instead of crashing. Untestable
queries (too few rows, singular designs) are mapped by the discovery-side
oracles to "dependent, keep the edge", never to fabricated independence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .ci_test import barnard_rubin_df
from .data_model import ImputedStack, IncompleteDataset
from .errors import InsufficientDataError, ValidationError

_CLAMP = 1.0 - 1e-12


@dataclass(frozen=True)
class FisherZResult:
    partial_corr: float
    z_stat: float
    p_value: float
    effective_n: int
    singular: bool


@dataclass(frozen=True)
class FZRubinResult:
    pooled_z: float
    statistic: float
    df: float
    t_total: float
    p_value: float
    m_used: int
    singular: bool


def _residuals(target: np.ndarray, design: np.ndarray) -> tuple[np.ndarray, bool]:
    """OLS residuals of target on [1, design]; flags rank deficiency."""
    A = np.column_stack([np.ones(target.shape[0]), design])
    coef, _, rank, _ = np.linalg.lstsq(A, target, rcond=None)
    return target - A @ coef, rank < A.shape[1]


def fisher_z(rows: np.ndarray, z: int, y: int, cond: Sequence[int]) -> FisherZResult:
    """Fisher-Z test of partial correlation between columns z and y given
    ``cond``, on a complete numeric matrix."""
    rows = np.asarray(rows, dtype=float)
    cond = tuple(sorted(set(cond)))
    n = rows.shape[0]
    q = len(cond)
    if n <= q + 3:
        raise InsufficientDataError(
            f"need more than {q + 3} rows for |cond| = {q}, have {n}")
    a = rows[:, z]
    b = rows[:, y]
    singular = False
    if q:
        design = rows[:, cond]
        a, s1 = _residuals(a, design)
        b, s2 = _residuals(b, design)
        singular = s1 or s2
    a = a - a.mean()
    b = b - b.mean()
    denom = np.sqrt((a @ a) * (b @ b))
    if not np.isfinite(denom) or denom <= 0:
        return FisherZResult(0.0, 0.0, 1.0, n, True)
    if singular:
        return FisherZResult(0.0, 0.0, 1.0, n, True)
    r = float(np.clip((a @ b) / denom, -_CLAMP, _CLAMP))
    z_stat = float(np.arctanh(r) * np.sqrt(n - q - 3))
    p = float(2.0 * stats.norm.sf(abs(z_stat)))
    return FisherZResult(r, z_stat, p, n, False)


def testwise_delete(data: IncompleteDataset, z: int, y: int,
                    cond: Sequence[int]) -> np.ndarray:
    """Rows having all of {z, y} union cond observed (full-width matrix)."""
    cols = sorted({z, y, *cond})
    keep = data.mask[:, cols].all(axis=1)
    surviving = int(keep.sum())
    if surviving < len(cond) + 4:
        raise InsufficientDataError(
            f"test-wise deletion leaves {surviving} rows for |cond| = {len(cond)}")
    return data.values[keep]


def complete_cases(data: IncompleteDataset) -> np.ndarray:
    """Rows with no missing cell anywhere (may be empty)."""
    return data.values[data.mask.all(axis=1)]


def fz_single(stack: ImputedStack, z: int, y: int, cond: Sequence[int]) -> FisherZResult:
    """Fisher-Z on the first completed dataset (single imputation)."""
    return fisher_z(stack.datasets[0], z, y, cond)


def fz_rubin(stack: ImputedStack, z: int, y: int, cond: Sequence[int]) -> FZRubinResult:
    """Pool Fisher-Z transforms across imputations.

    Per imputation: q_m = atanh(partial corr), with within-imputation
    variance 1/(n - |cond| - 3). The pooled statistic is referred to a t
    distribution with the small-M correction (complete-data degrees of
    freedom n - |cond| - 3); two-sided p-value. Singular imputations are
    skipped; if every one is singular the result is flagged with p = 1.
    """
    if stack.m < 2:
        raise ValidationError("pooled multiple imputation needs m >= 2")
    cond = tuple(sorted(set(cond)))
    n = stack.n
    q_vals = []
    for ds in stack.datasets:
        res = fisher_z(ds, z, y, cond)
        if not res.singular:
            q_vals.append(np.arctanh(np.clip(res.partial_corr, -_CLAMP, _CLAMP)))
    m_used = len(q_vals)
    if m_used == 0:
        return FZRubinResult(0.0, 0.0, float(n - len(cond) - 3), 0.0, 1.0, 0, True)
    complete_df = float(n - len(cond) - 3)
    u = 1.0 / complete_df
    q_bar = float(np.mean(q_vals))
    b = float(np.var(q_vals, ddof=1)) if m_used >= 2 else 0.0
    t_total = u + (1.0 + 1.0 / m_used) * b
    statistic = q_bar / np.sqrt(t_total)
    df = barnard_rubin_df(b, t_total, max(m_used, 2) if b > 0 else m_used, complete_df)
    p = float(2.0 * stats.t.sf(abs(statistic), df))
    return FZRubinResult(q_bar, float(statistic), float(df), float(t_total),
                         p, m_used, False)


def majority_edges(edge_sets: Sequence[set[tuple[int, int]]]) -> set[tuple[int, int]]:
    """Skeleton edges present in strictly more than half of the runs."""
    m = len(edge_sets)
    if m < 1:
        raise ValidationError("need at least one run")
    tally: dict[tuple[int, int], int] = {}
    for edges in edge_sets:
        for e in edges:
            tally[e] = tally.get(e, 0) + 1
    return {e for e, c in tally.items() if c > m / 2}


def vote_collider_demands(
        agg_edges: set[tuple[int, int]],
        run_edges: Sequence[set[tuple[int, int]]],
        run_sepsets: Sequence[dict[tuple[int, int], set[int]]],
        p: int) -> set[tuple[int, int]]:
    """Collider orientations supported by a majority of the runs that
    removed each non-adjacent pair; ties favour no v-structure.

    Returns directed edge demands (src, dst) over the aggregated skeleton.
    """
    adj: dict[int, set[int]] = {i: set() for i in range(p)}
    for (i, j) in agg_edges:
        adj[i].add(j)
        adj[j].add(i)
    demands: set[tuple[int, int]] = set()
    for k in range(p):
        nbrs = sorted(adj[k])
        for a in range(len(nbrs)):
            for b in range(a + 1, len(nbrs)):
                i, j = nbrs[a], nbrs[b]
                if j in adj[i]:
                    continue
                pair = (i, j)
                votes_out = 0
                votes_in = 0
                for edges, sepsets in zip(run_edges, run_sepsets):
                    if pair in edges or pair not in sepsets:
                        continue
                    if k in sepsets[pair]:
                        votes_in += 1
                    else:
                        votes_out += 1
                if votes_out > votes_in:
                    demands.add((i, k))
                    demands.add((j, k))
    return demands


def fz_vote(stack: ImputedStack, pc_run: Callable[[np.ndarray], tuple[set, dict]],
            ) -> tuple[set[tuple[int, int]], set[tuple[int, int]]]:
    """Majority-vote aggregation of per-imputation PC runs.

    ``pc_run`` maps a completed matrix to (skeleton edge set, separating-set
    map). Returns the aggregated edge set together with the voted collider
    demands; the caller re-orients with the usual propagation rules.
    """
    run_edges = []
    run_sepsets = []
    for ds in stack.datasets:
        edges, sepsets = pc_run(ds)
        run_edges.append(set(edges))
        run_sepsets.append(dict(sepsets))
    agg = majority_edges(run_edges)
    demands = vote_collider_demands(agg, run_edges, run_sepsets, stack.p)
    return agg, demands
