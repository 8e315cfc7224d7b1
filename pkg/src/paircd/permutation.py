"""Placebo construction by conditional permutation.

The candidate column Y is permuted among nearest neighbours of the
(imputed) conditioning rows: a random matching on the k_nn-nearest-
neighbour graph is drawn (random visitation order; each row is paired with
its nearest still-unmatched row, provided that row lies among its k_nn
nearest overall), and matched pairs swap their Y values. Rows whose whole
neighbourhood is already matched keep their own value, so the displacement
of every moved value is bounded by its k_nn-neighbour radius. This
preserves the local law of Y given X-hat (pair bins preserve value
multisets exactly) while severing the row-level pairing with the target.

The permutation is applied to the training fold only; held-out rows keep
their own Y values, so both models of the paired comparison are evaluated
on identical held-out inputs. With an empty conditioning set the training
fold is permuted unconditionally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


@dataclass(frozen=True)
class PermutationPlan:
    """Disjoint bins (matched pairs and singletons) plus the neighbourhood
    size that produced them."""

    bins: tuple[np.ndarray, ...]
    k_nn: int
    fallback: bool  # True when the permutation was unconditional


def compute_knn(n: int, d: int) -> int:
    """Neighbourhood size max(2, floor(n^(2/(d+2)))).

    ``d`` is the conditioning dimension; d = 0 signals the empty-conditioning
    case, which callers handle by permuting unconditionally.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if d < 0:
        raise ValueError("d must be >= 0")
    # guard against 31.999... artifacts when the power is an exact integer
    return max(2, int(np.floor(n ** (2.0 / (d + 2)) + 1e-9)))


@njit(cache=True, fastmath=True)
def _match_pairs(x, k, visit):
    """Random matching on the k-NN graph.

    Rows are visited in the given order; an unmatched row is paired with
    its nearest unmatched neighbour if that neighbour is one of its k
    nearest rows overall, otherwise it stays a singleton. Returns the
    partner index per row (own index for singletons).
    """
    n, d = x.shape
    partner = np.full(n, -1, np.int64)
    kbuf = np.empty(k, np.float64)  # k smallest distances, unsorted
    for t in range(n):
        i = visit[t]
        if partner[i] >= 0:
            continue
        # one pass: track the k smallest distances overall (for the
        # neighbourhood radius) and the nearest unmatched row
        filled = 0
        worst = np.inf
        worst_at = 0
        best = -1
        best_d = np.inf
        for j in range(n):
            if j == i:
                continue
            acc = 0.0
            for f in range(d):
                diff = x[j, f] - x[i, f]
                acc += diff * diff
            if filled < k:
                kbuf[filled] = acc
                filled += 1
                if filled == k:
                    worst = kbuf[0]
                    worst_at = 0
                    for q in range(1, k):
                        if kbuf[q] > worst:
                            worst = kbuf[q]
                            worst_at = q
            elif acc < worst:
                kbuf[worst_at] = acc
                worst = kbuf[0]
                worst_at = 0
                for q in range(1, k):
                    if kbuf[q] > worst:
                        worst = kbuf[q]
                        worst_at = q
            if partner[j] < 0 and acc < best_d:
                best_d = acc
                best = j
        radius = worst if filled == k else np.inf
        if best >= 0 and best_d <= radius:
            partner[i] = best
            partner[best] = i
        else:
            partner[i] = i
    return partner


def build_plan(x_hat: np.ndarray, seed: int = 0) -> PermutationPlan:
    """Matched pairs (plus singletons) among k_nn-nearest neighbours."""
    x_hat = np.ascontiguousarray(x_hat, dtype=np.float64)
    n, d = x_hat.shape
    if d == 0:
        return PermutationPlan((np.arange(n),), k_nn=n, fallback=True)
    k = compute_knn(n, d)
    visit = np.random.default_rng(seed).permutation(n)
    partner = _match_pairs(x_hat, min(k, n - 1), visit)
    bins = []
    for i in range(n):
        if partner[i] == i:
            bins.append(np.array([i]))
        elif i < partner[i]:
            bins.append(np.array([i, partner[i]]))
    return PermutationPlan(tuple(bins), k_nn=k, fallback=False)


def conditional_permute(x_hat: np.ndarray, y: np.ndarray, seed: int) -> np.ndarray:
    """Permute ``y`` by swapping matched nearest-neighbour pairs of
    ``x_hat`` rows; unmatched rows keep their own value. With a zero-column
    ``x_hat`` the permutation is unconditional."""
    y = np.asarray(y, dtype=float)
    plan = build_plan(x_hat, seed)
    rng = np.random.default_rng(np.random.SeedSequence((seed, 1)))
    u = y.copy()
    if plan.fallback:
        return y[rng.permutation(y.size)]
    for members in plan.bins:
        if members.size == 2:
            u[members] = y[members[::-1]]
    return u
