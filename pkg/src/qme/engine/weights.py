"""Importance weights from relevance rankings (Rank-Order Centroid)."""

from __future__ import annotations

import math
from itertools import groupby
from typing import Sequence

from ..errors import InvalidRanking, WeightSumViolation
from ..model.types import WeightSpec

WEIGHT_SUM_TOL = 1e-6


def roc_weights(n: int) -> list[float]:
    """Centroid weights for ``n`` strictly ranked items, most important first.

    The weight at rank position ``i`` (1-based) is ``(1/n) * sum(1/k for k in i..n)``.

    >>> roc_weights(2)
    [0.75, 0.25]
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InvalidRanking(f"need at least one item, got n={n!r}")
    return [math.fsum(1.0 / k for k in range(i, n + 1)) / n for i in range(1, n + 1)]


def check_ranks(ranks: Sequence[int]) -> None:
    if len(ranks) == 0:
        raise InvalidRanking("empty ranking")
    for r in ranks:
        if isinstance(r, bool) or not isinstance(r, int) or r < 1:
            raise InvalidRanking(f"ranks must be positive integers, got {r!r}")


def weights_from_ranking(ranks: Sequence[int]) -> list[float]:
    """Weights for items given their ranks (1 = most important, ties allowed).

    Only the order of the rank labels matters.  Tied items occupy consecutive
    rank positions and share the mean of those positions' centroid weights.
    The result is aligned with ``ranks``.
    """
    check_ranks(ranks)
    n = len(ranks)
    base = roc_weights(n)
    order = sorted(range(n), key=lambda i: (ranks[i], i))
    out = [0.0] * n
    pos = 0
    for _, group in groupby(order, key=lambda i: ranks[i]):
        members = list(group)
        share = math.fsum(base[pos : pos + len(members)]) / len(members)
        for i in members:
            out[i] = share
        pos += len(members)
    return out


def resolve_weights(spec: WeightSpec, n: int) -> list[float]:
    """Turn a weight spec for ``n`` children into concrete weights."""
    if len(spec) != n:
        raise WeightSumViolation(f"weight spec covers {len(spec)} children, evaluation has {n}")
    if spec.mode == "ranked":
        return weights_from_ranking(list(spec.ranks or ()))
    weights = list(spec.explicit_weights or ())
    check_weights(weights)
    return weights


def check_weights(weights: Sequence[float]) -> None:
    for w in weights:
        if not (math.isfinite(w) and 0.0 <= w <= 1.0):
            raise WeightSumViolation(f"weight {w!r} outside [0, 1]")
    total = math.fsum(weights)
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise WeightSumViolation(f"weights sum to {total:.6g}, expected 1")
