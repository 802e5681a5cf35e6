"""Exact maximum-weight assignment between two equal-size concept lists.

Subset dynamic programming (O(n^2 * 2^n)):  exact over Fractions, which
keeps composite similarity scores on the precise k/n grid.  Composite
arities come from entity composition lists, so n stays small.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def max_weight_assignment(
    weights: Sequence[Sequence[Fraction]],
) -> tuple[Fraction, tuple[int, ...]]:
    """Return (best total, assignment) for a square weight matrix.

    assignment[i] is the column matched to row i.  The total is the
    unique maximum; among equally good assignments the choice is
    deterministic (first improving column per subset wins).  Callers that
    want a term-lexicographic tie-break sort their rows and columns
    before building the matrix.
    """
    n = len(weights)
    if n == 0:
        return Fraction(0), ()
    if any(len(row) != n for row in weights):
        raise ValueError("weight matrix must be square")

    size = 1 << n
    best: list[Fraction | None] = [None] * size
    choice: list[int] = [-1] * size
    best[0] = Fraction(0)
    for mask in range(size):
        if best[mask] is None:
            continue
        row = bin(mask).count("1")
        if row == n:
            continue
        for col in range(n):
            bit = 1 << col
            if mask & bit:
                continue
            total = best[mask] + weights[row][col]
            nxt = mask | bit
            if best[nxt] is None or total > best[nxt]:
                best[nxt] = total
                choice[nxt] = col

    full = size - 1
    assignment = [-1] * n
    mask = full
    while mask:
        col = choice[mask]
        row = bin(mask).count("1") - 1
        assignment[row] = col
        mask &= ~(1 << col)
    return best[full], tuple(assignment)
