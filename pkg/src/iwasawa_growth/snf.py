"""Smith normal form over Z/p^N and small unimodular solves.

Over the local ring Z/p^N an entry of least valuation divides every other entry,
so elimination with a least-valuation pivot yields the elementary divisors
directly.  Matrices whose entries fit are handled in numpy int64; anything
larger falls back to object arrays of Python ints.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import InconsistentSystem


def _dtype(p: int, N: int):
    return np.int64 if p ** (2 * N) < 2**62 else object


def smith_valuations(rows: Sequence[Sequence[int]], p: int, N: int) -> list[int | None]:
    """Valuations of the elementary divisors mod p^N, in increasing order.

    Divisors that vanish mod p^N are reported as ``None``; the list has
    length ``min(#rows, #cols)``.
    """
    mod = p**N
    dtype = _dtype(p, N)
    A = np.array([[int(x) % mod for x in r] for r in rows], dtype=object)
    if A.size == 0:
        return []
    A = A.astype(dtype)
    r, c = A.shape
    # each unreduced update adds less than mod^2 in absolute value
    budget = max(1, (2**62 // mod**2) - 1) if dtype is np.int64 else 1
    slack = 0
    out: list[int | None] = []
    v, pv = 0, 1
    while r and c and v < N:
        pv1 = pv * p
        # the active block is A[:r, :c]; pivots are swapped into its last row and column
        hits = np.flatnonzero(A[r - 1, :c] % pv1)
        if hits.size:
            i, j = r - 1, int(hits[0])
        else:
            found = np.argwhere(A[:r, :c] % pv1 != 0)
            if len(found) == 0:
                v, pv = v + 1, pv1
                continue
            i, j = (int(t) for t in found[0])
        if i != r - 1:
            A[[i, r - 1], :c] = A[[r - 1, i], :c]
        if j != c - 1:
            A[:r, [j, c - 1]] = A[:r, [c - 1, j]]
        r, c = r - 1, c - 1
        A[r, :c + 1] %= mod
        A[:r, c] %= mod
        unit = int(A[r, c]) // pv
        inv = pow(unit % mod, -1, mod)
        factor = ((A[:r, c] // pv) * inv) % mod
        block = A[:r, :c]
        block -= np.outer(factor, A[r, :c])
        # entries stay congruent mod p^N; reduce only before int64 could overflow
        slack += 1
        if slack >= budget:
            block %= mod
            slack = 0
        out.append(v)
    out.extend([None] * min(r, c))
    return out


def rank_mod(rows: Sequence[Sequence[int]], p: int, N: int) -> int:
    """Number of elementary divisors that are non-zero mod p^N."""
    return sum(1 for v in smith_valuations(rows, p, N) if v is not None)


def unit_divisor_count(rows: Sequence[Sequence[int]], p: int, N: int) -> int:
    """Number of unit elementary divisors (the rank mod p)."""
    return sum(1 for v in smith_valuations(rows, p, N) if v == 0)


def inverse_mod(mat: Sequence[Sequence[int]], p: int, N: int) -> list[list[int]]:
    """Inverse of a square matrix that is invertible mod p (Gauss-Jordan with unit pivots)."""
    mod = p**N
    n = len(mat)
    a = [[int(x) % mod for x in row] + [int(i == j) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] % p), None)
        if piv is None:
            raise InconsistentSystem("matrix is singular mod p")
        a[col], a[piv] = a[piv], a[col]
        inv = pow(a[col][col], -1, mod)
        a[col] = [(x * inv) % mod for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [(x - f * y) % mod for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def matvec_mod(mat: Sequence[Sequence[int]], vec: Sequence[int], mod: int) -> list[int]:
    return [sum(x * y for x, y in zip(row, vec)) % mod for row in mat]
