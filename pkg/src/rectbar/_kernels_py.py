"""Pure-Python GF(2) kernels on int bitsets.

Reference implementation of the two hot loops. ``_ckernels`` (Cython)
implements the same functions with the same outputs.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple


def eliminate(vecs: Sequence[int], limit: int) -> Tuple[List[int], List[int]]:
    """Forward Gaussian elimination with lowest-bit pivots below ``limit``.

    Vectors are processed in order. Each is reduced against the pivots of
    the earlier ones; bits at positions >= ``limit`` ride along but are
    never chosen as pivots (they act as tags).

    Returns ``(reduced, pivots)`` where ``pivots[i]`` is the pivot bit of
    ``reduced[i]`` or -1 if its low part reduced to zero.
    """
    low_mask = (1 << limit) - 1
    owner: dict = {}
    reduced: List[int] = []
    pivots: List[int] = []
    for v in vecs:
        low = v & low_mask
        while low:
            p = (low & -low).bit_length() - 1
            row = owner.get(p)
            if row is None:
                owner[p] = v
                break
            v ^= row
            low = v & low_mask
        reduced.append(v)
        pivots.append((low & -low).bit_length() - 1 if low else -1)
    return reduced, pivots


def reduce_boundary(cols: Sequence[int]) -> Tuple[List[int], List[int]]:
    """Standard persistence column reduction (pivot = highest set bit).

    Returns ``(reduced, lows)`` with ``lows[j] == -1`` for zero columns.
    """
    owner: dict = {}
    reduced: List[int] = []
    lows: List[int] = []
    for j, col in enumerate(cols):
        while col:
            low = col.bit_length() - 1
            i = owner.get(low)
            if i is None:
                owner[low] = j
                break
            col ^= reduced[i]
        reduced.append(col)
        lows.append(col.bit_length() - 1 if col else -1)
    return reduced, lows
