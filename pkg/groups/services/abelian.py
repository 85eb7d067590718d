"""
Abelianization via Smith normal form

Relation matrices are held as numpy arrays of dtype=object so every entry
stays an exact Python int; row and column operations never overflow.
"""

import logging
from dataclasses import dataclass
from numbers import Integral

import numpy as np

from groups.services.errors import FpgError
from groups.services.words import exponent_vector

logger = logging.getLogger(__name__)


class SmithNormalFormError(FpgError):
    """Raised when a matrix is not a rectangular array of exact integers."""
    pass


class IntMatrix:
    """Exact integer matrix backed by a numpy object array."""

    def __init__(self, rows, cols=None):
        rows = [list(row) for row in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for row in rows:
            if len(row) != cols:
                raise SmithNormalFormError(f"ragged matrix: expected {cols} columns, got {len(row)}")
            for entry in row:
                if isinstance(entry, bool) or not isinstance(entry, Integral):
                    raise SmithNormalFormError(f"matrix entry {entry!r} is not an exact integer")
        self.entries = np.zeros((len(rows), cols), dtype=object)
        for i, row in enumerate(rows):
            for j, entry in enumerate(row):
                self.entries[i, j] = int(entry)

    @property
    def shape(self):
        return self.entries.shape

    def tolist(self):
        return [[int(entry) for entry in row] for row in self.entries]

    def __repr__(self):
        return f"IntMatrix({self.tolist()})"


@dataclass(frozen=True)
class AbelianGroup:
    """ℤ^free_rank ⊕ ℤ/d1 ⊕ ℤ/d2 ⊕ ... with d1 | d2 | ..."""
    free_rank: int
    torsion: tuple = ()
    explicit_part_only: bool = False

    @property
    def is_trivial(self):
        return self.free_rank == 0 and not self.torsion

    def __str__(self):
        parts = []
        if self.free_rank == 1:
            parts.append('Z')
        elif self.free_rank > 1:
            parts.append(f'Z^{self.free_rank}')
        parts.extend(f'Z/{d}' for d in self.torsion)
        return ' + '.join(parts) or '0'


def _pivot_position(a, t):
    block = a[t:, t:]
    nonzero = np.argwhere(block != 0)
    if len(nonzero) == 0:
        return None
    i, j = min(nonzero.tolist(), key=lambda ij: abs(block[ij[0], ij[1]]))
    return t + int(i), t + int(j)


def smith_normal_form(m: IntMatrix) -> tuple:
    """
    Invariant factors of an integer matrix.

    Pivots on the nonzero entry of least absolute value in the remaining
    block, clears its row and column by integer division and restarts when
    a remainder appears; a final pass enforces d1 | d2 | ....

    Args:
        m: IntMatrix

    Returns:
        tuple: (diagonal, rank) with diagonal the positive invariant factors
    """
    a = m.entries.copy()
    rows, cols = a.shape
    t = 0
    while t < min(rows, cols):
        pivot = _pivot_position(a, t)
        if pivot is None:
            break
        i, j = pivot
        a[[t, i], :] = a[[i, t], :]
        a[:, [t, j]] = a[:, [j, t]]

        while True:
            p = a[t, t]
            dirty = False
            for r in range(t + 1, rows):
                if a[r, t] != 0:
                    q = a[r, t] // p
                    a[r, :] = a[r, :] - q * a[t, :]
                    dirty = dirty or a[r, t] != 0
            for c in range(t + 1, cols):
                if a[t, c] != 0:
                    q = a[t, c] // p
                    a[:, c] = a[:, c] - q * a[:, t]
                    dirty = dirty or a[t, c] != 0
            if dirty:
                # A remainder smaller than the pivot survived; pivot on it.
                i, j = _pivot_position(a, t)
                a[[t, i], :] = a[[i, t], :]
                a[:, [t, j]] = a[:, [j, t]]
                continue
            rest = a[t + 1:, t + 1:]
            bad = np.argwhere(rest % p != 0) if rest.size else []
            if len(bad):
                r = t + 1 + int(bad[0][0])
                a[t, :] = a[t, :] + a[r, :]
                continue
            break
        t += 1

    diagonal = tuple(abs(int(a[k, k])) for k in range(t))
    return diagonal, len(diagonal)


def relation_matrix(p) -> IntMatrix:
    """Exponent-vector rows of p's explicit relators over its generator order."""
    rows = [exponent_vector(relator, p.generators) for relator in p.relators]
    return IntMatrix(rows, cols=len(p.generators))


def abelianization(p) -> AbelianGroup:
    """
    First homology of the explicit part of p.

    Annotations contribute nothing to the matrix; when present the result is
    flagged explicit_part_only.
    """
    if p.annotations:
        logger.warning(
            f"{p.label}: {len(p.annotations)} normal-closure annotation(s) ignored; "
            f"abelianization covers the explicit part only"
        )
    diagonal, rank = smith_normal_form(relation_matrix(p))
    torsion = tuple(d for d in diagonal if d > 1)
    result = AbelianGroup(
        free_rank=len(p.generators) - rank,
        torsion=torsion,
        explicit_part_only=bool(p.annotations),
    )
    logger.debug(f"{p.label}: H1 = {result}")
    return result
