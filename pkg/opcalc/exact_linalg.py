#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Exact linear algebra over the rationals and prime fields.

Matrices are 2-D numpy arrays of dtype ``object`` holding Python ints or
``fractions.Fraction`` (rationals) and Python int residues (prime fields).
Residues are reduced lazily: at elimination time, in comparisons and
when inverting.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Optional, Tuple

import numpy as np

from opcalc.exceptions import (
    ContainmentViolation,
    InconsistentSystem,
    InputError,
    NotAChainMap,
)

logger = logging.getLogger("opcalc.exact_linalg")


def _is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field: ``Q`` or ``Fp`` with a prime ``p``."""

    kind: str = "Q"
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind == "Q":
            if self.p is not None:
                raise InputError("the rational field takes no characteristic")
        elif self.kind == "Fp":
            if not isinstance(self.p, int) or isinstance(self.p, bool) or not _is_prime(self.p):
                raise InputError(f"prime field needs a prime order, got {self.p!r}")
        else:
            raise InputError(f"unknown field kind {self.kind!r}")

    @classmethod
    def parse(cls, selector):
        """Accept ``"Q"``, ``{"Fp": p}`` (JSON form) or ``"F101"`` / ``"Fp:101"`` (CLI form)."""
        if isinstance(selector, FieldSpec):
            return selector
        if selector is None:
            return cls("Q")
        if isinstance(selector, dict):
            if set(selector) != {"Fp"}:
                raise InputError(f"field object must be {{\"Fp\": p}}, got keys {sorted(selector)}")
            return cls("Fp", selector["Fp"])
        if isinstance(selector, str):
            text = selector.strip()
            if text in ("Q", "QQ", "q"):
                return cls("Q")
            match = re.fullmatch(r"F(?:p)?[_:=]?(\d+)", text)
            if match:
                return cls("Fp", int(match.group(1)))
        raise InputError(f"cannot parse field selector {selector!r}")

    @property
    def is_rational(self):
        return self.kind == "Q"

    @property
    def label(self):
        return "Q" if self.is_rational else f"F{self.p}"

    def to_json(self):
        return "Q" if self.is_rational else {"Fp": self.p}

    def scalar(self, value):
        """Convert an int, Fraction or ``"a/b"`` string into a field element."""
        if isinstance(value, bool):
            raise InputError(f"boolean is not a scalar: {value!r}")
        try:
            if isinstance(value, str):
                value = Fraction(value.strip())
            else:
                value = Fraction(value)
        except (ValueError, TypeError, ZeroDivisionError) as e:
            raise InputError(f"invalid scalar {value!r}: {e}")
        if self.is_rational:
            return value.numerator if value.denominator == 1 else value
        if value.denominator % self.p == 0:
            raise InputError(f"scalar {value} has no image in F{self.p}")
        return value.numerator * pow(value.denominator, self.p - 2, self.p) % self.p

    def array(self, data):
        arr = np.array(data, dtype=object)
        if arr.size == 0:
            return arr
        flat = [self.scalar(v) for v in arr.ravel()]
        out = np.empty(arr.shape, dtype=object)
        out.ravel()[:] = flat
        return out

    def zeros(self, *shape):
        return np.zeros(shape, dtype=object)

    def eye(self, n):
        return np.eye(n, dtype=object)

    def reduce(self, matrix):
        matrix = np.asarray(matrix, dtype=object)
        if self.is_rational or matrix.size == 0:
            return matrix
        return np.mod(matrix, self.p)

    def inverse(self, a):
        if self.is_rational:
            if a == 0:
                raise ZeroDivisionError("zero has no inverse")
            return Fraction(1) / a
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(a, self.p - 2, self.p)

    def is_zero(self, matrix):
        matrix = self.reduce(matrix)
        if matrix.size == 0:
            return True
        return not np.asarray(matrix != 0, dtype=bool).any()

    def equal(self, a, b):
        a = np.asarray(a, dtype=object)
        b = np.asarray(b, dtype=object)
        if a.shape != b.shape:
            return False
        return self.is_zero(a - b)


QQ = FieldSpec("Q")


def sign(k):
    """(-1)^k as an int, for any integer k."""
    return -1 if k % 2 else 1


def mat(a, b):
    """Matrix product of object arrays, tolerating empty dimensions and batches."""
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    if a.size == 0 or b.size == 0:
        batch = np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
        return np.zeros(batch + (a.shape[-2], b.shape[-1]), dtype=object)
    return np.matmul(a, b)


def columns(block, rows):
    """``block`` as a matrix with ``rows`` rows; a vector becomes one column.

    Shapes are spelled out, so empty blocks keep their width.
    """
    block = np.asarray(block, dtype=object)
    if block.ndim == 1 and block.shape[0] == rows:
        return block.reshape(rows, 1)
    if block.ndim >= 1 and block.shape[0] == rows:
        return block.reshape(rows, int(np.prod(block.shape[1:], dtype=int)))
    if block.size == 0:
        return np.zeros((rows, 0), dtype=object)
    return block.reshape(rows, -1)


def hstack(blocks, rows):
    """Column concatenation; ``rows`` fixes the height when all blocks are empty."""
    parts = [columns(b, rows) for b in blocks]
    parts = [b for b in parts if b.shape[1]]
    if not parts:
        return np.zeros((rows, 0), dtype=object)
    return np.concatenate(parts, axis=1)


def _integer_rows(m):
    out = np.empty(m.shape, dtype=object)
    for r, row in enumerate(m):
        den = 1
        for v in row:
            if isinstance(v, Fraction) and v.denominator != 1:
                den = den * v.denominator // gcd(den, v.denominator)
        out[r] = [int(v * den) for v in row]
    return out


def _bareiss_rank(m):
    a = _integer_rows(m)
    rows, cols = a.shape
    r, prev = 0, 1
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(np.asarray(a[r:, c] != 0, dtype=bool))
        if len(nz) == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        piv = a[r, c]
        if r + 1 < rows:
            # exact division: entries are minors of the pivot columns
            a[r + 1:] = (piv * a[r + 1:] - np.multiply.outer(a[r + 1:, c], a[r])) // prev
        prev = piv
        r += 1
    return r


def row_reduce(matrix, field=QQ) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form and pivot columns, first nonzero pivot rule."""
    r_mat = field.reduce(np.array(matrix, dtype=object, copy=True))
    if r_mat.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {r_mat.shape}")
    rows, cols = r_mat.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(np.asarray(r_mat[r:, c] != 0, dtype=bool))
        if len(nz) == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            r_mat[[r, k]] = r_mat[[k, r]]
        r_mat[r] = field.reduce(r_mat[r] * field.inverse(r_mat[r, c]))
        others = np.flatnonzero(np.asarray(r_mat[:, c] != 0, dtype=bool))
        others = others[others != r]
        if len(others):
            r_mat[others] = field.reduce(
                r_mat[others] - np.multiply.outer(r_mat[others, c], r_mat[r])
            )
        pivots.append(c)
        r += 1
    return r_mat, pivots


def rank(matrix, field=QQ):
    m = np.asarray(matrix, dtype=object)
    if m.size == 0:
        return 0
    if field.is_rational:
        return _bareiss_rank(m)
    return len(row_reduce(m, field)[1])


@dataclass(frozen=True, eq=False)
class Subspace:
    """Span of the linearly independent columns of ``basis``."""

    ambient_dim: int
    basis: np.ndarray

    @property
    def dim(self):
        return self.basis.shape[1]

    @classmethod
    def full(cls, n):
        return cls(n, np.eye(n, dtype=object))

    @classmethod
    def zero(cls, n):
        return cls(n, np.zeros((n, 0), dtype=object))

    def contains(self, vectors, field=QQ):
        vectors = columns(vectors, self.ambient_dim)
        return rank(hstack([self.basis, vectors], self.ambient_dim), field) == self.dim


def kernel_basis(matrix, field=QQ):
    m = np.asarray(matrix, dtype=object)
    rows, cols = m.shape
    if rows == 0 or m.size == 0:
        return Subspace.full(cols)
    r_mat, pivots = row_reduce(m, field)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = np.zeros((cols, len(free)), dtype=object)
    for j, f in enumerate(free):
        basis[f, j] = 1
        if pivots:
            basis[pivots, j] = -r_mat[:len(pivots), f]
    return Subspace(cols, field.reduce(basis))


def image_basis(matrix, field=QQ):
    m = field.reduce(np.asarray(matrix, dtype=object))
    rows = m.shape[0]
    if m.size == 0:
        return Subspace.zero(rows)
    _, pivots = row_reduce(m, field)
    return Subspace(rows, m[:, pivots])


def solve(a, b, field=QQ):
    """Some X with a·X = b; free variables are set to zero."""
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    rows, cols = a.shape
    b = columns(b, rows)
    k = b.shape[1]
    x = np.zeros((cols, k), dtype=object)
    if rows == 0:
        return x
    r_mat, pivots = row_reduce(hstack([a, b], rows), field)
    if any(p >= cols for p in pivots):
        raise InconsistentSystem("right-hand side is not in the column span")
    for i, p in enumerate(pivots):
        x[p] = r_mat[i, cols:]
    return x


def inverse(matrix, field=QQ):
    m = np.asarray(matrix, dtype=object)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError(f"cannot invert a {m.shape} matrix")
    r_mat, pivots = row_reduce(hstack([m, np.eye(n, dtype=object)], n), field)
    if pivots[:n] != list(range(n)):
        raise InconsistentSystem("matrix is singular")
    return r_mat[:, n:]


def left_inverse(k, field=QQ):
    """L with L·k = id for a full column rank ``k``."""
    k = np.asarray(k, dtype=object)
    n, m = k.shape
    left = np.zeros((m, n), dtype=object)
    if m == 0:
        return left
    _, rows = row_reduce(k.T, field)
    if len(rows) != m:
        raise InconsistentSystem("columns are not independent")
    left[:, rows] = inverse(k[rows, :], field)
    return left


@dataclass(eq=False)
class Subquotient:
    """cycles / boundaries with a section and the coordinate maps of a completed basis.

    ``projection`` gives homology coordinates of a cycle, ``residual``
    vanishes exactly on cycles, ``boundary_rows`` are the coordinates along
    the boundary basis.
    """

    field: FieldSpec
    ambient_dim: int
    cycles: Subspace
    boundaries: Subspace
    section: np.ndarray
    projection: np.ndarray
    boundary_rows: np.ndarray
    residual: np.ndarray

    @property
    def dim(self):
        return self.section.shape[1]

    def classes(self, vectors):
        return self.field.reduce(mat(self.projection, vectors))

    def representatives(self, coords):
        return self.field.reduce(mat(self.section, coords))

    def is_cycle(self, vectors):
        return self.field.is_zero(mat(self.residual, vectors))

    def is_boundary(self, vectors):
        return self.is_cycle(vectors) and self.field.is_zero(mat(self.projection, vectors))


def subquotient(cycles, boundaries, field=QQ):
    n = cycles.ambient_dim
    if boundaries.ambient_dim != n:
        raise ContainmentViolation(
            f"ambient mismatch: cycles in {n}, boundaries in {boundaries.ambient_dim}"
        )
    z = image_basis(cycles.basis, field).basis
    bd = image_basis(boundaries.basis, field).basis
    try:
        coords = solve(z, bd, field)
    except InconsistentSystem:
        raise ContainmentViolation("boundaries are not contained in cycles")
    _, cpiv = row_reduce(coords.T, field)
    taken = set(cpiv)
    section = z[:, [j for j in range(z.shape[1]) if j not in taken]]
    _, zpiv = row_reduce(z.T, field)
    filled = set(zpiv)
    extra = np.eye(n, dtype=object)[:, [i for i in range(n) if i not in filled]]
    v_inv = inverse(hstack([bd, section, extra], n), field)
    nb, ns = bd.shape[1], section.shape[1]
    return Subquotient(
        field=field,
        ambient_dim=n,
        cycles=Subspace(n, z),
        boundaries=Subspace(n, bd),
        section=section,
        projection=v_inv[nb:nb + ns],
        boundary_rows=v_inv[:nb],
        residual=v_inv[nb + ns:],
    )


def induced_map(f, src, dst, field=QQ):
    """Matrix of the map induced on subquotients, in section bases.

    ``src`` and ``dst`` may also be homology entries wrapping a subquotient.
    """
    src = getattr(src, "subquotient", src)
    dst = getattr(dst, "subquotient", dst)
    f = np.asarray(f, dtype=object)
    if f.shape != (dst.ambient_dim, src.ambient_dim):
        raise NotAChainMap(
            f"shape {f.shape} does not map {src.ambient_dim} into {dst.ambient_dim}"
        )
    if not dst.is_cycle(mat(f, src.cycles.basis)):
        raise NotAChainMap("image of a cycle is not a cycle")
    if not dst.is_boundary(mat(f, src.boundaries.basis)):
        raise NotAChainMap("image of a boundary is not a boundary")
    return field.reduce(mat(dst.projection, mat(f, src.section)))
