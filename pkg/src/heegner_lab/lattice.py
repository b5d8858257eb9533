"""Exact arithmetic on even lattices given by integer Gram matrices.

Everything here is integer or ``Fraction`` arithmetic; no floats.
Matrices are tuples of row tuples so that lattices and vectors are hashable
and immutable.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

from .errors import ValidationError

Matrix = tuple[tuple[int, ...], ...]


def as_matrix(rows: Iterable[Iterable[int]]) -> Matrix:
    return tuple(tuple(int(v) for v in row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> tuple:
    cols = list(zip(*B)) if B else []
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in A)


def matvec(A: Sequence[Sequence], x: Sequence) -> tuple:
    return tuple(sum(a * b for a, b in zip(row, x)) for row in A)


def transpose(A: Sequence[Sequence]) -> tuple:
    return tuple(zip(*A))


def det(A: Sequence[Sequence[int]]) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(row) for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def gcd_all(values: Iterable[int]) -> int:
    return reduce(math.gcd, values, 0)


# ----------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal.

    Equivalently ``A == U^-1 @ D @ V^-1``.  The nonzero diagonal entries of
    ``D`` are the elementary divisors, each dividing the next.
    """

    U: Matrix
    D: Matrix
    V: Matrix
    elementary_divisors: tuple[int, ...]

    def check(self, A: Sequence[Sequence[int]]) -> bool:
        return matmul(matmul(self.U, A), self.V) == self.D

    @property
    def rank(self) -> int:
        return len(self.elementary_divisors)


def smith_normal_form(A: Sequence[Sequence[int]]) -> SmithDecomposition:
    """Smith normal form of an arbitrary integer matrix, with transforms."""
    m = len(A)
    n = len(A[0]) if m else 0
    D = [list(map(int, row)) for row in A]
    U = [list(r) for r in identity(m)]
    V = [list(r) for r in identity(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        for M in (D, U):
            rs, rd = M[src], M[dst]
            for c in range(len(rd)):
                rd[c] += q * rs[c]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for M in (D, V):
            for row in M:
                row[dst] += q * row[src]

    divisors = []
    for k in range(min(m, n)):
        while True:
            best = None
            for i in range(k, m):
                for j in range(k, n):
                    v = D[i][j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
            if best is None:
                break
            _, i, j = best
            if i != k:
                swap_rows(i, k)
            if j != k:
                swap_cols(j, k)
            p = D[k][k]
            clean = True
            for i in range(k + 1, m):
                q = D[i][k] // p
                if q:
                    add_row(i, k, -q)
                if D[i][k]:
                    clean = False
            for j in range(k + 1, n):
                q = D[k][j] // p
                if q:
                    add_col(j, k, -q)
                if D[k][j]:
                    clean = False
            if not clean:
                continue
            bad = next(
                (i for i in range(k + 1, m) for j in range(k + 1, n) if D[i][j] % p),
                None,
            )
            if bad is not None:
                add_row(k, bad, 1)
                continue
            break
        if best is None:
            break
        if D[k][k] < 0:
            for M in (D, U):
                M[k] = [-v for v in M[k]]
        divisors.append(D[k][k])
    return SmithDecomposition(as_matrix(U), as_matrix(D), as_matrix(V), tuple(divisors))


def integer_kernel(A: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """A Z-basis of {x in Z^n : A x = 0}."""
    n = len(A[0])
    S = smith_normal_form(A)
    return [tuple(S.V[i][j] for i in range(n)) for j in range(S.rank, n)]


# ----------------------------------------------------------------------------
# Lattices and vectors


@dataclass(frozen=True)
class GramLattice:
    gram: Matrix
    label: str = field(default="", compare=False)

    def __post_init__(self):
        g = as_matrix(self.gram)
        object.__setattr__(self, "gram", g)
        n = len(g)
        if any(len(row) != n for row in g):
            raise ValidationError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
            raise ValidationError("Gram matrix must be symmetric")
        if any(g[i][i] % 2 for i in range(n)):
            raise ValidationError("lattice must be even (odd diagonal entry)", rule="even_lattice")
        if n and det(g) == 0:
            raise ValidationError("Gram matrix is degenerate", rule="nondegenerate")

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> int:
        return det(self.gram)

    def vector(self, coords: Iterable[int]) -> LatticeVector:
        return LatticeVector(self, tuple(coords))

    def basis(self) -> list[LatticeVector]:
        return [self.vector(row) for row in identity(self.rank)]

    def zero(self) -> LatticeVector:
        return self.vector((0,) * self.rank)

    def rational(self, coords: Iterable) -> RationalVector:
        return RationalVector(self, tuple(Fraction(c) for c in coords))

    def form(self, x: Sequence, y: Sequence):
        """Bilinear form on raw coordinate sequences (ints or Fractions)."""
        g = self.gram
        return sum(x[i] * sum(g[i][j] * y[j] for j in range(len(y)) if g[i][j]) for i in range(len(x)) if x[i])

    def is_isometry(self, P: Sequence[Sequence[int]]) -> bool:
        return matmul(matmul(transpose(P), self.gram), P) == self.gram


@dataclass(frozen=True)
class LatticeVector:
    lattice: GramLattice
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        if len(self.coords) != self.lattice.rank:
            raise ValidationError("coordinate length does not match lattice rank")

    def __add__(self, other: LatticeVector) -> LatticeVector:
        _same(self, other)
        return LatticeVector(self.lattice, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: LatticeVector) -> LatticeVector:
        return self + (-other)

    def __neg__(self) -> LatticeVector:
        return LatticeVector(self.lattice, tuple(-a for a in self.coords))

    def __mul__(self, k: int) -> LatticeVector:
        return LatticeVector(self.lattice, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    @property
    def square(self) -> int:
        return pair(self, self)

    def as_rational(self) -> RationalVector:
        return self.lattice.rational(self.coords)


@dataclass(frozen=True)
class RationalVector:
    """An element of the rational span; dual-lattice members are the interesting ones."""

    lattice: GramLattice
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))
        if len(self.coords) != self.lattice.rank:
            raise ValidationError("coordinate length does not match lattice rank")

    def __add__(self, other):
        _same(self, other)
        return RationalVector(self.lattice, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return RationalVector(self.lattice, tuple(-a for a in self.coords))

    def __mul__(self, k):
        return RationalVector(self.lattice, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def dot(self, other) -> Fraction:
        _same(self, other)
        return Fraction(self.lattice.form(self.coords, other.coords))

    def dual_pairings(self) -> tuple[Fraction, ...]:
        """Pairings with the basis vectors, i.e. ``gram @ coords``."""
        return matvec(self.lattice.gram, self.coords)

    def is_dual_member(self) -> bool:
        return all(v.denominator == 1 for v in self.dual_pairings())

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)

    def to_lattice(self) -> LatticeVector:
        if not self.is_integral():
            raise ValidationError("rational vector is not in the lattice")
        return LatticeVector(self.lattice, tuple(int(c) for c in self.coords))


def _same(x, y):
    if x.lattice != y.lattice:
        raise ValidationError("vectors belong to different lattices", rule="lattice_mismatch")


def pair(x: LatticeVector, y: LatticeVector) -> int:
    _same(x, y)
    return x.lattice.form(x.coords, y.coords)


def divisibility(x: LatticeVector) -> int:
    """Positive generator of the ideal ``x . L`` in Z."""
    if x.is_zero():
        raise ValidationError("divisibility of the zero vector is undefined")
    return gcd_all(matvec(x.lattice.gram, x.coords))


def is_primitive(x: LatticeVector) -> bool:
    if x.is_zero():
        raise ValidationError("primitivity of the zero vector is undefined")
    return gcd_all(x.coords) == 1


def star(x: LatticeVector) -> RationalVector:
    """``x / div(x)``: a dual vector whose class has order ``div(x)``."""
    n = divisibility(x)
    return RationalVector(x.lattice, tuple(Fraction(c, n) for c in x.coords))


# ----------------------------------------------------------------------------
# Constructors

# Negated Cartan matrix of E8: chain 0-1-2-3-4-5-6 with node 7 attached to node 4.
_E8_EDGES = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)]


def e8_minus() -> GramLattice:
    g = [[-2 if i == j else 0 for j in range(8)] for i in range(8)]
    for i, j in _E8_EDGES:
        g[i][j] = g[j][i] = 1
    return GramLattice(as_matrix(g), "E8(-1)")


def hyperbolic_U() -> GramLattice:
    return GramLattice(((0, 1), (1, 0)), "U")


def rank_one(n: int) -> GramLattice:
    if n == 0 or n % 2:
        raise ValidationError(f"Z({n}) is not a nonzero even lattice", rule="even_lattice")
    return GramLattice(((n,),), f"Z({n})")


def direct_sum(*blocks: GramLattice) -> GramLattice:
    n = sum(b.rank for b in blocks)
    g = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b.gram):
            g[off + i][off: off + b.rank] = row
        off += b.rank
    label = " + ".join(b.label for b in blocks if b.label)
    return GramLattice(as_matrix(g), label)


def unimodular_M(rank: int) -> GramLattice | None:
    """An even unimodular lattice U^a + E8(-1)^b of the given rank (None for rank 0).

    Rank 20 gives the K3 unimodular part U^2 + E8(-1)^2.
    """
    if rank < 0 or rank % 2:
        raise ValidationError(f"no even unimodular lattice of rank {rank} in this family")
    if rank == 0:
        return None
    e8s = max(0, (rank - 4) // 8)
    us = (rank - 8 * e8s) // 2
    return direct_sum(*([hyperbolic_U()] * us + [e8_minus()] * e8s))


_BLOCK_RE = re.compile(r"^\s*(U|E8\(-1\)|Z\((-?\d+)\))\s*$")


def parse_block(name: str) -> GramLattice:
    m = _BLOCK_RE.match(name)
    if not m:
        raise ValidationError(f"unknown lattice block {name!r}", rule="lattice_description")
    if m.group(1) == "U":
        return hyperbolic_U()
    if m.group(1) == "E8(-1)":
        return e8_minus()
    return rank_one(int(m.group(2)))


def parse_lattice_description(desc) -> GramLattice:
    """Accepts ``{"blocks": [...]}`` (dict or JSON text) or a "⊕"/"+"/","-separated string."""
    if isinstance(desc, str):
        text = desc.strip()
        if text.startswith("{"):
            desc = json.loads(text)
        else:
            desc = {"blocks": [p for p in re.split(r"[⊕+,]", text) if p.strip()]}
    blocks = desc.get("blocks") if isinstance(desc, dict) else None
    if not blocks:
        raise ValidationError("lattice description needs a nonempty 'blocks' list", rule="lattice_description")
    return direct_sum(*(parse_block(b) for b in blocks))
