"""Finite quadratic forms (A, q) with Q/2Z-valued q and Q/Z-valued pairing.

Elements of ``A = Z/n_1 x ... x Z/n_r`` are plain integer tuples reduced
componentwise.  Isometries are integer matrices whose column ``i`` is the
image of generator ``g_i``; they compose as ordinary matrices reduced row by
row.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterator, NamedTuple, Sequence

from .errors import BudgetExceeded, ValidationError
from .lattice import GramLattice, Matrix, RationalVector, matvec, smith_normal_form

DEFAULT_BUDGET = 20000

Element = tuple[int, ...]


def default_budget() -> int:
    env = os.environ.get("HEEGNER_LAB_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


def mod2(x) -> Fraction:
    return Fraction(x) % 2


def mod1(x) -> Fraction:
    return Fraction(x) % 1


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def symmetric_mod2(x: Fraction) -> Fraction:
    """Representative of ``x mod 2`` in (-1, 1]."""
    x = mod2(x)
    return x - 2 if x > 1 else x


@dataclass(frozen=True)
class FiniteQuadraticForm:
    orders: tuple[int, ...]
    q_gen: tuple[Fraction, ...]
    pairing: tuple[tuple[Fraction, ...], ...]
    lifts: tuple[RationalVector, ...] | None = field(default=None, compare=False, repr=False)
    # Maps a dual vector to generator coordinates; set by the constructors below.
    locator: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        r = len(orders)
        q = tuple(mod2(v) for v in self.q_gen)
        b = tuple(tuple(mod1(v) for v in row) for row in self.pairing)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "q_gen", q)
        object.__setattr__(self, "pairing", b)
        if len(q) != r or len(b) != r or any(len(row) != r for row in b):
            raise ValidationError("orders, q_gen and pairing have inconsistent sizes")
        if any(n < 1 for n in orders):
            raise ValidationError("generator orders must be positive")
        for i in range(r):
            if mod2(orders[i] ** 2 * q[i]) != 0:
                raise ValidationError(f"q is not well defined on generator {i}")
            if mod1(b[i][i] - q[i]) != 0:
                raise ValidationError(f"pairing and q disagree on generator {i}")
            for j in range(r):
                if b[i][j] != b[j][i]:
                    raise ValidationError("pairing must be symmetric")
                if mod1(orders[i] * b[i][j]) != 0:
                    raise ValidationError("pairing is not well defined")

    @classmethod
    def orthogonal_sum(cls, orders: Sequence[int], q_gen: Sequence) -> FiniteQuadraticForm:
        """Generators pairwise orthogonal; b(g_i, g_i) is forced to q(g_i) mod 1."""
        r = len(orders)
        pairing = tuple(tuple(Fraction(q_gen[i]) if i == j else Fraction(0) for j in range(r)) for i in range(r))
        return cls(tuple(orders), tuple(Fraction(v) for v in q_gen), pairing)

    # -- group structure ---------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    def zero(self) -> Element:
        return (0,) * self.rank

    def reduce(self, x: Sequence[int]) -> Element:
        if len(x) != self.rank:
            raise ValidationError("coordinate length does not match the number of generators")
        return tuple(int(v) % n for v, n in zip(x, self.orders))

    def add(self, x: Element, y: Element) -> Element:
        return tuple((a + b) % n for a, b, n in zip(x, y, self.orders))

    def neg(self, x: Element) -> Element:
        return tuple(-a % n for a, n in zip(x, self.orders))

    def scale(self, k: int, x: Element) -> Element:
        return tuple(k * a % n for a, n in zip(x, self.orders))

    def order(self, x: Element) -> int:
        return math.lcm(*(n // math.gcd(a, n) for a, n in zip(x, self.orders))) if x else 1

    def elements(self) -> Iterator[Element]:
        return itertools.product(*(range(n) for n in self.orders))

    def generator(self, i: int) -> Element:
        return tuple(int(j == i) % self.orders[j] for j in range(self.rank))

    # -- form ----------------------------------------------------------------

    def q(self, x: Sequence[int]) -> Fraction:
        x = self.reduce(x)
        r = self.rank
        val = sum(x[i] * x[i] * self.q_gen[i] for i in range(r))
        val += 2 * sum(x[i] * x[j] * self.pairing[i][j] for i in range(r) for j in range(i + 1, r))
        return mod2(val)

    def b(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        r = self.rank
        return mod1(sum(x[i] * y[j] * self.pairing[i][j] for i in range(r) for j in range(r)))

    @cached_property
    def _integer_form(self):
        """(N, Qd, P): q(g_i) = Qd[i]/N mod 2 and b(g_i, g_j) = P[i][j]/N mod 1."""
        dens = [v.denominator for v in self.q_gen] + [v.denominator for row in self.pairing for v in row]
        N = math.lcm(1, *dens)
        Qd = tuple(int(v * N) for v in self.q_gen)
        P = tuple(tuple(int(v * N) for v in row) for row in self.pairing)
        return N, Qd, P

    def q_num(self, x: Element) -> int:
        N, Qd, P = self._integer_form
        r = self.rank
        val = sum(x[i] * x[i] * Qd[i] for i in range(r))
        val += 2 * sum(x[i] * x[j] * P[i][j] for i in range(r) for j in range(i + 1, r))
        return val % (2 * N)

    def b_num(self, x: Element, y: Element) -> int:
        N, _, P = self._integer_form
        r = self.rank
        return sum(x[i] * y[j] * P[i][j] for i in range(r) for j in range(r)) % N

    # -- lifts -----------------------------------------------------------------

    def element_of(self, x: RationalVector) -> Element:
        """Coordinates of the class of a dual vector."""
        if self.locator is None:
            raise ValidationError("this form carries no lattice data to locate dual vectors")
        if not x.is_dual_member():
            raise ValidationError("vector is not in the dual lattice")
        return self.locator(x)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "orders": list(self.orders),
            "q_gen": [format_rational(symmetric_mod2(v)) for v in self.q_gen],
            "pairing": [[format_rational(v) for v in row] for row in self.pairing],
        }

    @classmethod
    def from_json(cls, data: dict) -> FiniteQuadraticForm:
        return cls(
            tuple(data["orders"]),
            tuple(Fraction(v) for v in data["q_gen"]),
            tuple(tuple(Fraction(v) for v in row) for row in data["pairing"]),
        )

    def same_form(self, other: FiniteQuadraticForm) -> bool:
        return (self.orders, self.q_gen, self.pairing) == (other.orders, other.q_gen, other.pairing)


class _SmithLocator:
    """Coordinates of dual vectors via the Smith transform (``U @ gram`` rows)."""

    def __init__(self, rows, orders):
        self.rows = rows
        self.orders = orders

    def __call__(self, x: RationalVector) -> Element:
        vals = matvec(self.rows, x.coords)
        return tuple(int(v) % n for v, n in zip(vals, self.orders))


class _TableLocator:
    """Coordinates in a chosen generating set, via a lookup table over the group."""

    def __init__(self, base: FiniteQuadraticForm, table: dict):
        self.base = base
        self.table = table

    def __call__(self, x: RationalVector) -> Element:
        return self.table[self.base.element_of(x)]


def discriminant_form(L: GramLattice) -> FiniteQuadraticForm:
    """(A_L, q_L) with generators taken from the Smith normal form of the Gram matrix.

    Generator ``i`` lifts to ``V[:, i] / d_i`` where ``U @ gram @ V = diag(d)``.
    """
    S = smith_normal_form(L.gram)
    n = L.rank
    keep = [i for i, d in enumerate(S.elementary_divisors) if d > 1]
    orders = tuple(S.elementary_divisors[i] for i in keep)
    lifts = tuple(
        L.rational([Fraction(S.V[r][i], S.elementary_divisors[i]) for r in range(n)]) for i in keep
    )
    UG = [matvec(L.gram, [S.U[i][c] for c in range(n)]) for i in keep]  # gram symmetric: (U gram)_i = gram @ U_i
    q_gen = tuple(x.dot(x) for x in lifts)
    pairing = tuple(tuple(x.dot(y) for y in lifts) for x in lifts)
    return FiniteQuadraticForm(orders, q_gen, pairing, lifts, _SmithLocator(UG, orders))


def form_from_lifts(L: GramLattice, lifts: Sequence[RationalVector], budget: int | None = None) -> FiniteQuadraticForm:
    """(A_L, q_L) presented on the given dual vectors, which must form a basis.

    The result locates dual vectors in the new generators through an explicit
    table, so it never relies on any closed formula for the coordinates.
    """
    budget = default_budget() if budget is None else budget
    base = discriminant_form(L)
    if base.size > budget:
        raise BudgetExceeded(base.size, budget)
    gens = [base.element_of(x) for x in lifts]
    orders = tuple(base.order(g) for g in gens)
    if math.prod(orders) != base.size:
        raise ValidationError("lifts do not form a basis of the discriminant group")
    table = {}
    for coeffs in itertools.product(*(range(n) for n in orders)):
        el = base.zero()
        for c, g in zip(coeffs, gens):
            el = base.add(el, base.scale(c, g))
        table[el] = coeffs
    if len(table) != base.size:
        raise ValidationError("lifts do not form a basis of the discriminant group")
    q_gen = tuple(x.dot(x) for x in lifts)
    pairing = tuple(tuple(x.dot(y) for y in lifts) for x in lifts)
    return FiniteQuadraticForm(orders, q_gen, pairing, tuple(lifts), _TableLocator(base, table))


def eval_q(A: FiniteQuadraticForm, x: Sequence[int]) -> Fraction:
    return A.q(x)


# ----------------------------------------------------------------------------
# Isometries


@dataclass(frozen=True, order=True)
class DiscIsometry:
    matrix: Matrix

    @classmethod
    def of(cls, A: FiniteQuadraticForm, rows) -> DiscIsometry:
        return cls(tuple(tuple(int(v) % n for v in row) for row, n in zip(rows, A.orders)))

    @classmethod
    def identity(cls, A: FiniteQuadraticForm) -> DiscIsometry:
        return cls.of(A, [[int(i == j) for j in range(A.rank)] for i in range(A.rank)])

    @classmethod
    def diagonal(cls, A: FiniteQuadraticForm, diag: Sequence[int]) -> DiscIsometry:
        return cls.of(A, [[diag[i] if i == j else 0 for j in range(A.rank)] for i in range(A.rank)])

    def column(self, j: int) -> Element:
        return tuple(row[j] for row in self.matrix)

    def apply(self, A: FiniteQuadraticForm, x: Sequence[int]) -> Element:
        return A.reduce(matvec(self.matrix, x))

    def compose(self, A: FiniteQuadraticForm, other: DiscIsometry) -> DiscIsometry:
        """Matrix product ``self @ other``, i.e. apply ``other`` first."""
        r = A.rank
        return DiscIsometry.of(
            A, [[sum(self.matrix[i][k] * other.matrix[k][j] for k in range(r)) for j in range(r)] for i in range(r)]
        )

    def negate(self, A: FiniteQuadraticForm) -> DiscIsometry:
        return DiscIsometry.of(A, [[-v for v in row] for row in self.matrix])

    def inverse(self, A: FiniteQuadraticForm) -> DiscIsometry:
        ident = DiscIsometry.identity(A)
        prev, cur = ident, self
        for _ in range(A.size * A.size + 1):
            if cur == ident:
                return prev
            prev, cur = cur, cur.compose(A, self)
        raise ValidationError("matrix is not invertible on A")

    def to_json(self) -> list[list[int]]:
        return [list(row) for row in self.matrix]

    @classmethod
    def from_json(cls, data) -> DiscIsometry:
        return cls(tuple(tuple(int(v) for v in row) for row in data))


def _subgroup_with(A: FiniteQuadraticForm, subgroup: set, y: Element, n: int) -> set | None:
    """``subgroup + <y>`` if ``<y>`` (of order n) meets ``subgroup`` trivially, else None."""
    multiples = [A.scale(k, y) for k in range(n)]
    if any(m in subgroup for m in multiples[1:]):
        return None
    return {A.add(s, m) for s in subgroup for m in multiples}


def is_isometry(A: FiniteQuadraticForm, M: Sequence[Sequence[int]]) -> bool:
    """Whether ``M`` defines an automorphism of A preserving q."""
    r = A.rank
    if len(M) != r or any(len(row) != r for row in M):
        return False
    cols = [A.reduce([M[i][j] for i in range(r)]) for j in range(r)]
    for j, y in enumerate(cols):
        if A.scale(A.orders[j], y) != A.zero() or A.order(y) != A.orders[j]:
            return False
        if A.q(y) != A.q_gen[j]:
            return False
        for i in range(j):
            if A.b(cols[i], y) != A.pairing[i][j]:
                return False
    subgroup = {A.zero()}
    for j, y in enumerate(cols):
        subgroup = _subgroup_with(A, subgroup, y, A.orders[j])
        if subgroup is None:
            return False
    return True


def enumerate_isometries(A: FiniteQuadraticForm, budget: int | None = None) -> list[DiscIsometry]:
    """All of O(A) by brute force, sorted lexicographically by matrix.

    Generator images are filtered by order and q value, then by the pairing
    with images already chosen; injectivity is enforced incrementally.
    """
    budget = default_budget() if budget is None else budget
    if A.size > budget:
        raise BudgetExceeded(A.size, budget)
    r = A.rank
    if r == 0:
        return [DiscIsometry(())]
    N, Qd, P = A._integer_form
    two_n = 2 * N
    candidates = [[] for _ in range(r)]
    for x in A.elements():
        qx = A.q_num(x)
        ox = None
        for i in range(r):
            if qx == Qd[i] % two_n:
                if ox is None:
                    ox = A.order(x)
                if ox == A.orders[i]:
                    candidates[i].append(x)

    found = []

    def extend(i, images, subgroup):
        if i == r:
            found.append(images)
            return
        for y in candidates[i]:
            if any(A.b_num(images[j], y) != P[j][i] % N for j in range(i)):
                continue
            if i == r - 1:
                multiples = (A.scale(k, y) for k in range(1, A.orders[i]))
                if any(m in subgroup for m in multiples):
                    continue
                extend(i + 1, images + [y], None)
            else:
                nxt = _subgroup_with(A, subgroup, y, A.orders[i])
                if nxt is not None:
                    extend(i + 1, images + [y], nxt)

    extend(0, [], {A.zero()})
    return sorted(DiscIsometry(tuple(tuple(img[row] for img in images) for row in range(r))) for images in found)


class KNormality(NamedTuple):
    normal: bool
    witness: DiscIsometry | None = None
    conjugate: DiscIsometry | None = None


def s_involution(A: FiniteQuadraticForm) -> DiscIsometry:
    """diag(1, -1) in a two-generator presentation."""
    if A.rank != 2:
        raise ValidationError("s = diag(1,-1) needs exactly two generators", rule="two_generator_presentation")
    return DiscIsometry.diagonal(A, (1, -1))


def is_K_normal(A: FiniteQuadraticForm, budget: int | None = None, group: list[DiscIsometry] | None = None) -> KNormality:
    """Is K = {id, s} normal in O(A)?  On failure returns g and g^-1 s g.

    Among failing g the witness is an involution when one exists (then g^-1 = g);
    ties are broken by the smallest conjugate, then the smallest g.
    """
    s = s_involution(A)
    ident = DiscIsometry.identity(A)
    K = {ident, s}
    group = enumerate_isometries(A, budget) if group is None else group
    failures = []
    for g in group:
        conj = g.inverse(A).compose(A, s).compose(A, g)
        if conj not in K:
            failures.append((g, conj))
    if not failures:
        return KNormality(True)
    involutions = [f for f in failures if f[0].compose(A, f[0]) == ident]
    g, conj = min(involutions or failures, key=lambda f: (f[1], f[0]))
    return KNormality(False, g, conj)


def is_abelian(A: FiniteQuadraticForm, group: Sequence[DiscIsometry]) -> bool:
    return all(g.compose(A, h) == h.compose(A, g) for g, h in itertools.combinations(group, 2))


def find_isomorphism(A: FiniteQuadraticForm, B: FiniteQuadraticForm) -> list[Element] | None:
    """Images in B of A's generators realizing an isometry A -> B, or None.

    Brute force: images must match order, q and pairings and be independent.
    """
    if sorted(A.orders) != sorted(B.orders) and A.size != B.size:
        return None
    if A.size != B.size:
        return None
    r = A.rank
    cands = [[y for y in B.elements() if B.order(y) == A.orders[i] and B.q(y) == A.q_gen[i]] for i in range(r)]

    def extend(i, images, subgroup):
        if i == r:
            return images if len(subgroup) == B.size else None
        for y in cands[i]:
            if any(B.b(images[j], y) != A.pairing[j][i] for j in range(i)):
                continue
            nxt = _subgroup_with(B, subgroup, y, A.orders[i])
            if nxt is not None:
                res = extend(i + 1, images + [y], nxt)
                if res is not None:
                    return res
        return None

    return extend(0, [], {B.zero()})
