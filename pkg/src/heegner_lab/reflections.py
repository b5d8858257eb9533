"""Reflections in h-perp = M + Z k + Z l (divisibility-one polarizations).

Two independent routes compute the action of a reflection on the
discriminant group Z/2d x Z/2t = <k_*> x <l_*>:

* ``induced_disc_matrix`` uses the closed formula in the symbols (a, m^2, b, c);
* ``induced_disc_oracle`` materializes the lattice, reflects explicit dual
  lifts and reduces them through a lookup table.

``numerical_label`` is the purely numerical criterion; ``classify_reflection``
checks it against the closed-form matrix every time it is called.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

from .discform import DiscIsometry, FiniteQuadraticForm, form_from_lifts
from .errors import NotAReflection, NormalityNotEstablished, ValidationError
from .lattice import (
    GramLattice,
    LatticeVector,
    RationalVector,
    direct_sum,
    divisibility,
    is_primitive,
    pair,
    rank_one,
    star,
    unimodular_M,
)

LABELS = ("id", "s", "minus_s", "minus_id", "nontrivial")


@dataclass(frozen=True)
class SymbolicPerpVector:
    """beta = a*m + b*k + c*l with m a primitive vector of M of square ``msq``."""

    a: int
    msq: int
    b: int
    c: int

    def __post_init__(self):
        if self.a == 0 and self.msq != 0:
            object.__setattr__(self, "msq", 0)
        if self.msq % 2:
            raise ValidationError("m^2 must be even (M is an even lattice)")

    @classmethod
    def parse(cls, text: str) -> SymbolicPerpVector:
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValidationError("beta must be given as a,msq,b,c")
        return cls(*(int(p) for p in parts))

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.msq, self.b, self.c)

    def square(self, t: int, d: int) -> int:
        return self.a * self.a * self.msq - 2 * d * self.b ** 2 - 2 * t * self.c ** 2

    def div(self, t: int, d: int) -> int:
        return math.gcd(self.a, 2 * d * self.b, 2 * t * self.c)

    def is_primitive(self) -> bool:
        return math.gcd(self.a, self.b, self.c) == 1

    def dot_k(self, d: int) -> int:
        return -2 * d * self.b

    def dot_l(self, t: int) -> int:
        return -2 * t * self.c

    def beta_star(self, t: int, d: int) -> tuple[int, int]:
        """Class of beta/div(beta) in Z/2d x Z/2t."""
        n = self.div(t, d)
        return ((2 * d * self.b // n) % (2 * d), (2 * t * self.c // n) % (2 * t))

    def negate(self) -> SymbolicPerpVector:
        return SymbolicPerpVector(-self.a, self.msq, -self.b, -self.c)

    def canonical_sign(self) -> SymbolicPerpVector:
        """beta and -beta give the same class: make the first nonzero of (a, b, c) positive."""
        first = next((v for v in (self.a, self.b, self.c) if v), 0)
        return self.negate() if first < 0 else self

    def to_json(self) -> list[int]:
        return list(self.as_tuple())


# ----------------------------------------------------------------------------
# Explicit lattice route


@lru_cache(maxsize=None)
def explicit_perp(t: int, d: int, m_rank: int = 2) -> GramLattice:
    """M + Z(-2d) + Z(-2t) with M = U^a + E8(-1)^b; the last two coordinates are k, l."""
    M = unimodular_M(m_rank)
    blocks = ([M] if M else []) + [rank_one(-2 * d), rank_one(-2 * t)]
    return direct_sum(*blocks)


def lift(beta: SymbolicPerpVector, t: int, d: int, m_rank: int = 2) -> LatticeVector:
    """Concrete vector: m = e + (msq/2) f in the first hyperbolic plane of M."""
    L = explicit_perp(t, d, m_rank)
    if beta.a and m_rank < 2:
        raise ValidationError("a nonzero M-component needs m_rank >= 2")
    mpart = [0] * m_rank
    if m_rank >= 2:
        mpart[0], mpart[1] = beta.a, beta.a * beta.msq // 2
    return L.vector(mpart + [beta.b, beta.c])


def defines_reflection(L: GramLattice, beta: LatticeVector) -> bool:
    """r_beta is integral iff beta^2 divides 2 div(beta) (beta primitive, anisotropic)."""
    if not is_primitive(beta):
        raise ValidationError("beta must be primitive")
    sq = pair(beta, beta)
    if sq == 0:
        raise ValidationError("beta must be anisotropic")
    return (2 * divisibility(beta)) % sq == 0


Vec = Union[LatticeVector, RationalVector]


def reflect(L: GramLattice, beta: LatticeVector, x: Vec) -> Vec:
    """x - (2 x.beta / beta^2) beta."""
    sq = pair(beta, beta)
    if isinstance(x, LatticeVector):
        num = 2 * pair(x, beta)
        if num % sq:
            raise NotAReflection("r_beta does not preserve the lattice")
        return x - beta * (num // sq)
    coef = 2 * x.dot(beta.as_rational()) / sq
    return x - beta.as_rational() * coef


@lru_cache(maxsize=None)
def star_basis_form(t: int, d: int, m_rank: int = 2) -> FiniteQuadraticForm:
    """A = <k/2d> x <l/2t>, located by table lookup over the Smith presentation."""
    L = explicit_perp(t, d, m_rank)
    n = L.rank
    k_star = L.rational([0] * (n - 2) + [Fraction(1, 2 * d), 0])
    l_star = L.rational([0] * (n - 1) + [Fraction(1, 2 * t)])
    return form_from_lifts(L, [k_star, l_star], budget=4 * t * d)


def induced_disc_oracle(t: int, d: int, beta: SymbolicPerpVector, m_rank: int = 2) -> DiscIsometry:
    """Action of r_beta on A computed on explicit lifts, no closed formula involved."""
    L = explicit_perp(t, d, m_rank)
    A = star_basis_form(t, d, m_rank)
    v = lift(beta, t, d, m_rank)
    if not defines_reflection(L, v):
        raise NotAReflection(f"{beta} does not define a reflection")
    cols = [A.element_of(reflect(L, v, g)) for g in A.lifts]
    return DiscIsometry.of(A, [[cols[j][i] for j in range(A.rank)] for i in range(A.rank)])


def explicit_beta_star(t: int, d: int, beta: SymbolicPerpVector, m_rank: int = 2) -> tuple[int, ...]:
    v = lift(beta, t, d, m_rank)
    return star_basis_form(t, d, m_rank).element_of(star(v))


# ----------------------------------------------------------------------------
# Closed formula route


def _check_reflection(t: int, d: int, beta: SymbolicPerpVector) -> int:
    if not beta.is_primitive():
        raise ValidationError(f"beta = {beta.as_tuple()} is not primitive")
    sq = beta.square(t, d)
    if sq >= 0:
        raise ValidationError(f"beta^2 = {sq} must be negative")
    if (2 * beta.div(t, d)) % sq:
        raise NotAReflection(f"beta^2 = {sq} does not divide 2 div(beta) = {2 * beta.div(t, d)}")
    return sq


def _exact(num: int, den: int) -> int:
    q, r = divmod(num, den)
    if r:
        raise AssertionError(f"{num}/{den} is not an integer")
    return q


def induced_disc_matrix(t: int, d: int, beta: SymbolicPerpVector) -> DiscIsometry:
    """[[1 + 4db^2/B, 4dbc/B], [4tbc/B, 1 + 4tc^2/B]] with B = beta^2, rows mod 2d and 2t."""
    sq = _check_reflection(t, d, beta)
    b, c = beta.b, beta.c
    rows = [
        [(1 + _exact(4 * d * b * b, sq)) % (2 * d), _exact(4 * d * b * c, sq) % (2 * d)],
        [_exact(4 * t * b * c, sq) % (2 * t), (1 + _exact(4 * t * c * c, sq)) % (2 * t)],
    ]
    return DiscIsometry(tuple(tuple(r) for r in rows))


def small_group(t: int, d: int) -> dict[str, DiscIsometry]:
    """id, s, -s, -id on Z/2d x Z/2t (some coincide when t or d is 1)."""
    A = FiniteQuadraticForm.orthogonal_sum((2 * d, 2 * t), (Fraction(-1, 2 * d), Fraction(-1, 2 * t)))
    return {
        "id": DiscIsometry.diagonal(A, (1, 1)),
        "s": DiscIsometry.diagonal(A, (1, -1)),
        "minus_s": DiscIsometry.diagonal(A, (-1, 1)),
        "minus_id": DiscIsometry.diagonal(A, (-1, -1)),
    }


def matrix_bucket(t: int, d: int, M: DiscIsometry) -> str:
    for label, g in small_group(t, d).items():
        if g == M:
            return label
    return "nontrivial"


def numerical_label(t: int, d: int, beta: SymbolicPerpVector) -> str:
    """Numerical criterion for [r_beta] to lie in {id, s, -s, -id}."""
    sq = _check_reflection(t, d, beta)
    bk, bl = beta.dot_k(d), beta.dot_l(t)
    n = 2 * t * d
    if sq == -2:
        return "id"
    if sq == -2 * t and bk % n == 0:
        return "s"
    if sq == -2 * d and bl % n == 0:
        return "minus_s"
    if sq == -n and math.gcd(t, d) == 1 and math.gcd(bk, bl) % n == 0:
        return "minus_id"
    return "nontrivial"


def label_matches(t: int, d: int, label: str, M: DiscIsometry) -> bool:
    group = small_group(t, d)
    if label == "nontrivial":
        return M not in group.values()
    return group[label] == M


@dataclass(frozen=True)
class ReflectionClass:
    beta_sq: int
    div: int
    beta_star: tuple[int, int]
    galois_label: str
    witness: SymbolicPerpVector

    def to_json(self) -> dict:
        return {
            "beta_sq": self.beta_sq,
            "div": self.div,
            "beta_star": list(self.beta_star),
            "label": self.galois_label,
            "witness": self.witness.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> ReflectionClass:
        return cls(
            data["beta_sq"], data["div"], tuple(data["beta_star"]), data["label"], SymbolicPerpVector(*data["witness"])
        )


def classify_reflection(t: int, d: int, beta: SymbolicPerpVector) -> ReflectionClass:
    label = numerical_label(t, d, beta)
    M = induced_disc_matrix(t, d, beta)
    if not label_matches(t, d, label, M):
        raise AssertionError(f"label {label} disagrees with induced matrix {M.matrix} for {beta}")
    return ReflectionClass(beta.square(t, d), beta.div(t, d), beta.beta_star(t, d), label, beta)


def canonical_star(t: int, d: int, x: tuple[int, int]) -> tuple[int, int]:
    """Smallest representative of x under {id, s, -s, -id}."""
    u, v = x
    return min(((su * u) % (2 * d), (sv * v) % (2 * t)) for su in (1, -1) for sv in (1, -1))


# ----------------------------------------------------------------------------
# Enumeration of ramification classes


def _divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def candidate_squares(t: int, d: int) -> list[int]:
    """Negative even divisors of 4 lcm(t, d), excluding -2 (always trivial)."""
    L4 = 4 * math.lcm(t, d)
    return [-n for n in _divisors(L4) if n % 2 == 0 and n != 2]


def _witness_key(v: SymbolicPerpVector):
    return (abs(v.a) + abs(v.b) + abs(v.c), v.a, abs(v.b), abs(v.c), v.b, v.c, v.msq)


def _search_square(t: int, d: int, sq: int, scale: int) -> dict:
    n = -sq
    lcm = math.lcm(t, d)
    bmax = 2 * lcm * scale
    amax = max(n, 2 * lcm) * scale
    step = n // 2
    found: dict = {}
    rng = range(-bmax, bmax + 1)
    for a in range(0, amax + 1, step):
        a2 = a * a
        for b in rng:
            sb = 2 * d * b * b
            for c in rng:
                s = sb + 2 * t * c * c
                if a == 0:
                    if s != n:
                        continue
                    msq = 0
                else:
                    rhs = s - n
                    if rhs % a2:
                        continue
                    msq = rhs // a2
                    if msq % 2:
                        continue
                if math.gcd(a, b, c) != 1:
                    continue
                beta = SymbolicPerpVector(a, msq, b, c)
                if (2 * beta.div(t, d)) % sq:
                    continue
                if numerical_label(t, d, beta) != "nontrivial":
                    continue
                key = (sq, canonical_star(t, d, beta.beta_star(t, d)))
                w = beta.canonical_sign()
                if key not in found or _witness_key(w) < _witness_key(found[key]):
                    found[key] = w
    return found


@dataclass(frozen=True)
class Enumeration:
    t: int
    d: int
    classes: tuple[ReflectionClass, ...]
    unrealized_squares: tuple[int, ...]
    scale: int


def enumerate_ramification_classes(
    m: int,
    d: int,
    budget: int | None = None,
    jobs: int = 1,
    scale: int = 1,
    check_normality: bool = True,
) -> Enumeration:
    """Nontrivial reflection classes (beta^2, canonical beta_*) for Lambda_{K3^[m]}, div(h) = 1.

    Box: 0 <= a <= max(|beta^2|, 2 lcm(t,d)) * scale in steps of |beta^2|/2,
    |b|, |c| <= 2 lcm(t,d) * scale; m^2 is solved exactly from beta^2.
    """
    t = m - 1
    if t < 1 or d < 1:
        raise ValidationError("need m >= 2 and d >= 1")
    if check_normality:
        from .hk import normality

        verdict = normality(t, d, 1, budget=budget)
        if verdict.status not in ("normal_stable", "normal"):
            raise NormalityNotEstablished(
                f"normality of the monodromy group is {verdict.status} ({verdict.reason}); refusing to enumerate"
            )
    squares = candidate_squares(t, d)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda sq: _search_square(t, d, sq, scale), squares))
    else:
        parts = [_search_square(t, d, sq, scale) for sq in squares]
    merged: dict = {}
    for part in parts:
        for key, w in part.items():
            if key not in merged or _witness_key(w) < _witness_key(merged[key]):
                merged[key] = w
    classes = []
    for (sq, bstar), w in sorted(merged.items(), key=lambda kv: (-kv[0][0], kv[0][1])):
        classes.append(ReflectionClass(sq, w.div(t, d), bstar, "nontrivial", w))
    realized = {c.beta_sq for c in classes}
    return Enumeration(t, d, tuple(classes), tuple(s for s in squares if s not in realized), scale)


def enumerate_classes_by_oracle(t: int, d: int, bound: int, msq_bound: int, m_rank: int = 2) -> dict:
    """Independent route: every primitive reflection vector in a plain box, judged by the oracle.

    Returns {(beta^2, canonical beta_*): div} for the nontrivial ones.
    """
    trivial = set(small_group(t, d).values())
    out = {}
    for beta in box_vectors(bound, msq_bound):
        v = lift(beta, t, d, m_rank)
        sq = pair(v, v)
        if sq >= 0 or (2 * divisibility(v)) % sq:
            continue
        M = induced_disc_oracle(t, d, beta, m_rank)
        if M in trivial:
            continue
        bstar = explicit_beta_star(t, d, beta, m_rank)
        out[(sq, canonical_star(t, d, bstar))] = divisibility(v)
    return out


def box_vectors(bound: int, msq_bound: int) -> Iterable[SymbolicPerpVector]:
    """Primitive (a, msq, b, c) with |a|, |b|, |c| <= bound, |msq| <= msq_bound, up to sign."""
    rng = range(-bound, bound + 1)
    for a in range(0, bound + 1):
        msqs = range(-msq_bound - (msq_bound % 2), msq_bound + 1, 2) if a else (0,)
        for b in rng:
            for c in rng:
                if math.gcd(a, b, c) != 1:
                    continue
                if a == 0 and (b < 0 or (b == 0 and c < 0)):
                    continue
                for msq in msqs:
                    if abs(msq) <= msq_bound:
                        yield SymbolicPerpVector(a, msq, b, c)
