"""Polarization vectors h in L_2t = M + U + Z(-2t) and the lattice h-perp.

The canonical representative of a polarization of square 2d and divisibility
gamma is ``h = gamma*(e + b*f) + c*l`` with ``0 <= c < gamma`` prime to gamma
and ``b = (d + t*c^2) / gamma^2``.  The non-unimodular part of h-perp has basis
``h1 = e - b*f``, ``h2 = c*(2t/gamma)*f + l``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .discform import DiscIsometry, FiniteQuadraticForm, discriminant_form, form_from_lifts
from .errors import AmbiguousPolarization, UnrealizablePolarization, UnsupportedCase, ValidationError
from .lattice import (
    GramLattice,
    LatticeVector,
    RationalVector,
    direct_sum,
    hyperbolic_U,
    rank_one,
    unimodular_M,
)

K3_M_RANK = 20


def admissible_c(t: int, d: int, gamma: int) -> list[int]:
    """All c in [0, gamma) prime to gamma with gamma^2 | d + t c^2 (needs gamma | 2t)."""
    if (2 * t) % gamma:
        return []
    return [c for c in range(gamma) if math.gcd(c, gamma) == 1 and (d + t * c * c) % (gamma * gamma) == 0]


@dataclass(frozen=True)
class PolarizationData:
    t: int
    d: int
    gamma: int
    c: int

    def __post_init__(self):
        t, d, g, c = self.t, self.d, self.gamma, self.c
        if t < 1 or d < 1 or g < 1:
            raise ValidationError("t, d and gamma must be positive")
        if (2 * t) % g:
            raise UnrealizablePolarization(f"gamma={g} does not divide 2t={2 * t}", rule="gamma_divides_2t")
        if not (0 <= c < g) or math.gcd(c, g) != 1:
            raise UnrealizablePolarization(f"c={c} must satisfy 0 <= c < gamma and gcd(c, gamma) = 1", rule="c_normal_form")
        if (d + t * c * c) % (g * g):
            raise UnrealizablePolarization(f"gamma^2 = {g * g} does not divide d + t c^2 = {d + t * c * c}")

    @property
    def b(self) -> int:
        return (self.d + self.t * self.c ** 2) // self.gamma ** 2

    @property
    def omega(self) -> int:
        return math.gcd(2 * self.t // self.gamma, self.gamma)

    @property
    def disc_size(self) -> int:
        return (2 * self.d // self.gamma) * (2 * self.t // self.gamma)

    def to_json(self) -> dict:
        return {"t": self.t, "d": self.d, "gamma": self.gamma, "c": self.c, "b": self.b}

    @classmethod
    def from_json(cls, data: dict) -> PolarizationData:
        return cls(data["t"], data["d"], data["gamma"], data["c"])


def make_polarization(t: int, d: int, gamma: int, c: int | None = None) -> PolarizationData:
    if c is not None:
        return PolarizationData(t, d, gamma, c)
    if t < 1 or d < 1 or gamma < 1:
        raise ValidationError("t, d and gamma must be positive")
    cands = admissible_c(t, d, gamma)
    if not cands:
        if gamma == 2:
            msg = f"gamma=2 needs d + t = {d + t} divisible by 4"
        else:
            msg = f"no c in [0, {gamma}) prime to gamma with gamma^2 | d + t c^2"
        raise UnrealizablePolarization(f"unrealizable polarization (t={t}, d={d}, gamma={gamma}): {msg}")
    if len(cands) > 1:
        raise AmbiguousPolarization(f"several admissible c for gamma={gamma}: {cands}; choose one explicitly", cands)
    return PolarizationData(t, d, gamma, cands[0])


# ----------------------------------------------------------------------------
# Explicit L_2t


def l2t_lattice(t: int, m_rank: int = 0) -> GramLattice:
    """M + U + Z(-2t); the U block is (e, f), the last coordinate is l."""
    M = unimodular_M(m_rank)
    blocks = ([M] if M else []) + [hyperbolic_U(), rank_one(-2 * t)]
    return direct_sum(*blocks)


def _ufl(L: GramLattice, m_rank: int, e: int, f: int, l: int) -> LatticeVector:
    return L.vector((0,) * m_rank + (e, f, l))


def h_vector(pol: PolarizationData, m_rank: int = 0) -> LatticeVector:
    L = l2t_lattice(pol.t, m_rank)
    return _ufl(L, m_rank, pol.gamma, pol.gamma * pol.b, pol.c)


def h1_h2_vectors(pol: PolarizationData, m_rank: int = 0) -> tuple[LatticeVector, LatticeVector]:
    L = l2t_lattice(pol.t, m_rank)
    return (
        _ufl(L, m_rank, 1, -pol.b, 0),
        _ufl(L, m_rank, 0, pol.c * 2 * pol.t // pol.gamma, 1),
    )


def l_star(t: int, m_rank: int = 0) -> RationalVector:
    L = l2t_lattice(t, m_rank)
    return L.rational((0,) * (m_rank + 2) + (Fraction(1, 2 * t),))


# ----------------------------------------------------------------------------
# h-perp


def perp_block(pol: PolarizationData) -> tuple[tuple[int, int], tuple[int, int]]:
    t, d, g, c = pol.t, pol.d, pol.gamma, pol.c
    off = c * 2 * t // g
    return ((-(2 * d + 2 * c * c * t) // g ** 2, off), (off, -2 * t))


@dataclass(frozen=True)
class PerpLattice:
    """h-perp = M + B, with B the Gram matrix of (h1, h2)."""

    pol: PolarizationData
    m_rank: int
    B: tuple[tuple[int, int], tuple[int, int]]

    @property
    def block(self) -> GramLattice:
        return GramLattice(self.B, f"B(t={self.pol.t},d={self.pol.d},gamma={self.pol.gamma})")

    def lattice(self) -> GramLattice:
        """The full Gram matrix, M materialized as U^a + E8(-1)^b."""
        M = unimodular_M(self.m_rank)
        return direct_sum(M, self.block) if M else self.block

    def k1(self) -> RationalVector:
        """k1 = (gamma/2d) h - f written in the (h1, h2) basis of the block."""
        g, d, c = self.pol.gamma, self.pol.d, self.pol.c
        return self.block.rational((Fraction(g * g, 2 * d), Fraction(g * c, 2 * d)))

    def k2(self) -> RationalVector:
        """k2 = c f + (gamma/2t) l in the (h1, h2) basis."""
        return self.block.rational((0, Fraction(self.pol.gamma, 2 * self.pol.t)))

    @property
    def det(self) -> int:
        (a, b), (_, e) = self.B
        return a * e - b * b


def perp_gram(pol: PolarizationData, m_rank: int = K3_M_RANK) -> PerpLattice:
    B = perp_block(pol)
    P = PerpLattice(pol, m_rank, B)
    expected = 4 * pol.d * pol.t // pol.gamma ** 2
    if P.det != expected:
        raise AssertionError(f"det(B) = {P.det} != 4dt/gamma^2 = {expected}")
    return P


def glue_generator(pol: PolarizationData) -> tuple[FiniteQuadraticForm, tuple[int, ...], int]:
    """The class of k1 in the Smith presentation of A_{h-perp}, with its order."""
    P = perp_gram(pol, 0)
    A = discriminant_form(P.block)
    k1 = A.element_of(P.k1())
    return A, k1, A.order(k1)


def disc_group_omega1(pol: PolarizationData) -> FiniteQuadraticForm:
    """A_{h-perp} = Z/(2d/gamma) x Z/(2t/gamma) on the generators (k1, k2); needs omega = 1."""
    if pol.omega != 1:
        raise UnsupportedCase(
            f"omega = gcd(2t/gamma, gamma) = {pol.omega} != 1: no product decomposition on (k1, k2)"
        )
    g, d, t = pol.gamma, pol.d, pol.t
    orders = (2 * d // g, 2 * t // g)
    q_gen = (Fraction(-g * g, 2 * d), Fraction(-g * g, 2 * t))
    P = perp_gram(pol, 0)
    located = form_from_lifts(P.block, [P.k1(), P.k2()], budget=max(pol.disc_size, 1))
    A = FiniteQuadraticForm.orthogonal_sum(orders, q_gen)
    if not A.same_form(located):
        raise AssertionError(f"(k1, k2) presentation {located} disagrees with {A}")
    return located


def extends_to_L(pol: PolarizationData, g: DiscIsometry, A: FiniteQuadraticForm | None = None) -> bool:
    """An isometry of h-perp extends to L fixing h iff it fixes the glue class k1.

    ``g`` acts on the (k1, k2) presentation unless another form ``A`` (with
    a locator) is given, in which case k1 is located in ``A``.
    """
    if A is None:
        A = disc_group_omega1(pol)
        k1 = A.generator(0)
    else:
        k1 = A.element_of(perp_gram(pol, 0).k1())
    return g.apply(A, k1) == k1


def hperp_report(pol: PolarizationData) -> dict:
    P = perp_gram(pol, 0)
    A = disc_group_omega1(pol) if pol.omega == 1 else discriminant_form(P.block)
    out = pol.to_json()
    out.update(
        {
            "omega": pol.omega,
            "B": [list(r) for r in P.B],
            "det_B": P.det,
            "disc_orders": list(A.orders),
            "q_gen": A.to_json()["q_gen"],
            "presentation": "k1,k2" if pol.omega == 1 else "smith",
        }
    )
    return out
