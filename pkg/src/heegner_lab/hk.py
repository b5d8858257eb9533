"""K3^[m]-type specialization: normality verdicts, Galois groups, divisor reports."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .discform import (
    DiscIsometry,
    FiniteQuadraticForm,
    default_budget,
    discriminant_form,
    enumerate_isometries,
    is_K_normal,
    s_involution,
)
from .errors import BudgetExceeded, NormalityNotEstablished, ValidationError
from .hperp import (
    K3_M_RANK,
    PolarizationData,
    admissible_c,
    disc_group_omega1,
    make_polarization,
    perp_gram,
)
from .lattice import GramLattice, det, divisibility, integer_kernel, matmul, matvec, star, transpose
from .reflections import (
    ReflectionClass,
    SymbolicPerpVector,
    enumerate_ramification_classes,
    explicit_perp,
    star_basis_form,
)

SCHEMA = "heegner-lab/1"

ORBIT_ASSUMPTION = (
    "classes are keyed by (beta^2, beta_*) up to the {+-id, +-s} action on beta_*; "
    "distinct keys are assumed to give distinct Heegner divisors"
)


def polarization_for(t: int, d: int, gamma: int, c: int | None = None) -> PolarizationData:
    """Like make_polarization, but for gamma > 2 any admissible c will do when none is given."""
    if c is None and gamma > 2:
        cands = admissible_c(t, d, gamma)
        if cands:
            c = cands[0]
    return make_polarization(t, d, gamma, c)


# ----------------------------------------------------------------------------
# Normality


@dataclass(frozen=True)
class NormalityVerdict:
    status: str  # normal_stable | normal | not_normal | undecided
    reason: str  # t1_or_gamma_gt2 | coprime_td | brute_force | omega_ne_1_unsupported
    witness: tuple[DiscIsometry, DiscIsometry] | None = None

    def __post_init__(self):
        if self.status == "not_normal" and self.witness is None:
            raise ValueError("a not_normal verdict needs a witness")

    def to_json(self) -> dict:
        out = {"status": self.status, "reason": self.reason}
        if self.witness is not None:
            out["witness"] = {"g": self.witness[0].to_json(), "g_inv_s_g": self.witness[1].to_json()}
        return out

    @classmethod
    def from_json(cls, data: dict) -> NormalityVerdict:
        w = data.get("witness")
        if w is not None:
            w = (DiscIsometry.from_json(w["g"]), DiscIsometry.from_json(w["g_inv_s_g"]))
        return cls(data["status"], data["reason"], w)


def normality(t: int, d: int, gamma: int, c: int | None = None, budget: int | None = None) -> NormalityVerdict:
    """Is the monodromy group normal in O(h-perp)?  Fixed rule precedence:

    1. t = 1 or gamma > 2: it equals the stable group of h-perp;
    2. omega = 1, gcd(t, d) = 1: K = {id, s} is normal in Aut(A);
    3. omega = 1 otherwise: brute force over O(A);
    4. omega != 1: undecided.
    """
    pol = polarization_for(t, d, gamma, c)
    if t == 1 or gamma > 2:
        return NormalityVerdict("normal_stable", "t1_or_gamma_gt2")
    if pol.omega != 1:
        return NormalityVerdict("undecided", "omega_ne_1_unsupported")
    if math.gcd(t, d) == 1:
        return NormalityVerdict("normal", "coprime_td")
    return brute_force_normality(pol, budget)


def brute_force_normality(pol: PolarizationData, budget: int | None = None) -> NormalityVerdict:
    res = is_K_normal(disc_group_omega1(pol), budget)
    if res.normal:
        return NormalityVerdict("normal", "brute_force")
    return NormalityVerdict("not_normal", "brute_force", (res.witness, res.conjugate))


# ----------------------------------------------------------------------------
# Image of the monodromy group in O(A_{h-perp}), by brute force through the glue


@dataclass(frozen=True)
class MonodromyImage:
    form: FiniteQuadraticForm
    group: tuple[DiscIsometry, ...]
    tilde: frozenset  # image of the stable group of (L, h)
    hat: frozenset  # image of the monodromy group of (L, h)


def monodromy_image(pol: PolarizationData, budget: int | None = None) -> MonodromyImage:
    """Images of the stable and +-stable subgroups of O(L_2t, h) in O(A_{h-perp}).

    A class g of O(A_{h-perp}) lies in the image iff it fixes the glue class
    k1 and, acting on A_L = H^perp / H inside A_{Zh} x A_{h-perp} (identity
    on the first factor), sends the class of l/2t to +l/2t (resp. +-l/2t).
    Works for every omega; on omega = 1 the (k1, k2) presentation is used.
    """
    P = perp_gram(pol, 0)
    A = disc_group_omega1(pol) if pol.omega == 1 else discriminant_form(P.block)
    group = enumerate_isometries(A, budget)
    t, d, gamma, c = pol.t, pol.d, pol.gamma, pol.c
    k1 = A.element_of(P.k1())
    n = 2 * d
    # H = <(gamma, -k1)> in Z/2d x A, where h/2d generates A_{Zh}.
    glue = set()
    gen = (gamma % n, A.neg(k1))
    cur = (0, A.zero())
    for _ in range(n):
        glue.add(cur)
        cur = ((cur[0] + gen[0]) % n, A.add(cur[1], gen[1]))
    # l/2t = (-c/2d) h + w with w in h-perp; (alpha, beta) are w's (h1, h2) coordinates
    # because h1 = e - b f and h2 = (2tc/gamma) f + l.
    alpha = Fraction(c * gamma, 2 * d)
    beta = Fraction(1, 2 * t) + Fraction(c * c, 2 * d)
    w = A.element_of(P.block.rational((alpha, beta)))
    u = ((-c) % n, w)

    def sign_on_l(g: DiscIsometry) -> int:
        gw = g.apply(A, w)
        if ((u[0] - u[0]) % n, A.add(gw, A.neg(w))) in glue:
            return 1
        if ((u[0] + u[0]) % n, A.add(gw, w)) in glue:
            return -1
        return 0

    tilde, hat = set(), set()
    for g in group:
        if g.apply(A, k1) != k1:
            continue
        sgn = sign_on_l(g)
        if sgn == 1:
            tilde.add(g)
            hat.add(g)
        elif sgn == -1:
            hat.add(g)
    return MonodromyImage(A, tuple(group), frozenset(tilde), frozenset(hat))


# ----------------------------------------------------------------------------
# Galois group


@dataclass(frozen=True)
class GaloisGroup:
    order: int | None
    quotient: str
    group_order: int | None
    subgroup: tuple[DiscIsometry, ...] = ()
    coset_reps: tuple[DiscIsometry, ...] = ()
    form: FiniteQuadraticForm | None = field(default=None, compare=False)

    def coset_of(self, g: DiscIsometry) -> DiscIsometry:
        A = self.form
        return min(g.compose(A, k) for k in self.subgroup)

    def to_json(self) -> dict:
        return {
            "order": self.order if self.order is not None else "not enumerated",
            "quotient": self.quotient,
            "O_A_order": self.group_order if self.group_order is not None else "not enumerated",
            "coset_reps": [g.to_json() for g in self.coset_reps],
        }


def galois_group(m: int, d: int, gamma: int, c: int | None = None, budget: int | None = None) -> GaloisGroup:
    t = m - 1
    verdict = normality(t, d, gamma, c, budget)
    if verdict.status not in ("normal_stable", "normal"):
        raise NormalityNotEstablished(f"Galois group needs a normal monodromy group (got {verdict.status})")
    pol = polarization_for(t, d, gamma, c)
    A = disc_group_omega1(pol) if pol.omega == 1 else discriminant_form(perp_gram(pol, 0).block)
    ident = DiscIsometry.identity(A)
    sub = {ident, ident.negate(A)}
    if m == 2 or gamma > 2:
        quotient = "O(A_hperp)/{+-id}"
    else:
        s = s_involution(A)
        sub |= {s, s.negate(A)}
        quotient = "O(A_hperp)/<s, -id>"
    subgroup = tuple(sorted(sub))
    try:
        group = enumerate_isometries(A, budget)
    except BudgetExceeded:
        return GaloisGroup(None, quotient, None, subgroup, (), A)
    reps = sorted({min(g.compose(A, k) for k in subgroup) for g in group})
    return GaloisGroup(len(reps), quotient, len(group), subgroup, tuple(reps), A)


# ----------------------------------------------------------------------------
# Fourfolds: discriminants of <h, beta>-perp and the period image


def disc_Kperp(d: int, beta: SymbolicPerpVector) -> int:
    """-4 d beta^2 / div(beta)^2 for K3^[2] (t = 1)."""
    sq, n = beta.square(1, d), beta.div(1, d)
    q, r = divmod(-4 * d * sq, n * n)
    if r or q <= 0:
        raise AssertionError(f"disc(K-perp) = {-4 * d * sq}/{n * n} is not a positive integer")
    return q


def k3_2_lattice() -> GramLattice:
    """Lambda_{K3^[2]} = U^2 + E8(-1)^2 + U + Z(-2); (e, f) = coordinates 20, 21, l = 22."""
    from .hperp import l2t_lattice

    return l2t_lattice(1, K3_M_RANK)


def disc_Kperp_explicit(d: int, beta: SymbolicPerpVector) -> int:
    """|det| of the Gram matrix of <h, beta>-perp computed from an explicit kernel basis."""
    L = k3_2_lattice()
    h = [0] * 23
    h[20], h[21] = 1, d
    v = [0] * 23
    v[0], v[1] = beta.a, beta.a * beta.msq // 2
    v[20], v[21] = beta.b, -d * beta.b  # k = e - d f
    v[22] = beta.c
    rows = [matvec(L.gram, h), matvec(L.gram, v)]
    basis = integer_kernel(rows)
    G = matmul(matmul(basis, L.gram), transpose(basis))
    return abs(det(G))


EXCLUDED_RULES = ("D_2d", "D_8d", "D_10d", "D_2d_over_5")


def excluded_discriminants(d: int) -> dict[int, str]:
    table = {2 * d: "D_2d", 8 * d: "D_8d", 10 * d: "D_10d"}
    if d % 25 in (5, 20):
        table.setdefault(2 * d // 5, "D_2d_over_5")
    return table


@dataclass(frozen=True)
class DivisorReport:
    cls: ReflectionClass
    disc_Kperp: int
    image_status: str  # meets_image | possibly_excluded
    excluded_rule: str | None = None

    def to_json(self) -> dict:
        out = self.cls.to_json()
        out.update(
            {"disc_Kperp": self.disc_Kperp, "image_status": self.image_status, "excluded_rule": self.excluded_rule}
        )
        return out

    @classmethod
    def from_json(cls, data: dict) -> DivisorReport:
        return cls(ReflectionClass.from_json(data), data["disc_Kperp"], data["image_status"], data["excluded_rule"])


def image_status(d: int, cls: ReflectionClass) -> DivisorReport:
    """Whether the Heegner divisor avoids the hypersurfaces that can miss the period image."""
    if cls.beta_sq == -2:
        raise ValidationError("beta^2 = -2 reflections are trivial in G and never ramification classes")
    disc = disc_Kperp(d, cls.witness)
    rule = excluded_discriminants(d).get(disc)
    if rule is None:
        return DivisorReport(cls, disc, "meets_image")
    return DivisorReport(cls, disc, "possibly_excluded", rule)


# ----------------------------------------------------------------------------
# d = 1: every square -4 reflection vector has the same orbit invariants


@dataclass(frozen=True)
class D1Report:
    passed: bool
    checked: int
    bound: int
    even_a_instances: int
    counterexample: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checked": self.checked,
            "bound": self.bound,
            "even_a_instances": self.even_a_instances,
            "counterexample": list(self.counterexample) if self.counterexample else None,
        }


def d1_uniqueness_check(bound: int = 5) -> D1Report:
    """Every primitive beta^2 = -4 reflection vector in (U + U) + Z(-2) + Z(-2) with
    |coords| <= bound has div 2 and beta_* = k_* + l_*, and its k, l coefficients are odd."""
    L = explicit_perp(1, 1, 4)
    A = star_basis_form(1, 1, 4)
    target = A.add(A.generator(0), A.generator(1))
    rng = range(-bound, bound + 1)
    by_norm: dict[int, list[tuple[int, int]]] = {}
    for b, c in itertools.product(rng, rng):
        by_norm.setdefault(b * b + c * c, []).append((b, c))
    checked = even_a = 0
    for x in itertools.product(rng, repeat=4):
        msq = 2 * x[0] * x[1] + 2 * x[2] * x[3]
        # -4 = msq - 2 b^2 - 2 c^2
        need = msq + 4
        if need % 2 or need < 0:
            continue
        for b, c in by_norm.get(need // 2, ()):
            coords = x + (b, c)
            if math.gcd(*coords) != 1:
                continue
            v = L.vector(coords)
            div = divisibility(v)
            if (2 * div) % -4:
                continue
            checked += 1
            cls = A.element_of(star(v))
            a = math.gcd(*x)
            if div != 2 or cls != target or b % 2 == 0 or c % 2 == 0:
                return D1Report(False, checked, bound, even_a, coords)
            if a % 2 == 0:
                even_a += 1
    return D1Report(True, checked, bound, even_a)


# ----------------------------------------------------------------------------
# Full analysis


def analyze(m: int, d: int, gamma: int, c: int | None = None, budget: int | None = None, jobs: int = 1) -> dict:
    budget = default_budget() if budget is None else budget
    t = m - 1
    pol = polarization_for(t, d, gamma, c)
    verdict = normality(t, d, gamma, pol.c, budget)
    out = {
        "polarization": pol.to_json(),
        "m": m,
        "normality": verdict.to_json(),
        "notes": [],
    }
    if verdict.status not in ("normal_stable", "normal"):
        raise NormalityNotEstablished(
            f"normality is {verdict.status} ({verdict.reason}); no Galois cover to analyze"
        )
    out["galois_group"] = galois_group(m, d, gamma, pol.c, budget).to_json()
    if gamma != 1:
        out["divisors"] = None
        out["notes"].append("reflection classification is implemented for divisibility 1 only")
        return out
    enum = enumerate_ramification_classes(m, d, budget=budget, jobs=jobs, check_normality=False)
    if m == 2:
        out["divisors"] = [image_status(d, cls).to_json() for cls in enum.classes]
    else:
        out["divisors"] = [cls.to_json() for cls in enum.classes]
        out["notes"].append("period-image status is only available for m = 2")
    out["unrealized_squares"] = list(enum.unrealized_squares)
    out["notes"].append(ORBIT_ASSUMPTION)
    return out
