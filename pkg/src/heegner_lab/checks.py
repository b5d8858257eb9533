"""Named reproducible checks; each returns a CheckResult.  Shared by the CLI and the test suite."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .discform import (
    DiscIsometry,
    FiniteQuadraticForm,
    enumerate_isometries,
    is_abelian,
    is_isometry,
    is_K_normal,
)
from .hk import analyze, d1_uniqueness_check, galois_group, monodromy_image, normality
from .hperp import admissible_c, disc_group_omega1, make_polarization, perp_gram
from .reflections import (
    SymbolicPerpVector,
    box_vectors,
    canonical_star,
    classify_reflection,
    enumerate_ramification_classes,
    induced_disc_matrix,
    induced_disc_oracle,
    label_matches,
    small_group,
    star_basis_form,
    numerical_label,
)

CRITERION_PAIRS = ((1, 1), (1, 2), (1, 3), (2, 1), (2, 3), (3, 2), (2, 5))
BOX_BOUND = 6
MSQ_BOUND = 24


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    data: dict = field(default_factory=dict, repr=False)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail} ({self.seconds:.2f}s)"

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


def _timed(name: str, fn) -> CheckResult:
    t0 = time.perf_counter()
    passed, detail, data = fn()
    return CheckResult(name, passed, detail, time.perf_counter() - t0, data)


# --- counterexample ---------------------------------------------------------


def counterexample() -> CheckResult:
    def run():
        pol = make_polarization(9, 15, 2)
        A = disc_group_omega1(pol)
        expected = FiniteQuadraticForm.orthogonal_sum((15, 9), (Fraction(-2, 15), Fraction(-2, 9)))
        g = ((1, 10), (6, 2))
        s = DiscIsometry.diagonal(A, (1, -1))
        G = DiscIsometry(g)
        conj = G.inverse(A).compose(A, s).compose(A, G)
        verdict = normality(9, 15, 2)
        ok = (
            A.orders == (15, 9)
            and A.same_form(expected)
            and is_isometry(A, g)
            and conj.matrix == ((1, 5), (3, 2))
            and verdict.status == "not_normal"
        )
        detail = f"A={A.orders}, conj={conj.to_json()}, verdict={verdict.status}"
        return ok, detail, {"verdict": verdict.to_json()}

    return _timed("counterexample_t9_d15_g2", run)


# --- d = 1 fourfolds --------------------------------------------------------


def d1_fourfold() -> CheckResult:
    def run():
        rep = analyze(2, 1, 1)
        divs = rep["divisors"]
        gg = rep["galois_group"]
        A = star_basis_form(1, 1)
        target = list(canonical_star(1, 1, A.add(A.generator(0), A.generator(1))))
        ok = (
            len(divs) == 1
            and divs[0]["beta_sq"] == -4
            and divs[0]["div"] == 2
            and divs[0]["beta_star"] == target
            and divs[0]["label"] == "nontrivial"
            and divs[0]["disc_Kperp"] == 4
            and divs[0]["image_status"] == "meets_image"
            and gg["order"] == 2
        )
        detail = f"{len(divs)} class(es), |G|={gg['order']}" + (
            f", beta^2={divs[0]['beta_sq']}, disc={divs[0]['disc_Kperp']}, {divs[0]['image_status']}" if divs else ""
        )
        return ok, detail, rep

    return _timed("d1_unique_divisor_D4", run)


def d1_uniqueness(bound: int = 5) -> CheckResult:
    def run():
        rep = d1_uniqueness_check(bound)
        return rep.passed, f"{rep.checked} vectors in box {bound}, all div 2 with beta_* = k_*+l_*", rep.to_json()

    return _timed("d1_square_minus4_unique_orbit", run)


def d1_galois() -> CheckResult:
    def run():
        G = galois_group(2, 1, 1)
        beta = SymbolicPerpVector(0, 0, 1, 1)
        swap = induced_disc_matrix(1, 1, beta)
        ident = DiscIsometry.identity(G.form)
        ok = G.order == 2 and G.coset_of(swap) != G.coset_of(ident)
        return ok, f"|G|={G.order}, r_(k+l) nontrivial", {}

    return _timed("galois_d1_is_Z2", run)


def k3_3_trivial_galois() -> CheckResult:
    def run():
        im = monodromy_image(make_polarization(2, 2, 2, 1))
        ok = len(im.hat) == len(im.group)
        return ok, f"|image|={len(im.hat)}, |O(A)|={len(im.group)}", {}

    return _timed("k3_3_square4_div2_trivial_galois", run)


# --- reflections on the criterion boxes --------------------------------------


def _box_scan(pairs=CRITERION_PAIRS, bound=BOX_BOUND, msq_bound=MSQ_BOUND):
    """(t, d, beta, oracle matrix, closed-form matrix) for every reflection vector in the box."""
    from .reflections import explicit_perp, lift, defines_reflection

    for t, d in pairs:
        L = explicit_perp(t, d)
        for beta in box_vectors(bound, msq_bound):
            if beta.square(t, d) >= 0:
                continue
            if not defines_reflection(L, lift(beta, t, d)):
                continue
            yield t, d, beta, induced_disc_oracle(t, d, beta), induced_disc_matrix(t, d, beta)


def criterion_equivalence() -> CheckResult:
    def run():
        n, bad = 0, []
        for t, d, beta, oracle, _ in _box_scan():
            n += 1
            small = oracle in set(small_group(t, d).values())
            numeric = numerical_label(t, d, beta) != "nontrivial"
            if small != numeric or not label_matches(t, d, numerical_label(t, d, beta), oracle):
                bad.append((t, d, beta.as_tuple()))
        return not bad, f"{n} reflection vectors, {len(bad)} mismatches", {"mismatches": bad[:10]}

    return _timed("numerical_criterion_equivalence", run)


def matrix_formula() -> CheckResult:
    def run():
        n, bad = 0, []
        forms = {}
        for t, d, beta, oracle, closed in _box_scan():
            n += 1
            A = forms.setdefault((t, d), star_basis_form(t, d))
            ident = DiscIsometry.identity(A)
            if oracle != closed or closed.compose(A, closed) != ident or not is_isometry(A, closed.matrix):
                bad.append((t, d, beta.as_tuple()))
        return not bad, f"{n} reflection vectors, {len(bad)} mismatches", {"mismatches": bad[:10]}

    return _timed("induced_matrix_formula", run)


def minus_two_criterion() -> CheckResult:
    def run():
        n, bad = 0, []
        for t, d, beta, oracle, _ in _box_scan():
            n += 1
            trivial = oracle == DiscIsometry.identity(star_basis_form(t, d))
            if trivial != (beta.square(t, d) == -2):
                bad.append((t, d, beta.as_tuple()))
        return not bad, f"{n} reflection vectors, {len(bad)} mismatches", {"mismatches": bad[:10]}

    return _timed("minus_two_criterion", run)


# --- structural identities -------------------------------------------------


def structural_tuples(limit_t: int = 6, limit_d: int = 12):
    for t in range(1, limit_t + 1):
        for d in range(1, limit_d + 1):
            for g in range(1, 2 * t + 1):
                for c in admissible_c(t, d, g):
                    yield t, d, g, c


def structural_identities() -> CheckResult:
    from .discform import discriminant_form

    def run():
        n, bad = 0, []
        for t, d, g, c in structural_tuples():
            n += 1
            pol = make_polarization(t, d, g, c)
            P = perp_gram(pol, 0)
            A = discriminant_form(P.block)
            k1 = A.element_of(P.k1())
            ok = (
                P.det == 4 * d * t // g**2
                and (4 * d * t) % (g * g) == 0
                and A.size == (2 * d // g) * (2 * t // g)
                and A.order(k1) == 2 * d // g
                and A.q(k1) == Fraction(-g * g, 2 * d) % 2
                and 2 * d * P.det == (2 * d // g) ** 2 * 2 * t
            )
            if not ok:
                bad.append((t, d, g, c))
        return n >= 25 and not bad, f"{n} tuples, {len(bad)} failures", {"failures": bad}

    return _timed("structural_identities", run)


# --- normality in coprime cases ---------------------------------------------


def coprime_normality(bound: int = 2000) -> CheckResult:
    def run():
        n1 = n2 = 0
        bad = []
        for t in range(1, bound // 4 + 1):
            for d in range(1, bound // (4 * t) + 1):
                if math.gcd(t, d) != 1:
                    continue
                n1 += 1
                if not is_K_normal(disc_group_omega1(make_polarization(t, d, 1))).normal:
                    bad.append(("gamma1", t, d))
        for t in range(1, bound + 1, 2):
            for d in range(1, bound // t + 1):
                if math.gcd(t, d) != 1 or (d + t) % 4:
                    continue
                n2 += 1
                A = disc_group_omega1(make_polarization(t, d, 2))
                if not is_abelian(A, enumerate_isometries(A)):
                    bad.append(("gamma2", t, d))
        return not bad, f"{n1} gamma=1 pairs normal, {n2} gamma=2 groups abelian, {len(bad)} failures", {"failures": bad[:10]}

    return _timed("coprime_normality", run)


# --- invariance of labels ---------------------------------------------------


INVARIANCE_CASES = ((2, 1), (2, 2), (2, 3), (2, 5), (2, 20), (3, 1), (3, 2), (3, 4))


def label_invariance(cases=INVARIANCE_CASES) -> CheckResult:
    def run():
        n, bad = 0, []
        for m, d in cases:
            t = m - 1
            enum = enumerate_ramification_classes(m, d, check_normality=False)
            A = star_basis_form(t, d)
            acts = small_group(t, d).values()
            for cls in enum.classes:
                n += 1
                beta = cls.witness
                label = classify_reflection(t, d, beta).galois_label
                M = induced_disc_matrix(t, d, beta)
                if classify_reflection(t, d, beta.negate()).galois_label != label:
                    bad.append((m, d, "sign", beta.as_tuple()))
                # g in {+-id, +-s} lifts to an isometry of h-perp; the induced matrix
                # conjugates and the label (membership in {+-id, +-s}) is unchanged.
                small = set(small_group(t, d).values())
                for g in acts:
                    conj = g.inverse(A).compose(A, M).compose(A, g)
                    if (conj in small) != (M in small):
                        bad.append((m, d, "conj", beta.as_tuple()))
                    star = g.apply(A, beta.beta_star(t, d))
                    if canonical_star(t, d, star) != cls.beta_star:
                        bad.append((m, d, "star", beta.as_tuple()))
        return not bad, f"{n} classes over {len(cases)} (m, d), {len(bad)} failures", {"failures": bad[:10]}

    return _timed("label_invariance", run)


def determinism() -> CheckResult:
    from .cli import run_capture

    def run():
        outs = [run_capture(["enumerate", "--m", "2", "--d", "5", "--json", "--jobs", str(j)]) for j in (1, 1, 4)]
        ok = all(o == outs[0] for o in outs) and outs[0][0] == 0
        return ok, f"3 runs, {len(set(outs))} distinct output(s)", {}

    return _timed("determinism_enumerate_m2_d5", run)


NAMED_FACTS = (counterexample, d1_uniqueness, d1_galois, d1_fourfold, k3_3_trivial_galois)
ACCEPTANCE = (
    counterexample,
    d1_fourfold,
    criterion_equivalence,
    matrix_formula,
    minus_two_criterion,
    structural_identities,
    coprime_normality,
    label_invariance,
    determinism,
)


def run_checks(full: bool = True) -> list[CheckResult]:
    checks = NAMED_FACTS + tuple(c for c in ACCEPTANCE if c not in NAMED_FACTS) if full else NAMED_FACTS
    return [c() for c in checks]
