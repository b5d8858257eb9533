import random

import pytest
from hypothesis import given, settings, strategies as st

from heegner_lab.discform import DiscIsometry, is_isometry
from heegner_lab.errors import NotAReflection, ValidationError
from heegner_lab.lattice import divisibility, pair
from heegner_lab.reflections import (
    ReflectionClass,
    SymbolicPerpVector,
    canonical_star,
    classify_reflection,
    enumerate_classes_by_oracle,
    enumerate_ramification_classes,
    explicit_beta_star,
    explicit_perp,
    induced_disc_matrix,
    induced_disc_oracle,
    lift,
    reflect,
    small_group,
    star_basis_form,
    numerical_label,
)

PAIRS = [(1, 1), (1, 2), (1, 3), (2, 1), (2, 3), (3, 2), (2, 5)]


def reflection_vectors(t, d, bound=4, msq_bound=12):
    from heegner_lab.reflections import box_vectors, defines_reflection

    L = explicit_perp(t, d)
    for beta in box_vectors(bound, msq_bound):
        if beta.square(t, d) < 0 and defines_reflection(L, lift(beta, t, d)):
            yield beta


def test_classify_examples():
    assert classify_reflection(1, 1, SymbolicPerpVector(0, 0, 1, 0)).galois_label == "id"
    cls = classify_reflection(1, 1, SymbolicPerpVector(0, 0, 1, -1))
    assert cls.galois_label == "nontrivial" and cls.beta_sq == -4 and cls.div == 2
    assert SymbolicPerpVector.parse(" 2, -4, 1, 0").as_tuple() == (2, -4, 1, 0)


def test_classify_rejects():
    with pytest.raises(NotAReflection):
        classify_reflection(1, 1, SymbolicPerpVector(1, 0, 1, 1))
    with pytest.raises(ValidationError):
        classify_reflection(1, 1, SymbolicPerpVector(0, 0, 2, 2))
    with pytest.raises(ValidationError):
        SymbolicPerpVector.parse("1,2,3")
    with pytest.raises(ValidationError):
        SymbolicPerpVector(1, 3, 0, 0)


@pytest.mark.parametrize("t,d", PAIRS)
def test_reflection_is_involutive_isometry_fixing_hyperplane(t, d):
    L = explicit_perp(t, d)
    rng = random.Random(t * 100 + d)
    for beta in reflection_vectors(t, d, 3, 8):
        v = lift(beta, t, d)
        x = L.vector([rng.randint(-5, 5) for _ in range(L.rank)])
        y = L.vector([rng.randint(-5, 5) for _ in range(L.rank)])
        rx, ry = reflect(L, v, x), reflect(L, v, y)
        assert reflect(L, v, rx) == x
        assert pair(rx, ry) == pair(x, y)
        w = x * pair(v, v) - v * pair(x, v)  # orthogonal to beta
        assert reflect(L, v, w) == w


@pytest.mark.parametrize("t,d", PAIRS)
def test_symbolic_matches_explicit(t, d):
    for beta in reflection_vectors(t, d):
        v = lift(beta, t, d)
        assert beta.div(t, d) == divisibility(v)
        assert beta.square(t, d) == pair(v, v)
        assert tuple(beta.beta_star(t, d)) == explicit_beta_star(t, d, beta)
        sq = beta.square(t, d)
        assert (4 * d * beta.b) % sq == 0 and (4 * t * beta.c) % sq == 0


@pytest.mark.parametrize("t,d", PAIRS)
def test_closed_form_matches_oracle(t, d):
    A = star_basis_form(t, d)
    for beta in reflection_vectors(t, d):
        M = induced_disc_matrix(t, d, beta)
        assert M == induced_disc_oracle(t, d, beta)
        assert is_isometry(A, M.matrix)
        assert M.compose(A, M) == DiscIsometry.identity(A)


@pytest.mark.parametrize("t,d", PAIRS)
def test_label_consistency(t, d):
    trivial = set(small_group(t, d).values())
    for beta in reflection_vectors(t, d):
        M = induced_disc_oracle(t, d, beta)
        assert (numerical_label(t, d, beta) != "nontrivial") == (M in trivial)
        assert (M == DiscIsometry.identity(star_basis_form(t, d))) == (beta.square(t, d) == -2)


@pytest.mark.parametrize("t,d", [(1, 1), (2, 2), (3, 3), (2, 5)])
def test_conjugation_covariance(t, d):
    """r_{g beta} = g r_beta g^-1 for isometries of Z(-2d) + Z(-2t) fixing M."""
    A = star_basis_form(t, d)
    lifts = {
        "s": (lambda be: SymbolicPerpVector(be.a, be.msq, be.b, -be.c), DiscIsometry.diagonal(A, (1, -1))),
        "-id": (lambda be: SymbolicPerpVector(be.a, be.msq, -be.b, -be.c), DiscIsometry.diagonal(A, (-1, -1))),
    }
    if t == d:
        lifts["swap"] = (lambda be: SymbolicPerpVector(be.a, be.msq, be.c, be.b), DiscIsometry(((0, 1), (1, 0))))
    for beta in reflection_vectors(t, d):
        M = induced_disc_matrix(t, d, beta)
        for act, g in lifts.values():
            conj = g.compose(A, M).compose(A, g.inverse(A))
            assert induced_disc_matrix(t, d, act(beta)) == conj


def test_enumeration_small_cases():
    e = enumerate_ramification_classes(2, 1)
    assert [(c.beta_sq, c.div, c.beta_star) for c in e.classes] == [(-4, 2, (1, 1))]
    assert enumerate_ramification_classes(2, 2).classes == ()
    assert [(c.beta_sq, c.div, c.beta_star) for c in enumerate_ramification_classes(2, 5).classes] == [(-4, 2, (5, 1))]


@pytest.mark.parametrize("m,d", [(2, 1), (2, 2), (2, 5)])
def test_enumeration_matches_box_oracle(m, d):
    t = m - 1
    enum = {(c.beta_sq, c.beta_star): c.div for c in enumerate_ramification_classes(m, d).classes}
    assert enum == enumerate_classes_by_oracle(t, d, 6, 24)


@pytest.mark.parametrize("m,d", [(2, 1), (2, 3), (2, 5), (2, 12), (2, 20), (3, 1), (3, 3), (4, 2)])
def test_doubled_box_is_stable(m, d):
    one = enumerate_ramification_classes(m, d, check_normality=False)
    two = enumerate_ramification_classes(m, d, scale=2, check_normality=False)
    assert [(c.beta_sq, c.beta_star, c.div) for c in one.classes] == [(c.beta_sq, c.beta_star, c.div) for c in two.classes]


def test_enumeration_is_sorted_and_canonical():
    e = enumerate_ramification_classes(2, 20)
    keys = [(-c.beta_sq, c.beta_star) for c in e.classes]
    assert keys == sorted(keys)
    for c in e.classes:
        w = c.witness
        assert next(x for x in w.as_tuple() if x) > 0
        assert canonical_star(1, 20, w.beta_star(1, 20)) == c.beta_star
        assert numerical_label(1, 20, w) == "nontrivial"


def test_threads_do_not_change_result():
    assert enumerate_ramification_classes(2, 12, jobs=1) == enumerate_ramification_classes(2, 12, jobs=4)


@settings(max_examples=60, deadline=None)
@given(st.integers(-8, 8), st.integers(-10, 10).map(lambda x: 2 * x), st.integers(-8, 8), st.integers(-8, 8))
def test_class_json_round_trip(a, msq, b, c):
    beta = SymbolicPerpVector(a, msq, b, c)
    if not beta.is_primitive() or beta.square(1, 3) >= 0:
        return
    if (2 * beta.div(1, 3)) % beta.square(1, 3):
        return
    cls = classify_reflection(1, 3, beta)
    assert ReflectionClass.from_json(cls.to_json()) == cls
    assert classify_reflection(1, 3, beta.negate()).galois_label == cls.galois_label
