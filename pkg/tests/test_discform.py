from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from heegner_lab.discform import (
    DiscIsometry,
    FiniteQuadraticForm,
    discriminant_form,
    enumerate_isometries,
    find_isomorphism,
    is_abelian,
    is_isometry,
    is_K_normal,
    s_involution,
)
from heegner_lab.errors import BudgetExceeded, ValidationError
from heegner_lab.lattice import GramLattice, det


def counterexample_form():
    return FiniteQuadraticForm.orthogonal_sum((15, 9), (Fraction(-2, 15), Fraction(-2, 9)))


def test_counterexample_group():
    A = counterexample_form()
    assert A.size == 135
    group = enumerate_isometries(A)
    assert len(group) == 24
    assert DiscIsometry(((1, 10), (6, 2))) in group
    assert is_isometry(A, ((1, 10), (6, 2)))
    assert not is_isometry(A, ((1, 1), (0, 1)))


def test_counterexample_not_K_normal():
    res = is_K_normal(counterexample_form())
    assert not res.normal
    assert res.witness.matrix == ((1, 10), (6, 2))
    assert res.conjugate.matrix == ((1, 5), (3, 2))


def test_conjugate_by_hand():
    A = counterexample_form()
    g = DiscIsometry(((1, 10), (6, 2)))
    s = s_involution(A)
    conj = g.inverse(A).compose(A, s).compose(A, g)
    assert conj.matrix == ((1, 5), (3, 2))
    assert conj not in (DiscIsometry.identity(A), s)


def test_smith_presentation_isomorphic():
    A = discriminant_form(GramLattice([[-12, 9], [9, -18]]))
    assert A.orders == (3, 45)
    assert find_isomorphism(A, counterexample_form()) is not None
    assert find_isomorphism(A, FiniteQuadraticForm.orthogonal_sum((15, 9), (Fraction(2, 15), Fraction(-2, 9)))) is None


def test_validation():
    with pytest.raises(ValidationError):
        FiniteQuadraticForm.orthogonal_sum((3,), (Fraction(1, 3),))  # 9 q = 3 not even
    with pytest.raises(ValidationError):
        FiniteQuadraticForm((2, 2), (Fraction(1, 2), Fraction(1, 2)), ((Fraction(1, 2), Fraction(1, 2)), (0, Fraction(1, 2))))


def test_budget():
    A = counterexample_form()
    with pytest.raises(BudgetExceeded) as exc:
        enumerate_isometries(A, budget=100)
    assert exc.value.exit_code == 3 and exc.value.size == 135


def test_json_round_trip():
    A = counterexample_form()
    data = A.to_json()
    assert data["q_gen"] == ["-2/15", "-2/9"]
    assert FiniteQuadraticForm.from_json(data) == A
    g = DiscIsometry(((1, 10), (6, 2)))
    assert DiscIsometry.from_json(g.to_json()) == g


def test_cyclic_group_is_abelian():
    A = FiniteQuadraticForm.orthogonal_sum((7, 3), (Fraction(-2, 7), Fraction(-2, 3)))
    assert is_abelian(A, enumerate_isometries(A))


even_gram = st.integers(2, 3).flatmap(
    lambda n: st.lists(st.integers(-6, 6), min_size=n * n, max_size=n * n).map(
        lambda xs, n=n: [[2 * xs[i * n + i] if i == j else xs[min(i, j) * n + max(i, j)] for j in range(n)] for i in range(n)]
    )
)


@settings(max_examples=80, deadline=None)
@given(even_gram)
def test_discriminant_form_properties(gram):
    D = det(gram)
    if D == 0 or abs(D) > 400:
        return
    A = discriminant_form(GramLattice(gram))
    assert A.size == abs(D)
    elems = list(A.elements())
    for x in elems[:20]:
        for y in elems[:20]:
            # polarization identity: q(x+y) - q(x) - q(y) = 2 b(x, y) mod 2
            lhs = (A.q(A.add(x, y)) - A.q(x) - A.q(y)) % 2
            assert lhs == (2 * A.b(x, y)) % 2
        assert A.q(A.neg(x)) == A.q(x)


@settings(max_examples=40, deadline=None)
@given(even_gram)
def test_isometry_group_closed(gram):
    D = det(gram)
    if D == 0 or abs(D) > 60:
        return
    A = discriminant_form(GramLattice(gram))
    group = enumerate_isometries(A)
    ident = DiscIsometry.identity(A)
    assert ident in group and ident.negate(A) in group
    gs = set(group)
    for g in group[:6]:
        assert g.inverse(A) in gs
        for h in group[:6]:
            assert g.compose(A, h) in gs
