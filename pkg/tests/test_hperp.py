from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from heegner_lab.discform import DiscIsometry, discriminant_form, find_isomorphism, s_involution
from heegner_lab.errors import AmbiguousPolarization, UnrealizablePolarization, UnsupportedCase
from heegner_lab.hk import monodromy_image
from heegner_lab.hperp import (
    admissible_c,
    disc_group_omega1,
    extends_to_L,
    h1_h2_vectors,
    h_vector,
    hperp_report,
    l2t_lattice,
    make_polarization,
    perp_gram,
)
from heegner_lab.lattice import pair


def test_basic_cases():
    pol = make_polarization(1, 1, 1)
    assert (pol.c, pol.b) == (0, 1)
    assert disc_group_omega1(pol).orders == (2, 2)
    pol = make_polarization(9, 15, 2)
    assert (pol.c, pol.b) == (1, 6)
    assert perp_gram(pol).B == ((-12, 9), (9, -18))
    assert disc_group_omega1(make_polarization(3, 1, 2)).orders == (1, 3)


def test_report():
    rep = hperp_report(make_polarization(9, 15, 2))
    assert rep["B"] == [[-12, 9], [9, -18]]
    assert rep["disc_orders"] == [15, 9]
    assert rep["q_gen"] == ["-2/15", "-2/9"]
    assert rep["presentation"] == "k1,k2"


def test_errors():
    with pytest.raises(UnrealizablePolarization) as exc:
        make_polarization(1, 1, 2)
    assert exc.value.exit_code == 2
    with pytest.raises(UnrealizablePolarization):
        make_polarization(2, 1, 3)
    with pytest.raises(AmbiguousPolarization) as exc:
        make_polarization(2, 14, 4)
    assert exc.value.candidates == [1, 3]
    pol = make_polarization(2, 14, 4, 1)
    assert pol.omega == 1
    with pytest.raises(UnsupportedCase):
        disc_group_omega1(make_polarization(4, 4, 2))


def all_tuples(tmax=6, dmax=12):
    return [(t, d, g, c) for t in range(1, tmax + 1) for d in range(1, dmax + 1)
            for g in range(1, 2 * t + 1) for c in admissible_c(t, d, g)]


@pytest.mark.parametrize("t,d,g,c", all_tuples(4, 8))
def test_explicit_complement(t, d, g, c):
    pol = make_polarization(t, d, g, c)
    L = l2t_lattice(t, 20)
    h = h_vector(pol, 20)
    h1, h2 = h1_h2_vectors(pol, 20)
    assert pair(h, h) == 2 * d
    assert pair(h, h1) == 0 and pair(h, h2) == 0
    assert ((pair(h1, h1), pair(h1, h2)), (pair(h2, h1), pair(h2, h2))) == perp_gram(pol).B
    # divisibility of h is gamma
    from heegner_lab.lattice import divisibility
    assert divisibility(h) == g
    assert L.rank == 23


@pytest.mark.parametrize("t,d,g,c", all_tuples())
def test_structural_identities(t, d, g, c):
    pol = make_polarization(t, d, g, c)
    P = perp_gram(pol, 0)
    A = discriminant_form(P.block)
    k1 = A.element_of(P.k1())
    assert P.det == 4 * d * t // g**2
    assert A.size == (2 * d // g) * (2 * t // g)
    assert A.order(k1) == 2 * d // g
    assert A.q(k1) == Fraction(-g * g, 2 * d) % 2
    assert 2 * d * P.det == (2 * d // g) ** 2 * 2 * t


@pytest.mark.parametrize("t,d,g,c", [x for x in all_tuples() if make_polarization(*x).omega == 1])
def test_omega1_presentation_matches_smith(t, d, g, c):
    pol = make_polarization(t, d, g, c)
    A = disc_group_omega1(pol)
    assert find_isomorphism(discriminant_form(perp_gram(pol, 0).block), A) is not None
    assert extends_to_L(pol, DiscIsometry.identity(A))


@pytest.mark.parametrize("t,d,g,c", all_tuples(6, 10))
def test_monodromy_image_claims(t, d, g, c):
    pol = make_polarization(t, d, g, c)
    im = monodromy_image(pol)
    ident = DiscIsometry.identity(im.form)
    # the stable group of (L, h) acts trivially on A_{h-perp}
    assert im.tilde == {ident}
    # the +-stable group contributes an extra class unless t = 1 or gamma > 2
    assert len(im.hat) == (1 if t == 1 or g > 2 else 2)
    if pol.omega == 1 and t > 1 and g <= 2:
        assert im.hat == {ident, s_involution(im.form)}


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(1, 30))
def test_gamma1_always_realizable(t, d):
    pol = make_polarization(t, d, 1)
    assert pol.c == 0 and pol.b == d
    assert disc_group_omega1(pol).orders == (2 * d, 2 * t)
