import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtoroidal.algebra import FE_ONE, FieldElement, Monomial, U, V, d, kappa, q, q2
from qtoroidal.boxes import affine_root, fundamental_weight
from qtoroidal.errors import EvaluationAtPole, NotAPole, PoleNotSimple
from qtoroidal.families import make_macmahon, make_relaxed_verma
from qtoroidal.rational import FactoredRatZ, rz_properties

a = Monomial.from_exponents((1, 2, 0, 0, 1))


def test_one_evaluates_to_one():
    assert FactoredRatZ.one().eval(a) == FE_ONE


def test_affine_root_at_its_parameter():
    got = affine_root(0, a).eval(a)
    assert got == (FieldElement.from_int(-1), FE_ONE)


def test_fundamental_weight_is_balanced():
    f = fundamental_weight(0, a)[0]
    assert f.at_zero() * f.at_infinity() == FE_ONE
    props = rz_properties(f)
    assert props["balanced"] and props["simple_poles_only"]
    assert dict(props["poles"]) == {a * q: 1}


def test_residue_of_fundamental_weight():
    f = fundamental_weight(0, a)[0]
    assert f.residue(a * q) == FieldElement.difference(q, q.inverse())


def test_residue_of_macmahon_reference():
    psi = make_macmahon().psi[0]
    assert psi.residue(Monomial()) == FieldElement.difference(kappa, kappa.inverse())


def test_residue_errors():
    f = fundamental_weight(0, a)[0]
    with pytest.raises(NotAPole):
        f.residue(a)
    g = FactoredRatZ.build(1, 0, [a], [d, d])
    assert not g.simple_poles_only()
    with pytest.raises(PoleNotSimple):
        g.residue(d)
    with pytest.raises(EvaluationAtPole):
        g.eval(d)


def test_relaxed_reference_poles():
    psi = make_relaxed_verma().psi[0]
    uv = U * U * V * V
    assert psi.is_balanced()
    assert dict(psi.poles) == {uv: 1, uv * q2: 1}


def test_automatic_cancellation():
    f = FactoredRatZ.build(1, q, [a, d], [a])
    assert f == FactoredRatZ.build(1, q, [d])
    assert f / f == FactoredRatZ.one()


def test_json_roundtrip():
    f = FactoredRatZ.build(-1, q * d, [a, a, U], [d])
    assert FactoredRatZ.from_json(f.to_json()) == f


def test_scale_argument_moves_roots():
    f = fundamental_weight(0, a)[0]
    g = f.scale_argument(d)
    assert g == fundamental_weight(0, a * d)[0]


monos = st.builds(lambda x, y: Monomial.from_exponents((x, y, 0, 0, 0)), st.integers(-3, 3), st.integers(-3, 3))
ratz = st.builds(lambda s, lead, zs, ps: FactoredRatZ.build(s, lead, zs, ps),
                 st.sampled_from([1, -1]), monos, st.lists(monos, max_size=3), st.lists(monos, max_size=3))


@settings(max_examples=60, deadline=None)
@given(ratz, ratz, monos)
def test_evaluation_is_multiplicative(f, g, p):
    try:
        lhs = (f * g).eval(p)
        rhs = f.eval(p) * g.eval(p)
    except EvaluationAtPole:
        return
    assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(ratz)
def test_inverse(f):
    assert f * f.inverse() == FactoredRatZ.one()


@settings(max_examples=40, deadline=None)
@given(monos, monos)
def test_affine_root_translation(x, y):
    for i in (0, 1):
        try:
            lhs = affine_root(i, x).eval(y)
            rhs = affine_root(i, Monomial()).eval(y / x)
        except EvaluationAtPole:
            continue
        assert lhs == rhs
