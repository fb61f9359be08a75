import pytest

from qtoroidal.algebra import FE_ONE, ZERO, FieldElement, Monomial, d, q, q1, q2, q3
from qtoroidal.boxes import State
from qtoroidal.engine import (
    Q_MINUS_QINV,
    RELATIONS,
    Engine,
    check_assumptions,
    check_relations,
    degenerate_serre_sum,
    g_eval,
    printed_serre_sum,
    serre_sum,
    verify_serre_identity,
)
from qtoroidal.errors import InvalidState, SubstitutionSingular
from qtoroidal.families import (
    enumerate_states,
    make_broken_layers,
    make_family,
    make_fock,
    make_macmahon,
    make_relaxed_verma,
    make_vector,
    partition_state,
    plane_partition_state,
    relaxed_state,
    vector_state,
)

b = Monomial.from_exponents((1, -2, 0, 0, 0))
a = Monomial.from_exponents((-1, 1, 0, 0, 0))


def test_g_eval():
    assert g_eval(0, 0, a, b) == FieldElement.difference(a, q2 * b)
    assert g_eval(0, 1, q1 * b, b).is_zero()
    assert g_eval(1, 0, a, b) == FieldElement.difference(a, q1 * b) * FieldElement.difference(a, q3 * b)


def test_vector_first_step_coefficient():
    fam = make_vector()
    eng = Engine(fam)
    (target, pos), coeff = next(iter(eng.act_F(State(), 0).items()))
    assert target == vector_state(fam, 1)
    assert coeff == FE_ONE


def test_fock_reference_actions():
    fam = make_fock()
    eng = Engine(fam)
    assert eng.act_E(State(), 0) == {} and eng.act_E(State(), 1) == {}
    (_, _), a_coeff = next(iter(eng.act_F(State(), 0).items()))
    one = partition_state(fam, [1])
    (_, _), b_coeff = next(iter(eng.act_E(one, 0).items()))
    # a * b equals the residue of the reference weight divided by q - q^-1
    assert a_coeff * b_coeff == fam.psi[0].residue(Monomial()) / Q_MINUS_QINV
    assert b_coeff == FE_ONE


def test_relaxed_negative_box_coefficient():
    fam = make_relaxed_verma()
    eng = Engine(fam)
    st = relaxed_state(fam, [], [], -1)
    moves = eng.box_transitions("F", st, 0)
    negative = [c for box, _, c in moves if box.negative]
    assert len(negative) == 1 and not negative[0].is_zero()


def test_macmahon_prohibited_box_coefficient_vanishes():
    fam = make_macmahon()
    eng = Engine(fam)
    st = plane_partition_state(fam, [[1], [1]])
    [(box, _, coeff)] = eng.box_transitions("E", st, 0)
    assert (box.x, box.y, box.z) == (0, 1, 0)
    assert not coeff.is_zero()
    assert coeff.specialize({"k": q}).is_zero()


def test_actions_reject_invalid_states():
    fam = make_fock()
    with pytest.raises(InvalidState):
        Engine(fam).act_F(partition_state(fam, [1, 2]), 0)


@pytest.mark.parametrize("name,bound", [("vector", 6), ("fock", 4), ("macmahon", 3), ("g0", 3),
                                        ("verma", 3), ("relaxed", 2), ("slanted", 1)])
def test_relations_small(name, bound):
    fam = make_family(name)
    report = check_relations(fam, enumerate_states(fam, bound))
    assert report.passed, report.failures[:1]
    assert set(report.counts) >= {"KF", "KE", "FF", "EE", "EF-diagonal"}


def test_relations_color_one():
    for name in ("fock", "macmahon", "relaxed"):
        fam = make_family(name, 1)
        assert check_relations(fam, enumerate_states(fam, 2)).passed


def test_parallel_matches_serial():
    fam = make_fock()
    states = enumerate_states(fam, 3)
    serial = check_relations(fam, states)
    parallel = check_relations(fam, states, jobs=2)
    assert dict(serial.counts) == dict(parallel.counts)
    assert parallel.passed


def test_mutation_is_detected():
    fam = make_fock()
    states = enumerate_states(fam, 2)
    st = partition_state(fam, [1])
    box = fam.convex(st)[0]
    eng = Engine(fam, {("E", st, box): -1})
    report = check_relations(fam, states, RELATIONS, engine=eng)
    assert not report.passed
    assert any(f["relation"].startswith("EF") for f in report.failures)


def test_assumptions_hold():
    for name, bound in (("fock", 6), ("vector", 10), ("relaxed", 2)):
        fam = make_family(name)
        rep = check_assumptions(fam, enumerate_states(fam, bound))
        assert rep.all_passed, rep.witnesses


def test_broken_family_fails_a2_with_double_pole():
    fam = make_broken_layers()
    rep = check_assumptions(fam, enumerate_states(fam, 3))
    assert not rep.status["A2"]
    assert any(w["reason"] == "double pole" and w["order"] == 2 for w in rep.witnesses["A2"])


def test_serre_identity():
    assert verify_serre_identity(20, seed=3)
    z = [Monomial.from_exponents((1, 2, 0, 0, 0)).code, Monomial.from_exponents((-2, 1, 0, 0, 0)).code,
         Monomial.from_exponents((3, 0, 0, 0, 0)).code]
    w = Monomial.from_exponents((0, -3, 0, 0, 0)).code
    assert serre_sum(z, w).is_zero()
    # the six-term sum as printed does not vanish in either reading
    assert not printed_serre_sum(z, w, "z3z2z1").is_zero()
    assert not printed_serre_sum(z, w, "z3z2z3").is_zero()


def test_serre_degenerate_inputs():
    # all arguments equal: every denominator survives and the sum vanishes
    assert serre_sum([0, 0, 0], 0).is_zero()
    with pytest.raises(SubstitutionSingular):
        serre_sum([0, q1.code, 0], 0)
    for p0, p3 in ((q.code, d.code), ((q * d).code, (q**-2).code)):
        assert degenerate_serre_sum(p0, p3) == ZERO
