"""The action of the currents, the assumption checker and the relation checker.

Matrix coefficients of ``E_i(z)`` and ``F_i(z)`` are delta functions, so a
product of currents applied to a state is a finite map

    (target state, tuple of support monomials) -> exact coefficient.

Polynomial prefactors such as ``g_{i,j}(z, w)`` are evaluated at the support,
and a relation holds iff every entry of the resulting map vanishes (or equals
the prescribed diagonal value for ``[E_i, F_i]``).
"""

from __future__ import annotations

import itertools
import random
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .algebra import FE_ONE, ZERO, FieldElement, LaurentPoly, Monomial, fsum, q, q1, q2, q3
from .boxes import Box, State, lweight, lweight_split, state_degree
from .errors import EvaluationAtPole, NotAPole, PoleNotSimple, SubstitutionSingular, ToroidalError
from .families import FamilySpec
from .rational import FactoredRatZ, LWeightPair

Transitions = dict  # (target State, support code) -> FieldElement

Q_MINUS_QINV = FieldElement.difference(q, q.inverse())


def g_eval(i: int, j: int, a: Monomial | int, b: Monomial | int) -> FieldElement:
    """``g_{i,j}(a, b)``: ``a - q2 b`` for equal colors, ``(a - q1 b)(a - q3 b)`` otherwise."""
    ac = a.code if isinstance(a, Monomial) else a
    bc = b.code if isinstance(b, Monomial) else b
    if i % 2 == j % 2:
        return FieldElement.difference(ac, bc + q2.code)
    return FieldElement.difference(ac, bc + q1.code) * FieldElement.difference(ac, bc + q3.code)


def g_in_z_first(i: int, j: int, p: int) -> FactoredRatZ:
    """``g_{i,j}(z, p)`` as a function of ``z``."""
    if i % 2 == j % 2:
        return FactoredRatZ.build(1, 0, [p + q2.code])
    return FactoredRatZ.build(1, 0, [p + q1.code, p + q3.code])


def g_in_z_second(i: int, j: int, p: int) -> FactoredRatZ:
    """``g_{i,j}(p, z)`` as a function of ``z``."""
    if i % 2 == j % 2:
        # p - q2 z = -q2 (z - p / q2)
        return FactoredRatZ.build(-1, q2, [p - q2.code])
    # (p - q1 z)(p - q3 z) = q1 q3 (z - p/q1)(z - p/q3)
    return FactoredRatZ.build(1, q1 * q3, [p - q1.code, p - q3.code])


def _as_field(x) -> FieldElement:
    if isinstance(x, FieldElement):
        return x
    if isinstance(x, Monomial):
        return FieldElement.from_monomial(x)
    if isinstance(x, int):
        return FieldElement.from_int(x)
    raise TypeError(f"cannot use {type(x).__name__} as a coefficient factor")


class Engine:
    """Caches l-weights and transitions of one family.

    ``mutations`` maps ``(kind, state, box)`` with ``kind`` in ``{"E", "F"}``
    to a factor multiplying that single coefficient; it exists to show that
    the relation checker notices corrupted coefficients.
    """

    def __init__(self, family: FamilySpec, mutations: Mapping | None = None):
        self.family = family
        self.mutations = {k: _as_field(v) for k, v in (mutations or {}).items()}
        self._lw: dict[State, LWeightPair] = {}
        self._moves: dict[State, tuple[list[Box], list[Box]]] = {}
        self._act: dict[tuple[str, State, int], Transitions] = {}
        self._boxes: dict[tuple[str, State, int], list[tuple[Box, State, FieldElement]]] = {}

    # basic data -------------------------------------------------------------
    def lweight(self, state: State) -> LWeightPair:
        lw = self._lw.get(state)
        if lw is None:
            lw = lweight(state, self.family.psi)
            self._lw[state] = lw
        return lw

    def moves(self, state: State) -> tuple[list[Box], list[Box]]:
        mv = self._moves.get(state)
        if mv is None:
            mv = (self.family.concave(state), self.family.convex(state))
            self._moves[state] = mv
        return mv

    def validate(self, state: State) -> None:
        self.family.require_valid(state)

    # coefficients -------------------------------------------------------------
    def coefficient_F(self, state: State, b: Box) -> FieldElement:
        i = b.color
        _, after = lweight_split(state, self.family.psi, b)
        p = b.pos
        if not b.negative:
            val = after[i].eval(p)
        else:
            val = -(after[i].residue(p) / Q_MINUS_QINV)
        mut = self.mutations.get(("F", state, b))
        return val * mut if mut is not None else val

    def coefficient_E(self, state: State, b: Box) -> FieldElement:
        i = b.color
        before, _ = lweight_split(state, self.family.psi, b)
        p = b.pos
        if not b.negative:
            val = before[i].residue(p) / Q_MINUS_QINV
        else:
            val = before[i].eval(p)
        mut = self.mutations.get(("E", state, b))
        return val * mut if mut is not None else val

    def box_transitions(self, kind: str, state: State, i: int) -> list[tuple[Box, State, FieldElement]]:
        key = (kind, state, i)
        hit = self._boxes.get(key)
        if hit is not None:
            return hit
        cc, cv = self.moves(state)
        out = []
        if kind == "F":
            for b in cc:
                if b.color == i:
                    out.append((b, state.add(b), self.coefficient_F(state, b)))
        elif kind == "E":
            for b in cv:
                if b.color == i:
                    out.append((b, state.remove(b), self.coefficient_E(state, b)))
        else:
            raise ValueError(f"unknown current {kind!r}")
        self._boxes[key] = out
        return out

    def transitions(self, kind: str, state: State, i: int) -> Transitions:
        key = (kind, state, i)
        hit = self._act.get(key)
        if hit is not None:
            return hit
        acc: dict = {}
        for b, target, coeff in self.box_transitions(kind, state, i):
            k = (target, b.pos)
            acc[k] = acc[k] + coeff if k in acc else coeff
        self._act[key] = acc
        return acc

    # public actions -----------------------------------------------------------
    def act_K(self, state: State) -> LWeightPair:
        self.validate(state)
        return self.lweight(state)

    def act_F(self, state: State, i: int) -> Transitions:
        self.validate(state)
        return dict(self.transitions("F", state, i))

    def act_E(self, state: State, i: int) -> Transitions:
        self.validate(state)
        return dict(self.transitions("E", state, i))

    # words ----------------------------------------------------------------
    def apply_word(self, state: State, ops: Sequence[tuple[str, int, int]], nslots: int) -> dict:
        """Apply ``ops`` (written left to right, acting right to left).

        Each op is ``(kind, color, slot)``; the result is keyed by the target
        state and the tuple of supports indexed by slot.  Values are lists of
        path coefficients, summed by the caller.
        """
        cur: dict = {(state, (None,) * nslots): [FE_ONE]}
        for kind, color, slot in reversed(ops):
            nxt: dict = defaultdict(list)
            for (st, sup), coeffs in cur.items():
                base = fsum(coeffs) if len(coeffs) > 1 else coeffs[0]
                if base.is_zero():
                    continue
                for (tgt, p), c in self.transitions(kind, st, color).items():
                    new_sup = sup[:slot] + (p,) + sup[slot + 1:]
                    nxt[(tgt, new_sup)].append(base * c)
            cur = nxt
        return cur


# ---------------------------------------------------------------------------
# reports


@dataclass
class RelationReport:
    counts: dict = field(default_factory=lambda: defaultdict(int))
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def merge(self, other: RelationReport) -> None:
        for k, v in other.counts.items():
            self.counts[k] += v
        self.failures.extend(other.failures)

    def to_json(self) -> dict:
        return {"pass": self.passed, "checked": dict(sorted(self.counts.items())), "failures": self.failures}


def _fail(relation: str, state: State, colors, supports, lhs, rhs) -> dict:
    return {
        "relation": relation,
        "state": str(state),
        "colors": list(colors),
        "supports": [str(Monomial(p)) if p is not None else None for p in supports],
        "lhs": str(lhs),
        "rhs": str(rhs),
        "pass": False,
    }


def _sum(terms) -> FieldElement:
    return fsum(terms)


def check_k_relations(engine: Engine, state: State, report: RelationReport) -> None:
    phi = engine.lweight(state)
    for j in (0, 1):
        for kind in ("F", "E"):
            for (target, p), _ in engine.transitions(kind, state, j).items():
                phi_new = engine.lweight(target)
                for i in (0, 1):
                    sign = FactoredRatZ(-1 if (i + j) % 2 == 0 else 1, 0, ())
                    if kind == "F":
                        expected = sign * g_in_z_first(i, j, p) / g_in_z_second(j, i, p)
                    else:
                        expected = sign * g_in_z_second(j, i, p) / g_in_z_first(i, j, p)
                    got = phi_new[i] / phi[i]
                    report.counts[f"K{kind}"] += 1
                    if got != expected:
                        report.failures.append(_fail(f"K{kind}", state, (i, j), (p,), got, expected))


def check_quadratic(engine: Engine, state: State, kind: str, report: RelationReport) -> None:
    """``EE`` and ``FF`` relations for all color pairs."""
    for i in (0, 1):
        for j in (0, 1):
            sgn = 1 if (i + j) % 2 == 0 else -1
            # word X_i(z) X_j(w) with slots (z, w)
            t1 = engine.apply_word(state, [(kind, i, 0), (kind, j, 1)], 2)
            t2 = engine.apply_word(state, [(kind, j, 1), (kind, i, 0)], 2)
            keys = set(t1) | set(t2)
            for key in keys:
                _, (pz, pw) = key
                if kind == "F":
                    c1 = g_eval(j, i, pw, pz) * sgn
                    c2 = g_eval(i, j, pz, pw)
                else:
                    c1 = g_eval(i, j, pz, pw) * sgn
                    c2 = g_eval(j, i, pw, pz)
                terms = [c1 * x for x in t1.get(key, [])] + [c2 * x for x in t2.get(key, [])]
                total = _sum(terms)
                report.counts[kind * 2] += 1
                if not total.is_zero():
                    report.failures.append(_fail(kind * 2, state, (i, j), (pz, pw), total, 0))


def check_ef(engine: Engine, state: State, report: RelationReport) -> None:
    phi = engine.lweight(state)
    for i in (0, 1):
        for j in (0, 1):
            t1 = engine.apply_word(state, [("E", i, 0), ("F", j, 1)], 2)
            t2 = engine.apply_word(state, [("F", j, 1), ("E", i, 0)], 2)
            expected: dict = {}
            if i == j:
                for p in phi[i].pole_list():
                    key = (state, (p, p))
                    try:
                        expected[key] = phi[i].residue(p) / Q_MINUS_QINV
                    except PoleNotSimple as exc:
                        report.failures.append(_fail("EF", state, (i, j), (p, p), str(exc), "simple pole"))
            keys = set(t1) | set(t2) | set(expected)
            for key in keys:
                total = _sum(list(t1.get(key, [])) + [-x for x in t2.get(key, [])])
                want = expected.get(key, ZERO)
                rel = "EF-diagonal" if key in expected else "EF"
                report.counts[rel] += 1
                if not (total - want).is_zero():
                    report.failures.append(_fail(rel, state, (i, j), key[1], total, want))


SERRE_WORDS: tuple[tuple[int, tuple[str, ...]], ...] = (
    # [X1, [X2, [X3, Y]_{q^2}]]_{q^{-2}} expanded; the scalar is q^(2 * power) times sign
    ((1, 0), ("X1", "X2", "X3", "Y")),
    ((-1, 1), ("X1", "X2", "Y", "X3")),
    ((-1, 0), ("X1", "X3", "Y", "X2")),
    ((1, 1), ("X1", "Y", "X3", "X2")),
    ((-1, -1), ("X2", "X3", "Y", "X1")),
    ((1, 0), ("X2", "Y", "X3", "X1")),
    ((1, -1), ("X3", "Y", "X2", "X1")),
    ((-1, 0), ("Y", "X3", "X2", "X1")),
)

_SLOTS = {"X1": 0, "X2": 1, "X3": 2, "Y": 3}


def serre_scalar(sign: int, power: int) -> FieldElement:
    return FieldElement(LaurentPoly({(q2 ** power).code: sign}))


def check_serre(engine: Engine, state: State, kind: str, report: RelationReport) -> None:
    for i in (0, 1):
        j = 1 - i
        groups: dict = defaultdict(list)
        for (sign, power), word in SERRE_WORDS:
            ops = [(kind, j if w == "Y" else i, _SLOTS[w]) for w in word]
            scal = serre_scalar(sign, power)
            for (tgt, sup), coeffs in engine.apply_word(state, ops, 4).items():
                key = (tgt, tuple(sorted(sup[:3])), sup[3])
                groups[key].extend(scal * c for c in coeffs)
        for key, terms in groups.items():
            total = _sum(terms)
            report.counts[f"Serre-{kind}"] += 1
            if not total.is_zero():
                report.failures.append(_fail(f"Serre-{kind}", state, (i, j), key[1] + (key[2],), total, 0))


RELATIONS = ("K", "FF", "EE", "EF", "Serre-F", "Serre-E")


def check_state(engine: Engine, state: State, relations: Iterable[str] = RELATIONS) -> RelationReport:
    report = RelationReport()
    rels = set(relations)
    try:
        if "K" in rels:
            check_k_relations(engine, state, report)
        if "FF" in rels:
            check_quadratic(engine, state, "F", report)
        if "EE" in rels:
            check_quadratic(engine, state, "E", report)
        if "EF" in rels:
            check_ef(engine, state, report)
        if "Serre-F" in rels:
            check_serre(engine, state, "F", report)
        if "Serre-E" in rels:
            check_serre(engine, state, "E", report)
    except (NotAPole, PoleNotSimple, EvaluationAtPole) as exc:
        report.failures.append(_fail("coefficient", state, (), (), type(exc).__name__, str(exc)))
    return report


_WORKER_ENGINE: Engine | None = None


def _worker(args):
    state, relations = args
    return check_state(_WORKER_ENGINE, state, relations)


def check_relations(family: FamilySpec, states: Iterable[State], relations: Iterable[str] = RELATIONS,
                    jobs: int = 1, engine: Engine | None = None) -> RelationReport:
    """Check the defining relations on every state of ``states``.

    Transitions leaving the given set are followed, so the set need not be
    closed under moves.
    """
    engine = engine or Engine(family)
    states = list(states)
    rels = tuple(relations)
    report = RelationReport()
    if jobs > 1 and len(states) > 1:
        import multiprocessing as mp

        global _WORKER_ENGINE
        _WORKER_ENGINE = engine
        ctx = mp.get_context("fork")
        with ctx.Pool(jobs) as pool:
            for r in pool.imap(_worker, [(s, rels) for s in states], chunksize=1):
                report.merge(r)
        _WORKER_ENGINE = None
    else:
        for s in states:
            report.merge(check_state(engine, s, rels))
    return report


# ---------------------------------------------------------------------------
# assumptions

A5_CONCAVE_OFFSETS = ((0, 0, 1), (0, 1, 0), (1, 0, 0))
A5_CONVEX_OFFSETS = ((0, 0, 0), (0, 0, -1), (0, -1, 0), (-1, 0, 0))


@dataclass
class AssumptionReport:
    status: dict = field(default_factory=lambda: {f"A{k}": True for k in range(1, 6)})
    witnesses: dict = field(default_factory=lambda: {f"A{k}": [] for k in range(1, 6)})
    informational: tuple = ("A5",)

    def fail(self, name: str, witness: dict) -> None:
        self.status[name] = False
        if len(self.witnesses[name]) < 20:
            self.witnesses[name].append(witness)

    @property
    def passed(self) -> bool:
        return all(v for k, v in self.status.items() if k not in self.informational)

    @property
    def all_passed(self) -> bool:
        return all(self.status.values())

    def to_json(self) -> dict:
        return {"pass": self.passed, "status": self.status, "witnesses": self.witnesses,
                "informational": list(self.informational)}


def _offset_ok(base: Box, other: Box, offsets) -> bool:
    if (base.ymu, base.ynu) != (other.ymu, other.ynu):
        return False
    return (other.x - base.x, other.y - base.y, other.z - base.z) in offsets


def check_assumptions(family: FamilySpec, states: Iterable[State], engine: Engine | None = None) -> AssumptionReport:
    engine = engine or Engine(family)
    report = AssumptionReport()
    seen: dict[LWeightPair, State] = {}
    for st in states:
        phi = engine.lweight(st)
        # A1
        if phi in seen and seen[phi] != st:
            report.fail("A1", {"state": str(st), "other": str(seen[phi])})
        seen.setdefault(phi, st)
        # A2
        for i in (0, 1):
            f = phi[i]
            if not f.is_balanced():
                report.fail("A2", {"state": str(st), "color": i, "reason": "not balanced", "phi": str(f)})
            for p, m in f.roots:
                if m < -1:
                    report.fail("A2", {"state": str(st), "color": i, "reason": "double pole",
                                       "pole": str(Monomial(p)), "order": -m})
        cc, cv = engine.moves(st)
        # A3
        for i in (0, 1):
            positions = sorted(b.pos for b in cc + cv if b.color == i)
            poles = sorted(phi[i].pole_list())
            if positions != poles:
                report.fail("A3", {"state": str(st), "color": i,
                                   "boxes": [str(Monomial(p)) for p in positions],
                                   "poles": [str(Monomial(p)) for p in poles]})
        # A4
        for b in cc + cv:
            before, after = lweight_split(st, family.psi, b)
            part = after if not b.negative else before
            if part[b.color].multiplicity(b.pos) < 0:
                report.fail("A4", {"state": str(st), "box": str(b)})
        # A5
        for b in cc:
            new = st.add(b)
            cc2, cv2 = engine.moves(new)
            for c in set(cc2) - set(cc):
                if not _offset_ok(b, c, A5_CONCAVE_OFFSETS):
                    report.fail("A5", {"state": str(st), "added": str(b), "new_concave": str(c)})
            for c in set(cv) - set(cv2):
                if not _offset_ok(b, c, A5_CONVEX_OFFSETS):
                    report.fail("A5", {"state": str(st), "added": str(b), "lost_convex": str(c)})
    return report


# ---------------------------------------------------------------------------
# the rational identity behind the Serre relations


def _k(a: int, b: int) -> FieldElement:
    """``k(a, b) = (a - q1 b)(a - q3 b) / ((b - q1 a)(b - q3 a))``."""
    num = FieldElement.difference(a, b + q1.code) * FieldElement.difference(a, b + q3.code)
    den = FieldElement.difference(b, a + q1.code) * FieldElement.difference(b, a + q3.code)
    if den.is_zero():
        raise SubstitutionSingular("k has a vanishing denominator")
    return num / den


def _h(a: int, b: int) -> FieldElement:
    """``h(a, b) = -(a - q2 b) / (b - q2 a)``."""
    den = FieldElement.difference(b, a + q2.code)
    if den.is_zero():
        raise SubstitutionSingular("h has a vanishing denominator")
    return -(FieldElement.difference(a, b + q2.code) / den)


def serre_s(z1: int, z2: int, z3: int, w: int) -> FieldElement:
    """Product of the ratios collected along one ordering of three added boxes."""
    one = FE_ONE
    k3, k2, k1 = _k(w, z3), _k(w, z2), _k(w, z1)
    t1 = one - serre_scalar(1, 1) * k3
    t2 = one - _h(z3, z2) * k2
    t3 = one - serre_scalar(1, -1) * _h(z3, z1) * _h(z2, z1) * k1
    return t1 * t2 * t3


def serre_sum(z: Sequence[int], w: int) -> FieldElement:
    z1, z2, z3 = z
    h = _h
    terms = [
        serre_s(z1, z2, z3, w),
        serre_s(z2, z1, z3, w) * h(z2, z1),
        serre_s(z1, z3, z2, w) * h(z3, z2),
        serre_s(z2, z3, z1, w) * h(z2, z1) * h(z3, z1),
        serre_s(z3, z1, z2, w) * h(z3, z1) * h(z3, z2),
        serre_s(z3, z2, z1, w) * h(z2, z1) * h(z3, z1) * h(z3, z2),
    ]
    return fsum(terms)


def printed_serre_sum(z: Sequence[int], w: int, last: str = "z3z2z1") -> FieldElement:
    """The six-term sum with ``S(z1,z2,z3) = (1-q2 k3)(1-k3 k2)(1-q2^{-1} k3 k2 k1)``, ``k_i = k(z_i, w)``.

    ``last`` selects the reading of the final term's arguments.
    """
    z1, z2, z3 = z

    def s(a, b, c):
        ka, kb, kc = _k(a, w), _k(b, w), _k(c, w)
        return ((FE_ONE - serre_scalar(1, 1) * kc) * (FE_ONE - kc * kb)
                * (FE_ONE - serre_scalar(1, -1) * kc * kb * ka))

    h = _h
    final = s(z3, z2, z3) if last == "z3z2z3" else s(z3, z2, z1)
    terms = [
        s(z1, z2, z3),
        s(z2, z1, z3) * h(z1, z2),
        s(z1, z3, z2) * h(z2, z3),
        s(z2, z3, z1) * h(z1, z2) * h(z1, z3),
        s(z3, z1, z2) * h(z1, z3) * h(z2, z3),
        final * h(z1, z2) * h(z1, z3) * h(z2, z3),
    ]
    return fsum(terms)


def degenerate_serre_sum(p0: int, p3: int) -> FieldElement:
    """``1 + h(p3,p1) - h(p3,p1) k(p3,p0) - h(p3,p1) k(p3,p0) h(p3,p2)`` at ``p2 = p0/q1``, ``p1 = q1 p0``."""
    p1 = p0 + q1.code
    p2 = p0 - q1.code
    h31 = _h(p3, p1)
    k30 = _k(p3, p0)
    return fsum([FE_ONE, h31, -(h31 * k30), -(h31 * k30 * _h(p3, p2))])


def _random_monomial(rng: random.Random, lo: int, hi: int) -> int:
    return Monomial.from_exponents((rng.randint(lo, hi), rng.randint(lo, hi), 0, 0, 0)).code


def verify_serre_identity(trials: int, seed: int = 0, lo: int = -3, hi: int = 3,
                          max_resample: int = 1000) -> bool:
    """Exact check of the six-term identity and the degenerate four-term identity.

    Singular substitutions are resampled; the result is ``True`` iff every
    nonsingular evaluation vanishes.
    """
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = random.Random(seed)
    done = 0
    attempts = 0
    while done < trials:
        attempts += 1
        if attempts > trials + max_resample:
            raise SubstitutionSingular("too many singular substitutions")
        z = [_random_monomial(rng, lo, hi) for _ in range(3)]
        w = _random_monomial(rng, lo, hi)
        try:
            six = serre_sum(z, w)
            four = degenerate_serre_sum(w, z[0])
        except SubstitutionSingular:
            continue
        if not six.is_zero() or not four.is_zero():
            return False
        done += 1
    return True


__all__ = [
    "Engine", "RelationReport", "AssumptionReport", "g_eval", "check_relations", "check_state",
    "check_assumptions", "verify_serre_identity", "serre_sum", "printed_serre_sum",
    "degenerate_serre_sum", "RELATIONS", "Q_MINUS_QINV",
]
