"""Factored rational functions of one variable ``z`` with monomial roots.

A ``FactoredRatZ`` stands for

    sign * lead * prod_r (z - r)^{m_r}

where every root ``r`` is a monomial and ``m_r`` is a nonzero integer
(positive for zeros, negative for poles).  Storing net multiplicities makes
the representation automatically cancelled, so equality of canonical forms
is plain tuple equality.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass

from .algebra import (
    FE_ONE,
    ZERO,
    FieldElement,
    LaurentPoly,
    Monomial,
    decode,
    monomial_str,
    substitution_map,
)
from .errors import EvaluationAtPole, NotAPole, PoleNotSimple


def _code(m: Monomial | int) -> int:
    return m.code if isinstance(m, Monomial) else m


@dataclass(frozen=True)
class FactoredRatZ:
    sign: int
    lead: int  # monomial code
    roots: tuple[tuple[int, int], ...]  # sorted (root code, net multiplicity)

    @classmethod
    def build(cls, sign: int = 1, lead: Monomial | int = 0,
              zeros: Iterable[Monomial | int] = (), poles: Iterable[Monomial | int] = ()) -> FactoredRatZ:
        acc: Counter = Counter()
        for z in zeros:
            acc[_code(z)] += 1
        for p in poles:
            acc[_code(p)] -= 1
        return cls._from_counter(sign, _code(lead), acc)

    @classmethod
    def _from_counter(cls, sign: int, lead: int, acc: Mapping[int, int]) -> FactoredRatZ:
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        return cls(sign, lead, tuple(sorted((r, m) for r, m in acc.items() if m)))

    @classmethod
    def one(cls) -> FactoredRatZ:
        return _ONE

    @classmethod
    def linear_ratio(cls, alpha: Monomial, beta: Monomial, gamma: Monomial, delta: Monomial) -> FactoredRatZ:
        """``(alpha z - beta) / (gamma z - delta)``."""
        return cls.build(1, alpha / gamma, [beta / alpha], [delta / gamma])

    # accessors -------------------------------------------------------------
    @property
    def root_map(self) -> dict[int, int]:
        return dict(self.roots)

    @property
    def zeros(self) -> Counter:
        return Counter({Monomial(r): m for r, m in self.roots if m > 0})

    @property
    def poles(self) -> Counter:
        return Counter({Monomial(r): -m for r, m in self.roots if m < 0})

    def degree(self) -> int:
        return sum(m for _, m in self.roots)

    def multiplicity(self, p: Monomial | int) -> int:
        c = _code(p)
        for r, m in self.roots:
            if r == c:
                return m
        return 0

    def is_one(self) -> bool:
        return self.sign == 1 and self.lead == 0 and not self.roots

    # group operations ------------------------------------------------------
    def __mul__(self, other: FactoredRatZ) -> FactoredRatZ:
        acc = Counter(dict(self.roots))
        for r, m in other.roots:
            acc[r] += m
        return FactoredRatZ._from_counter(self.sign * other.sign, self.lead + other.lead, acc)

    def inverse(self) -> FactoredRatZ:
        return FactoredRatZ(self.sign, -self.lead, tuple((r, -m) for r, m in self.roots))

    def __truediv__(self, other: FactoredRatZ) -> FactoredRatZ:
        return self * other.inverse()

    def __pow__(self, n: int) -> FactoredRatZ:
        return FactoredRatZ(self.sign**n if n >= 0 else self.sign**(-n), self.lead * n,
                            tuple((r, m * n) for r, m in self.roots) if n else ())

    def negate(self) -> FactoredRatZ:
        return FactoredRatZ(-self.sign, self.lead, self.roots)

    def scale_argument(self, a: Monomial) -> FactoredRatZ:
        """The function ``z -> f(z / a)``: roots are multiplied by ``a``."""
        deg = self.degree()
        acc = {r + a.code: m for r, m in self.roots}
        return FactoredRatZ._from_counter(self.sign, self.lead - deg * a.code, acc)

    def map_monomials(self, f) -> FactoredRatZ:
        """Apply a lattice map ``f`` on codes to lead and roots."""
        acc: Counter = Counter()
        for r, m in self.roots:
            acc[f(r)] += m
        return FactoredRatZ._from_counter(self.sign, f(self.lead), acc)

    def specialize(self, subst) -> FactoredRatZ:
        return self.map_monomials(substitution_map(subst))

    # evaluation ------------------------------------------------------------
    def eval(self, p: Monomial | int, skip: int | None = None) -> FieldElement:
        """Exact value at ``z = p``; ``skip`` omits one root from the product."""
        pc = _code(p)
        sign = self.sign
        mono = self.lead
        fac: dict[int, int] = {}
        for r, m in self.roots:
            if r == skip:
                continue
            if r == pc:
                if m > 0:
                    return ZERO
                raise EvaluationAtPole(f"z = {monomial_str(pc)} is a pole")
            diff = r - pc
            if diff > 0:
                # p - r = p (1 - r/p)
                mono += pc * m
                fac[diff] = fac.get(diff, 0) + m
            else:
                # p - r = -r (1 - p/r)
                mono += r * m
                if m % 2:
                    sign = -sign
                fac[-diff] = fac.get(-diff, 0) + m
        return FieldElement(LaurentPoly({mono: sign}), None, fac)

    def at_infinity(self) -> FieldElement:
        if self.degree() != 0:
            raise EvaluationAtPole("not regular at infinity")
        return FieldElement(LaurentPoly({self.lead: self.sign}))

    def at_zero(self) -> FieldElement:
        sign, mono = self.sign, self.lead
        for r, m in self.roots:
            mono += r * m
            if m % 2:
                sign = -sign
        return FieldElement(LaurentPoly({mono: sign}))

    def residue(self, p: Monomial | int) -> FieldElement:
        """``res_{z=p} f(z) dz/z`` at a simple pole ``p``."""
        pc = _code(p)
        m = self.multiplicity(pc)
        if m >= 0:
            raise NotAPole(f"{monomial_str(pc)} is not a pole")
        if m < -1:
            raise PoleNotSimple(f"pole at {monomial_str(pc)} has order {-m}")
        return self.eval(pc, skip=pc) / Monomial(pc)

    # properties ------------------------------------------------------------
    def is_balanced(self) -> bool:
        if self.degree() != 0:
            return False
        # f(0) f(inf) = lead^2 prod(r^m) (-1)^{sum m} and sum m = 0
        total = 2 * self.lead + sum(r * m for r, m in self.roots)
        return total == 0

    def simple_poles_only(self) -> bool:
        return all(m >= -1 for _, m in self.roots)

    def pole_list(self) -> list[int]:
        out = []
        for r, m in self.roots:
            if m < 0:
                out.extend([r] * (-m))
        return out

    def to_json(self) -> dict:
        return {
            "sign": self.sign,
            "lead": list(decode(self.lead)),
            "zeros": [list(decode(r)) for r, m in self.roots for _ in range(max(m, 0))],
            "poles": [list(decode(r)) for r, m in self.roots for _ in range(max(-m, 0))],
        }

    @classmethod
    def from_json(cls, data) -> FactoredRatZ:
        return cls.build(
            int(data["sign"]),
            Monomial.from_json(data["lead"]),
            [Monomial.from_json(z) for z in data["zeros"]],
            [Monomial.from_json(p) for p in data["poles"]],
        )

    def __str__(self) -> str:
        head = monomial_str(self.lead)
        if self.sign < 0:
            head = "-" + head
        num = []
        den = []
        for r, m in self.roots:
            fac = f"(z - {monomial_str(r)})"
            if abs(m) > 1:
                fac += f"^{abs(m)}"
            (num if m > 0 else den).append(fac)
        body = head
        if num:
            body += " " + " ".join(num)
        if den:
            body += " / " + " ".join(den)
        return body


_ONE = FactoredRatZ(1, 0, ())


def rz_mul(f: FactoredRatZ, g: FactoredRatZ) -> FactoredRatZ:
    return f * g


def rz_inv(f: FactoredRatZ) -> FactoredRatZ:
    return f.inverse()


def rz_eval(f: FactoredRatZ, p: Monomial) -> FieldElement:
    return f.eval(p)


def rz_residue(f: FactoredRatZ, p: Monomial) -> FieldElement:
    return f.residue(p)


def rz_properties(f: FactoredRatZ) -> dict:
    return {
        "balanced": f.is_balanced(),
        "poles": f.poles,
        "simple_poles_only": f.simple_poles_only(),
    }


@dataclass(frozen=True)
class LWeightPair:
    comp0: FactoredRatZ
    comp1: FactoredRatZ

    def __getitem__(self, i: int) -> FactoredRatZ:
        if i == 0:
            return self.comp0
        if i == 1:
            return self.comp1
        raise IndexError(i)

    def __mul__(self, other: LWeightPair) -> LWeightPair:
        return LWeightPair(self.comp0 * other.comp0, self.comp1 * other.comp1)

    def inverse(self) -> LWeightPair:
        return LWeightPair(self.comp0.inverse(), self.comp1.inverse())

    def __truediv__(self, other: LWeightPair) -> LWeightPair:
        return self * other.inverse()

    def __pow__(self, n: int) -> LWeightPair:
        return LWeightPair(self.comp0**n, self.comp1**n)

    def swap(self) -> LWeightPair:
        return LWeightPair(self.comp1, self.comp0)

    def eval(self, p: Monomial) -> tuple[FieldElement, FieldElement]:
        return self.comp0.eval(p), self.comp1.eval(p)

    def scale_argument(self, a: Monomial) -> LWeightPair:
        return LWeightPair(self.comp0.scale_argument(a), self.comp1.scale_argument(a))

    def map_monomials(self, f) -> LWeightPair:
        return LWeightPair(self.comp0.map_monomials(f), self.comp1.map_monomials(f))

    def specialize(self, subst) -> LWeightPair:
        return LWeightPair(self.comp0.specialize(subst), self.comp1.specialize(subst))

    def is_one(self) -> bool:
        return self.comp0.is_one() and self.comp1.is_one()

    def to_json(self) -> dict:
        return {"comp0": self.comp0.to_json(), "comp1": self.comp1.to_json()}

    def __str__(self) -> str:
        return f"({self.comp0}, {self.comp1})"


LWEIGHT_ONE = LWeightPair(_ONE, _ONE)
FE_UNIT = FE_ONE
