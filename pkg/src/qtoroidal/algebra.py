"""Exact arithmetic over the lattice of generic parameters.

Five formal generators are used: ``q``, ``d``, ``U = q^{-mu}``, ``V = q^{-nu}``
and ``k`` (the level parameter kappa).  The derived constants are

    q1 = q^{-1} d,   q2 = q^2,   q3 = q^{-1} d^{-1},

so that ``q1 * q2 * q3 == 1``.  With this choice ``q2^{-mu} = U^2``.

A monomial is stored as a single Python integer: the exponent vector
``(e_q, e_d, e_U, e_V, e_k)`` written in balanced base ``2**21``.  Adding two
codes adds the exponent vectors, which keeps the hot paths cheap.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from math import gcd

from .errors import DivisionByZero, SpecializationCollapsesDenominator

GENERATORS = ("q", "d", "U", "V", "k")
NGENS = len(GENERATORS)
_BASE = 1 << 21
_HALF = _BASE >> 1
_WEIGHTS = tuple(_BASE**i for i in range(NGENS))


def encode(exponents: Iterable[int]) -> int:
    code = 0
    for w, e in zip(_WEIGHTS, exponents):
        if not -_HALF < e < _HALF:
            raise OverflowError(f"exponent {e} out of range")
        code += e * w
    return code


def decode(code: int) -> tuple[int, ...]:
    out = []
    for _ in range(NGENS):
        e = code % _BASE
        if e >= _HALF:
            e -= _BASE
        out.append(e)
        code = (code - e) // _BASE
    return tuple(out)


class Monomial:
    """A Laurent monomial ``q^a d^b U^c V^e k^f``; immutable."""

    __slots__ = ("code",)

    def __init__(self, code: int = 0):
        object.__setattr__(self, "code", code)

    def __setattr__(self, name, value):
        raise AttributeError("Monomial is immutable")

    @classmethod
    def from_exponents(cls, exponents: Iterable[int]) -> Monomial:
        exps = tuple(exponents)
        if len(exps) != NGENS:
            raise ValueError(f"expected {NGENS} exponents, got {len(exps)}")
        return cls(encode(exps))

    @classmethod
    def gen(cls, name: str) -> Monomial:
        exps = [0] * NGENS
        exps[GENERATORS.index(name)] = 1
        return cls(encode(exps))

    @property
    def exponents(self) -> tuple[int, ...]:
        return decode(self.code)

    def is_one(self) -> bool:
        return self.code == 0

    def __mul__(self, other: Monomial) -> Monomial:
        if not isinstance(other, Monomial):
            return NotImplemented
        return Monomial(self.code + other.code)

    def __truediv__(self, other: Monomial) -> Monomial:
        if not isinstance(other, Monomial):
            return NotImplemented
        return Monomial(self.code - other.code)

    def __pow__(self, n: int) -> Monomial:
        return Monomial(self.code * n)

    def inverse(self) -> Monomial:
        return Monomial(-self.code)

    def __eq__(self, other):
        return isinstance(other, Monomial) and other.code == self.code

    def __hash__(self):
        return hash(("mono", self.code))

    def __repr__(self):
        return f"Monomial({self})"

    def __str__(self):
        return monomial_str(self.code)

    def to_json(self) -> list[int]:
        return list(self.exponents)

    @classmethod
    def from_json(cls, data) -> Monomial:
        return cls.from_exponents(int(e) for e in data)


def monomial_str(code: int) -> str:
    parts = []
    for name, e in zip(GENERATORS, decode(code)):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return " ".join(parts) if parts else "1"


ONE = Monomial(0)
q = Monomial.gen("q")
d = Monomial.gen("d")
U = Monomial.gen("U")
V = Monomial.gen("V")
kappa = Monomial.gen("k")
q1 = q.inverse() * d
q2 = q * q
q3 = q.inverse() * d.inverse()


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return a * b


def mono_inv(a: Monomial) -> Monomial:
    return a.inverse()


def swap_q1_q3(m: Monomial) -> Monomial:
    """The involution exchanging q1 and q3 (``d -> d^{-1}``)."""
    e = list(m.exponents)
    e[1] = -e[1]
    return Monomial.from_exponents(e)


# ---------------------------------------------------------------------------
# Laurent polynomials with integer coefficients


class LaurentPoly:
    """Finite map monomial-code -> nonzero integer."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, int] | None = None):
        if terms:
            self.terms = {c: v for c, v in terms.items() if v}
        else:
            self.terms = {}

    @classmethod
    def const(cls, n: int) -> LaurentPoly:
        return cls({0: n}) if n else cls()

    @classmethod
    def mono(cls, m: Monomial | int, coeff: int = 1) -> LaurentPoly:
        code = m.code if isinstance(m, Monomial) else m
        return cls({code: coeff})

    def is_zero(self) -> bool:
        return not self.terms

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        out = dict(self.terms)
        for c, v in other.terms.items():
            s = out.get(c, 0) + v
            if s:
                out[c] = s
            else:
                out.pop(c, None)
        res = LaurentPoly()
        res.terms = out
        return res

    def __neg__(self) -> LaurentPoly:
        res = LaurentPoly()
        res.terms = {c: -v for c, v in self.terms.items()}
        return res

    def __sub__(self, other: LaurentPoly) -> LaurentPoly:
        return self + (-other)

    def __mul__(self, other) -> LaurentPoly:
        if isinstance(other, int):
            return LaurentPoly({c: v * other for c, v in self.terms.items()})
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (cb, vb), = b.items()
            res = LaurentPoly()
            res.terms = {c + cb: v * vb for c, v in a.items()}
            return res
        out: dict[int, int] = {}
        get = out.get
        for cb, vb in b.items():
            for ca, va in a.items():
                k = ca + cb
                out[k] = get(k, 0) + va * vb
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.const(other)
        return isinstance(other, LaurentPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def map_codes(self, f) -> LaurentPoly:
        out: dict[int, int] = {}
        for c, v in self.terms.items():
            k = f(c)
            out[k] = out.get(k, 0) + v
        return LaurentPoly(out)

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for c in sorted(self.terms, reverse=True):
            v = self.terms[c]
            m = monomial_str(c)
            if m == "1":
                pieces.append(str(v))
            elif v == 1:
                pieces.append(m)
            elif v == -1:
                pieces.append(f"-{m}")
            else:
                pieces.append(f"{v}*{m}")
        return " + ".join(pieces).replace("+ -", "- ")

    def to_json(self):
        return [[list(decode(c)), v] for c, v in sorted(self.terms.items())]


_POLY_ONE = LaurentPoly.const(1)
_binomial_cache: dict[tuple[int, int], LaurentPoly] = {}


def _binomial_power(r: int, e: int) -> LaurentPoly:
    """Expand ``(1 - r)^e`` for ``e >= 0``."""
    key = (r, e)
    hit = _binomial_cache.get(key)
    if hit is not None:
        return hit
    if e == 0:
        res = _POLY_ONE
    elif e == 1:
        res = LaurentPoly({0: 1, r: -1})
    else:
        half = _binomial_power(r, e // 2)
        res = half * half
        if e % 2:
            res = res * _binomial_power(r, 1)
    if len(_binomial_cache) < 200_000:
        _binomial_cache[key] = res
    return res


# ---------------------------------------------------------------------------
# Fraction field


class FieldElement:
    """An element of the fraction field of ``LaurentPoly``.

    The value is ``num / den * prod((1 - r)^e)`` where the product runs over
    canonical binomials (``r`` a monomial code with ``r > 0``).  Products and
    quotients of differences of monomials, which is everything the action
    formulas produce, therefore stay fully factored; sums expand only what is
    not common to all summands.  No multivariate gcd is ever computed and
    equality is decided by cross-multiplication.
    """

    __slots__ = ("num", "den", "fac")

    def __init__(self, num: LaurentPoly, den: LaurentPoly | None = None, fac: Mapping[int, int] | None = None):
        if den is not None and den.is_zero():
            raise DivisionByZero("zero denominator")
        self.num = num
        self.den = den if den is not None else _POLY_ONE
        if num.is_zero():
            self.den = _POLY_ONE
            self.fac = {}
        else:
            self.fac = {r: e for r, e in fac.items() if e} if fac else {}
            self._normalize_den()

    def _normalize_den(self):
        # strip a monomial denominator into the numerator
        if self.den.is_monomial():
            (c, v), = self.den.terms.items()
            if v in (1, -1):
                self.num = LaurentPoly({k - c: val * v for k, val in self.num.terms.items()})
                self.den = _POLY_ONE

    # construction helpers --------------------------------------------------
    @classmethod
    def from_int(cls, n: int) -> FieldElement:
        return cls(LaurentPoly.const(n))

    @classmethod
    def from_monomial(cls, m: Monomial, sign: int = 1) -> FieldElement:
        return cls(LaurentPoly.mono(m, sign))

    @classmethod
    def from_poly(cls, p: LaurentPoly) -> FieldElement:
        return cls(p)

    @classmethod
    def difference(cls, a: Monomial | int, b: Monomial | int) -> FieldElement:
        """``a - b`` for monomials, kept in factored form."""
        ca = a.code if isinstance(a, Monomial) else a
        cb = b.code if isinstance(b, Monomial) else b
        if ca == cb:
            return ZERO
        r = cb - ca
        if r > 0:
            # a (1 - b/a)
            return cls(LaurentPoly({ca: 1}), None, {r: 1})
        # -b (1 - a/b)
        return cls(LaurentPoly({cb: -1}), None, {-r: 1})

    # predicates ------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    # arithmetic ------------------------------------------------------------
    def __mul__(self, other) -> FieldElement:
        if isinstance(other, int):
            other = FieldElement.from_int(other)
        elif isinstance(other, Monomial):
            other = FieldElement.from_monomial(other)
        if self.is_zero() or other.is_zero():
            return ZERO
        fac = dict(self.fac)
        for r, e in other.fac.items():
            fac[r] = fac.get(r, 0) + e
        den = self.den if other.den is _POLY_ONE else (other.den if self.den is _POLY_ONE else self.den * other.den)
        return FieldElement(self.num * other.num, den, fac)

    __rmul__ = __mul__

    def inverse(self) -> FieldElement:
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        return FieldElement(self.den, self.num, {r: -e for r, e in self.fac.items()})

    def __truediv__(self, other) -> FieldElement:
        if isinstance(other, int):
            other = FieldElement.from_int(other)
        elif isinstance(other, Monomial):
            other = FieldElement.from_monomial(other)
        if other.is_zero():
            raise DivisionByZero("division by zero field element")
        return self * other.inverse()

    def __neg__(self) -> FieldElement:
        if self.is_zero():
            return self
        return FieldElement(-self.num, self.den, self.fac)

    def __add__(self, other) -> FieldElement:
        return fsum((self, other))

    def __sub__(self, other) -> FieldElement:
        if isinstance(other, int):
            other = FieldElement.from_int(other)
        return fsum((self, -other))

    def __radd__(self, other):
        return fsum((FieldElement.from_int(other), self)) if isinstance(other, int) else NotImplemented

    def __eq__(self, other):
        if isinstance(other, int):
            other = FieldElement.from_int(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # equality is semantic; no cheap canonical hash

    # expansion -------------------------------------------------------------
    def expanded(self) -> tuple[LaurentPoly, LaurentPoly]:
        """Fully expanded ``(numerator, denominator)`` polynomials."""
        num, den = self.num, self.den
        for r, e in self.fac.items():
            if e > 0:
                num = num * _binomial_power(r, e)
            else:
                den = den * _binomial_power(r, -e)
        return num, den

    def specialize(self, subst: Mapping[str, Monomial]) -> FieldElement:
        f = substitution_map(subst)
        num = self.num.map_codes(f)
        den = self.den.map_codes(f)
        if den.is_zero():
            raise SpecializationCollapsesDenominator("denominator vanishes")
        fac: dict[int, int] = {}
        for r, e in self.fac.items():
            r2 = f(r)
            if r2 == 0:
                if e > 0:
                    return ZERO
                raise SpecializationCollapsesDenominator("binomial factor in denominator vanishes")
            if r2 < 0:
                # 1 - r2 = -r2 (1 - 1/r2)
                unit = LaurentPoly({r2 * abs(e): (-1) ** abs(e)})
                if e > 0:
                    num = num * unit
                else:
                    den = den * unit
                r2 = -r2
            fac[r2] = fac.get(r2, 0) + e
        if num.is_zero():
            return ZERO
        return FieldElement(num, den, fac)

    def __repr__(self):
        return f"FieldElement({self})"

    def __str__(self):
        n, dd = self.expanded()
        if dd == _POLY_ONE:
            return f"{n}"
        return f"({n}) / ({dd})"

    def to_json(self):
        n, dd = self.expanded()
        return {"num": n.to_json(), "den": dd.to_json()}


ZERO = FieldElement(LaurentPoly())
FE_ONE = FieldElement(LaurentPoly.const(1))


def fsum(terms: Iterable[FieldElement]) -> FieldElement:
    """Exact sum; factors common to every summand are kept factored."""
    items = [t if isinstance(t, FieldElement) else FieldElement.from_int(t) for t in terms]
    items = [t for t in items if not t.is_zero()]
    if not items:
        return ZERO
    if len(items) == 1:
        return items[0]
    # common factor: per binomial the minimum exponent over all summands
    keys = set()
    for t in items:
        keys.update(t.fac)
    common = {}
    for r in keys:
        common[r] = min(t.fac.get(r, 0) for t in items)
    # common denominator over the general parts (product of distinct dens)
    dens: list[LaurentPoly] = []
    for t in items:
        if t.den is not _POLY_ONE and t.den != _POLY_ONE and not any(t.den == x for x in dens):
            dens.append(t.den)
    total = LaurentPoly()
    for t in items:
        part = t.num
        for r, e in t.fac.items():
            extra = e - common[r]
            if extra:
                part = part * _binomial_power(r, extra)
        for r in keys:
            if r not in t.fac and common[r] < 0:
                part = part * _binomial_power(r, -common[r])
        for dd in dens:
            if not (t.den == dd):
                part = part * dd
        total = total + part
    if total.is_zero():
        return ZERO
    den = _POLY_ONE
    for dd in dens:
        den = den * dd
    return FieldElement(total, den, common)


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# Specialization


def parse_monomial(text: str) -> Monomial:
    """Parse ``"q^-2"``, ``"q3"``, ``"q1^2 d"``, ``"1"`` and similar."""
    named = {"q1": q1, "q2": q2, "q3": q3, "kappa": kappa, "mu": U, "nu": V}
    named.update({g: Monomial.gen(g) for g in GENERATORS})
    text = text.replace("*", " ").strip()
    result = ONE
    if text in ("", "1"):
        return result
    for tok in text.split():
        base, _, exp = tok.partition("^")
        if base not in named:
            raise ValueError(f"unknown generator {base!r}")
        n = int(exp) if exp else 1
        result = result * named[base] ** n
    return result


def substitution_map(subst: Mapping[str, Monomial]):
    """Linear map on monomial codes sending generator ``g`` to ``subst[g]``."""
    images = []
    for g in GENERATORS:
        key = "kappa" if g == "k" and "kappa" in subst else g
        images.append(subst.get(key, Monomial.gen(g)).code)

    def f(code: int) -> int:
        return sum(e * img for e, img in zip(decode(code), images))

    return f


def specialize(x, subst: Mapping[str, Monomial]):
    """Ring homomorphism induced by ``generator -> monomial``."""
    if isinstance(x, Monomial):
        return Monomial(substitution_map(subst)(x.code))
    if isinstance(x, LaurentPoly):
        return x.map_codes(substitution_map(subst))
    if isinstance(x, FieldElement):
        return x.specialize(subst)
    if hasattr(x, "specialize"):
        return x.specialize(subst)
    raise TypeError(f"cannot specialize {type(x).__name__}")
