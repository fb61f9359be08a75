"""Boxes, states, positions, ordering and assembly of l-weights."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .algebra import Monomial, U, V, d, decode, encode, q, q1, q2, q3
from .errors import IncomparableBoxes, InvalidState
from .rational import LWEIGHT_ONE, FactoredRatZ, LWeightPair

_Q = q.code
_D = d.code
_U = U.code
_V = V.code


def position_code(x: int, y: int, z: int, ymu: int = 0, ynu: int = 0) -> int:
    """Code of ``q1^{-x} q2^{-y} q3^{-z}`` with ``q2^{-mu} = U^2``, ``q2^{-nu} = V^2``."""
    return (x - 2 * y + z) * _Q + (z - x) * _D + 2 * ymu * _U + 2 * ynu * _V


@dataclass(frozen=True)
class ShiftedInt:
    """An integer plus formal multiples of ``mu`` and ``nu``."""

    n: int
    mu: int = 0
    nu: int = 0

    def __add__(self, k: int) -> ShiftedInt:
        return ShiftedInt(self.n + k, self.mu, self.nu)

    def __sub__(self, k: int) -> ShiftedInt:
        return ShiftedInt(self.n - k, self.mu, self.nu)

    def to_json(self) -> list[int]:
        return [self.n, self.mu, self.nu]

    def __str__(self) -> str:
        parts = [str(self.n)] if self.n or not (self.mu or self.nu) else []
        for k, name in ((self.mu, "mu"), (self.nu, "nu")):
            if k == 1:
                parts.append(name)
            elif k:
                parts.append(f"{k}{name}")
        return "+".join(parts).replace("+-", "-")


@dataclass(frozen=True)
class Box:
    """A colored signed box.

    Only the ``y`` coordinate carries formal shifts; ``x`` and ``z`` are plain
    integers in every family.  ``group`` is the rank of the ordered group of
    the family universe the box belongs to.
    """

    x: int
    y: int
    z: int
    color: int
    negative: bool = False
    group: int = 0
    ymu: int = 0
    ynu: int = 0
    shift: int = 0
    pos: int = field(default=0, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "pos", position_code(self.x, self.y, self.z, self.ymu, self.ynu) + self.shift)

    @property
    def position(self) -> Monomial:
        return Monomial(self.pos)

    @property
    def sign(self) -> str:
        return "negative" if self.negative else "positive"

    @property
    def coord(self) -> tuple[int, int, int, int, int]:
        return (self.x, self.y, self.ymu, self.ynu, self.z)

    def shifted(self, dx: int = 0, dy: int = 0, dz: int = 0) -> tuple[int, int, int, int, int]:
        return (self.x + dx, self.y + dy, self.ymu, self.ynu, self.z + dz)

    def order_key(self) -> tuple[int, int, int, int]:
        return (self.group, self.y, self.z, self.x)

    def to_json(self) -> dict:
        return {
            "color": self.color,
            "sign": self.sign,
            "x": [self.x, 0, 0],
            "y": [self.y, self.ymu, self.ynu],
            "z": [self.z, 0, 0],
            "group": self.group,
        }

    def __str__(self) -> str:
        y = ShiftedInt(self.y, self.ymu, self.ynu)
        s = "-" if self.negative else ""
        return f"{s}({self.x},{y},{self.z})c{self.color}"


def position(b: Box) -> Monomial:
    return b.position


def box_order(b1: Box, b2: Box) -> str:
    """``"LT"`` or ``"GT"`` according to the family ordering."""
    if b1 == b2:
        raise ValueError("box_order needs two distinct boxes")
    if b1.group == b2.group and (b1.ymu, b1.ynu) != (b2.ymu, b2.ynu):
        raise IncomparableBoxes(f"{b1} and {b2} differ by a non-integer shift")
    return "LT" if b1.order_key() < b2.order_key() else "GT"


@dataclass(frozen=True)
class State:
    plus: frozenset = frozenset()
    minus: frozenset = frozenset()

    def __post_init__(self):
        if any(b.negative for b in self.plus):
            raise InvalidState("plus part contains a negative box")
        if any(not b.negative for b in self.minus):
            raise InvalidState("minus part contains a positive box")

    @classmethod
    def of(cls, plus=(), minus=()) -> State:
        return cls(frozenset(plus), frozenset(minus))

    def boxes(self):
        return list(self.plus) + list(self.minus)

    def size(self) -> int:
        return len(self.plus) + len(self.minus)

    def contains(self, b: Box) -> bool:
        return b in self.plus or b in self.minus

    def add(self, b: Box) -> State:
        """The state obtained by adding ``b`` (a negative box leaves the minus part)."""
        if b.negative:
            return State(self.plus, self.minus - {b})
        return State(self.plus | {b}, self.minus)

    def remove(self, b: Box) -> State:
        """The state obtained by removing ``b`` (a negative box joins the minus part)."""
        if b.negative:
            return State(self.plus, self.minus | {b})
        return State(self.plus - {b}, self.minus)

    def sorted_boxes(self) -> list[Box]:
        return sorted(self.boxes(), key=lambda b: (b.order_key(), b.ymu, b.ynu, b.negative))

    def canonical(self) -> tuple:
        return tuple((b.group, b.x, b.y, b.ymu, b.ynu, b.z, b.negative) for b in self.sorted_boxes())

    def to_json(self) -> dict:
        return {
            "plus": [b.to_json() for b in sorted(self.plus, key=Box.order_key)],
            "minus": [b.to_json() for b in sorted(self.minus, key=Box.order_key)],
        }

    def __str__(self) -> str:
        return "{" + ", ".join(str(b) for b in self.sorted_boxes()) + "}"


EMPTY_STATE = State()


# ---------------------------------------------------------------------------
# weights and roots


def fundamental_weight(i: int, a: Monomial) -> LWeightPair:
    """``0_a`` (``i == 0``) or ``1_a``: the function ``(qz - a)/(z - aq)`` in slot ``i``."""
    f = FactoredRatZ.build(1, q, [a / q], [a * q])
    one = FactoredRatZ.one()
    return LWeightPair(f, one) if i == 0 else LWeightPair(one, f)


@lru_cache(maxsize=None)
def _root_pair(i: int, a_code: int) -> LWeightPair:
    a = Monomial(a_code)
    same = FactoredRatZ.build(1, q2, [a / q2], [q2 * a])
    other = FactoredRatZ.build(1, q1 * q3, [a / q1, a / q3], [q1 * a, q3 * a])
    return LWeightPair(same, other) if i == 0 else LWeightPair(other, same)


def affine_root(i: int, a: Monomial) -> LWeightPair:
    return _root_pair(i, a.code)


@lru_cache(maxsize=None)
def _root_inverse(i: int, a_code: int) -> LWeightPair:
    return _root_pair(i, a_code).inverse()


def box_weight(b: Box, in_minus: bool) -> LWeightPair:
    """Contribution of a box of a state: ``A^{-1}`` for plus boxes, ``A`` for minus boxes."""
    return _root_pair(b.color, b.pos) if in_minus else _root_inverse(b.color, b.pos)


def _product(factors) -> LWeightPair:
    acc0: dict[int, int] = {}
    acc1: dict[int, int] = {}
    sign0 = sign1 = 1
    lead0 = lead1 = 0
    for w in factors:
        c0, c1 = w.comp0, w.comp1
        sign0 *= c0.sign
        sign1 *= c1.sign
        lead0 += c0.lead
        lead1 += c1.lead
        for r, m in c0.roots:
            acc0[r] = acc0.get(r, 0) + m
        for r, m in c1.roots:
            acc1[r] = acc1.get(r, 0) + m
    return LWeightPair(FactoredRatZ._from_counter(sign0, lead0, acc0),
                       FactoredRatZ._from_counter(sign1, lead1, acc1))


def lweight(state: State, psi: LWeightPair) -> LWeightPair:
    factors = [psi]
    factors.extend(box_weight(b, False) for b in state.plus)
    factors.extend(box_weight(b, True) for b in state.minus)
    return _product(factors)


def _check_comparable(b: Box, other: Box) -> None:
    if b.group == other.group and (b.ymu, b.ynu) != (other.ymu, other.ynu):
        raise IncomparableBoxes(f"{b} and {other} differ by a non-integer shift")


def lweight_split(state: State, psi: LWeightPair, b: Box) -> tuple[LWeightPair, LWeightPair]:
    """``(phi_{<b}, phi_{>b})`` with ``b`` itself excluded.

    The reference weight ``psi`` describes the reference state, which already
    contains every negative box.  It therefore goes with the part below a
    positive box and with the part above a negative box.
    """
    key = b.order_key()
    before = [psi] if not b.negative else []
    after = [psi] if b.negative else []
    for group, in_minus in ((state.plus, False), (state.minus, True)):
        for other in group:
            if other == b:
                continue
            _check_comparable(b, other)
            (before if other.order_key() < key else after).append(box_weight(other, in_minus))
    return _product(before), _product(after)


def state_degree(state: State) -> tuple[int, int]:
    deg = [0, 0]
    for b in state.plus:
        deg[b.color] += 1
    for b in state.minus:
        deg[b.color] -= 1
    return deg[0], deg[1]


def box_from_json(data: dict) -> Box:
    x, y, z = data["x"], data["y"], data["z"]
    return Box(
        x=int(x[0]) if isinstance(x, list) else int(x),
        y=int(y[0]) if isinstance(y, list) else int(y),
        z=int(z[0]) if isinstance(z, list) else int(z),
        color=int(data["color"]),
        negative=data.get("sign", "positive") == "negative",
        group=int(data.get("group", 0)),
        ymu=int(y[1]) if isinstance(y, list) else 0,
        ynu=int(y[2]) if isinstance(y, list) else 0,
    )


def state_from_json(data: dict) -> State:
    return State.of([box_from_json(b) for b in data.get("plus", [])],
                    [box_from_json(b) for b in data.get("minus", [])])


__all__ = [
    "Box", "State", "ShiftedInt", "EMPTY_STATE", "position", "position_code", "box_order",
    "fundamental_weight", "affine_root", "box_weight", "lweight", "lweight_split",
    "state_degree", "state_from_json", "box_from_json", "LWEIGHT_ONE", "encode", "decode",
]
