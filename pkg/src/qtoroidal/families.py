"""Module families: box universes, reference l-weights and state validity.

Every family is described by a few ordered *groups* of boxes.  A state is
valid when the set of *filled* boxes (positive boxes of the state together
with the negative boxes that were not removed) is closed downwards along the
coordinate axes of each group, avoids the prohibited boxes and satisfies an
optional extra predicate.  This single rule reproduces partitions, plane
partitions, vertical partitions, towers and the staircase condition of the
slanted family.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field, replace

from .algebra import ONE, Monomial, U, V, kappa, q, q1, q2, q3
from .boxes import Box, State, lweight, state_degree
from .errors import InvalidProhibitedBox, InvalidSlope, InvalidState
from .rational import FactoredRatZ, LWeightPair

Coord = tuple[int, int, int]

_AXES = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}


@dataclass(frozen=True)
class Group:
    """One ordered group of boxes ``(x, y + ymu*mu + ynu*nu, z)``."""

    rank: int
    name: str
    contains: Callable[[int, int, int], bool]
    negative: Callable[[int, int, int], bool] = lambda x, y, z: False
    seeds: tuple[Coord, ...] = ()
    ymu: int = 0
    ynu: int = 0
    axes: tuple[str, ...] = ("x", "y", "z")


@dataclass
class FamilySpec:
    name: str
    psi: LWeightPair
    groups: tuple[Group, ...]
    params: dict = field(default_factory=dict)
    color_flip: int = 0
    shift: int = 0
    prohibited: frozenset = frozenset()
    extra_valid: Callable[[State], bool] | None = None
    reference: State = field(default_factory=State)

    def __post_init__(self):
        self._lookup_cache: dict = {}
        self._seed_boxes: list[Box] | None = None

    # universe ----------------------------------------------------------------
    def lookup(self, x: int, y: int, ymu: int, ynu: int, z: int) -> Box | None:
        key = (x, y, ymu, ynu, z)
        cache = self._lookup_cache
        if key in cache:
            return cache[key]
        found = None
        for g in self.groups:
            if g.ymu == ymu and g.ynu == ynu and g.contains(x, y, z):
                found = Box(x, y, z, (x + z + self.color_flip) % 2, bool(g.negative(x, y, z)),
                            g.rank, ymu, ynu, self.shift)
                break
        cache[key] = found
        return found

    def box(self, x: int, y: int, z: int, ymu: int = 0, ynu: int = 0) -> Box:
        b = self.lookup(x, y, ymu, ynu, z)
        if b is None:
            raise InvalidState(f"({x},{y}+{ymu}mu+{ynu}nu,{z}) is not a box of {self.name}")
        return b

    def group_of(self, b: Box) -> Group:
        for g in self.groups:
            if g.rank == b.group:
                return g
        raise InvalidState(f"{b} has unknown group {b.group}")

    def seed_boxes(self) -> list[Box]:
        if self._seed_boxes is None:
            out = []
            for g in self.groups:
                for (x, y, z) in g.seeds:
                    b = self.lookup(x, y, g.ymu, g.ynu, z)
                    if b is not None:
                        out.append(b)
            self._seed_boxes = out
        return self._seed_boxes

    def neighbors(self, b: Box, step: int) -> list[Box]:
        g = self.group_of(b)
        out = []
        for a in g.axes:
            dx, dy, dz = _AXES[a]
            nb = self.lookup(b.x + step * dx, b.y + step * dy, b.ymu, b.ynu, b.z + step * dz)
            if nb is not None:
                out.append(nb)
        return out

    def predecessors(self, b: Box) -> list[Box]:
        return self.neighbors(b, -1)

    def successors(self, b: Box) -> list[Box]:
        return self.neighbors(b, 1)

    # validity -----------------------------------------------------------------
    @staticmethod
    def filled(state: State, b: Box) -> bool:
        return (b not in state.minus) if b.negative else (b in state.plus)

    def _can_fill(self, state: State, b: Box) -> bool:
        if not b.negative and b.coord in self.prohibited:
            return False
        return all(self.filled(state, p) for p in self.predecessors(b))

    def _can_empty(self, state: State, b: Box) -> bool:
        return not any(self.filled(state, s) for s in self.successors(b))

    def is_valid(self, state: State) -> bool:
        for b in state.plus:
            if self.lookup(*b.coord) != b or b.negative or not self._can_fill(state, b):
                return False
        for b in state.minus:
            if self.lookup(*b.coord) != b or not b.negative or not self._can_empty(state, b):
                return False
        if self.extra_valid is not None and not self.extra_valid(state):
            return False
        return True

    def require_valid(self, state: State) -> None:
        if not self.is_valid(state):
            raise InvalidState(f"{state} is not a valid state of {self.name}")

    # moves ------------------------------------------------------------------
    def concave(self, state: State) -> list[Box]:
        cands: set[Box] = set()
        for b in self.seed_boxes():
            if not b.negative:
                cands.add(b)
        for b in state.plus:
            cands.update(self.successors(b))
        cands.update(state.minus)
        out = []
        for b in cands:
            if self.filled(state, b):
                continue
            if not self._can_fill(state, b):
                continue
            if self.extra_valid is not None and not self.extra_valid(state.add(b)):
                continue
            out.append(b)
        return sorted(out, key=_box_sort_key)

    def convex(self, state: State) -> list[Box]:
        cands: set[Box] = set(state.plus)
        for b in self.seed_boxes():
            if b.negative:
                cands.add(b)
        for b in state.minus:
            cands.update(p for p in self.predecessors(b) if p.negative)
        out = []
        for b in cands:
            if not self.filled(state, b):
                continue
            if not self._can_empty(state, b):
                continue
            if self.extra_valid is not None and not self.extra_valid(state.remove(b)):
                continue
            out.append(b)
        return sorted(out, key=_box_sort_key)

    def lweight(self, state: State) -> LWeightPair:
        return lweight(state, self.psi)

    def describe(self) -> dict:
        return {"name": self.name, "params": {k: str(v) for k, v in self.params.items()}}


def _box_sort_key(b: Box):
    return (b.order_key(), b.ymu, b.ynu, b.negative)


# ---------------------------------------------------------------------------
# helpers


def _ratio(lead: Monomial, zeros: Sequence[Monomial], poles: Sequence[Monomial]) -> FactoredRatZ:
    return FactoredRatZ.build(1, lead, zeros, poles)


def _one() -> FactoredRatZ:
    return FactoredRatZ.one()


def _color(psi: LWeightPair, color: int) -> LWeightPair:
    return psi if color == 0 else psi.swap()


def _check_color(color: int) -> None:
    if color not in (0, 1):
        raise ValueError(f"color must be 0 or 1, got {color!r}")


# ---------------------------------------------------------------------------
# vector modules


def make_vector(color: int = 0) -> FamilySpec:
    _check_color(color)
    from .boxes import fundamental_weight

    psi = fundamental_weight(0, q.inverse()) * fundamental_weight(1, q * q1).inverse()
    group = Group(0, "line", lambda x, y, z: y == 0 and z == 0, lambda x, y, z: x < 0,
                  seeds=((0, 0, 0), (-1, 0, 0)), axes=("x",))
    return FamilySpec("vector", _color(psi, color), (group,), {"kind": "vector", "color": color},
                      color_flip=color)


def vector_state(family: FamilySpec, k: int) -> State:
    if k >= 0:
        return State.of([family.box(i, 0, 0) for i in range(k)])
    return State.of(minus=[family.box(i, 0, 0) for i in range(k, 0)])


# ---------------------------------------------------------------------------
# Fock and Macmahon modules


def make_fock(color: int = 0) -> FamilySpec:
    _check_color(color)
    from .boxes import fundamental_weight

    psi = fundamental_weight(0, q.inverse())
    group = Group(0, "plane", lambda x, y, z: y == 0 and x >= 0 and z >= 0, seeds=((0, 0, 0),))
    return FamilySpec("fock", _color(psi, color), (group,), {"kind": "fock", "color": color},
                      color_flip=color)


def partition_state(family: FamilySpec, parts: Sequence[int]) -> State:
    """Rows of a Young diagram placed along ``x``, stacked along ``z``."""
    return State.of([family.box(i, 0, j) for j, row in enumerate(parts) for i in range(row)])


def _macmahon_psi(k: Monomial) -> LWeightPair:
    return LWeightPair(_ratio(k, [k.inverse() * k.inverse()], [ONE]), _one())


def make_macmahon(color: int = 0) -> FamilySpec:
    _check_color(color)
    group = Group(0, "octant", lambda x, y, z: x >= 0 and y >= 0 and z >= 0, seeds=((0, 0, 0),))
    return FamilySpec("macmahon", _color(_macmahon_psi(kappa), color), (group,),
                      {"kind": "macmahon", "color": color}, color_flip=color)


def plane_partition_state(family: FamilySpec, layers: Sequence[Sequence[int]]) -> State:
    """Layer ``j`` sits at height ``y = j``; its rows run along ``x`` and stack along ``z``."""
    boxes = []
    for y, layer in enumerate(layers):
        for z, row in enumerate(layer):
            for x in range(row):
                boxes.append(family.box(x, y, z))
    return State.of(boxes)


def level_monomial(coord: Coord) -> Monomial:
    """``kappa`` with ``kappa^2 = p(box)^{-1}`` for a white box ``coord``."""
    x, y, z = coord
    if (x + z) % 2:
        raise InvalidProhibitedBox(f"{coord} is not white")
    return Monomial.from_exponents(((-x + 2 * y - z) // 2, (x - z) // 2, 0, 0, 0))


def make_restricted_macmahon(color: int, prohibited: Coord) -> FamilySpec:
    _check_color(color)
    x, y, z = prohibited
    if min(x, y, z) < 0 or min(x, y, z) >= 1 or (x + z) % 2:
        raise InvalidProhibitedBox(f"prohibited box {prohibited} must be white with min < 1")
    k = level_monomial(prohibited)
    base = make_macmahon(color)
    psi = base.psi.specialize({"k": k})
    return replace(base, name="restricted_macmahon", psi=psi,
                   params={"kind": "restricted_macmahon", "color": color,
                           "prohibited": tuple(prohibited), "kappa": k},
                   prohibited=frozenset({(x, y, 0, 0, z)}))


def make_g0(color: int = 0) -> FamilySpec:
    """Two vertical layers: the Macmahon module with the box (0,0,2) prohibited."""
    fam = make_restricted_macmahon(color, (0, 0, 2))
    fam.name = "g0"
    fam.params["kind"] = "g0"
    return fam


# ---------------------------------------------------------------------------
# Verma type modules


def _bottom_group(rank: int) -> Group:
    return Group(rank, "bottom", lambda x, y, z: z == 1 and x >= 0 and y >= 0, seeds=((0, 0, 1),))


def _vertical_fill(family: FamilySpec, parts: Sequence[int], z: int, x0: int, ymu: int, ynu: int = 0):
    return [family.box(x0 + i, k, z, ymu, ynu) for i, h in enumerate(parts) for k in range(h)]


def make_eval_verma(color: int = 0) -> FamilySpec:
    _check_color(color)
    psi = LWeightPair(
        _ratio(q3 * U, [q3 ** -2], [U * U]),
        _ratio(U.inverse(), [q3.inverse() * U * U], [q3.inverse()]),
    )
    pedestal = Group(0, "pedestal", lambda x, y, z: z == 0 and x >= 0 and y >= 0, seeds=((0, 0, 0),), ymu=1)
    bottom = _bottom_group(1)
    return FamilySpec("verma", _color(psi, color), (pedestal, bottom), {"kind": "verma", "color": color},
                      color_flip=color)


def verma_state(family: FamilySpec, pedestal: Sequence[int], bottom: Sequence[int]) -> State:
    """Both partitions are read vertically: part ``i`` is the height of column ``x = i``."""
    return State.of(_vertical_fill(family, pedestal, 0, 0, 1) + _vertical_fill(family, bottom, 1, 0, 0))


def _relaxed_groups(tower: Group) -> tuple[Group, ...]:
    bottom = _bottom_group(0)
    pedestal = Group(1, "pedestal", lambda x, y, z: z == 0 and x >= 1 and y >= 0, seeds=((1, 0, 0),), ymu=1)
    return (bottom, pedestal, tower)


def make_relaxed_verma(color: int = 0) -> FamilySpec:
    _check_color(color)
    w = U * V * V
    uv2 = U * U * V * V
    psi = LWeightPair(
        _ratio(q3 * w, [q3 ** -2, q2 * U * U], [uv2, q2 * uv2]),
        _ratio(w.inverse(), [q3.inverse() * uv2, q1.inverse() * uv2], [q3.inverse(), q1.inverse() * U * U]),
    )
    tower = Group(2, "tower", lambda x, y, z: x == 0 and z == 0, lambda x, y, z: y < 0,
                  seeds=((0, 0, 0), (0, -1, 0)), ymu=1, ynu=1)
    return FamilySpec("relaxed", _color(psi, color), _relaxed_groups(tower), {"kind": "relaxed", "color": color},
                      color_flip=color)


def relaxed_state(family: FamilySpec, pedestal: Sequence[int], bottom: Sequence[int], k: int) -> State:
    plus = _vertical_fill(family, pedestal, 0, 1, 1) + _vertical_fill(family, bottom, 1, 0, 0)
    minus = []
    if k >= 0:
        plus += [family.box(0, j, 0, 1, 1) for j in range(k)]
    else:
        minus = [family.box(0, j, 0, 1, 1) for j in range(k, 0)]
    return State.of(plus, minus)


def slanted_psi(m: int, nu_shift: int = 0) -> LWeightPair:
    """Reference l-weight of the slanted family; ``nu_shift = n`` replaces ``nu`` by ``nu + n``."""
    vv = V * q ** (-nu_shift)
    uv2 = U * U * vv * vv
    zeros0 = [q3 ** -2, q1.inverse() * q3.inverse() * U * U] + [uv2 * q1 ** i * q3 ** -i for i in range(1, m)]
    poles0 = [q2 * uv2 * q1 ** i * q3 ** -i for i in range(m + 1)]
    lead0 = U * vv * vv * q3 ** (-m + 1)
    zeros1 = [q1 ** (i - 1) * q3 ** -i * uv2 for i in range(m + 2)]
    poles1 = [q3.inverse(), q1.inverse() * U * U] + [q1 ** (i + 1) * q3 ** -i * uv2 for i in range(m)]
    lead1 = (U * vv * vv).inverse() * q3 ** m
    return LWeightPair(_ratio(lead0, zeros0, poles0), _ratio(lead1, zeros1, poles1))


def _staircase_contains(m: int):
    def contains(x: int, y: int, z: int) -> bool:
        if not 0 <= z <= m:
            return False
        return x == -z or (x == -1 - z and z <= m - 1)

    return contains


def make_slanted(m: int, color: int = 0) -> FamilySpec:
    if not isinstance(m, int) or m < 1:
        raise InvalidSlope(f"slope must be an integer >= 1, got {m!r}")
    _check_color(color)
    seeds = []
    for s in range(m + 1):
        seeds += [(-s, 0, s), (-s, -1, s)]
    for s in range(m):
        seeds += [(-1 - s, 0, s), (-1 - s, -1, s)]
    tower = Group(2, "tower", _staircase_contains(m), lambda x, y, z: y < 0, seeds=tuple(seeds), ymu=1, ynu=1)
    return FamilySpec("slanted", _color(slanted_psi(m), color), _relaxed_groups(tower),
                      {"kind": "slanted", "m": m, "color": color}, color_flip=color)


def slanted_state(family: FamilySpec, pedestal: Sequence[int], bottom: Sequence[int],
                  a: Sequence[int], b: Sequence[int]) -> State:
    """Tower heights: ``a[s]`` over the white box ``(-s, mu+nu, s)``, ``b[s]`` over the black one."""
    m = family.params["m"]
    if len(a) != m + 1 or len(b) != m:
        raise InvalidState(f"expected {m + 1} white and {m} black heights")
    plus = _vertical_fill(family, pedestal, 0, 1, 1) + _vertical_fill(family, bottom, 1, 0, 0)
    minus = []
    columns = [(-s, s, a[s]) for s in range(m + 1)] + [(-1 - s, s, b[s]) for s in range(m)]
    for x, z, h in columns:
        if h >= 0:
            plus += [family.box(x, j, z, 1, 1) for j in range(h)]
        else:
            minus += [family.box(x, j, z, 1, 1) for j in range(h, 0)]
    return State.of(plus, minus)


def tower_heights(family: FamilySpec, state: State) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Inverse of the tower part of ``slanted_state`` (or the single height for ``relaxed``)."""
    heights: dict[tuple[int, int], int] = {}
    for bx in state.plus:
        if bx.ynu:
            heights[(bx.x, bx.z)] = heights.get((bx.x, bx.z), 0) + 1
    for bx in state.minus:
        if bx.ynu:
            heights[(bx.x, bx.z)] = heights.get((bx.x, bx.z), 0) - 1
    m = family.params.get("m", 0)
    a = tuple(heights.get((-s, s), 0) for s in range(m + 1))
    b = tuple(heights.get((-1 - s, s), 0) for s in range(m))
    return a, b


# ---------------------------------------------------------------------------
# custom families


def make_custom(name: str, psi: LWeightPair, groups: Iterable[Group], extra_valid=None,
                prohibited: Iterable[tuple] = (), params: dict | None = None) -> FamilySpec:
    """Escape hatch for experiments and negative tests."""
    p = {"kind": "custom"}
    if params:
        p.update(params)
    return FamilySpec(name, psi, tuple(groups), p, prohibited=frozenset(prohibited), extra_valid=extra_valid)


def make_broken_layers() -> FamilySpec:
    """Two stacked layers of boxes with no containment between the layers.

    The layers are closed under ``x`` and ``z`` only, so a layer at height 1
    may stick out over the layer at height 0.  This violates the simple pole
    assumption.
    """
    group = Group(0, "layers", lambda x, y, z: 0 <= y <= 1 and x >= 0 and z >= 0,
                  seeds=((0, 0, 0), (0, 1, 0)), axes=("x", "z"))
    return make_custom("broken", _macmahon_psi(kappa), [group], params={"kind": "broken"})


# ---------------------------------------------------------------------------
# transformations


def swap_colors(family: FamilySpec) -> FamilySpec:
    params = dict(family.params)
    if "color" in params:
        params["color"] = 1 - params["color"]
    return replace(family, psi=family.psi.swap(), color_flip=1 - family.color_flip, params=params)


def shift_twist(family: FamilySpec, a: Monomial) -> FamilySpec:
    """Twist by ``z -> z / a``: positions and the roots of the reference weight are multiplied by ``a``."""
    params = dict(family.params)
    params["shift"] = Monomial(family.shift + a.code)
    return replace(family, psi=family.psi.scale_argument(a), shift=family.shift + a.code, params=params)


# ---------------------------------------------------------------------------
# concave / convex boxes and enumeration


def concave_convex(family: FamilySpec, state: State):
    family.require_valid(state)
    cc = family.concave(state)
    cv = family.convex(state)
    return ([b for b in cc if b.color == 0], [b for b in cc if b.color == 1],
            [b for b in cv if b.color == 0], [b for b in cv if b.color == 1])


def neighbours(family: FamilySpec, state: State) -> list[State]:
    return [state.add(b) for b in family.concave(state)] + [state.remove(b) for b in family.convex(state)]


def enumerate_states(family: FamilySpec, bound: int) -> list[State]:
    """All states within ``bound`` moves of the reference state, sorted canonically."""
    if bound < 0:
        raise ValueError("bound must be nonnegative")
    seen = {family.reference}
    frontier = [family.reference]
    for _ in range(bound):
        nxt = []
        for st in frontier:
            for nb in neighbours(family, st):
                if nb not in seen:
                    seen.add(nb)
                    nxt.append(nb)
        frontier = nxt
    return sorted(seen, key=state_sort_key)


def enumerate_with_distance(family: FamilySpec, bound: int) -> dict[State, int]:
    dist = {family.reference: 0}
    frontier = [family.reference]
    for k in range(1, bound + 1):
        nxt = []
        for st in frontier:
            for nb in neighbours(family, st):
                if nb not in dist:
                    dist[nb] = k
                    nxt.append(nb)
        frontier = nxt
    return dist


def state_sort_key(state: State):
    d0, d1 = state_degree(state)
    return (state.size(), d0 + d1, state.canonical())


def moves_bound(family: FamilySpec, d0: int, d1: int) -> int | None:
    """An upper bound on the distance from the reference of any state of bidegree ``(d0, d1)``.

    ``None`` means the family has no states of that bidegree reachable with a
    bound derivable here (used to refuse incomplete character windows).
    """
    kind = family.params.get("kind")
    if kind == "vector":
        return abs(d0) + abs(d1)
    if kind in ("fock", "macmahon", "restricted_macmahon", "g0", "verma", "broken"):
        return d0 + d1 if d0 >= 0 and d1 >= 0 else 0
    if kind in ("relaxed", "slanted"):
        m = family.params.get("m", 0)
        if family.color_flip:
            d0, d1 = d1, d0
        return max(0, d0 + d1 + 2 * (2 * m + 1) * max(0, d1 - d0))
    return None


FAMILY_CONSTRUCTORS = {
    "vector": lambda color=0, m=None: make_vector(color),
    "fock": lambda color=0, m=None: make_fock(color),
    "macmahon": lambda color=0, m=None: make_macmahon(color),
    "g0": lambda color=0, m=None: make_g0(color),
    "verma": lambda color=0, m=None: make_eval_verma(color),
    "relaxed": lambda color=0, m=None: make_relaxed_verma(color),
    "slanted": lambda color=0, m=1: make_slanted(1 if m is None else m, color),
    "broken": lambda color=0, m=None: make_broken_layers(),
}


def make_family(name: str, color: int = 0, m: int | None = None) -> FamilySpec:
    try:
        ctor = FAMILY_CONSTRUCTORS[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}") from None
    return ctor(color=color, m=m)


__all__ = [name for name in dir() if not name.startswith("_")]
