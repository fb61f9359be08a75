"""Bigraded characters, their closed forms and the staircase bijection."""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from math import comb

from .boxes import state_degree
from .errors import ConstraintViolated, UnknownKind, WindowTooLargeForBound
from .families import FamilySpec, enumerate_states, moves_bound

Cell = tuple[int, int]

DEFAULT_MAX_BOUND = 14


# ---------------------------------------------------------------------------
# windows


def simplex_window(n: int) -> frozenset[Cell]:
    """Cells with ``d0, d1 >= 0`` and ``d0 + d1 <= n``."""
    return frozenset((a, s - a) for s in range(n + 1) for a in range(s + 1))


def rect_window(d0: tuple[int, int], d1: tuple[int, int]) -> frozenset[Cell]:
    return frozenset((a, b) for a in range(d0[0], d0[1] + 1) for b in range(d1[0], d1[1] + 1))


def bounded_window(family: FamilySpec, cells: Iterable[Cell], bound: int) -> frozenset[Cell]:
    """The cells of ``cells`` that are complete after enumerating ``bound`` moves."""
    out = set()
    for c in cells:
        need = moves_bound(family, *c)
        if need is not None and need <= bound:
            out.add(c)
    return frozenset(out)


@dataclass
class CharWindow:
    counts: dict[Cell, int]
    cells: frozenset[Cell]
    bound: int = 0
    support: str = "cells"
    meta: dict = field(default_factory=dict)

    def __getitem__(self, cell: Cell) -> int:
        return self.counts.get(cell, 0)

    def diagonal(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for (a, b) in self.cells:
            out[a + b] = out.get(a + b, 0) + self.counts.get((a, b), 0)
        return dict(sorted(out.items()))

    def rows(self) -> list[tuple[int, int, int]]:
        return [(a, b, self.counts.get((a, b), 0)) for (a, b) in sorted(self.cells)]

    def to_json(self) -> dict:
        return {"bound": self.bound, "cells": [list(r) for r in self.rows()]}

    def to_csv(self) -> str:
        lines = ["deg0,deg1,count"]
        lines += [f"{a},{b},{c}" for a, b, c in self.rows()]
        return "\n".join(lines) + "\n"


def required_bound(family: FamilySpec, cells: Iterable[Cell]) -> int:
    need = 0
    for c in cells:
        b = moves_bound(family, *c)
        if b is None:
            raise WindowTooLargeForBound(f"no completeness bound for cell {c} in {family.name}")
        need = max(need, b)
    return need


def character(family: FamilySpec, window: Iterable[Cell], max_bound: int = DEFAULT_MAX_BOUND,
              states=None) -> CharWindow:
    """Exact counts of states per bidegree on every cell of ``window``."""
    cells = frozenset(window)
    bound = required_bound(family, cells)
    if bound > max_bound:
        raise WindowTooLargeForBound(f"window needs {bound} moves, limit is {max_bound}")
    if states is None:
        states = enumerate_states(family, bound)
    counts: Counter = Counter()
    for st in states:
        deg = state_degree(st)
        if deg in cells:
            counts[deg] += 1
    return CharWindow(dict(counts), cells, bound)


# ---------------------------------------------------------------------------
# series helpers

Series = dict[Cell, int]


def _inv_power(mono: Cell, exponent: int, n: int) -> Series:
    """``1 / (1 - x)^exponent`` for the monomial ``x = z0^a z1^b``, truncated at total degree ``n``."""
    a, b = mono
    out: Series = {}
    k = 0
    while k * (a + b) <= n:
        out[(k * a, k * b)] = comb(k + exponent - 1, k)
        k += 1
        if a + b == 0:
            break
    return out


def _mul(s: Series, t: Series, n: int) -> Series:
    out: Series = {}
    for (a, b), u in s.items():
        for (c, d), v in t.items():
            if a + b + c + d <= n:
                key = (a + c, b + d)
                out[key] = out.get(key, 0) + u * v
    return out


def product_series(factors: Iterable[tuple[Cell, int]], n: int) -> Series:
    acc: Series = {(0, 0): 1}
    for mono, e in factors:
        if e:
            acc = _mul(acc, _inv_power(mono, e, n), n)
    return acc


def one_variable(exponents: Sequence[int], n: int) -> list[int]:
    """Coefficients of ``prod_j 1/(1 - t^j)^{exponents(j)}`` up to ``t^n``."""
    coeffs = [1] + [0] * n
    for j in range(1, n + 1):
        e = exponents(j) if callable(exponents) else exponents[j - 1]
        for _ in range(e):
            for k in range(j, n + 1):
                coeffs[k] += coeffs[k - j]
    return coeffs


def partition_numbers(n: int) -> list[int]:
    return one_variable(lambda j: 1, n)


def plane_partition_numbers(n: int) -> list[int]:
    return one_variable(lambda j: j, n)


def _partitions(n: int, largest: int | None = None):
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest or n), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def nested_pair_numbers(n: int) -> list[int]:
    """Number of pairs of partitions ``mu <= lambda`` (as diagrams) with ``|lambda| + |mu| = k``."""
    parts = [list(_partitions(k)) for k in range(n + 1)]
    out = []
    for total in range(n + 1):
        count = 0
        for inner in range(total // 2 + 1):
            for lam in parts[total - inner]:
                for mu in parts[inner]:
                    if len(mu) <= len(lam) and all(a <= b for a, b in zip(mu, lam)):
                        count += 1
        out.append(count)
    return out


def quartic_numbers(n: int) -> list[int]:
    """``1 / prod (1 - t^j)^4``."""
    return one_variable(lambda j: 4, n)


def macmahon_bicolor(n: int) -> Series:
    factors = []
    for i in range(1, n + 1):
        factors += [((i, i), 2 * i), ((i, i - 1), i), ((i - 1, i), i - 1)]
    return product_series(factors, n)


def verma_series(n: int) -> Series:
    factors = []
    for i in range(1, n + 1):
        factors += [((i, i), 2), ((i, i - 1), 1), ((i - 1, i), 1)]
    return product_series(factors, n)


# ---------------------------------------------------------------------------
# closed forms

DIAGONAL_KINDS = {
    "fock": partition_numbers,
    "macmahon-diagonal": plane_partition_numbers,
    "two-layer": nested_pair_numbers,
}
CELL_KINDS = ("macmahon", "verma", "vector", "relaxed", "slanted")


def _flip(cell: Cell, color: int) -> Cell:
    return (cell[1], cell[0]) if color else cell


def closed_form_coeffs(kind: str, window: Iterable[Cell], m: int = 0, color: int = 0) -> CharWindow:
    """Expected counts of the named closed form on the cells of ``window``.

    Diagonal kinds report their coefficients in ``meta["diagonal"]``; delta
    supported kinds are evaluated cell by cell on their support line.
    """
    cells = frozenset(window)
    if kind in DIAGONAL_KINDS:
        top = max((a + b for a, b in cells), default=0)
        coeffs = DIAGONAL_KINDS[kind](top)
        return CharWindow({}, cells, support="diagonal", meta={"diagonal": dict(enumerate(coeffs))})
    if kind not in CELL_KINDS:
        raise UnknownKind(f"unknown closed form {kind!r}")
    counts: dict[Cell, int] = {}
    if kind in ("macmahon", "verma"):
        top = max((a + b for a, b in cells), default=0)
        series = macmahon_bicolor(top) if kind == "macmahon" else verma_series(top)
        for c in cells:
            counts[c] = series.get(_flip(c, color), 0)
        return CharWindow(counts, cells)
    top = max((abs(a) + abs(b) for a, b in cells), default=0)
    pt = quartic_numbers((m + 1) * top)
    for c in cells:
        d0, d1 = _flip(c, color)
        if kind == "vector":
            counts[c] = 1 if d0 - d1 in (0, 1) else 0
            continue
        slope = m if kind == "slanted" else 0
        i = d0 - d1
        n = d1 - slope * i
        counts[c] = pt[n] if n >= 0 else 0
    return CharWindow(counts, cells, support="line", meta={"m": m})


def on_support_line(kind: str, cell: Cell, m: int = 0, color: int = 0) -> bool:
    d0, d1 = _flip(cell, color)
    if kind == "vector":
        return d0 - d1 in (0, 1)
    slope = m if kind == "slanted" else 0
    return d1 - slope * (d0 - d1) >= 0


@dataclass
class CharacterComparison:
    kind: str
    passed: bool
    rows: list
    mismatches: list

    def to_json(self) -> dict:
        return {"kind": self.kind, "pass": self.passed, "rows": self.rows, "mismatches": self.mismatches}


def compare_character(family: FamilySpec, kind: str, window: Iterable[Cell],
                      max_bound: int = DEFAULT_MAX_BOUND, states=None) -> CharacterComparison:
    cells = frozenset(window)
    got = character(family, cells, max_bound, states)
    color = family.params.get("color", 0)
    want = closed_form_coeffs(kind, cells, m=family.params.get("m", 0), color=color)
    rows, bad = [], []
    if want.support == "diagonal":
        diag = got.diagonal()
        ref = want.meta["diagonal"]
        for n, c in diag.items():
            # only antidiagonals fully inside the window are comparable
            if all((a, n - a) in cells for a in range(n + 1)):
                rows.append({"degree": n, "count": c, "expected": ref[n]})
                if c != ref[n]:
                    bad.append(rows[-1])
    else:
        for c in sorted(cells):
            row = {"cell": list(c), "count": got[c], "expected": want[c]}
            rows.append(row)
            if got[c] != want[c]:
                bad.append(row)
    return CharacterComparison(kind, not bad, rows, bad)


DEFAULT_KIND = {
    "vector": "vector",
    "fock": "fock",
    "macmahon": "macmahon",
    "g0": "two-layer",
    "verma": "verma",
    "relaxed": "relaxed",
    "slanted": "slanted",
}


# ---------------------------------------------------------------------------
# staircase bijection


def check_tower(m: int, a: Sequence[int], b: Sequence[int]) -> None:
    if len(a) != m + 1 or len(b) != m:
        raise ConstraintViolated(f"expected {m + 1} white and {m} black heights")
    for s in range(m):
        if b[s] < a[s] or b[s] < a[s + 1]:
            raise ConstraintViolated(f"b[{s}] = {b[s]} is below a neighbouring white height")


def staircase_bijection(m: int, a: Sequence[int], b: Sequence[int]) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
    """``(a, b) -> (a0~, c, d)`` with ``c_i = b_i - a_i``, ``d_i = b_i - a_{i+1}``, ``a0~ = a_0 - sum d``."""
    check_tower(m, a, b)
    c = tuple(b[i] - a[i] for i in range(m))
    d = tuple(b[i] - a[i + 1] for i in range(m))
    return a[0] - sum(d), c, d


def staircase_inverse(m: int, a0t: int, c: Sequence[int], d: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if len(c) != m or len(d) != m:
        raise ConstraintViolated(f"expected {m} values of c and d")
    if any(x < 0 for x in c) or any(x < 0 for x in d):
        raise ConstraintViolated("c and d must be nonnegative")
    a = [a0t + sum(d)]
    b = []
    for i in range(m):
        b.append(a[i] + c[i])
        a.append(b[i] - d[i])
    return tuple(a), tuple(b)


def add_r(m: int, i: int, a: Sequence[int], b: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Add the shape ``R_i`` (``1 <= i <= m``): one box on ``a_0..a_{i-1}`` and ``b_0..b_{i-1}``."""
    if not 1 <= i <= m:
        raise ValueError("shape index out of range")
    return (tuple(x + (k < i) for k, x in enumerate(a)), tuple(x + (k < i) for k, x in enumerate(b)))


def add_rbar(m: int, i: int, a: Sequence[int], b: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Add the shape ``R~_i``: one box on ``a_{m-i+1}..a_m`` and ``b_{m-i}..b_{m-1}``."""
    if not 1 <= i <= m:
        raise ValueError("shape index out of range")
    return (tuple(x + (k >= m - i + 1) for k, x in enumerate(a)), tuple(x + (k >= m - i) for k, x in enumerate(b)))


def add_staircase(a: Sequence[int], b: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return tuple(x + 1 for x in a), tuple(x + 1 for x in b)


def tower_excess(a: Sequence[int], b: Sequence[int]) -> int:
    """``sum b - sum a``: the ``z1`` minus ``z0`` degree carried by the tower."""
    return sum(b) - sum(a)
