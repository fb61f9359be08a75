"""Command line front end: ``qtoroidal <subcommand> [options]``.

Exit codes: 0 success, 1 a verification or comparison failed, 2 bad
configuration, 3 the given state is not a state of the family.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

from .algebra import parse_monomial, specialize
from .boxes import EMPTY_STATE, State, state_degree
from .characters import (
    DEFAULT_KIND,
    DEFAULT_MAX_BOUND,
    bounded_window,
    character,
    compare_character,
    rect_window,
    simplex_window,
)
from .engine import (
    RELATIONS,
    Engine,
    check_assumptions,
    check_relations,
    verify_serre_identity,
)
from .errors import InvalidState, ToroidalError
from .families import (
    FAMILY_CONSTRUCTORS,
    FamilySpec,
    enumerate_states,
    make_family,
    partition_state,
    plane_partition_state,
    relaxed_state,
    slanted_state,
    state_sort_key,
    vector_state,
    verma_state,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_STATE = 0, 1, 2, 3


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    family: str = "fock"
    color: int = 0
    m: int | None = None
    bound: int = 3
    window: str | None = None
    json: bool = False
    seed: int = 0
    jobs: int = 1
    specialize: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        if args.bound < 0:
            raise ConfigError("--bound must be nonnegative")
        if args.jobs < 1:
            raise ConfigError("--jobs must be positive")
        return cls(args.family, args.color, args.m, args.bound, args.window, args.json,
                   args.seed, args.jobs, parse_specialization(args.specialize))

    def build_family(self) -> FamilySpec:
        return make_family(self.family, self.color, self.m)


def parse_specialization(text: str | None) -> dict:
    """``"d=q^-2,kappa=q3"`` into a substitution map."""
    out = {}
    if not text:
        return out
    for item in text.split(","):
        name, eq, value = item.partition("=")
        name = name.strip()
        if not eq or name not in ("q", "d", "U", "V", "k", "kappa", "mu", "nu"):
            raise ConfigError(f"bad substitution {item!r}")
        key = {"mu": "U", "nu": "V"}.get(name, name)
        out[key] = parse_monomial(value)
    return out


def _ints(text: str) -> list[int]:
    text = text.strip()
    return [int(t) for t in text.split(",") if t.strip()] if text else []


def parse_state(family: FamilySpec, text: str | None) -> State:
    """Parse ``--state``: JSON, or a shorthand such as ``partition:4,2,1``.

    Shorthands: ``empty``, ``vector:k``, ``partition:parts``,
    ``plane:layer/layer/...``, ``verma:pedestal/bottom``,
    ``relaxed:pedestal/bottom/k``, ``slanted:pedestal/bottom/a/b``.
    """
    if text is None or text.strip() in ("", "empty"):
        return EMPTY_STATE
    text = text.strip()
    try:
        if text.startswith("{"):
            state = _state_from_json(family, json.loads(text))
        else:
            kind, _, rest = text.partition(":")
            parts = rest.split("/")
            if kind == "vector":
                state = vector_state(family, int(rest))
            elif kind == "partition":
                state = partition_state(family, _ints(rest))
            elif kind == "plane":
                state = plane_partition_state(family, [_ints(p) for p in parts])
            elif kind == "verma":
                state = verma_state(family, _ints(parts[0]), _ints(parts[1]))
            elif kind == "relaxed":
                state = relaxed_state(family, _ints(parts[0]), _ints(parts[1]), int(parts[2]))
            elif kind == "slanted":
                state = slanted_state(family, _ints(parts[0]), _ints(parts[1]), _ints(parts[2]), _ints(parts[3]))
            else:
                raise InvalidState(f"unknown state shorthand {kind!r}")
    except (ValueError, IndexError, KeyError, TypeError) as exc:
        raise InvalidState(f"cannot parse state: {exc}") from exc
    family.require_valid(state)
    return state


def _state_from_json(family: FamilySpec, data: dict) -> State:
    def resolve(entry: dict, negative: bool):
        x, y, z = entry["x"], entry["y"], entry["z"]
        x = x[0] if isinstance(x, list) else x
        z = z[0] if isinstance(z, list) else z
        ymu = ynu = 0
        if isinstance(y, list):
            y, ymu, ynu = y[0], y[1], y[2]
        b = family.lookup(int(x), int(y), int(ymu), int(ynu), int(z))
        if b is None or b.negative != negative:
            raise InvalidState(f"box {entry} is not in the family universe")
        return b

    return State.of([resolve(e, False) for e in data.get("plus", [])],
                    [resolve(e, True) for e in data.get("minus", [])])


def parse_window(family: FamilySpec, text: str | None, bound: int) -> frozenset:
    """``simplex:N``, ``rect:a0:a1,b0:b1`` or default for the family."""
    if text:
        kind, _, rest = text.partition(":")
        try:
            if kind == "simplex":
                return simplex_window(int(rest))
            if kind == "rect":
                r0, r1 = rest.split(",")
                a0, a1 = (int(v) for v in r0.split(":"))
                b0, b1 = (int(v) for v in r1.split(":"))
                return rect_window((a0, a1), (b0, b1))
        except ValueError as exc:
            raise ConfigError(f"bad window {text!r}") from exc
        raise ConfigError(f"bad window {text!r}")
    kind = family.params.get("kind")
    if kind == "vector":
        return rect_window((-bound, bound), (-bound, bound))
    if kind in ("relaxed", "slanted"):
        return bounded_window(family, rect_window((-bound, 2 * bound), (-bound, bound)), bound)
    return simplex_window(bound)


def _spec_str(x, subst: dict) -> str:
    return str(specialize(x, subst)) if subst else str(x)


def _emit(cfg: RunConfig, payload: dict, human: list[str]) -> None:
    if cfg.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print("\n".join(human))


# ---------------------------------------------------------------------------
# subcommands


def cmd_states(cfg: RunConfig, args) -> int:
    family = cfg.build_family()
    states = sorted(enumerate_states(family, cfg.bound),
                    key=lambda s: (sum(state_degree(s)),) + state_sort_key(s))
    for st in states:
        deg = state_degree(st)
        if cfg.json:
            print(json.dumps({"degree": list(deg), "size": st.size(), "state": st.to_json()}, sort_keys=True))
        else:
            print(f"{deg[0]} {deg[1]} {st}")
    return EXIT_OK


def cmd_lweight(cfg: RunConfig, args) -> int:
    family = cfg.build_family()
    state = parse_state(family, args.state)
    lw = Engine(family).act_K(state)
    if cfg.specialize:
        lw = lw.specialize(cfg.specialize)
    _emit(cfg, {"state": state.to_json(), "lweight": lw.to_json(), "rendered": [str(lw[0]), str(lw[1])]},
          [f"state: {state}", f"phi_0(z) = {lw[0]}", f"phi_1(z) = {lw[1]}"])
    return EXIT_OK


def cmd_act(cfg: RunConfig, args) -> int:
    family = cfg.build_family()
    state = parse_state(family, args.state)
    engine = Engine(family)
    if args.op == "K":
        return cmd_lweight(cfg, args)
    act = engine.act_F if args.op == "F" else engine.act_E
    rows = []
    for (target, pos), coeff in act(state, args.index).items():
        rows.append((state_sort_key(target), str(target), target, pos, _spec_str(coeff, cfg.specialize)))
    rows.sort(key=lambda r: r[0])
    payload = {"op": args.op, "color": args.index, "state": state.to_json(),
               "terms": [{"target": r[2].to_json(), "coefficient": r[4]} for r in rows]}
    human = [f"{args.op}_{args.index} {state} ="] + [f"  + ({r[4]}) {r[1]}" for r in rows]
    if not rows:
        human.append("  0")
    _emit(cfg, payload, human)
    return EXIT_OK


def _mutation(engine: Engine, states, spec: str) -> dict:
    """``KIND:N`` flips the sign of the ``N``-th coefficient of that kind (``F`` or ``E``)."""
    kind, _, idx = spec.partition(":")
    if kind not in ("F", "E") or not idx.isdigit():
        raise ConfigError(f"bad mutation {spec!r}, expected F:N or E:N")
    slots = []
    for st in states:
        cc, cv = engine.moves(st)
        for b in sorted(cc if kind == "F" else cv, key=lambda b: (b.order_key(), b.ymu, b.ynu)):
            slots.append((kind, st, b))
    n = int(idx)
    if n >= len(slots):
        raise ConfigError(f"only {len(slots)} {kind} coefficients in the truncation")
    return {slots[n]: -1}


def cmd_verify(cfg: RunConfig, args) -> int:
    family = cfg.build_family()
    states = enumerate_states(family, cfg.bound)
    engine = Engine(family)
    mutated = None
    if args.mutate_coefficient:
        muts = _mutation(engine, states, args.mutate_coefficient)
        engine = Engine(family, muts)
        (kind, st, b), = muts
        mutated = {"kind": kind, "state": str(st), "box": str(b)}
    assumptions = check_assumptions(family, states, engine)
    relations = check_relations(family, states, RELATIONS, cfg.jobs, engine)
    serre = None
    if args.serre_trials:
        serre = {"pass": verify_serre_identity(args.serre_trials, seed=cfg.seed),
                 "trials": args.serre_trials, "seed": cfg.seed}
    ok = assumptions.all_passed and relations.passed and (serre is None or serre["pass"])
    payload = {"family": family.describe(), "bound": cfg.bound, "states": len(states),
               "assumptions": assumptions.to_json(), "relations": relations.to_json(),
               "serre": serre, "mutation": mutated, "pass": ok}
    human = [f"family {family.name}, bound {cfg.bound}, {len(states)} states"]
    human += [f"  {k}: {'pass' if v else 'FAIL'}" for k, v in assumptions.status.items()]
    for k, v in assumptions.witnesses.items():
        if v:
            human.append(f"    {k} witness: {json.dumps(v[0], sort_keys=True)}")
    human.append(f"  relations: {'pass' if relations.passed else 'FAIL'} "
                 f"({sum(relations.counts.values())} checks, {len(relations.failures)} failures)")
    if relations.failures:
        human.append(f"    first failure: {json.dumps(relations.failures[0], sort_keys=True)}")
    if serre is not None:
        human.append(f"  serre identity: {'pass' if serre['pass'] else 'FAIL'} ({serre['trials']} substitutions)")
    human.append("PASS" if ok else "FAIL")
    _emit(cfg, payload, human)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_character(cfg: RunConfig, args) -> int:
    family = cfg.build_family()
    window = parse_window(family, cfg.window, cfg.bound)
    kind = args.kind or DEFAULT_KIND.get(cfg.family)
    table = character(family, window, args.max_bound)
    verdict = compare_character(family, kind, window, args.max_bound) if kind else None
    if args.csv:
        sys.stdout.write(table.to_csv())
    else:
        payload = {"family": family.describe(), "character": table.to_json(), "diagonal": table.diagonal(),
                   "comparison": verdict.to_json() if verdict else None}
        human = [f"{a:>4} {b:>4} {c}" for a, b, c in table.rows() if c]
        if family.params.get("kind") not in ("vector", "relaxed", "slanted"):
            human.append("diagonal: " + " ".join(str(v) for v in table.diagonal().values()))
        if verdict:
            human.append(f"{kind}: {'pass' if verdict.passed else 'FAIL'}")
        _emit(cfg, payload, human)
    return EXIT_OK if verdict is None or verdict.passed else EXIT_FAIL


def cmd_compare(cfg: RunConfig, args) -> int:
    family = cfg.build_family()
    window = parse_window(family, cfg.window, cfg.bound)
    kind = args.kind or DEFAULT_KIND.get(cfg.family)
    if kind is None:
        raise ConfigError(f"no closed form known for {cfg.family}; pass --kind")
    verdict = compare_character(family, kind, window, args.max_bound)
    human = []
    for row in verdict.rows:
        where = f"degree {row['degree']}" if "degree" in row else f"cell {tuple(row['cell'])}"
        mark = "" if row["count"] == row["expected"] else "  <-- mismatch"
        human.append(f"{where}: {row['count']} (expected {row['expected']}){mark}")
    human.append(f"{kind}: {'pass' if verdict.passed else 'FAIL'}")
    _emit(cfg, verdict.to_json(), human)
    return EXIT_OK if verdict.passed else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", default="fock", choices=sorted(FAMILY_CONSTRUCTORS))
    common.add_argument("--color", type=int, default=0, choices=(0, 1))
    common.add_argument("--m", type=int, default=None, help="slope of the slanted family")
    common.add_argument("--bound", type=int, default=3, help="number of moves from the reference")
    common.add_argument("--window", default=None, help="simplex:N or rect:a0:a1,b0:b1")
    common.add_argument("--json", action="store_true")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--specialize", default=None, help="e.g. d=q^-2,kappa=q3")

    parser = argparse.ArgumentParser(prog="qtoroidal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("states", parents=[common], help="enumerate states")
    p.set_defaults(func=cmd_states)

    p = sub.add_parser("lweight", parents=[common], help="l-weight of a state")
    p.add_argument("--state", default=None)
    p.set_defaults(func=cmd_lweight)

    p = sub.add_parser("act", parents=[common], help="apply E_i, F_i or K to a state")
    p.add_argument("--state", default=None)
    p.add_argument("--op", choices=("E", "F", "K"), default="F")
    p.add_argument("--index", type=int, choices=(0, 1), default=0, help="color of the current")
    p.set_defaults(func=cmd_act)

    p = sub.add_parser("verify", parents=[common], help="check assumptions and relations")
    p.add_argument("--mutate-coefficient", default=None, metavar="KIND:N")
    p.add_argument("--serre-trials", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    for name, func in (("character", cmd_character), ("compare", cmd_compare)):
        p = sub.add_parser(name, parents=[common], help=f"{name} of the family character")
        p.add_argument("--kind", default=None)
        p.add_argument("--max-bound", type=int, default=DEFAULT_MAX_BOUND)
        if name == "character":
            p.add_argument("--csv", action="store_true")
        p.set_defaults(func=func)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = RunConfig.from_args(args)
        return args.func(cfg, args)
    except InvalidState as exc:
        print(json.dumps({"error": "invalid state", "detail": str(exc)}), file=sys.stderr)
        return EXIT_STATE
    except (ConfigError, ToroidalError, ValueError) as exc:
        print(json.dumps({"error": "configuration", "detail": str(exc)}), file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
