"""Command line front-end.

Exit status: 0 on success, 2 on domain errors (reported as ``error: <Code>: ...``
on stderr), 3 when the input cannot be parsed.  Nothing is written to stdout
unless the whole report was produced.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

from .errors import FloerPotError, ParseError
from .floer import (displacement_bounds, flag_example_report, limit_lambda_bound,
                    torsion_decomposition, wedge_differential)
from .novikov import INF, NovikovScalar, as_fraction, as_precision, fmt_precision, fmt_rational
from .polytope import LinearHamiltonian, Polytope, hofer_norm
from .potential import PotentialFunction, PotentialSpec, apply_bulk, build_potential
from .solver import (CriticalProblem, _fmt_value, classify_point, leading_system, newton_lift,
                     solve_leading)

EXIT_OK, EXIT_DOMAIN, EXIT_PARSE = 0, 2, 3
COMMANDS = ("potential", "critical", "torsion", "displacement", "hofer")


@dataclass
class RunConfig:
    command: str
    input: str
    precision: object = None
    mode: str = "exact"
    seeds: tuple = ()
    n_seeds: int = 200
    rng_seed: int = 0
    fix: tuple = ()
    format: str = "table"
    limit_lambda: bool = False
    point: str | None = None
    no_bulk: bool = False
    a: str | None = None
    b: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.precision is not None:
            self.precision = as_precision(self.precision)
            if self.precision <= 0:
                raise ValueError("precision must be positive")


# -- input handling ---------------------------------------------------------------------------

def fixture_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("floerpot").joinpath("data").iterdir()
                  if p.name.endswith(".json"))


def load_input(name: str) -> dict:
    """Read JSON from a path, or from a shipped fixture given by name."""
    path = Path(name)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    else:
        stem = name[:-5] if name.endswith(".json") else name
        res = resources.files("floerpot").joinpath("data", stem + ".json")
        if not res.is_file():
            raise ParseError(f"no such file or fixture {name!r} (fixtures: {fixture_names()})")
        text = res.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {name}: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object")
    return data


def _parse_fix(items: Sequence[str]) -> dict:
    out = {}
    for item in items:
        var, sep, val = item.partition("=")
        if not sep or not var.strip():
            raise ParseError(f"--fix expects var=value, got {item!r}")
        out[var.strip()] = NovikovScalar.parse(val)
    return out


def _parse_point(text) -> list:
    if isinstance(text, str):
        text = [t for t in text.split(",") if t.strip()]
    return [NovikovScalar.parse(str(t)) for t in text]


def _parse_seed(text: str) -> list[complex]:
    try:
        return [complex(t.strip().replace(" ", "")) for t in text.split(",")]
    except ValueError as exc:
        raise ParseError(f"bad seed {text!r}: {exc}") from exc


def _potential_from(data: dict, cfg: RunConfig, with_bulk: bool = True
                    ) -> tuple[PotentialFunction, PotentialSpec | None]:
    if "potential" in data:
        pf = PotentialFunction.from_dict(data)
        if cfg.precision is not None:
            if cfg.precision > pf.precision:
                raise ValueError("precision can only be lowered")
            pf = PotentialFunction(pf.poly.truncate(cfg.precision), pf.torus_variables,
                                   pf.bulk_variables, pf.E1, pf.E5, pf.facet_terms)
        return pf, None
    spec = PotentialSpec.from_dict(data)
    pf = build_potential(spec, cfg.precision)
    if with_bulk and spec.bulk and not cfg.no_bulk:
        pf = apply_bulk(pf, spec)
    return pf, spec


def _fixed(data: dict, cfg: RunConfig) -> dict:
    fix = {k: NovikovScalar.parse(str(v)) for k, v in data.get("fix", {}).items()}
    fix.update(_parse_fix(cfg.fix))
    return fix


# -- commands ---------------------------------------------------------------------------------

def cmd_potential(data: dict, cfg: RunConfig) -> dict:
    pf, spec = _potential_from(data, cfg)
    out = pf.to_dict()
    for key in ("fix", "point", "lambda_samples"):
        if key in data:
            out[key] = data[key]
    if spec is not None and spec.E_cut is not None:
        out["E_cut"] = fmt_rational(spec.E_cut)
    return out


def _solve(pf: PotentialFunction, fix: dict, cfg: RunConfig, precision=None):
    problem = CriticalProblem.from_potential(pf, fix, precision)
    ls = leading_system(problem)
    seeds = [_parse_seed(s) for s in cfg.seeds]
    sols = solve_leading(ls, cfg.mode, seeds=seeds, n_seeds=cfg.n_seeds, rng_seed=cfg.rng_seed)
    return problem, ls, sols


def cmd_critical(data: dict, cfg: RunConfig) -> dict:
    pf, _ = _potential_from(data, cfg)
    problem, ls, sols = _solve(pf, _fixed(data, cfg), cfg)
    reports = []
    for s in sols:
        entry = {
            "leading": {v: _fmt_value(x) for v, x in zip(s.variables, s.values)},
            "leading_jacobian_det": _fmt_value(s.det),
            "corank": s.corank,
            "certificate": s.certificate,
        }
        if not s.nondegenerate:
            entry["lift"] = "refused: DegenerateJacobian"
        elif s.mode == "numeric" and problem.precision == INF:
            entry["lift"] = "skipped: exact potential, numeric leading solution"
        else:
            cp = newton_lift(problem, s, ls)
            entry["lift"] = cp.to_dict()
            entry["criticality_order"] = fmt_precision(classify_point(pf, cp).order)
        reports.append(entry)
    return {
        "variables": list(problem.active),
        "fixed": {k: str(v) for k, v in sorted(problem.fixed.items())},
        "precision": fmt_precision(problem.precision),
        "mode": cfg.mode,
        "equation_valuations": [fmt_rational(v) for v in ls.valuations],
        "degenerate_locus": any(not s.nondegenerate for s in sols),
        "solutions": reports,
    }


def _point(data: dict, cfg: RunConfig) -> list:
    text = cfg.point if cfg.point is not None else data.get("point")
    if text is None:
        raise ValueError("no point given (use --point or a \"point\" entry)")
    return _parse_point(text)


def _criticality(data: dict, cfg: RunConfig):
    """Undeformed potential at precision E5 (or the given precision) and its report."""
    if "potential" in data:
        pf, _ = _potential_from(data, cfg)
    else:
        spec = PotentialSpec.from_dict(data)
        prec = cfg.precision
        if prec is None:
            prec = spec.E5 if spec.E5 is not None else spec.default_precision
        pf = build_potential(spec, prec)
    point = dict(zip(pf.torus_variables, _point(data, cfg)))
    report = classify_point(pf, point)
    td = torsion_decomposition(wedge_differential(report.gradient))
    return pf, report, td


def cmd_torsion(data: dict, cfg: RunConfig) -> dict:
    pf, report, td = _criticality(data, cfg)
    out = td.to_dict()
    out["criticality_order"] = fmt_precision(report.order)
    out["min_torsion"] = fmt_precision(td.min_torsion)
    if pf.E5 is not None and td.min_torsion >= pf.E5:
        out["bounds"] = {"hofer_X": fmt_rational(pf.E5)}
    return out


def cmd_displacement(data: dict, cfg: RunConfig) -> dict:
    if "potential" in data:
        raise ValueError("displacement needs a potential spec (polytope plus energies)")
    spec = PotentialSpec.from_dict(data)
    if spec.E5 is None:
        raise ValueError("displacement bounds need a declared E5")
    pf, report, td = _criticality(data, cfg)
    deformed = None
    if spec.bulk:
        pfb = apply_bulk(build_potential(spec), spec)
        try:
            problem, ls, sols = _solve(pfb, _fixed(data, cfg), RunConfig(
                "critical", cfg.input, mode="exact"))
            good = [s for s in sols if s.nondegenerate]
            if good:
                deformed = newton_lift(problem, good[0], ls)
        except FloerPotError:
            deformed = None
    bound = displacement_bounds(spec.E1, spec.E5, td if td.min_torsion >= spec.E5 else None,
                                deformed)
    out = td.to_dict()
    out["criticality_order"] = fmt_precision(report.order)
    out["bounds"] = bound.to_dict()
    out["provenance"] = dict(sorted(bound.provenance.items()))
    out["E1"], out["E5"] = fmt_rational(spec.E1), fmt_rational(spec.E5)
    if deformed is not None:
        out["deformed_point"] = deformed.to_dict()
    if cfg.limit_lambda:
        samples = data.get("lambda_samples")
        if not samples:
            raise ValueError("--limit-lambda needs \"lambda_samples\" in the input")
        try:
            triples = [(s["lambda"], s["E1"], s["E5"]) for s in samples]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed lambda_samples: {exc!r}") from exc
        out["limit"] = limit_lambda_bound(triples).to_dict()
    return out


def cmd_hofer(data: dict, cfg: RunConfig) -> dict:
    try:
        ham = data.get("hamiltonian", {})
        if "gradient" in ham:
            H = LinearHamiltonian(tuple(as_fraction(str(g)) for g in ham["gradient"]),
                                  pi=bool(ham.get("pi", True)))
        elif "weights" in ham:
            H = LinearHamiltonian.from_projection([as_fraction(str(w)) for w in ham["weights"]],
                                                  ham["projection"], bool(ham.get("pi", True)))
        else:
            H = None
    except (KeyError, TypeError, ZeroDivisionError) as exc:
        raise ParseError(f"malformed hamiltonian: {exc!r}") from exc
    if data.get("kind") == "flag" or cfg.a is not None:
        a = as_fraction(cfg.a if cfg.a is not None else str(data["a"]))
        b = as_fraction(cfg.b if cfg.b is not None else str(data["b"]))
        rep = flag_example_report(a, b)
        if H is not None and H.gradient != (2, 2, -1):
            raise ValueError("the flag report uses the Hamiltonian with gradient (2, 2, -1)")
        return rep.to_dict()
    if H is None:
        raise ParseError("hofer needs a \"hamiltonian\" entry")
    P = Polytope.from_dict(data)
    fiber = data.get("fiber")
    fiber = None if fiber is None else tuple(as_fraction(str(x)) for x in fiber)
    hn = hofer_norm(P, H, fiber)
    pt = lambda u: [fmt_rational(c) for c in u]  # noqa: E731
    return {
        "norm_X": str(hn.norm_X),
        "norm_S": None if hn.norm_fiber is None else str(hn.norm_fiber),
        "max": str(hn.max_value), "min": str(hn.min_value),
        "argmax": [pt(u) for u in hn.argmax], "argmin": [pt(u) for u in hn.argmin],
    }


HANDLERS = {
    "potential": cmd_potential,
    "critical": cmd_critical,
    "torsion": cmd_torsion,
    "displacement": cmd_displacement,
    "hofer": cmd_hofer,
}


# -- output -----------------------------------------------------------------------------------

def render_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _table_lines(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_table_lines(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            if isinstance(v, dict):
                lines.append(f"{pad}[{i}]")
                lines.extend(_table_lines(v, indent + 1))
            elif isinstance(v, list):
                lines.append(f"{pad}- ({', '.join(_scalar(x) for x in v)})")
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    return lines


def _scalar(v) -> str:
    if isinstance(v, bool):
        return "yes" if v else "no"
    if v is None:
        return "-"
    if isinstance(v, (dict, list)):
        return "none" if not v else json.dumps(v, sort_keys=True, ensure_ascii=False)
    return str(v)


def render_table(command: str, report: dict) -> str:
    head = []
    if command == "hofer":
        head.append(f"‖H‖_X = {report['norm_X']}, ‖H‖_S = {report['norm_S']}")
    elif command == "potential":
        head.append(f"PO = {report['potential']}")
    return "\n".join(head + _table_lines(report)) + "\n"


def run(cfg: RunConfig) -> tuple[int, str, str]:
    """Execute ``cfg``; return ``(exit status, stdout text, stderr text)``."""
    try:
        data = load_input(cfg.input)
        report = HANDLERS[cfg.command](data, cfg)
        text = render_json(report) if cfg.format == "json" else render_table(cfg.command, report)
        return EXIT_OK, text, ""
    except ParseError as exc:
        return EXIT_PARSE, "", f"error: {exc.code}: {exc}\n"
    except FloerPotError as exc:
        return EXIT_DOMAIN, "", f"error: {exc.code}: {exc}\n"
    except ValueError as exc:
        return EXIT_DOMAIN, "", f"error: InvalidArgument: {exc}\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="floerpot",
        description="Potential functions, critical points and torsion of toric-type fibers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("input", help="JSON spec path or shipped fixture name")
        p.add_argument("--format", choices=("table", "json"), default="table")
        p.add_argument("--precision", help="exact rational precision (only lowers the default)")
        if name in ("potential", "critical", "displacement"):
            p.add_argument("--no-bulk", action="store_true", help="ignore declared bulk weights")
        if name in ("critical", "displacement"):
            p.add_argument("--fix", action="append", default=[], metavar="VAR=VALUE")
        if name == "critical":
            p.add_argument("--mode", choices=("exact", "numeric"), default="exact")
            p.add_argument("--seed", action="append", default=[], metavar="C1,C2,...",
                           help="extra Newton start (complex coordinates); repeatable")
            p.add_argument("--n-seeds", type=int, default=200)
            p.add_argument("--rng-seed", type=int, default=0)
        if name in ("torsion", "displacement"):
            p.add_argument("--point", help="holonomy point, e.g. 1,1,-1")
        if name == "displacement":
            p.add_argument("--limit-lambda", action="store_true",
                           help="also report the mixed bound in the limit of a family")
        if name == "hofer":
            p.add_argument("--a")
            p.add_argument("--b")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command, input=args.input, precision=args.precision,
            mode=getattr(args, "mode", "exact"), seeds=tuple(getattr(args, "seed", ())),
            n_seeds=getattr(args, "n_seeds", 200), rng_seed=getattr(args, "rng_seed", 0),
            fix=tuple(getattr(args, "fix", ())), format=args.format,
            limit_lambda=getattr(args, "limit_lambda", False), point=getattr(args, "point", None),
            no_bulk=getattr(args, "no_bulk", False), a=getattr(args, "a", None),
            b=getattr(args, "b", None),
        )
    except ValueError as exc:
        code = "ParseError" if isinstance(exc, ParseError) else "InvalidArgument"
        sys.stderr.write(f"error: {code}: {exc}\n")
        return EXIT_PARSE
    status, out, err = run(cfg)
    if out:
        sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return status


if __name__ == "__main__":
    sys.exit(main())
