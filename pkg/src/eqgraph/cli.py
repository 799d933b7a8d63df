"""Command-line entry point: ``eqgraph graph|hamilton|survey|verify``.

Exit status: 0 success, 1 a check ran and failed, 2 invalid input,
3 computation error, 4 budget exceeded. Errors are reported on stderr as a
single line ``error: <Kind>: <message>``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

from .errors import BudgetError, BudgetExceeded, ComputationError, EqGraphError, InvalidInput
from .field import PolySpec, make_ctx, nonsquares, parse_coeffs
from .graph import build, degree_profile, export_dot, summary, weak_components
from .hamilton import (
    DEFAULT_MAX_COMPONENT,
    DEFAULT_PATH_CAP,
    balance_sequence,
    enumerate_cycles,
    longest_type1_path,
)
from .structure import fixed_vertices
from .suites import SUITES, run_suite
from .survey import (
    CONNECTEDNESS_HEADER,
    DEFAULT_HAMILTON_MAX_P,
    HAMILTON_HEADER,
    conjecture_check,
    connectedness_survey,
    hamilton_survey,
    render_csv,
)

ENV_DEFAULTS = {
    "workers": ("EQGRAPH_WORKERS", 1),
    "max_component": ("EQGRAPH_MAX_COMPONENT", DEFAULT_MAX_COMPONENT),
    "path_cap": ("EQGRAPH_PATH_CAP", DEFAULT_PATH_CAP),
    "max_p": ("EQGRAPH_HAMILTON_MAX_P", DEFAULT_HAMILTON_MAX_P),
}

ENV_HELP = """environment:
  EQGRAPH_WORKERS         default for --workers (1)
  EQGRAPH_MAX_COMPONENT   default for --max-component (100)
  EQGRAPH_PATH_CAP        default for --path-cap (101)
  EQGRAPH_HAMILTON_MAX_P  default for --max-p (31)
Command-line flags take precedence over a --config file, which takes
precedence over the environment.

exit status:
  0 ok, 1 check failed, 2 invalid input, 3 computation error, 4 budget exceeded
"""


class UsageError(InvalidInput):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    command: str
    p: Optional[int] = None
    lam: Optional[int] = None
    poly: Optional[tuple[int, ...]] = None
    family: Optional[str] = None
    a: Optional[int] = None
    format: Optional[str] = None
    output: Optional[Path] = None
    out_dir: Optional[Path] = None
    workers: int = 1
    max_component: int = DEFAULT_MAX_COMPONENT
    path_cap: int = DEFAULT_PATH_CAP
    max_p: int = DEFAULT_HAMILTON_MAX_P
    max_type: Optional[int] = None
    witness: bool = False
    survey: Optional[str] = None
    kind: Optional[str] = None
    table: str = "hamilton"
    state: Optional[Path] = None
    resume: bool = False
    p_min: Optional[int] = None
    p_max: Optional[int] = None
    props: list = field(default_factory=list)
    type1_path: bool = False
    labels: bool = False

    def validate(self) -> "RunConfig":
        for name in ("workers", "max_component", "path_cap", "max_p"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name.replace('_', '-')} must be positive")
        if self.max_type is not None and self.max_type < 1:
            raise UsageError("max-type must be positive")
        if self.format == "dot" and self.command != "graph":
            raise UsageError("dot output is only available for the graph command")
        if self.poly is not None and self.family is not None and self.command in ("graph", "hamilton"):
            raise UsageError("give either --poly or --family, not both")
        if self.resume and self.state is None:
            raise UsageError("--resume needs --state")
        return self

    def spec(self) -> PolySpec:
        """The single polynomial named by --poly or --family/--a."""
        if self.p is None:
            raise UsageError("--p is required")
        if self.poly is not None:
            return PolySpec(self.p, self.poly, self.lam)
        if self.family is not None:
            if self.a is None:
                raise UsageError("--family needs --a")
            return PolySpec.family(self.family, self.p, self.a, self.lam)
        raise UsageError("give --poly c0,c1,... or --family NAME --a A")


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON file of option defaults (keys are option names)")
    common.add_argument("--output", type=Path, help="write the main output here instead of stdout")

    def budgets(sp, *names):
        if "workers" in names:
            sp.add_argument("--workers", type=_int, help="worker processes (env EQGRAPH_WORKERS)")
        if "max_component" in names:
            sp.add_argument(
                "--max-component", type=_int,
                help="largest component searched for Hamiltonian cycles (env EQGRAPH_MAX_COMPONENT)",
            )
        if "max_p" in names:
            sp.add_argument(
                "--max-p", type=_int, help="largest p for Hamiltonian surveys (env EQGRAPH_HAMILTON_MAX_P)"
            )
        if "path_cap" in names:
            sp.add_argument("--path-cap", type=_int, help="largest p for path search (env EQGRAPH_PATH_CAP)")

    def single_graph(sp, lam_required):
        sp.add_argument("--p", type=_int, required=True, help="odd prime")
        sp.add_argument("--lambda", dest="lam", type=_int, required=lam_required, help="non-square twist")
        sp.add_argument("--poly", type=parse_coeffs, help="ascending coefficients c0,c1,...")
        sp.add_argument("--family", choices=("linear", "quadratic", "cubic"), help="X+a, X^2+a or X^3+a")
        sp.add_argument("--a", type=_int, help="constant term for --family")

    parser = _Parser(
        prog="eqgraph",
        description="Graphs G(lam, f) over prime fields: structure, Hamiltonian cycles and surveys.",
        epilog=ENV_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("graph", parents=[common], help="build one graph and print its analysis or DOT")
    single_graph(sp, True)
    sp.add_argument("--format", choices=("json", "dot"))
    sp.add_argument("--labels", action="store_true", help="DOT: weights as edge labels instead of styles")
    sp.add_argument("--type1-path", action="store_true", help="JSON: include the longest alternating path")
    budgets(sp, "path_cap")

    sp = sub.add_parser(
        "hamilton", parents=[common], help="count Hamiltonian cycles of one graph, or a survey row",
        epilog=ENV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    single_graph(sp, False)
    sp.add_argument("--survey", choices=("linear", "cubic"), help="survey all (lam, a) for this p")
    sp.add_argument("--max-type", type=_int, help="count only cycles of Type <= n (pruned search)")
    sp.add_argument("--witness", action="store_true", help="include one cycle of minimal Type")
    sp.add_argument("--table", choices=("hamilton", "type2", "type3"), help="survey CSV to print")
    sp.add_argument("--format", choices=("json", "csv"))
    budgets(sp, "workers", "max_component", "max_p")

    sp = sub.add_parser(
        "survey", parents=[common], help="connectedness/Hamiltonian surveys and conjecture checks",
        epilog=ENV_HELP, formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sp.add_argument("kind", choices=("connectedness", "hamilton", "conjectures"))
    sp.add_argument("--family", choices=("linear", "cubic"), required=True)
    sp.add_argument("--p", type=_int, help="prime (connectedness, hamilton)")
    sp.add_argument("--p-min", type=_int, help="first prime (conjectures; default 5)")
    sp.add_argument("--p-max", type=_int, help="last prime (conjectures)")
    sp.add_argument("--state", type=Path, help="state file for resumable runs")
    sp.add_argument("--resume", action="store_true", help="continue from --state")
    sp.add_argument("--out-dir", type=Path, help="also write CSV and JSON files here")
    sp.add_argument("--table", choices=("hamilton", "type2", "type3"), help="hamilton: CSV to print")
    sp.add_argument("--format", choices=("csv", "json"))
    budgets(sp, "workers", "max_p")

    sp = sub.add_parser("verify", parents=[common], help="run proposition suites over a range of primes")
    sp.add_argument(
        "--props", type=lambda s: [x for x in s.split(",") if x],
        help=f"comma-separated labels (default all): {', '.join(SUITES)}",
    )
    sp.add_argument("--p-max", type=_int, required=True)
    sp.add_argument("--p-min", type=_int)
    return parser


def make_config(argv: Optional[Sequence[str]] = None, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    args = vars(_build_parser().parse_args(argv))
    config_path = args.pop("config", None)
    file_values = {}
    if config_path is not None:
        try:
            file_values = json.loads(Path(config_path).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {config_path}: {exc}") from None
        if not isinstance(file_values, dict):
            raise UsageError("config file must hold a JSON object")
    known = {f.name for f in fields(RunConfig)}
    values = {}
    for key, val in file_values.items():
        key = key.replace("-", "_")
        key = "lam" if key == "lambda" else key
        if key not in known or key == "command":
            raise UsageError(f"unknown config key {key!r}")
        values[key] = val
    for key, (env, default) in ENV_DEFAULTS.items():
        if key not in values:
            raw = environ.get(env)
            if raw is not None:
                try:
                    values[key] = int(raw)
                except ValueError:
                    raise UsageError(f"{env} must be an integer, got {raw!r}") from None
            else:
                values[key] = default
    for key, val in args.items():
        if val is not None and val is not False:
            values[key] = val
        elif key not in values and val is False:
            values[key] = False
    values.setdefault("table", "hamilton")
    for key in ("output", "out_dir", "state"):
        if values.get(key) is not None:
            values[key] = Path(values[key])
    if values.get("poly") is not None:
        values["poly"] = tuple(values["poly"])
    values = {k: v for k, v in values.items() if k in known}
    return RunConfig(**values).validate()


def _emit(cfg: RunConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.output is not None:
        cfg.output.write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2)


def cmd_graph(cfg: RunConfig) -> int:
    g = build(cfg.spec())
    if cfg.format == "dot":
        _emit(cfg, export_dot(g, weights_as_styles=not cfg.labels))
        return 0
    out = summary(g)
    out["permutation_degree_profile"] = degree_profile(g).matches_permutation_profile
    out["fixed_vertices"] = sorted(fixed_vertices(g))
    out["edges"] = [list(e) for e in g.edges()]
    if cfg.type1_path:
        out["longest_type1_path"] = longest_type1_path(g, cap=cfg.path_cap)
    _emit(cfg, _dumps(out))
    return 0


def _hamilton_one(cfg: RunConfig, spec: PolySpec) -> dict:
    g = build(spec)
    comps = []
    for comp in weak_components(g).components:
        rep = enumerate_cycles(g, comp, max_type=cfg.max_type, max_component=cfg.max_component)
        d = rep.to_dict()
        if rep.witness_min_type is not None:
            bal = balance_sequence(g, rep.witness_min_type)
            d["weight_counts"] = [bal.zeros, bal.ones]
        if not cfg.witness:
            d.pop("witness")
        comps.append(d)
    return {"p": g.p, "lambda": g.lam, "coeffs": list(spec.coeffs), "components": comps}


def _survey_table(cfg: RunConfig, rec) -> str:
    if cfg.table == "hamilton":
        return render_csv(HAMILTON_HEADER, [rec.hamilton_row()])
    n = int(cfg.table[-1])
    return render_csv(rec.type_header(n), [rec.type_row(n)])


def _write_survey_files(cfg: RunConfig, rec, stem: str, tables: dict) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for name, text in tables.items():
        (cfg.out_dir / f"{stem}-{name}.csv").write_text(text)
    (cfg.out_dir / f"{stem}.json").write_text(_dumps(rec.to_dict()) + "\n")


def _hamilton_survey(cfg: RunConfig):
    rec = hamilton_survey(
        cfg.p, cfg.family, max_p=cfg.max_p, workers=cfg.workers, state_path=cfg.state, resume=cfg.resume
    )
    if cfg.out_dir is not None:
        tables = {"hamilton": render_csv(HAMILTON_HEADER, [rec.hamilton_row()])}
        for n in (2, 3):
            tables[f"type{n}"] = render_csv(rec.type_header(n), [rec.type_row(n)])
        _write_survey_files(cfg, rec, f"hamilton-{cfg.family}-{cfg.p}", tables)
    return rec


def cmd_hamilton(cfg: RunConfig) -> int:
    if cfg.survey is not None:
        if cfg.p is None:
            raise UsageError("--p is required")
        cfg.family = cfg.survey
        rec = _hamilton_survey(cfg)
        _emit(cfg, _survey_table(cfg, rec) if (cfg.format or "csv") == "csv" else _dumps(rec.to_dict()))
        return 0
    if cfg.format == "csv":
        raise UsageError("csv output needs --survey")
    if cfg.p is not None and cfg.p > cfg.max_p:
        # the component cap alone lets through components just below it,
        # whose searches never finish
        raise BudgetExceeded(f"Hamiltonian search at p = {cfg.p} exceeds budget max_p = {cfg.max_p}")
    if cfg.lam is None:
        # every canonical non-square
        spec = cfg.spec()
        ctx = make_ctx(spec.p)
        out = [_hamilton_one(cfg, spec.with_lambda(lam)) for lam in nonsquares(ctx)]
    else:
        out = _hamilton_one(cfg, cfg.spec())
    _emit(cfg, _dumps(out))
    return 0


def cmd_survey(cfg: RunConfig) -> int:
    if cfg.kind == "conjectures":
        if cfg.p_max is None:
            raise UsageError("--p-max is required for conjectures")
        report = conjecture_check(cfg.p_max, cfg.family, p_min=cfg.p_min or 5, workers=cfg.workers)
        if cfg.out_dir is not None:
            cfg.out_dir.mkdir(parents=True, exist_ok=True)
            (cfg.out_dir / f"conjectures-{cfg.family}-{cfg.p_max}.csv").write_text(report.csv())
        if cfg.format == "json":
            text = _dumps({
                "family": report.family,
                "counterexamples": report.counterexamples,
                "u_equals_l_counterexamples": report.u_equals_l_counterexamples,
                "two_component_counterexamples": report.two_component_counterexamples,
                "small_component_mismatches": report.small_component_mismatches,
                "primes": [r.p for r in report.rows],
            })
        else:
            text = f"{report.counterexamples} counterexamples"
        _emit(cfg, text)
        return 0 if report.counterexamples == 0 else 1
    if cfg.p is None:
        raise UsageError("--p is required")
    if cfg.kind == "connectedness":
        rec = connectedness_survey(cfg.p, cfg.family, workers=cfg.workers, state_path=cfg.state, resume=cfg.resume)
        table = render_csv(CONNECTEDNESS_HEADER, [rec.connectedness_row()])
        if cfg.out_dir is not None:
            _write_survey_files(cfg, rec, f"connectedness-{cfg.family}-{cfg.p}", {"table": table})
    else:
        rec = _hamilton_survey(cfg)
        table = _survey_table(cfg, rec)
    _emit(cfg, table if (cfg.format or "csv") == "csv" else _dumps(rec.to_dict()))
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    names = cfg.props or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise UsageError(f"unknown props {', '.join(unknown)}; known: {', '.join(SUITES)}")
    lines = []
    ok = True
    for name in names:
        res = run_suite(name, cfg.p_max, cfg.p_min)
        lines.append(res.line())
        ok = ok and res.passed
    _emit(cfg, "\n".join(lines))
    return 0 if ok else 1


COMMANDS = {"graph": cmd_graph, "hamilton": cmd_hamilton, "survey": cmd_survey, "verify": cmd_verify}


def _exit_code(exc: EqGraphError) -> int:
    if isinstance(exc, BudgetError):
        return 4
    if isinstance(exc, ComputationError):
        return 3
    return 2


def _fail(kind: str, msg: str, code: int) -> int:
    line = " ".join(str(msg).split())
    print(f"error: {kind}: {line}", file=sys.stderr)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = make_config(argv)
        return COMMANDS[cfg.command](cfg)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except EqGraphError as exc:
        return _fail(type(exc).__name__, exc, _exit_code(exc))
    except ValueError as exc:
        return _fail("InvalidInput", exc, 2)
    except OSError as exc:
        return _fail("IOError", exc, 2)
    except KeyboardInterrupt:
        return _fail("Interrupted", "stopped; completed work is kept in the state file if one was given", 130)


if __name__ == "__main__":
    sys.exit(main())
