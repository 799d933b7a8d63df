"""Grid surveys of G(lam, X + a) and G(lam, X^3 + a) over (lam, a).

``lam`` runs over the canonical non-squares ``N_p`` (one of each pair
``{lam, 1/lam}``, the smaller as an integer in ``0..p-1``) and ``a`` over the
nonzero field elements. Aggregates are kept as exact integers/fractions;
decimal output is truncated to five places only when rendered.

Surveys can persist to a line-delimited state file: a header line, then one
JSON record per ``(lam, a)``. Records for a whole ``lam`` are appended and
flushed together, so an interrupted run resumes at the first missing key and
the final output does not depend on how often it was interrupted.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Optional

import numpy as np
from sympy import primerange

from . import _kernels
from .errors import BudgetExceeded, CubicFamilyInvalid, InvalidInput
from .field import FieldCtx, PolySpec, make_ctx
from .graph import build, weak_components
from .hamilton import enumerate_cycles
from .structure import predict_small_components

__all__ = [
    "LambdaGrid",
    "SurveyRecord",
    "ConjectureReport",
    "FAMILIES",
    "DEFAULT_HAMILTON_MAX_P",
    "STATE_VERSION",
    "lambda_grid",
    "l_of_p",
    "connectedness_survey",
    "hamilton_survey",
    "conjecture_check",
    "truncate5",
]

FAMILIES = ("linear", "cubic")
DEFAULT_HAMILTON_MAX_P = 31
STATE_VERSION = 1
_FAMILY_INDEX = {"linear": 1, "cubic": 3}


def truncate5(x: Fraction) -> str:
    """Render a nonnegative rational with five decimals, truncated."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("negative values are not rendered")
    q = x.numerator * 100000 // x.denominator
    return f"{q // 100000}.{q % 100000:05d}"


@dataclass(frozen=True)
class LambdaGrid:
    p: int
    lambdas: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.lambdas)


def lambda_grid(ctx: FieldCtx) -> LambdaGrid:
    p = ctx.p
    if p < 5:
        raise InvalidInput("the lambda grid needs p >= 5")
    lams = sorted({min(l, pow(l, -1, p)) for l in np.flatnonzero(ctx.chi_arr == -1).tolist()})
    return LambdaGrid(p, tuple(lams))


def l_of_p(p: int) -> int:
    """Number of unconnected graphs forced by the small-component formulas."""
    r = p % 8
    if r == 1:
        return (p - 1) // 4
    if r == 3:
        return (p + 1) // 4
    if r == 5:
        return (p + 3) // 4
    if r == 7:
        return (p - 3) // 4
    raise InvalidInput(f"{p} is not an odd prime")


def _check_family(p: int, family: str) -> None:
    if family not in FAMILIES:
        raise InvalidInput(f"unknown family {family!r}; expected one of {FAMILIES}")
    if family == "cubic" and (p - 1) % 3 == 0:
        raise CubicFamilyInvalid(f"X^3 + a is not a permutation of F_{p} since 3 | {p - 1}")


def _base(ctx: FieldCtx, family: str) -> np.ndarray:
    return np.arange(ctx.p, dtype=np.int64) if family == "linear" else ctx.cube


# -- per-lambda tasks (module level so they pickle) --------------------------

def _connectedness_task(args) -> list[dict]:
    p, family, lam = args
    ctx = make_ctx(p)
    shifts = np.arange(1, p, dtype=np.int64)
    counts, labels = _kernels.components_batch(
        p, ctx.chi_arr, ctx.root, _base(ctx, family), pow(lam, -1, p), shifts
    )
    out = []
    for k, a in enumerate(range(1, p)):
        rec = {"lambda": lam, "a": a, "components": int(counts[k])}
        if counts[k] > 1:
            _, sizes = np.unique(labels[k], return_counts=True)
            rec["sizes"] = sorted(sizes.tolist())
        out.append(rec)
    return out


def _hamilton_task(args) -> list[dict]:
    p, family, lam, max_component = args
    ctx = make_ctx(p)
    out = []
    for a in range(1, p):
        g = build(PolySpec.family(family, p, a, lam), ctx)
        comps = weak_components(g).components
        rec = {"lambda": lam, "a": a, "components": len(comps)}
        if len(comps) == 1:
            rep = enumerate_cycles(g, comps[0], max_component=max_component)
            rec["total"] = rep.total
            rec["by_type"] = {str(t): c for t, c in sorted(rep.by_type.items())}
            rec["balance_ok"] = rep.balance_ok
        out.append(rec)
    return out


# -- persistence ------------------------------------------------------------

def _header(kind: str, p: int, family: str) -> dict:
    return {"format": "eqgraph-survey-state", "version": STATE_VERSION, "kind": kind, "p": p, "family": family}


def _load_state(path: Path, header: dict) -> dict[tuple[int, int], dict]:
    """Read a state file, truncating a torn final line left by an interrupt."""
    done: dict[tuple[int, int], dict] = {}
    with open(path, "rb+") as fh:
        data = fh.read()
        good = data.rfind(b"\n") + 1
        if good < len(data):
            fh.truncate(good)
        lines = data[:good].decode().splitlines()
    if not lines:
        return done
    got = json.loads(lines[0])
    if got != header:
        raise InvalidInput(f"state file {path} belongs to a different survey: {got}")
    for line in lines[1:]:
        rec = json.loads(line)
        done[(rec["lambda"], rec["a"])] = rec
    return done


def _run_grid(
    task: Callable,
    kind: str,
    p: int,
    family: str,
    extra: tuple,
    workers: int,
    state_path: Optional[Path],
    resume: bool,
) -> list[dict]:
    grid = lambda_grid(make_ctx(p))
    header = _header(kind, p, family)
    done: dict[tuple[int, int], dict] = {}
    fh = None
    if state_path is not None:
        state_path = Path(state_path)
        if resume and state_path.exists():
            done = _load_state(state_path, header)
            fh = open(state_path, "a")
            if state_path.stat().st_size == 0:
                fh.write(json.dumps(header) + "\n")
        else:
            fh = open(state_path, "w")
            fh.write(json.dumps(header) + "\n")
            fh.flush()
    todo = [lam for lam in grid.lambdas if any((lam, a) not in done for a in range(1, p))]
    args = [(p, family, lam) + extra for lam in todo]
    try:
        if workers > 1 and len(args) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = pool.map(task, args)
                _absorb(results, done, fh)
        else:
            _absorb(map(task, args), done, fh)
    finally:
        if fh is not None:
            fh.close()
    return [done[k] for k in sorted(done)]


def _absorb(results: Iterable[list[dict]], done: dict, fh) -> None:
    # results arrive in lambda order, so the state file is written in a fixed
    # order whatever the worker count
    for batch in results:
        lines = []
        for rec in batch:
            key = (rec["lambda"], rec["a"])
            if key not in done:
                done[key] = rec
                lines.append(json.dumps(rec, sort_keys=True))
        if fh is not None and lines:
            fh.write("\n".join(lines) + "\n")
            fh.flush()


# -- aggregates ---------------------------------------------------------------

@dataclass(frozen=True)
class SurveyRecord:
    """One table row. Exact counts; ratios are Fractions."""

    p: int
    family: str
    C: int
    U: int
    L: int
    M: int
    grid_size: int
    unconnected: tuple = ()
    """``(lam, a, component sizes)`` for every unconnected graph."""
    h_min: Optional[int] = None
    h_max: Optional[int] = None
    h_sum: Optional[int] = None
    type_graphs: dict = field(default_factory=dict)
    """Type n -> number of connected graphs having a Type-n cycle."""
    type_sums: dict = field(default_factory=dict)
    """Type n -> total Type-n cycles over those graphs."""
    balance_ok: Optional[bool] = None

    @property
    def R(self) -> Fraction:
        return Fraction(self.C, self.C + self.U)

    @property
    def h_avg(self) -> Optional[Fraction]:
        return None if self.h_sum is None or not self.C else Fraction(self.h_sum, self.C)

    def ratio(self, n: int) -> Fraction:
        """Share of connected graphs with at least one Type-n cycle."""
        return Fraction(self.type_graphs.get(n, 0), self.C)

    def average(self, n: int) -> Optional[Fraction]:
        """Mean Type-n count over connected graphs that have any."""
        k = self.type_graphs.get(n, 0)
        return Fraction(self.type_sums[n], k) if k else None

    @property
    def index(self) -> int:
        return _FAMILY_INDEX[self.family]

    def connectedness_row(self) -> list[str]:
        return [str(self.p), str(self.C), str(self.U), str(self.L), str(self.M), truncate5(self.R)]

    def hamilton_row(self) -> list[str]:
        return [str(self.p), str(self.h_min), str(self.h_max), truncate5(self.h_avg)]

    def type_row(self, n: int) -> list[str]:
        avg = self.average(n)
        if avg is None:
            return [str(self.p), "", "", truncate5(self.ratio(n))]
        return [str(self.p), truncate5(avg), truncate5(avg / self.h_avg), truncate5(self.ratio(n))]

    def type_header(self, n: int) -> list[str]:
        t = f"A{self.index}{n}"
        return ["p", t, f"{t}_over_H", f"R{self.index}{n}"]

    def to_dict(self) -> dict:
        def frac(x):
            return None if x is None else {"num": x.numerator, "den": x.denominator, "trunc5": truncate5(x)}

        out = {
            "version": STATE_VERSION,
            "p": self.p,
            "family": self.family,
            "grid_size": self.grid_size,
            "C": self.C,
            "U": self.U,
            "L": self.L,
            "M": self.M,
            "R": frac(self.R),
            "unconnected": [{"lambda": l, "a": a, "sizes": list(s)} for l, a, s in self.unconnected],
        }
        if self.h_sum is not None:
            out["hamilton"] = {
                "Hmin": self.h_min,
                "Hmax": self.h_max,
                "Hsum": self.h_sum,
                "Havg": frac(self.h_avg),
                "balance_ok": self.balance_ok,
                "types": {
                    str(n): {
                        "graphs": self.type_graphs.get(n, 0),
                        "cycles": self.type_sums.get(n, 0),
                        "R": frac(self.ratio(n)),
                        "A": frac(self.average(n)),
                    }
                    for n in sorted(self.type_graphs)
                },
            }
        return out


CONNECTEDNESS_HEADER = ["p", "C", "U", "L", "M", "R"]
HAMILTON_HEADER = ["p", "Hmin", "Hmax", "Havg"]


def render_csv(header: list[str], rows: Iterable[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _aggregate(p: int, family: str, records: list[dict]) -> dict:
    connected = [r for r in records if r["components"] == 1]
    unconnected = tuple(
        (r["lambda"], r["a"], tuple(r["sizes"])) for r in records if r["components"] > 1 and "sizes" in r
    )
    unconnected_counts = [r["components"] for r in records if r["components"] > 1]
    return dict(
        p=p,
        family=family,
        C=len(connected),
        U=len(records) - len(connected),
        L=l_of_p(p),
        M=max(unconnected_counts, default=0),
        grid_size=len(records),
        unconnected=unconnected,
    )


def connectedness_survey(
    p: int,
    family: str = "linear",
    workers: int = 1,
    state_path: Optional[os.PathLike] = None,
    resume: bool = False,
) -> SurveyRecord:
    ctx = make_ctx(p)
    _check_family(p, family)
    records = _run_grid(_connectedness_task, "connectedness", ctx.p, family, (), workers, state_path, resume)
    return SurveyRecord(**_aggregate(p, family, records))


def hamilton_survey(
    p: int,
    family: str = "linear",
    max_p: int = DEFAULT_HAMILTON_MAX_P,
    workers: int = 1,
    state_path: Optional[os.PathLike] = None,
    resume: bool = False,
    types: tuple[int, ...] = (1, 2, 3),
) -> SurveyRecord:
    """Hamiltonian-cycle statistics over the connected graphs of the grid."""
    ctx = make_ctx(p)
    _check_family(p, family)
    if p > max_p:
        raise BudgetExceeded(f"Hamiltonian survey at p = {p} exceeds budget max_p = {max_p}")
    records = _run_grid(
        _hamilton_task, "hamilton", ctx.p, family, (p,), workers, state_path, resume
    )
    base = _aggregate(p, family, records)
    totals = [r["total"] for r in records if r["components"] == 1]
    type_graphs = {}
    type_sums = {}
    for n in types:
        counts = [r["by_type"].get(str(n), 0) for r in records if r["components"] == 1]
        type_graphs[n] = sum(1 for c in counts if c)
        type_sums[n] = sum(counts)
    return SurveyRecord(
        **base,
        h_min=min(totals, default=0),
        h_max=max(totals, default=0),
        h_sum=sum(totals),
        type_graphs=type_graphs,
        type_sums=type_sums,
        balance_ok=all(r["balance_ok"] for r in records if r["components"] == 1),
    )


# -- conjectures ---------------------------------------------------------------

@dataclass(frozen=True)
class ConjectureRow:
    p: int
    C: int
    U: int
    L: int
    in_range: bool
    """Whether ``U = L`` is conjectured at this prime (``p > 31``)."""
    u_equals_l: bool
    two_components: bool
    small_matches: bool
    """Every unconnected graph's smaller part is a predicted 2/3-vertex component."""


@dataclass(frozen=True)
class ConjectureReport:
    family: str
    rows: tuple[ConjectureRow, ...]

    @property
    def u_equals_l_counterexamples(self) -> list[int]:
        return [r.p for r in self.rows if r.in_range and not r.u_equals_l]

    @property
    def two_component_counterexamples(self) -> list[int]:
        return [r.p for r in self.rows if not r.two_components]

    @property
    def small_component_mismatches(self) -> list[int]:
        """Primes above 31 where an unconnected graph is not a predicted case.

        Below 32 two large parts occur (e.g. sizes 8 and 9 at p = 17, cubic),
        so the per-prime flag is reported but not counted there.
        """
        return [r.p for r in self.rows if r.in_range and not r.small_matches]

    @property
    def counterexamples(self) -> int:
        return len(self.u_equals_l_counterexamples) + len(self.two_component_counterexamples)

    def csv(self) -> str:
        header = ["p", "C", "U", "L", "conjectured", "U_eq_L", "two_components", "small_match"]
        rows = [
            [str(r.p), str(r.C), str(r.U), str(r.L), str(int(r.in_range)),
             str(int(r.u_equals_l)), str(int(r.two_components)), str(int(r.small_matches))]
            for r in self.rows
        ]
        return render_csv(header, rows)


def _small_parts_predicted(p: int, family: str, rec: SurveyRecord) -> bool:
    ctx = make_ctx(p)
    for lam, a, sizes in rec.unconnected:
        if len(sizes) != 2 or sizes[0] not in (2, 3):
            return False
        spec = PolySpec.family(family, p, a, lam)
        predicted = {f.vertices for f in predict_small_components(spec, ctx) if f.size == sizes[0]}
        if not predicted:
            return False
        comps = weak_components(build(spec, ctx)).components
        if not any(c in predicted for c in comps):
            return False
    return True


def conjecture_check(
    p_max: int,
    family: str = "linear",
    p_min: int = 5,
    workers: int = 1,
    progress: Optional[Callable[[int], None]] = None,
) -> ConjectureReport:
    """Recompute ``U(p)`` and component counts for every prime in range.

    ``U(p) = L(p)`` is only conjectured above 31; smaller primes are
    reported but not counted as counterexamples.
    """
    rows = []
    for p in primerange(max(p_min, 5), p_max + 1):
        p = int(p)
        if family == "cubic" and (p - 1) % 3 == 0:
            continue
        rec = connectedness_survey(p, family, workers=workers)
        rows.append(
            ConjectureRow(
                p=p,
                C=rec.C,
                U=rec.U,
                L=rec.L,
                in_range=p > 31,
                u_equals_l=rec.U == rec.L,
                two_components=all(len(s) == 2 for _, _, s in rec.unconnected),
                small_matches=_small_parts_predicted(p, family, rec),
            )
        )
        if progress:
            progress(p)
    return ConjectureReport(family, tuple(rows))
