"""Hamiltonian cycles of graph components, their Types, and weight sequences.

Edge weights follow the graph module: 0 for ``y^2 = f(x)``, 1 for
``lam y^2 = f(x)``, and 0 for the edge into vertex 0.

A Hamiltonian cycle through vertex 0 is typed on the path obtained by
dropping the one edge that enters 0; this path runs from 0 to the root of
``f``. A cycle that avoids 0 is typed by its longest run of equal weights
taken around the cycle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

import numpy as np

from . import _kernels
from .errors import ComponentTooLarge, NotHamiltonian, SearchBudgetExceeded
from .graph import EqGraph, weak_components

__all__ = [
    "Cycle",
    "HamiltonReport",
    "BalanceResult",
    "TypeTable",
    "DEFAULT_MAX_COMPONENT",
    "DEFAULT_PATH_CAP",
    "enumerate_cycles",
    "iter_cycles",
    "classify_type",
    "balance_sequence",
    "longest_type1_path",
    "type_table",
]

DEFAULT_MAX_COMPONENT = 100
DEFAULT_PATH_CAP = 101


@dataclass(frozen=True)
class Cycle:
    """A directed cycle, rotated so that its smallest vertex comes first."""

    vertices: tuple[int, ...]
    weights: tuple[int, ...] = field(default=(), compare=False)

    @classmethod
    def from_vertices(cls, g: EqGraph, vertices: Iterable[int]) -> "Cycle":
        vs = [int(v) for v in vertices]
        if not vs:
            raise ValueError("empty cycle")
        k = vs.index(min(vs))
        vs = vs[k:] + vs[:k]
        if len(set(vs)) != len(vs):
            raise ValueError(f"repeated vertex in {vs}")
        ws = []
        for i, x in enumerate(vs):
            y = vs[(i + 1) % len(vs)]
            try:
                ws.append(g.edge_weight(x, y))
            except KeyError:
                raise ValueError(f"{x} -> {y} is not an edge") from None
        return cls(tuple(vs), tuple(ws))

    def __len__(self):
        return len(self.vertices)


@dataclass(frozen=True)
class HamiltonReport:
    component: frozenset
    total: int
    by_type: dict[int, int]
    witness_min_type: Optional[Cycle]
    balance_ok: bool
    max_type: Optional[int] = None

    @property
    def balance_checked(self) -> bool:
        return self.total > 0

    def to_dict(self) -> dict:
        return {
            "component": sorted(self.component),
            "total": self.total,
            "by_type": {str(k): v for k, v in sorted(self.by_type.items())},
            "balance_ok": self.balance_ok,
            "max_type": self.max_type,
            "witness": list(self.witness_min_type.vertices) if self.witness_min_type else None,
        }


def _resolve_component(g: EqGraph, component) -> frozenset:
    if component is None:
        comps = weak_components(g).components
        if len(comps) != 1:
            raise ValueError("graph is not connected; pass one of its components")
        return comps[0]
    comp = frozenset(int(v) for v in component)
    for x in comp:
        if any(y not in comp for y in g.successors(x)):
            raise ValueError("vertex set is not closed under out-edges")
        if any(y not in comp for y in g.predecessors[x]):
            raise ValueError("vertex set is not closed under in-edges")
    return comp


def enumerate_cycles(
    g: EqGraph,
    component=None,
    max_type: Optional[int] = None,
    max_component: int = DEFAULT_MAX_COMPONENT,
) -> HamiltonReport:
    """Count the directed Hamiltonian cycles of one weak component.

    Each cycle is counted once, started at the component's smallest vertex;
    a cycle and its reverse are distinct. ``max_type`` keeps only cycles of
    Type at most that value and prunes the search accordingly.
    """
    comp = _resolve_component(g, component)
    n = len(comp)
    if n > max_component:
        raise ComponentTooLarge(f"component of {n} vertices exceeds cap {max_component}")
    if max_type is not None and max_type < 1:
        raise ValueError("max_type must be positive")
    start = min(comp)
    by_type, balance_ok, witness, wtype = _kernels.hamilton_search(
        g.succ,
        g.weight.astype(np.int64),
        g.out_degree,
        start,
        n,
        max_type or 0,
        0 in comp,
        False,
    )
    counts = {int(t): int(c) for t, c in enumerate(by_type) if c}
    total = sum(counts.values())
    wit = Cycle.from_vertices(g, witness) if total else None
    return HamiltonReport(comp, total, counts, wit, bool(balance_ok), max_type)


def iter_cycles(g: EqGraph, component=None) -> Iterator[Cycle]:
    """Yield every Hamiltonian cycle of a component, in search order.

    Pure Python and slow; intended for small components and inspection.
    """
    comp = _resolve_component(g, component)
    n = len(comp)
    start = min(comp)
    path = [start]
    on_path = {start}

    def extend():
        v = path[-1]
        for w in g.successors(v):
            if len(path) == n:
                if w == start:
                    yield Cycle.from_vertices(g, path)
            elif w not in on_path:
                path.append(w)
                on_path.add(w)
                yield from extend()
                on_path.discard(path.pop())

    # recursion depth is bounded by the component size cap
    yield from extend()


def _max_run(ws) -> int:
    best = run = 0
    prev = None
    for w in ws:
        run = run + 1 if w == prev else 1
        prev = w
        best = max(best, run)
    return best


def classify_type(g: EqGraph, c: Cycle) -> int:
    """Type of a cycle: its longest trail (run of equal weights).

    Returns 0 for the loop at vertex 0, which has no edge left to type.
    """
    if not c.weights:
        c = Cycle.from_vertices(g, c.vertices)
    ws = list(c.weights)
    if 0 in c.vertices:
        # rotation puts 0 first, so the edge into 0 is the last one
        return _max_run(ws[:-1])
    if len(set(ws)) == 1:
        return len(ws)
    k = next(i for i in range(len(ws)) if ws[i] != ws[i - 1])
    return _max_run(ws[k:] + ws[:k])


@dataclass(frozen=True)
class BalanceResult:
    bits: tuple[int, ...]
    zeros: int
    ones: int

    @property
    def balanced(self) -> bool:
        return abs(self.zeros - self.ones) <= 1


def balance_sequence(g: EqGraph, c: Cycle) -> BalanceResult:
    """The weight sequence along a Hamiltonian cycle, read from its first vertex."""
    comp = weak_components(g).component_of(c.vertices[0])
    if set(c.vertices) != comp:
        raise NotHamiltonian(f"cycle covers {len(c)} of {len(comp)} component vertices")
    if not c.weights:
        c = Cycle.from_vertices(g, c.vertices)
    ones = sum(c.weights)
    return BalanceResult(c.weights, len(c.weights) - ones, ones)


def longest_type1_path(g: EqGraph, cap: int = DEFAULT_PATH_CAP) -> int:
    """Most vertices on any directed simple path with alternating edge weights.

    Both out-edges of a vertex share one weight, so the search only has to
    alternate the weight class of consecutive source vertices.
    """
    if g.p > cap:
        raise SearchBudgetExceeded(f"p = {g.p} exceeds the path-search cap {cap}")
    cls = g.weight[:, 0].astype(np.int64)
    return int(_kernels.longest_alternating_path(g.succ, g.out_degree, cls))


@dataclass(frozen=True)
class TypeTable:
    by_type: dict[int, int]
    at_most: dict[int, int]
    """``at_most[n]``: cycles of Type <= n, from pruned searches."""

    def has_type(self, n: int) -> bool:
        return self.by_type.get(n, 0) > 0


def type_table(
    g: EqGraph,
    component=None,
    up_to: int = 3,
    max_component: int = DEFAULT_MAX_COMPONENT,
) -> TypeTable:
    full = enumerate_cycles(g, component, max_component=max_component)
    at_most = {}
    for n in range(1, up_to + 1):
        at_most[n] = enumerate_cycles(g, full.component, max_type=n, max_component=max_component).total
    return TypeTable(full.by_type, at_most)
