"""The equational graph of ``(Y^2 - f(X)) (lam Y^2 - f(X)) = 0`` over F_p.

Every vertex has at most two out-edges, so the graph is stored as flat
``(p, 2)`` arrays rather than adjacency lists. Column 0 holds the smaller
target, which gives the ascending successor order the searches rely on.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .errors import LambdaIsSquare
from .field import FieldCtx, PolySpec, make_ctx, poly_values

__all__ = [
    "EqGraph",
    "ComponentReport",
    "DegreeProfile",
    "build",
    "degree_profile",
    "weak_components",
    "strong_components",
    "is_bipartite",
    "export_dot",
    "summary",
]


@dataclass(frozen=True, eq=False)
class EqGraph:
    spec: PolySpec
    succ: np.ndarray
    """``succ[x, i]`` is the i-th out-neighbour of ``x`` or -1."""
    weight: np.ndarray
    out_degree: np.ndarray

    @property
    def p(self) -> int:
        return self.spec.p

    @property
    def lam(self) -> int:
        return self.spec.lam

    @functools.cached_property
    def in_degree(self) -> np.ndarray:
        t = self.succ[self.succ >= 0]
        return np.bincount(t, minlength=self.p)

    @property
    def edge_count(self) -> int:
        return int(self.out_degree.sum())

    @property
    def out_edges(self) -> list[list[tuple[int, int]]]:
        out = []
        for x in range(self.p):
            d = int(self.out_degree[x])
            out.append([(int(self.succ[x, i]), int(self.weight[x, i])) for i in range(d)])
        return out

    def edges(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(x, y, weight)`` in ascending ``(x, y)`` order."""
        for x in range(self.p):
            for i in range(int(self.out_degree[x])):
                yield x, int(self.succ[x, i]), int(self.weight[x, i])

    def edge_set(self) -> set[tuple[int, int]]:
        return {(x, y) for x, y, _ in self.edges()}

    def successors(self, x: int) -> list[int]:
        return [int(y) for y in self.succ[x, : self.out_degree[x]]]

    @functools.cached_property
    def predecessors(self) -> list[list[int]]:
        preds = [[] for _ in range(self.p)]
        for x, y, _ in self.edges():
            preds[y].append(x)
        return preds

    def edge_weight(self, x: int, y: int) -> int:
        for i in range(int(self.out_degree[x])):
            if self.succ[x, i] == y:
                return int(self.weight[x, i])
        raise KeyError(f"no edge {x} -> {y}")


def build(spec: PolySpec, ctx: Optional[FieldCtx] = None) -> EqGraph:
    """Build ``G(lam, f)`` from the edge rule.

    For ``v = f(x)``: ``v == 0`` gives the single edge ``x -> 0`` of weight 0,
    a nonzero square gives ``x -> +-sqrt(v)`` of weight 0, and a non-square
    gives ``x -> +-sqrt(v / lam)`` of weight 1.
    """
    ctx = ctx or make_ctx(spec.p)
    p = ctx.p
    if spec.lam is None or ctx.chi_arr[spec.lam] != -1:
        raise LambdaIsSquare(f"lambda={spec.lam} is not a non-square mod {p}")
    lam_inv = pow(spec.lam, -1, p)

    v = poly_values(spec, ctx)
    ch = ctx.chi_arr[v]
    s = np.where(ch == -1, v * lam_inv % p, v)
    r = ctx.root[s]

    succ = np.empty((p, 2), dtype=np.int64)
    succ[:, 0] = r
    succ[:, 1] = np.where(v == 0, -1, p - r)
    weight = np.zeros((p, 2), dtype=np.int8)
    weight[ch == -1] = 1
    weight[v == 0, 1] = 0
    out_degree = np.where(v == 0, 1, 2).astype(np.int64)
    for arr in (succ, weight, out_degree):
        arr.setflags(write=False)
    return EqGraph(spec, succ, weight, out_degree)


@dataclass(frozen=True)
class DegreeProfile:
    in_degree: tuple[int, ...]
    out_degree: tuple[int, ...]
    matches_permutation_profile: bool

    def __getitem__(self, x: int) -> tuple[int, int]:
        return self.in_degree[x], self.out_degree[x]


def _expected_permutation_profile(g: EqGraph) -> Optional[list[tuple[int, int]]]:
    zeros = np.flatnonzero(g.out_degree == 1)
    if len(zeros) != 1:
        return None
    root = int(zeros[0])
    if root == 0:
        exp = [(2, 2)] * g.p
        exp[0] = (1, 1)
    else:
        exp = [(2, 2)] * g.p
        exp[0] = (1, 2)
        exp[root] = (2, 1)
    return exp


def degree_profile(g: EqGraph) -> DegreeProfile:
    """In/out degrees of every vertex.

    ``matches_permutation_profile`` says whether the degrees are exactly the
    ones a permutation polynomial forces: every vertex (2, 2) except vertex
    0 and the root of ``f``.
    """
    ind = tuple(int(d) for d in g.in_degree)
    outd = tuple(int(d) for d in g.out_degree)
    exp = _expected_permutation_profile(g)
    ok = exp is not None and all(e == (i, o) for e, i, o in zip(exp, ind, outd))
    return DegreeProfile(ind, outd, ok)


@dataclass(frozen=True)
class ComponentReport:
    components: tuple[frozenset, ...]
    strong_components: tuple[frozenset, ...]
    degree_anomalies: tuple[int, ...]
    """Vertices with zero in-degree."""

    @property
    def is_connected(self) -> bool:
        return len(self.components) == 1

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.components]

    def component_of(self, x: int) -> frozenset:
        for c in self.components:
            if x in c:
                return c
        raise KeyError(x)


def _weak(g: EqGraph) -> tuple[frozenset, ...]:
    p = g.p
    adj = [[] for _ in range(p)]
    for x, y, _ in g.edges():
        if x != y:
            adj[x].append(y)
            adj[y].append(x)
    seen = bytearray(p)
    comps = []
    for s in range(p):
        if seen[s]:
            continue
        seen[s] = 1
        stack = [s]
        comp = [s]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = 1
                    stack.append(w)
                    comp.append(w)
        comps.append(frozenset(comp))
    return tuple(comps)


def weak_components(g: EqGraph) -> ComponentReport:
    """Weakly connected components, ordered by their smallest vertex."""
    return ComponentReport(
        components=_weak(g),
        strong_components=tuple(strong_components(g)),
        degree_anomalies=tuple(np.flatnonzero(g.in_degree == 0).tolist()),
    )


def strong_components(g: EqGraph) -> list[frozenset]:
    """Tarjan's algorithm with an explicit stack; ordered by smallest vertex."""
    p = g.p
    succ = [g.successors(x) for x in range(p)]
    index = [-1] * p
    low = [0] * p
    on_stack = bytearray(p)
    stack: list[int] = []
    out = []
    counter = 0
    for root in range(p):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = 1
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = 1
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = 0
                    comp.append(w)
                    if w == v:
                        break
                out.append(frozenset(comp))
    out.sort(key=min)
    return out


def is_bipartite(g: EqGraph) -> bool:
    """2-colouring of the undirected closure; any loop makes it fail."""
    p = g.p
    adj = [[] for _ in range(p)]
    for x, y, _ in g.edges():
        if x == y:
            return False
        adj[x].append(y)
        adj[y].append(x)
    colour = [-1] * p
    for s in range(p):
        if colour[s] >= 0:
            continue
        colour[s] = 0
        stack = [s]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if colour[w] < 0:
                    colour[w] = 1 - colour[u]
                    stack.append(w)
                elif colour[w] == colour[u]:
                    return False
    return True


def export_dot(g: EqGraph, weights_as_styles: bool = True) -> str:
    """Graphviz text. Weight-0 edges are solid and weight-1 edges dashed;
    with ``weights_as_styles=False`` the weight goes into the edge label."""
    name = f"G({g.lam}, {g.spec}) over F_{g.p}"
    lines = [f'digraph "{name}" {{']
    for x in range(g.p):
        lines.append(f"  {x};")
    for x, y, w in g.edges():
        if weights_as_styles:
            attr = f'style={"dashed" if w else "solid"}'
        else:
            attr = f'label="{w}"'
        lines.append(f"  {x} -> {y} [{attr}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def summary(g: EqGraph, report: Optional[ComponentReport] = None) -> dict:
    report = report or weak_components(g)
    return {
        "p": g.p,
        "lambda": g.lam,
        "coeffs": list(g.spec.coeffs),
        "edge_count": g.edge_count,
        "components": [sorted(c) for c in report.components],
        "strongly_connected": len(report.strong_components) == 1,
        "bipartite": is_bipartite(g),
        "zero_in_degree": list(report.degree_anomalies),
    }
