"""Closed-form structural facts about G(lam, f), each paired with a check.

Every function here either predicts something about a graph from its
parameters alone or verifies such a prediction by building the graph.
Findings carry a ``formula_id`` naming the fact they come from, e.g.
``"linear-com2"`` for the two-vertex components of ``G(lam, X + a)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import LambdaIsSquare, PreconditionNotMet, UnsupportedForm
from .field import FieldCtx, PolySpec, is_cube, make_ctx
from .graph import EqGraph, build, weak_components
from .hamilton import DEFAULT_MAX_COMPONENT, enumerate_cycles

__all__ = [
    "IsomorphismWitness",
    "SmallComponentFinding",
    "BoundCheck",
    "verify_isomorphism",
    "witness_linear1",
    "witness_linear2",
    "witness_quad_iso1",
    "witness_quad_iso2",
    "witness_cubic1",
    "fixed_vertices",
    "s_lambda_size",
    "s_lambda_formula",
    "s_lambda_brute",
    "predict_small_components",
    "check_small_components",
    "normalize_quadratic",
    "zero_indegree_stats",
    "component_of_zero_nonhamiltonian",
    "fixed_vertex_criterion",
]


def _inv(x: int, p: int) -> int:
    return pow(x % p, -1, p)


# -- isomorphisms -----------------------------------------------------------

@dataclass(frozen=True)
class IsomorphismWitness:
    """The vertex map ``x -> multiplier * x`` from source's graph to target's."""

    kind: str
    multiplier: int
    source: PolySpec
    target: PolySpec
    formula_id: str = ""


def verify_isomorphism(w: IsomorphismWitness, ctx: Optional[FieldCtx] = None) -> bool:
    ctx = ctx or make_ctx(w.source.p)
    p = ctx.p
    c = ctx.check(w.multiplier)
    if c == 0:
        raise ValueError("multiplier must be nonzero")
    src = build(w.source, ctx)
    dst = build(w.target, ctx)
    # successor rows of psi(x) in the target must equal psi applied to the
    # successor rows of x; rows are compared as sorted pairs, -1 padding kept
    mapped = np.where(src.succ >= 0, src.succ * c % p, -1)
    mapped.sort(axis=1)
    image = dst.succ[np.arange(p, dtype=np.int64) * c % p].copy()
    image.sort(axis=1)
    return bool(np.array_equal(mapped, image))


def witness_linear1(p: int, lam: int, a: int, b: int) -> IsomorphismWitness:
    """``G(lam, aX + b)`` to ``G(lam, X + b/a^2)`` via ``x -> x/a``."""
    ai = _inv(a, p)
    return IsomorphismWitness(
        "scale", ai, PolySpec(p, (b, a), lam), PolySpec.linear(p, b * ai * ai % p, lam), "linear1"
    )


def witness_linear2(p: int, lam: int, a: int) -> IsomorphismWitness:
    """``G(lam, X + a)`` to ``G(1/lam, X + lam*a)`` via ``x -> lam*x``."""
    return IsomorphismWitness(
        "twist-scale", lam, PolySpec.linear(p, a, lam),
        PolySpec.linear(p, lam * a % p, _inv(lam, p)), "linear2",
    )


def witness_quad_iso1(p: int, lam: int, a: int, b: int) -> IsomorphismWitness:
    """``G(lam, X^2 + aX + b)`` to ``G(lam, X^2 + X + b/a^2)`` via ``x -> x/a``."""
    ai = _inv(a, p)
    return IsomorphismWitness(
        "scale", ai, PolySpec(p, (b, a, 1), lam), PolySpec(p, (b * ai * ai % p, 1, 1), lam), "quad-iso1"
    )


def witness_quad_iso2(p: int, lam: int, a: int, b: int) -> IsomorphismWitness:
    """``G(lam, X^2 + a)`` to ``G(lam, X^2 + b)`` via ``x -> c*x`` where ``c^2 = b/a``."""
    ctx = make_ctx(p)
    ratio = b * _inv(a, p) % p
    c = int(ctx.root[ratio])
    if c <= 0:
        raise PreconditionNotMet(f"b/a = {ratio} is not a nonzero square mod {p}")
    return IsomorphismWitness(
        "scale", c, PolySpec(p, (a, 0, 1), lam), PolySpec(p, (b, 0, 1), lam), "quad-iso2"
    )


def witness_cubic1(p: int, lam: int, a: int, b: int) -> IsomorphismWitness:
    """``G(lam, X^3+aX+b)`` to ``G(1/lam, X^3 + a/lam^2 X + b/lam^3)`` via ``x -> x/lam``."""
    li = _inv(lam, p)
    target = PolySpec(p, (b * li ** 3 % p, a * li * li % p, 0, 1), li)
    return IsomorphismWitness("twist-scale", li, PolySpec(p, (b, a, 0, 1), lam), target, "cubic1")


# -- fixed vertices and |S_lambda| -------------------------------------------

def fixed_vertices(g: EqGraph) -> frozenset:
    """Vertices carrying a loop."""
    return frozenset(x for x in range(g.p) if x in g.succ[x, : g.out_degree[x]])


def _require_nonsquare(ctx: FieldCtx, lam: int) -> int:
    lam = ctx.check(lam)
    if ctx.chi_arr[lam] != -1:
        raise LambdaIsSquare(f"lambda={lam} is not a non-square mod {ctx.p}")
    return lam


def s_lambda_formula(ctx: FieldCtx, lam: int) -> int:
    p = ctx.p
    lam = _require_nonsquare(ctx, lam)
    chi = ctx.chi_arr
    num = 3 * p + 1 + int(chi[(lam - 1) % p]) - int(chi[(1 - lam) % p])
    assert num % 4 == 0
    return num // 4


def s_lambda_brute(ctx: FieldCtx, lam: int) -> int:
    """Count ``a`` with a loop in ``G(lam, X + a)``, from the loop equations.

    A loop at ``x`` means ``x^2 = x + a`` or ``lam x^2 = x + a``, i.e.
    ``a`` is one of ``x^2 - x`` or ``lam x^2 - x``.
    """
    p = ctx.p
    lam = _require_nonsquare(ctx, lam)
    x = np.arange(p, dtype=np.int64)
    hits = np.concatenate([(x * x - x) % p, (lam * x % p * x - x) % p])
    return int(np.unique(hits).size)


def s_lambda_size(ctx: FieldCtx, lam: int, method: str = "formula") -> int:
    if method == "formula":
        return s_lambda_formula(ctx, lam)
    if method == "brute":
        return s_lambda_brute(ctx, lam)
    raise ValueError(f"unknown method {method!r}")


# -- small components --------------------------------------------------------

@dataclass(frozen=True)
class SmallComponentFinding:
    size: int
    vertices: frozenset
    formula_id: str
    matches_formula: Optional[bool] = None
    """Filled in by :func:`check_small_components`."""


def _form(spec: PolySpec) -> tuple[str, int]:
    cs = spec.coeffs
    if len(cs) == 2 and cs[1] == 1:
        return "linear", cs[0]
    if len(cs) == 4 and cs[1] == cs[2] == 0 and cs[3] == 1:
        return "cubic", cs[0]
    raise UnsupportedForm(f"expected X + a or X^3 + a, got {spec}")


def _finding(size, vs, p, fid):
    return SmallComponentFinding(size, frozenset(v % p for v in vs), fid)


def predict_small_components(spec: PolySpec, ctx: Optional[FieldCtx] = None) -> list[SmallComponentFinding]:
    """Components of size 2, 3 (and 4 when ``a = 0``) forced by the parameters.

    For ``a != 0`` there are never four-vertex components; the cubic forms
    assume ``3`` does not divide ``p - 1``.
    """
    ctx = ctx or make_ctx(spec.p)
    p = ctx.p
    kind, a = _form(spec)
    lam = _require_nonsquare(ctx, spec.lam)
    if kind == "cubic" and (p - 1) % 3 == 0:
        raise UnsupportedForm("cubic predictions need 3 not dividing p - 1")
    inv2 = _inv(2, p)
    minus1 = p - 1
    out = []

    if a == 0:
        out.append(_finding(1, [0], p, f"{kind}-a0-com1"))
        if lam == minus1:
            out.append(_finding(2, [1, minus1], p, f"{kind}-a0-com2"))
            # -1 non-square: x, -x, 1/x, -1/x with x of order 3 (linear) or 5 (cubic)
            order = 3 if kind == "linear" else 5
            if (p - 1) % order == 0:
                seen = set()
                for x in range(2, p):
                    if pow(x, order, p) == 1 and x not in seen:
                        quad = {x, p - x, _inv(x, p), p - _inv(x, p)}
                        seen |= quad
                        out.append(_finding(4, quad, p, f"{kind}-a0-com4"))
        elif lam * lam % p == minus1:
            out.append(_finding(4, [1, minus1, lam, p - lam], p, f"{kind}-a0-com4"))
        return out

    if lam != minus1:
        if kind == "linear":
            a2 = 2 * (lam + 1) * _inv((lam - 1) ** 2, p) % p
            x = 2 * _inv(1 - lam, p)
        else:
            a2 = (lam + 1) * (lam - 1) ** 2 * _inv(8, p) % p
            x = (1 - lam) * inv2
        if a == a2:
            out.append(_finding(2, [x, -x], p, f"{kind}-com2"))
    if lam == 2 % p and a == 1:
        out.append(_finding(3, [0, 1, minus1], p, f"{kind}-com3"))
    if lam == inv2:
        if kind == "linear" and a == 2 % p:
            out.append(_finding(3, [0, 2, -2], p, "linear-com3"))
        if kind == "cubic" and a == _inv(8, p):
            out.append(_finding(3, [0, inv2, -inv2], p, "cubic-com3"))
    return out


@dataclass(frozen=True)
class SmallComponentCheck:
    findings: tuple[SmallComponentFinding, ...]
    unpredicted: tuple[frozenset, ...]
    """Observed components of the checked sizes that no formula predicted."""

    @property
    def exact(self) -> bool:
        return not self.unpredicted and all(f.matches_formula for f in self.findings)


def check_small_components(
    spec: PolySpec, ctx: Optional[FieldCtx] = None, sizes=(2, 3, 4), components=None
) -> SmallComponentCheck:
    """Cross-check predictions against the actual weak components, both ways."""
    ctx = ctx or make_ctx(spec.p)
    predicted = predict_small_components(spec, ctx)
    if components is None:
        components = weak_components(build(spec, ctx)).components
    actual = set(components)
    findings = tuple(
        SmallComponentFinding(f.size, f.vertices, f.formula_id, f.vertices in actual) for f in predicted
    )
    claimed = {f.vertices for f in predicted}
    unpredicted = tuple(c for c in components if len(c) in sizes and c not in claimed)
    return SmallComponentCheck(findings, unpredicted)


# -- zero in-degree and non-Hamiltonian components ---------------------------

def normalize_quadratic(spec: PolySpec) -> tuple[PolySpec, int]:
    """Reduce monic ``X^2 + aX + b`` to ``X^2 + X + b/a^2`` (or leave ``X^2 + b``).

    Returns the normalized polynomial and the multiplier of the vertex map.
    """
    cs = spec.coeffs
    if len(cs) != 3 or cs[2] != 1:
        raise UnsupportedForm(f"expected a monic quadratic, got {spec}")
    b, a = cs[0], cs[1]
    p = spec.p
    if a == 0:
        return spec, 1
    ai = _inv(a, p)
    return PolySpec(p, (b * ai * ai % p, 1, 1), spec.lam), ai


@dataclass(frozen=True)
class BoundCheck:
    count: int
    bound: Optional[int]
    formula_id: Optional[str]

    @property
    def applicable(self) -> bool:
        return self.bound is not None

    @property
    def passed(self) -> Optional[bool]:
        return None if self.bound is None else self.count >= self.bound

    def as_triple(self):
        return self.count, self.bound, self.passed


def _quad_bound(p: int) -> int:
    """``floor((p - 3 sqrt(p)) / 4 - 1)`` in exact integer arithmetic."""
    # largest k with 4k <= p - 3 sqrt(p), i.e. p - 4k >= 0 and (p - 4k)^2 >= 9p
    k = (p - math.isqrt(9 * p) - 1) // 4
    while p - 4 * (k + 1) >= 0 and (p - 4 * (k + 1)) ** 2 >= 9 * p:
        k += 1
    return k - 1


def zero_indegree_stats(g: EqGraph) -> BoundCheck:
    """Count vertices nothing points to, against the known lower bound.

    Bounds exist for monic quadratics whose normalized constant avoids the
    degenerate value (1/4 for ``X^2 + X + a``, 0 for ``X^2 + a``) and for
    ``X^3 + a`` when ``3 | p - 1``. Otherwise ``bound`` is ``None``.
    """
    p = g.p
    count = int((g.in_degree == 0).sum())
    cs = g.spec.coeffs
    if len(cs) == 3 and cs[2] == 1:
        norm, _ = normalize_quadratic(g.spec)
        a = norm.coeffs[0]
        if norm.coeffs[1] == 1 and a != _inv(4, p):
            return BoundCheck(count, _quad_bound(p), "quad-indeg1")
        if norm.coeffs[1] == 0 and a != 0:
            return BoundCheck(count, _quad_bound(p), "quad-indeg2")
    if len(cs) == 4 and cs[1] == cs[2] == 0 and cs[3] == 1 and (p - 1) % 3 == 0:
        a = cs[0]
        n = (p - 1) // 3 if is_cube(make_ctx(p), (-a) % p) else (p - 7) // 3
        return BoundCheck(count, max(n, 1), "cubic-indeg")
    return BoundCheck(count, None, None)


def _zero_obstruction(g: EqGraph) -> bool:
    preds = g.predecessors[0]
    if not preds:
        return True
    if g.out_degree[0] == 1 and any(x != 0 for x in preds):
        # f(0) = 0: the loop is the only way out of 0, yet 0 is not alone
        return True
    stuck = [x for x in preds if x != 0 and g.out_degree[x] == 1]
    return len(stuck) >= 2


def component_of_zero_nonhamiltonian(
    g: EqGraph, method: str = "obstruction", max_component: int = DEFAULT_MAX_COMPONENT
) -> bool:
    """Whether the component holding vertex 0 has no Hamiltonian cycle.

    Applies to monic quadratics with a non-degenerate normalized constant and
    to ``X^3 + a`` with ``a != 0`` and ``3 | p - 1``. ``method="obstruction"``
    looks for a local reason (0 has no predecessor, 0 can only leave by its
    loop, or two predecessors have 0 as their only successor) and falls
    back to enumeration when none applies; ``method="enumerate"`` always
    runs the full search.
    """
    p = g.p
    cs = g.spec.coeffs
    ok = False
    if len(cs) == 3 and cs[2] == 1:
        norm, _ = normalize_quadratic(g.spec)
        a = norm.coeffs[0]
        ok = (norm.coeffs[1] == 1 and a != _inv(4, p)) or (norm.coeffs[1] == 0 and a != 0)
    elif len(cs) == 4 and cs[1] == cs[2] == 0 and cs[3] == 1:
        ok = cs[0] != 0 and (p - 1) % 3 == 0
    if not ok:
        raise PreconditionNotMet(f"no non-Hamiltonicity result covers G({g.lam}, {g.spec}) over F_{p}")
    if method == "obstruction" and _zero_obstruction(g):
        return True
    if method not in ("obstruction", "enumerate"):
        raise ValueError(f"unknown method {method!r}")
    comp = weak_components(g).component_of(0)
    return enumerate_cycles(g, comp, max_component=max_component).total == 0


def fixed_vertex_criterion(ctx: FieldCtx, lam: int, a: int) -> bool:
    """``G(lam, X + a)`` has a loop iff ``a + 1/4`` or ``lam*a + 1/4`` is a square."""
    p = ctx.p
    q = _inv(4, p)
    return ctx.chi_arr[(a + q) % p] >= 0 or ctx.chi_arr[(lam * a + q) % p] >= 0
