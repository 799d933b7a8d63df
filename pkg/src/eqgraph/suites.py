"""Exhaustive checks of the structural results over a range of primes.

Each suite takes ``p_max`` (and sometimes ``p_min``) and returns a
:class:`SuiteResult`; the CLI ``verify`` command runs them by label.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

import numpy as np
from sympy import Poly, primerange, symbols

from . import _kernels
from .field import PolySpec, char_sum, char_sum_quadratic, is_permutation, make_ctx, value_set
from .graph import build, degree_profile, is_bipartite, weak_components
from .hamilton import DEFAULT_PATH_CAP, enumerate_cycles, longest_type1_path
from .structure import (
    check_small_components,
    component_of_zero_nonhamiltonian,
    fixed_vertex_criterion,
    fixed_vertices,
    s_lambda_brute,
    s_lambda_formula,
    witness_cubic1,
    witness_linear1,
    witness_linear2,
    witness_quad_iso1,
    witness_quad_iso2,
    zero_indegree_stats,
)
from .survey import lambda_grid

__all__ = ["SuiteResult", "SUITES", "run_suite", "permutation_graphs"]


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.checked > 0 and not self.failures

    def check(self, ok: bool, what) -> None:
        self.checked += 1
        if not ok and len(self.failures) < 20:
            self.failures.append(what)

    def bulk(self, n: int, failures) -> None:
        """Record ``n`` checks at once, of which ``failures`` failed."""
        self.checked += n
        self.failures.extend(list(failures)[: max(0, 20 - len(self.failures))])

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        tail = f" first failure: {self.failures[0]}" if self.failures else ""
        return f"{self.name}: {status} ({self.checked} checks){tail}"


def _primes(p_min: int, p_max: int) -> list[int]:
    return [int(p) for p in primerange(max(p_min, 5), p_max + 1)]


def permutation_graphs(p: int, include_zero: bool = True) -> Iterator[tuple[str, int, int, PolySpec]]:
    """``(family, lam, a, spec)`` over ``N_p`` for every permutation family.

    Families: ``X + a`` always, ``X^3 + a`` when ``3 ∤ p - 1`` and
    ``X^5 + a`` when ``5 ∤ p - 1``.
    """
    ctx = make_ctx(p)
    fams = [("linear", (0, 1))]
    if (p - 1) % 3:
        fams.append(("cubic", (0, 0, 0, 1)))
    if (p - 1) % 5:
        fams.append(("quintic", (0, 0, 0, 0, 0, 1)))
    start = 0 if include_zero else 1
    for lam in lambda_grid(ctx).lambdas:
        for name, cs in fams:
            for a in range(start, p):
                yield name, lam, a, PolySpec(p, (a,) + cs[1:], lam)


def perm_inout(p_max: int, p_min: int = 5) -> SuiteResult:
    res = SuiteResult("perm-inout")
    for p in _primes(p_min, p_max):
        for fam, lam, a, spec in permutation_graphs(p):
            res.check(degree_profile(build(spec)).matches_permutation_profile, (p, fam, lam, a))
    return res


def perm_conn(p_max: int, p_min: int = 5) -> SuiteResult:
    res = SuiteResult("perm-conn")
    for p in _primes(p_min, p_max):
        for fam, lam, a, spec in permutation_graphs(p):
            rep = weak_components(build(spec))
            res.check(set(rep.components) == set(rep.strong_components), (p, fam, lam, a))
    return res


def perm_bi(p_max: int, p_min: int = 5) -> SuiteResult:
    res = SuiteResult("perm-bi")
    for p in _primes(p_min, p_max):
        for fam, lam, a, spec in permutation_graphs(p):
            res.check(not is_bipartite(build(spec)), (p, fam, lam, a))
    return res


def perm_ha(p_max: int, p_min: int = 5) -> SuiteResult:
    """Every component of a permutation graph has a Hamiltonian cycle."""
    res = SuiteResult("perm-ha")
    for p in _primes(p_min, p_max):
        for fam, lam, a, spec in permutation_graphs(p, include_zero=False):
            g = build(spec)
            for comp in weak_components(g).components:
                rep = enumerate_cycles(g, comp, max_component=p)
                res.check(rep.total >= 1, (p, fam, lam, a, min(comp)))
    return res


def perm_balance(p_max: int, p_min: int = 5) -> SuiteResult:
    """Every Hamiltonian cycle has weight counts (k+1, k) or (k, k).

    The extra weight-0 edge is the one into vertex 0, so it appears exactly
    when the cycle passes through 0.
    """
    res = SuiteResult("perm-balance")
    for p in _primes(p_min, p_max):
        for fam, lam, a, spec in permutation_graphs(p, include_zero=False):
            g = build(spec)
            for comp in weak_components(g).components:
                rep = enumerate_cycles(g, comp, max_component=p)
                res.check(rep.balance_ok, (p, fam, lam, a, min(comp)))
    return res


def _ht1(label: str, families, p_max: int, p_min: int) -> SuiteResult:
    res = SuiteResult(label)
    for p in _primes(max(p_min, 19), p_max):
        for fam, lam, a, spec in permutation_graphs(p, include_zero=False):
            if fam not in families:
                continue
            g = build(spec)
            if weak_components(g).is_connected:
                rep = enumerate_cycles(g, max_type=1, max_component=p)
                res.check(rep.total == 0, (p, fam, lam, a))
    return res


def linear_ht1(p_max: int, p_min: int = 19) -> SuiteResult:
    """No Type-1 Hamiltonian cycle in ``G(lam, X + a)`` for ``p > 17``."""
    return _ht1("linear-ht1", ("linear",), p_max, p_min)


def cubic_ht1(p_max: int, p_min: int = 19) -> SuiteResult:
    """Same for ``X^3 + a`` and ``X^5 + a`` where they permute F_p."""
    return _ht1("cubic-ht1", ("cubic", "quintic"), p_max, p_min)


def linear_p(p_max: int, p_min: int = 5) -> SuiteResult:
    """Longest alternating path in ``G(lam, X + a)`` is at most ``floor(3p/4 + 17/4)``."""
    res = SuiteResult("linear-p")
    res.check(longest_type1_path(build(PolySpec.linear(19, 0, 2))) == 18, "G(2, X) over F_19")
    for p in _primes(p_min, p_max):
        bound = (3 * p + 17) // 4
        for fam, lam, a, spec in permutation_graphs(p, include_zero=False):
            if fam == "linear":
                n = longest_type1_path(build(spec), cap=max(p, DEFAULT_PATH_CAP))
                res.check(n <= bound, (p, lam, a, n, bound))
    return res


def s_lambda(p_max: int, p_min: int = 3) -> SuiteResult:
    res = SuiteResult("s-lambda")
    for p in primerange(max(p_min, 3), p_max + 1):
        ctx = make_ctx(int(p))
        for lam in np.flatnonzero(ctx.chi_arr == -1).tolist():
            res.check(s_lambda_brute(ctx, lam) == s_lambda_formula(ctx, lam), (int(p), lam))
    return res


def fixed_vertex(p_max: int, p_min: int = 3) -> SuiteResult:
    res = SuiteResult("fixed-vertex")
    for p in primerange(max(p_min, 3), p_max + 1):
        ctx = make_ctx(int(p))
        for lam in np.flatnonzero(ctx.chi_arr == -1).tolist():
            for a in range(p):
                g = build(PolySpec.linear(int(p), a, lam), ctx)
                res.check(bool(fixed_vertices(g)) == fixed_vertex_criterion(ctx, lam, a), (int(p), lam, a))
    return res


def _all_nonsquare_components(p: int, family: str):
    """Yield ``(lam, a, components)`` for every non-square lam, via the batch kernel."""
    ctx = make_ctx(p)
    base = np.arange(p, dtype=np.int64) if family == "linear" else ctx.cube
    shifts = np.arange(p, dtype=np.int64)
    for lam in np.flatnonzero(ctx.chi_arr == -1).tolist():
        _, labels = _kernels.components_batch(p, ctx.chi_arr, ctx.root, base, pow(lam, -1, p), shifts)
        for a in range(p):
            lab = labels[a]
            groups: dict[int, list[int]] = {}
            for x, r in enumerate(lab.tolist()):
                groups.setdefault(r, []).append(x)
            yield lam, a, [frozenset(v) for v in groups.values()]


def small_components(p_max: int, p_min: int = 5) -> SuiteResult:
    """Predicted small components match observed ones in both directions."""
    res = SuiteResult("small-components")
    for p in _primes(p_min, p_max):
        ctx = make_ctx(p)
        for family in ("linear", "cubic"):
            if family == "cubic" and (p - 1) % 3 == 0:
                continue
            for lam, a, comps in _all_nonsquare_components(p, family):
                spec = PolySpec.family(family, p, a, lam)
                sizes = (1, 2, 3, 4) if a == 0 else (2, 3, 4)
                chk = check_small_components(spec, ctx, sizes=sizes, components=comps)
                res.check(chk.exact, (p, family, lam, a))
    return res


def batched_isomorphism(ctx, witnesses) -> np.ndarray:
    """Check many scaling :class:`IsomorphismWitness` objects at once."""
    p = ctx.p
    if not witnesses:
        return np.zeros(0, dtype=bool)
    width = max(max(len(w.source.coeffs), len(w.target.coeffs)) for w in witnesses)
    pad = [(0,) * k for k in range(width + 1)]
    src = np.array([w.source.coeffs + pad[width - len(w.source.coeffs)] for w in witnesses], dtype=np.int64)
    dst = np.array([w.target.coeffs + pad[width - len(w.target.coeffs)] for w in witnesses], dtype=np.int64)
    inv = np.zeros(p, dtype=np.int64)
    inv[1:] = [pow(x, -1, p) for x in range(1, p)]
    src_li = inv[np.array([w.source.lam for w in witnesses], dtype=np.int64)]
    dst_li = inv[np.array([w.target.lam for w in witnesses], dtype=np.int64)]
    mult = np.array([w.multiplier for w in witnesses], dtype=np.int64) % p
    return _kernels.scale_isomorphisms(p, ctx.chi_arr.astype(np.int64), src, src_li, dst, dst_li, mult)


def isomorphisms(p_max: int, p_min: int = 3) -> SuiteResult:
    """All five witness families, exhaustive over non-square lam and a, b."""
    res = SuiteResult("isomorphisms")
    for p in primerange(max(p_min, 3), p_max + 1):
        p = int(p)
        ctx = make_ctx(p)
        for lam in np.flatnonzero(ctx.chi_arr == -1).tolist():
            keys = [("linear2", a) for a in range(p)]
            batch = [witness_linear2(p, lam, a) for a in range(p)]
            for a in range(p):
                keys += [("cubic1", a, b) for b in range(p)]
                batch += [witness_cubic1(p, lam, a, b) for b in range(p)]
                if a == 0:
                    continue
                keys += [("linear1", a, b) for b in range(p)]
                batch += [witness_linear1(p, lam, a, b) for b in range(p)]
                keys += [("quad-iso1", a, b) for b in range(p)]
                batch += [witness_quad_iso1(p, lam, a, b) for b in range(p)]
                ai = pow(a, -1, p)
                good_b = [b for b in range(1, p) if ctx.chi_arr[b * ai % p] == 1]
                keys += [("quad-iso2", a, b) for b in good_b]
                batch += [witness_quad_iso2(p, lam, a, b) for b in good_b]
            ok = batched_isomorphism(ctx, batch)
            res.bulk(len(batch), [(p, lam) + keys[i] for i in np.flatnonzero(~ok)[:20].tolist()])
    return res


def zero_indegree(p_max: int, p_min: int = 3) -> SuiteResult:
    res = SuiteResult("zero-indegree")
    for p in primerange(max(p_min, 3), p_max + 1):
        p = int(p)
        ctx = make_ctx(p)
        for lam in np.flatnonzero(ctx.chi_arr == -1).tolist():
            for a in range(p):
                specs = [PolySpec(p, (a, 1, 1), lam), PolySpec(p, (a, 0, 1), lam)]
                if (p - 1) % 3 == 0:
                    specs.append(PolySpec.cubic(p, a, lam))
                for spec in specs:
                    chk = zero_indegree_stats(build(spec, ctx))
                    if chk.applicable:
                        res.check(chk.passed, (p, lam, str(spec), chk.as_triple()))
    return res


def zero_nonhamiltonian(p_max: int, p_min: int = 3, enumerate_max: int = 19) -> SuiteResult:
    """The component of 0 has no Hamiltonian cycle.

    Full enumeration up to ``enumerate_max``; above it the local obstruction
    is used, with enumeration only as its fallback.
    """
    res = SuiteResult("zero-nonhamiltonian")
    for p in primerange(max(p_min, 3), p_max + 1):
        p = int(p)
        ctx = make_ctx(p)
        method = "enumerate" if p <= enumerate_max else "obstruction"
        quarter = pow(4, -1, p)
        for lam in np.flatnonzero(ctx.chi_arr == -1).tolist():
            for a in range(p):
                specs = []
                if a != quarter:
                    specs.append(PolySpec(p, (a, 1, 1), lam))
                if a:
                    specs.append(PolySpec(p, (a, 0, 1), lam))
                    if (p - 1) % 3 == 0:
                        specs.append(PolySpec.cubic(p, a, lam))
                for spec in specs:
                    ok = component_of_zero_nonhamiltonian(build(spec, ctx), method=method, max_component=p)
                    res.check(ok, (p, lam, str(spec)))
    return res


def weil_quadratic(p_max: int, p_min: int = 3) -> SuiteResult:
    """``sum chi(a x^2 + b x + c) = -chi(a)`` for every nondegenerate quadratic.

    For each ``a`` the full ``(b, c)`` table is computed as a value histogram
    times the circulant of ``chi``; the library routine is cross-checked on
    the ``c = 1`` slice.
    """
    res = SuiteResult("weil-quadratic")
    for p in primerange(max(p_min, 3), p_max + 1):
        p = int(p)
        ctx = make_ctx(p)
        x = np.arange(p, dtype=np.int64)
        circ = ctx.chi_arr[(x[:, None] + x[None, :]) % p].astype(np.float64)
        bs = x[:, None]
        for a in range(1, p):
            vals = (a * x * x + bs * x) % p  # row b: a x^2 + b x
            hist = np.zeros((p, p), dtype=np.float64)
            np.add.at(hist, (np.repeat(x, p), vals.ravel()), 1.0)
            sums = np.rint(hist @ circ).astype(np.int64)  # [b, c]
            disc = (x[:, None] * x[:, None] - 4 * a * x[None, :]) % p
            expect = -int(ctx.chi_arr[a])
            good = (sums == expect) | (disc == 0)
            bad = [(p, a, b_, c_, int(sums[b_, c_])) for b_, c_ in np.argwhere(~good)[:20].tolist()]
            res.bulk(int((disc != 0).sum()), bad)
            for b_ in range(p):
                if (b_ * b_ - 4 * a) % p:
                    res.check(char_sum_quadratic(ctx, a, b_, 1) == sums[b_, 1], ("library", p, a, b_))
    return res


def _root_data(coeffs, p: int) -> tuple[int, bool]:
    """Distinct roots in the algebraic closure, and whether ``f = c g^2``."""
    X = symbols("X")
    _, factors = Poly(list(reversed(coeffs)), X, modulus=p).sqf_list()
    # squarefree factors of degree < p have distinct roots
    return sum(g.degree() for g, _ in factors), all(m % 2 == 0 for _, m in factors)


def _monic_polys(p: int, deg: int) -> np.ndarray:
    """Every monic polynomial of degree ``deg`` as rows of ascending coefficients."""
    grids = np.meshgrid(*([np.arange(p, dtype=np.int64)] * deg), indexing="ij")
    return np.stack([g.ravel() for g in grids] + [np.ones(p**deg, dtype=np.int64)], axis=1)


def _mul(f, g, p):
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] = (out[i + j] + a * b) % p
    return out


def _codes(rows: np.ndarray, p: int) -> np.ndarray:
    """Base-``p`` integer code of each coefficient row."""
    return rows @ (p ** np.arange(rows.shape[1], dtype=np.int64))


def _square_keys(p: int, deg: int) -> np.ndarray:
    """Codes of ``g^2`` for monic ``g`` of degree ``deg / 2``, leading 1 dropped."""
    if deg % 2:
        return np.zeros(0, dtype=np.int64)
    sq = np.array([_mul(g, g, p) for g in _monic_polys(p, deg // 2).tolist()], dtype=np.int64)
    return np.unique(_codes(sq[:, :-1], p))


def weil_bound(p_max: int, p_min: int = 3, max_degree: int = 4) -> SuiteResult:
    """``|sum chi(f(x))| <= (d - 1) sqrt(p)`` unless ``f`` is a constant times a square.

    ``d`` counts distinct roots in the closure. Scaling ``f`` by a nonzero
    constant changes neither side nor the square condition, so running over
    every monic polynomial covers every polynomial of each degree.
    """
    res = SuiteResult("weil-bound")
    for p in primerange(max(p_min, 3), p_max + 1):
        p = int(p)
        ctx = make_ctx(p)
        for deg in range(1, max_degree + 1):
            if deg >= p:
                # derivatives lose multiplicity information here
                for cs in _monic_polys(p, deg).tolist():
                    d, square = _root_data(cs, p)
                    if not square:
                        s = abs(char_sum(PolySpec(p, tuple(cs)), ctx))
                        res.check(s * s <= (d - 1) ** 2 * p, (p, tuple(cs), s, d))
                continue
            is_square = np.zeros(p**deg if deg % 2 == 0 else 0, dtype=np.bool_)
            is_square[_square_keys(p, deg)] = True
            checked, worst = _kernels.weil_scan(p, deg, ctx.chi_arr.astype(np.int64), is_square)
            bad = []
            if worst[0] >= 0:
                code, s_, d_ = (int(v) for v in worst)
                bad.append((p, tuple(code // p**j % p for j in range(deg)) + (1,), s_, d_))
            res.bulk(int(checked), bad)
    return res


def value_set_bound(p_max: int, p_min: int = 3) -> SuiteResult:
    res = SuiteResult("value-set-bound")
    for p in primerange(max(p_min, 3), p_max + 1):
        p = int(p)
        for a in range(1, p):
            # (X^2 - a)^2 = X^4 - 2a X^2 + a^2
            n = len(value_set(PolySpec(p, (a * a % p, 0, (-2 * a) % p, 0, 1))))
            res.check(8 * n <= 3 * p + 9, (p, a, n))
    return res


def cubic_permutation(p_max: int, p_min: int = 3) -> SuiteResult:
    res = SuiteResult("cubic-permutation")
    for p in primerange(max(p_min, 3), p_max + 1):
        p = int(p)
        for a in range(p):
            res.check(is_permutation(PolySpec.cubic(p, a)) == ((p - 1) % 3 != 0), (p, a))
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "perm-inout": perm_inout,
    "perm-conn": perm_conn,
    "perm-bi": perm_bi,
    "perm-ha": perm_ha,
    "perm-balance": perm_balance,
    "linear-ht1": linear_ht1,
    "cubic-ht1": cubic_ht1,
    "linear-p": linear_p,
    "s-lambda": s_lambda,
    "fixed-vertex": fixed_vertex,
    "small-components": small_components,
    "isomorphisms": isomorphisms,
    "zero-indegree": zero_indegree,
    "zero-nonhamiltonian": zero_nonhamiltonian,
    "weil-quadratic": weil_quadratic,
    "weil-bound": weil_bound,
    "value-set-bound": value_set_bound,
    "cubic-permutation": cubic_permutation,
}


def run_suite(name: str, p_max: int, p_min: Optional[int] = None) -> SuiteResult:
    """Run one suite by label; ``p_min`` defaults to the suite's own start."""
    try:
        fn = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown proposition suite {name!r}; known: {', '.join(SUITES)}") from None
    return fn(p_max) if p_min is None else fn(p_max, p_min=p_min)
