"""Prime-field arithmetic backed by precomputed tables.

Everything here works on canonical representatives ``0..p-1``. Negative or
out-of-range inputs raise :class:`FieldElementError` instead of being
reduced, so a caller passing ``-1`` where ``p - 1`` was meant finds out.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from sympy import isprime

from .errors import (
    DegenerateQuadratic,
    EvenModulus,
    FieldElementError,
    FieldTooLarge,
    NotPrime,
)

__all__ = [
    "FieldCtx",
    "PolySpec",
    "ValueSet",
    "make_ctx",
    "chi",
    "sqrt_pair",
    "eval_poly",
    "poly_values",
    "is_permutation",
    "value_set",
    "char_sum",
    "char_sum_quadratic",
    "inv",
    "is_cube",
]

# Tables cost about 9 bytes per element; int64 Horner steps would allow
# p up to 3e9, memory runs out long before that.
MAX_TABLE_P = 2**26


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """An odd prime modulus with its square, square-root and cube tables.

    ``root[s]`` is the smaller square root of ``s`` (``-1`` for non-squares)
    and ``chi_arr[s]`` the quadratic character. Build through
    :func:`make_ctx`, which caches one context per prime.
    """

    p: int
    chi_arr: np.ndarray = field(repr=False)
    root: np.ndarray = field(repr=False)

    @property
    def half(self) -> int:
        return (self.p - 1) // 2

    @functools.cached_property
    def cube(self) -> np.ndarray:
        x = np.arange(self.p, dtype=np.int64)
        return (x * x % self.p) * x % self.p

    @property
    def sqrt_table(self) -> dict[int, tuple[int, ...]]:
        out = {}
        for s in np.flatnonzero(self.root >= 0).tolist():
            y = int(self.root[s])
            out[s] = (y,) if y == 0 else (y, self.p - y)
        return out

    @property
    def chi_table(self) -> dict[int, int]:
        return dict(enumerate(self.chi_arr.tolist()))

    def check(self, x: int) -> int:
        """Return ``x`` as an int after checking it is canonical."""
        if type(x) is int and 0 <= x < self.p:
            return x
        if isinstance(x, (bool, np.bool_)) or not isinstance(x, (int, np.integer)):
            raise FieldElementError(f"field element must be an integer, got {x!r}")
        x = int(x)
        if not 0 <= x < self.p:
            raise FieldElementError(f"{x} is not a canonical element of F_{self.p}")
        return x

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and other.p == self.p

    def __hash__(self):
        return hash(("FieldCtx", self.p))


@functools.lru_cache(maxsize=64)
def make_ctx(p: int) -> FieldCtx:
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
        raise NotPrime(f"modulus must be an integer, got {p!r}")
    p = int(p)
    if p == 2:
        raise EvenModulus("p = 2 is not an odd prime")
    if p < 2 or not isprime(p):
        raise NotPrime(f"{p} is not prime")
    if p > MAX_TABLE_P:
        raise FieldTooLarge(f"p = {p} exceeds the table limit {MAX_TABLE_P}")

    y = np.arange((p + 1) // 2, dtype=np.int64)
    squares = y * y % p
    root = np.full(p, -1, dtype=np.int64)
    # y runs over 0..(p-1)/2 so each square is hit exactly once, by its
    # smaller root.
    root[squares] = y
    chi_arr = np.where(root >= 0, 1, -1).astype(np.int8)
    chi_arr[0] = 0
    root.setflags(write=False)
    chi_arr.setflags(write=False)
    return FieldCtx(p, chi_arr, root)


def inv(ctx: FieldCtx, a: int) -> int:
    a = ctx.check(a)
    if a == 0:
        raise ZeroDivisionError("0 has no inverse")
    return pow(a, -1, ctx.p)


def chi(ctx: FieldCtx, a: int) -> int:
    return int(ctx.chi_arr[ctx.check(a)])


def sqrt_pair(ctx: FieldCtx, s: int) -> Optional[tuple[int, ...]]:
    """Both square roots of ``s`` as ``(y, p - y)`` with ``y <= p - y``.

    Zero gives the one-element tuple ``(0,)``; a non-square gives ``None``.
    """
    y = int(ctx.root[ctx.check(s)])
    if y < 0:
        return None
    if y == 0:
        return (0,)
    return (y, ctx.p - y)


def is_cube(ctx: FieldCtx, a: int) -> bool:
    a = ctx.check(a)
    p = ctx.p
    if a == 0 or (p - 1) % 3:
        return True
    return pow(a, (p - 1) // 3, p) == 1


@dataclass(frozen=True)
class PolySpec:
    """A polynomial over F_p, optionally paired with the twist ``lam``.

    ``coeffs`` are ascending (``coeffs[i]`` multiplies ``X**i``); trailing
    zeros are stripped. ``lam`` is only required when building a graph.
    """

    p: int
    coeffs: tuple[int, ...]
    lam: Optional[int] = None

    def __post_init__(self):
        ctx = make_ctx(self.p)
        p, cs, lam = self.p, self.coeffs, self.lam
        # already canonical: the common case for internally built specs
        if (
            type(cs) is tuple and cs and (cs[-1] or len(cs) == 1)
            and (lam is None or (type(lam) is int and 0 <= lam < p))
            and set(map(type, cs)) == {int} and min(cs) >= 0 and max(cs) < p
        ):
            return
        cs = [ctx.check(c) for c in self.coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [0]
        object.__setattr__(self, "coeffs", tuple(cs))
        if self.lam is not None:
            object.__setattr__(self, "lam", ctx.check(self.lam))

    @classmethod
    def linear(cls, p: int, a: int, lam: Optional[int] = None) -> "PolySpec":
        """``X + a``."""
        return cls(p, (a, 1), lam)

    @classmethod
    def cubic(cls, p: int, a: int, lam: Optional[int] = None) -> "PolySpec":
        """``X**3 + a``."""
        return cls(p, (a, 0, 0, 1), lam)

    @classmethod
    def family(cls, name: str, p: int, a: int, lam: Optional[int] = None) -> "PolySpec":
        """Normalized family members: linear ``X+a``, quadratic ``X**2+a``, cubic ``X**3+a``."""
        degree = {"linear": 1, "quadratic": 2, "cubic": 3}[name]
        cs = [0] * (degree + 1)
        cs[0], cs[degree] = a, 1
        return cls(p, tuple(cs), lam)

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    def with_lambda(self, lam: int) -> "PolySpec":
        return PolySpec(self.p, self.coeffs, lam)

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0 and len(self.coeffs) > 1:
                continue
            mono = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            if mono and c == 1:
                terms.append(mono)
            else:
                terms.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(reversed(terms)) or "0"


def eval_poly(f: PolySpec, x: int) -> int:
    """Horner evaluation of ``f`` at a single element."""
    p = f.p
    x = make_ctx(p).check(x)
    acc = 0
    for c in reversed(f.coeffs):
        acc = (acc * x + c) % p
    return acc


def poly_values(f: PolySpec, ctx: Optional[FieldCtx] = None) -> np.ndarray:
    """``f(x)`` for every ``x`` in ``0..p-1`` as an int64 array."""
    ctx = ctx or make_ctx(f.p)
    p = ctx.p
    x = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in reversed(f.coeffs):
        acc = (acc * x + c) % p
    return acc


def is_permutation(f: PolySpec, ctx: Optional[FieldCtx] = None, return_inverse: bool = False):
    """Whether ``f`` induces a bijection of F_p.

    With ``return_inverse=True`` also return the inverse map as a lookup
    array (``inverse[f(x)] == x``), or ``None`` when ``f`` is not a
    permutation.
    """
    vals = poly_values(f, ctx)
    p = len(vals)
    hits = np.bincount(vals, minlength=p)
    ok = bool(np.all(hits == 1))
    if not return_inverse:
        return ok
    if not ok:
        return False, None
    inverse = np.empty(p, dtype=np.int64)
    inverse[vals] = np.arange(p, dtype=np.int64)
    return True, inverse


@dataclass(frozen=True)
class ValueSet:
    elements: frozenset
    source: PolySpec

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return x in self.elements

    def __iter__(self):
        return iter(sorted(self.elements))


def value_set(f: PolySpec, ctx: Optional[FieldCtx] = None) -> ValueSet:
    vals = poly_values(f, ctx)
    return ValueSet(frozenset(np.unique(vals).tolist()), f)


def char_sum(f: PolySpec, ctx: Optional[FieldCtx] = None) -> int:
    """``sum(chi(f(x)) for x in F_p)``."""
    ctx = ctx or make_ctx(f.p)
    return int(ctx.chi_arr[poly_values(f, ctx)].sum(dtype=np.int64))


def char_sum_quadratic(ctx: FieldCtx, a: int, b: int, c: int) -> int:
    """Character sum of ``a*x**2 + b*x + c`` over the whole field.

    For a nondegenerate quadratic this always equals ``-chi(a)``; the value
    returned here is the direct sum, not the closed form.
    """
    a, b, c = ctx.check(a), ctx.check(b), ctx.check(c)
    if a == 0 or (b * b - 4 * a * c) % ctx.p == 0:
        raise DegenerateQuadratic(
            f"{a}x^2+{b}x+{c} over F_{ctx.p} has zero leading coefficient or discriminant"
        )
    return char_sum(PolySpec(ctx.p, (c, b, a)), ctx)


def parse_coeffs(text: str) -> tuple[int, ...]:
    """Parse ``"c0,c1,..."``; values are taken literally, not reduced."""
    parts = [t.strip() for t in text.split(",")]
    if not parts or any(t == "" for t in parts):
        raise FieldElementError(f"bad coefficient list {text!r}")
    try:
        return tuple(int(t) for t in parts)
    except ValueError as exc:
        raise FieldElementError(f"bad coefficient list {text!r}") from exc


def nonsquares(ctx: FieldCtx) -> Iterable[int]:
    return np.flatnonzero(ctx.chi_arr == -1).tolist()


def as_elements(ctx: FieldCtx, xs: Sequence[int]) -> list[int]:
    return [ctx.check(x) for x in xs]
