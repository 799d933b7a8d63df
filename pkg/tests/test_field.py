import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import primerange, sqrt_mod

from eqgraph.errors import DegenerateQuadratic, EvenModulus, FieldElementError, FieldTooLarge, NotPrime
from eqgraph.field import (
    PolySpec,
    char_sum,
    char_sum_quadratic,
    chi,
    eval_poly,
    inv,
    is_cube,
    is_permutation,
    make_ctx,
    parse_coeffs,
    poly_values,
    sqrt_pair,
    value_set,
)

SMALL_PRIMES = [int(p) for p in primerange(3, 60)]


def legendre(a, p):
    # Euler's criterion, independent of the tables
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


@pytest.mark.parametrize("p", SMALL_PRIMES)
def test_chi_matches_euler_criterion(p):
    ctx = make_ctx(p)
    for a in range(p):
        assert chi(ctx, a) == legendre(a, p)


@pytest.mark.parametrize("p", SMALL_PRIMES)
def test_sqrt_pair_matches_sympy(p):
    ctx = make_ctx(p)
    for s in range(p):
        got = sqrt_pair(ctx, s)
        roots = sorted(set(sqrt_mod(s, p, all_roots=True)))
        if not roots:
            assert got is None
        else:
            assert got == tuple(roots)


def test_sqrt_examples():
    ctx = make_ctx(7)
    assert sqrt_pair(ctx, 2) == (3, 4)
    assert sqrt_pair(ctx, 0) == (0,)
    assert sqrt_pair(ctx, 3) is None
    assert chi(ctx, 3) == -1


def test_inverse():
    ctx = make_ctx(101)
    for a in range(1, 101):
        assert a * inv(ctx, a) % 101 == 1
    with pytest.raises(ZeroDivisionError):
        inv(ctx, 0)


@pytest.mark.parametrize("bad", [4, 1, 0, -7, 91, 2**40 + 2])
def test_make_ctx_rejects_composites(bad):
    with pytest.raises(NotPrime):
        make_ctx(bad)


def test_make_ctx_rejects_two():
    with pytest.raises(EvenModulus):
        make_ctx(2)


def test_ctx_is_cached_and_compares_by_p():
    assert make_ctx(13) is make_ctx(13)
    assert make_ctx(13) == make_ctx(13)
    assert make_ctx(13) != make_ctx(17)


@pytest.mark.parametrize("x", [-1, 7, 100, 1.5, "3", True])
def test_non_canonical_elements_are_rejected(x):
    ctx = make_ctx(7)
    with pytest.raises(FieldElementError):
        chi(ctx, x)


def test_numpy_integers_are_accepted():
    assert chi(make_ctx(7), np.int64(3)) == -1


def test_polyspec_strips_trailing_zeros_and_checks():
    f = PolySpec(7, (1, 1, 0, 0))
    assert f.coeffs == (1, 1)
    assert f.degree == 1
    assert PolySpec(7, (0, 0)).degree == -1
    with pytest.raises(FieldElementError):
        PolySpec(7, (8, 1))
    with pytest.raises(FieldElementError):
        PolySpec(7, (1, 1), lam=-4)


def test_polyspec_families():
    assert PolySpec.family("linear", 11, 3).coeffs == (3, 1)
    assert PolySpec.family("quadratic", 11, 3).coeffs == (3, 0, 1)
    assert PolySpec.family("cubic", 11, 3, 2) == PolySpec(11, (3, 0, 0, 1), 2)
    assert str(PolySpec(11, (3, 0, 0, 1))) == "X^3 + 3"
    assert str(PolySpec(7, (1, 1))) == "X + 1"


def test_parse_coeffs():
    assert parse_coeffs("1,1") == (1, 1)
    assert parse_coeffs(" 0, 0 ,1") == (0, 0, 1)
    for bad in ("", "1,,2", "a,1"):
        with pytest.raises(FieldElementError):
            parse_coeffs(bad)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(SMALL_PRIMES), st.lists(st.integers(0, 10**6), min_size=1, max_size=6))
def test_poly_values_agree_with_horner(p, raw):
    f = PolySpec(p, tuple(c % p for c in raw))
    vals = poly_values(f)
    for x in range(p):
        direct = sum(c * x**i for i, c in enumerate(f.coeffs)) % p
        assert eval_poly(f, x) == direct == vals[x]


def test_large_prime_values():
    p = 1_000_003
    f = PolySpec(p, (p - 1, p - 1, p - 1))
    vals = poly_values(f)
    for x in (0, 1, p - 2, p - 1):
        assert vals[x] == eval_poly(f, x) == ((p - 1) * x * x + (p - 1) * x + p - 1) % p


def test_table_limit():
    with pytest.raises(FieldTooLarge):
        make_ctx(2147483647)


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 19, 23, 29, 31])
def test_cubic_permutes_iff_3_does_not_divide_p_minus_1(p):
    for a in range(p):
        assert is_permutation(PolySpec.cubic(p, a)) == ((p - 1) % 3 != 0)


def test_permutation_inverse():
    ok, back = is_permutation(PolySpec(11, (3, 0, 0, 1)), return_inverse=True)
    assert ok
    vals = poly_values(PolySpec(11, (3, 0, 0, 1)))
    assert np.array_equal(back[vals], np.arange(11))
    assert is_permutation(PolySpec(7, (3, 0, 0, 1)), return_inverse=True) == (False, None)
    assert not is_permutation(PolySpec(7, (0, 0, 1)))


@pytest.mark.parametrize("p", [7, 13, 31, 61])
def test_is_cube_matches_brute_force(p):
    ctx = make_ctx(p)
    cubes = {x**3 % p for x in range(p)}
    for a in range(p):
        assert is_cube(ctx, a) == (a in cubes)


def test_value_set():
    vs = value_set(PolySpec(7, (0, 0, 1)))
    assert set(vs) == {0, 1, 2, 4}
    assert len(vs) == 4 and 2 in vs and 3 not in vs


def test_char_sum_quadratic_examples():
    ctx = make_ctx(7)
    assert char_sum_quadratic(ctx, 1, 0, 1) == -1
    assert char_sum_quadratic(ctx, 3, 1, 1) == 1
    with pytest.raises(DegenerateQuadratic):
        char_sum_quadratic(ctx, 1, 2, 1)
    with pytest.raises(DegenerateQuadratic):
        char_sum_quadratic(ctx, 0, 1, 1)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(SMALL_PRIMES), st.integers(1, 10**6), st.integers(0, 10**6), st.integers(0, 10**6))
def test_char_sum_quadratic_closed_form(p, a, b, c):
    a, b, c = a % p or 1, b % p, c % p
    ctx = make_ctx(p)
    if (b * b - 4 * a * c) % p == 0:
        return
    direct = sum(legendre(a * x * x + b * x + c, p) for x in range(p))
    assert char_sum_quadratic(ctx, a, b, c) == direct == -legendre(a, p)


def test_char_sum_of_a_square_is_large():
    # (X + 1)^2 hits zero once and is a square elsewhere
    assert char_sum(PolySpec(13, (1, 2, 1))) == 12
