import math

import numpy as np
import pytest
from sympy import primerange

from eqgraph import _kernels
from eqgraph.errors import LambdaIsSquare, PreconditionNotMet, UnsupportedForm
from eqgraph.field import PolySpec, make_ctx, nonsquares
from eqgraph.graph import build, weak_components
from eqgraph.structure import (
    IsomorphismWitness,
    _quad_bound,
    check_small_components,
    component_of_zero_nonhamiltonian,
    fixed_vertex_criterion,
    fixed_vertices,
    normalize_quadratic,
    predict_small_components,
    s_lambda_brute,
    s_lambda_formula,
    s_lambda_size,
    verify_isomorphism,
    witness_cubic1,
    witness_linear1,
    witness_linear2,
    witness_quad_iso1,
    witness_quad_iso2,
    zero_indegree_stats,
)
from eqgraph.suites import (
    SUITES,
    _monic_polys,
    _root_data,
    _square_keys,
    batched_isomorphism,
    run_suite,
)


def edge_map_oracle(w, p):
    src = build(w.source).edge_set()
    dst = build(w.target).edge_set()
    c = w.multiplier
    return {(c * x % p, c * y % p) for x, y in src} == dst


def test_isomorphism_examples():
    w = witness_linear1(7, 3, 2, 1)
    assert w.multiplier == 4 and w.target == PolySpec.linear(7, 2, 3)
    assert verify_isomorphism(w)
    w = witness_linear2(7, 3, 2)
    assert w.multiplier == 3 and w.target == PolySpec.linear(7, 6, 5)
    assert verify_isomorphism(w)
    same = PolySpec.linear(7, 1, 3)
    assert verify_isomorphism(IsomorphismWitness("scale", 1, same, same))


def test_wrong_witness_is_rejected():
    src = PolySpec.linear(7, 1, 3)
    assert not verify_isomorphism(IsomorphismWitness("scale", 2, src, PolySpec.linear(7, 2, 3)))
    with pytest.raises(ValueError):
        verify_isomorphism(IsomorphismWitness("scale", 0, src, src))


def test_quad_iso2_needs_square_ratio():
    with pytest.raises(PreconditionNotMet):
        witness_quad_iso2(7, 3, 1, 3)
    w = witness_quad_iso2(7, 3, 1, 2)
    assert w.multiplier**2 % 7 == 2 and verify_isomorphism(w)


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_verify_isomorphism_agrees_with_edge_sets(p):
    ctx = make_ctx(p)
    rng = np.random.default_rng(p)
    for lam in nonsquares(ctx):
        for a in range(1, p):
            b = int(rng.integers(0, p))
            ws = [
                witness_linear1(p, lam, a, b),
                witness_linear2(p, lam, a),
                witness_quad_iso1(p, lam, a, b),
                witness_cubic1(p, lam, a, b),
            ]
            # and a perturbed multiplier, usually not an isomorphism
            c = int(rng.integers(1, p))
            ws.append(IsomorphismWitness("scale", c, ws[0].source, ws[0].target))
            for w in ws:
                assert verify_isomorphism(w, ctx) == edge_map_oracle(w, p)
            assert list(batched_isomorphism(ctx, ws)) == [edge_map_oracle(w, p) for w in ws]


def test_fixed_vertices():
    ctx = make_ctx(7)
    g = build(PolySpec.linear(7, 1, 3))
    assert fixed_vertices(g) == frozenset()
    assert not fixed_vertex_criterion(ctx, 3, 1)
    for p in (7, 11, 13):
        for lam in nonsquares(make_ctx(p)):
            assert 1 in fixed_vertices(build(PolySpec.linear(p, 0, lam)))


@pytest.mark.parametrize("p", [int(q) for q in primerange(3, 60)])
def test_s_lambda_counts_graphs_with_fixed_vertex(p):
    ctx = make_ctx(p)
    for lam in nonsquares(ctx):
        n = sum(1 for a in range(p) if fixed_vertices(build(PolySpec.linear(p, a, lam), ctx)))
        assert n == s_lambda_formula(ctx, lam) == s_lambda_brute(ctx, lam)


def test_s_lambda_examples():
    ctx = make_ctx(7)
    assert s_lambda_size(ctx, 3) == s_lambda_size(ctx, 3, method="brute") == 6
    for lam in nonsquares(make_ctx(13)):
        assert s_lambda_size(make_ctx(13), lam) == 10
    with pytest.raises(LambdaIsSquare):
        s_lambda_size(ctx, 2)
    with pytest.raises(ValueError):
        s_lambda_size(ctx, 3, method="guess")


def test_small_component_examples():
    f = predict_small_components(PolySpec.linear(7, 2, 3))
    assert [(x.size, x.vertices, x.formula_id) for x in f] == [(2, frozenset({1, 6}), "linear-com2")]
    for p in (11, 13, 19, 29):
        f = predict_small_components(PolySpec.linear(p, 1, 2))
        assert (3, frozenset({0, 1, p - 1})) in {(x.size, x.vertices) for x in f}
    # cubic-com2 at lam = 3, p = 11: a = 4 * 4 / 8 = 2, vertices +-(1 - 3)/2
    f = predict_small_components(PolySpec.cubic(11, 2, 7))
    p, lam = 11, 7
    a = (lam + 1) * (lam - 1) ** 2 * pow(8, -1, p) % p
    f = predict_small_components(PolySpec.cubic(p, a, lam))
    x = (1 - lam) * pow(2, -1, p) % p
    assert frozenset({x, p - x}) in {y.vertices for y in f}


def test_small_component_checks_are_exact():
    for p in (7, 11, 13, 17, 19, 23, 29, 31):
        ctx = make_ctx(p)
        for lam in nonsquares(ctx):
            for a in range(p):
                chk = check_small_components(PolySpec.linear(p, a, lam), ctx)
                assert chk.exact, (p, lam, a, chk)


def test_small_component_forms():
    with pytest.raises(UnsupportedForm):
        predict_small_components(PolySpec(7, (1, 0, 1), 3))
    with pytest.raises(UnsupportedForm):
        predict_small_components(PolySpec.cubic(7, 1, 3))


def test_quad_bound_matches_float_formula():
    for p in primerange(3, 5000):
        want = math.floor((p - 3 * math.sqrt(p)) / 4 - 1)
        assert _quad_bound(int(p)) == want
    assert _quad_bound(23) == 1


def test_zero_indegree_examples():
    for lam in nonsquares(make_ctx(23)):
        for a in range(1, 23):
            chk = zero_indegree_stats(build(PolySpec(23, (a, 0, 1), lam)))
            assert chk.formula_id == "quad-indeg2" and chk.bound == 1 and chk.passed
    chk = zero_indegree_stats(build(PolySpec.linear(7, 1, 3)))
    assert not chk.applicable and chk.passed is None
    chk = zero_indegree_stats(build(PolySpec.cubic(13, 1, 2)))
    assert chk.formula_id == "cubic-indeg" and chk.passed


def test_normalize_quadratic():
    spec, c = normalize_quadratic(PolySpec(7, (3, 2, 1), 3))
    assert spec == PolySpec(7, (3 * 2, 1, 1), 3) and c == 4
    assert verify_isomorphism(IsomorphismWitness("scale", c, PolySpec(7, (3, 2, 1), 3), spec))
    with pytest.raises(UnsupportedForm):
        normalize_quadratic(PolySpec(7, (3, 2, 2), 3))


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 19])
def test_zero_obstruction_agrees_with_enumeration(p):
    ctx = make_ctx(p)
    quarter = pow(4, -1, p)
    for lam in nonsquares(ctx):
        for a in range(p):
            specs = [PolySpec(p, (a, 1, 1), lam)] if a != quarter else []
            if a:
                specs.append(PolySpec(p, (a, 0, 1), lam))
            for spec in specs:
                g = build(spec, ctx)
                assert component_of_zero_nonhamiltonian(g, "obstruction", max_component=p)
                assert component_of_zero_nonhamiltonian(g, "enumerate", max_component=p)


def test_zero_nonhamiltonian_preconditions():
    with pytest.raises(PreconditionNotMet):
        component_of_zero_nonhamiltonian(build(PolySpec.linear(7, 1, 3)))
    with pytest.raises(PreconditionNotMet):
        component_of_zero_nonhamiltonian(build(PolySpec(7, (0, 0, 1), 3)))


def test_weil_scan_root_counts_match_sympy():
    for p in (5, 7):
        chi = make_ctx(p).chi_arr.astype(np.int64)
        for deg in (1, 2, 3, 4):
            want = 0
            for cs in _monic_polys(p, deg).tolist():
                d, square = _root_data(cs, p)
                want += not square
            is_square = np.zeros(p**deg if deg % 2 == 0 else 0, dtype=np.bool_)
            is_square[_square_keys(p, deg)] = True
            checked, worst = _kernels.weil_scan(p, deg, chi, is_square)
            assert checked == want and worst[0] == -1


def test_weil_scan_reports_violations():
    # a fake character that is always 1 breaks the bound immediately
    p = 7
    checked, worst = _kernels.weil_scan(p, 2, np.ones(p, dtype=np.int64), np.zeros(p**2, dtype=np.bool_))
    assert worst[0] >= 0 and worst[1] == p


@pytest.mark.parametrize("name", sorted(SUITES))
def test_every_suite_passes_on_small_primes(name):
    res = run_suite(name, 23)
    assert res.passed, res.line()
    assert res.line().startswith(f"{name}: PASS")


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope", 7)
