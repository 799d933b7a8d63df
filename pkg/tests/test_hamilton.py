import itertools

import pytest

from eqgraph.errors import ComponentTooLarge, NotHamiltonian, SearchBudgetExceeded
from eqgraph.field import PolySpec, make_ctx, nonsquares
from eqgraph.graph import build, weak_components
from eqgraph.hamilton import (
    Cycle,
    balance_sequence,
    classify_type,
    enumerate_cycles,
    iter_cycles,
    longest_type1_path,
    type_table,
)


def run_type(ws, cyclic):
    """Longest run of equal weights; around the cycle when ``cyclic``."""
    if not ws:
        return 0
    seq = ws + ws if cyclic else ws
    best = run = 1
    for i in range(1, len(seq)):
        run = run + 1 if seq[i] == seq[i - 1] else 1
        best = max(best, run)
    return min(best, len(ws))


def oracle(g, comp):
    """Every Hamiltonian cycle of ``comp`` by trying all vertex orders."""
    comp = sorted(comp)
    start, rest = comp[0], comp[1:]
    found = {}
    for perm in itertools.permutations(rest):
        order = (start,) + perm
        ws = []
        for i, x in enumerate(order):
            y = order[(i + 1) % len(order)]
            if y not in g.successors(x):
                break
            ws.append(g.edge_weight(x, y))
        else:
            if 0 in order:
                k = order.index(0)
                ws0 = ws[k:] + ws[:k]
                t = run_type(ws0[:-1], cyclic=False)
            else:
                t = run_type(ws, cyclic=True)
            found[order] = (t, ws)
    return found


def small_cases():
    for p in (5, 7, 11):
        ctx = make_ctx(p)
        for lam in nonsquares(ctx):
            for coeffs in [(a, 1) for a in range(p)] + [(a, 0, 1) for a in range(p)]:
                yield p, lam, coeffs


def test_figure_graph_cycles():
    g = build(PolySpec.linear(7, 1, 3))
    rep = enumerate_cycles(g)
    assert rep.total == 2
    assert rep.by_type == {2: 1, 3: 1}
    assert rep.balance_ok
    bal = balance_sequence(g, rep.witness_min_type)
    assert (bal.zeros, bal.ones) == (4, 3)
    assert classify_type(g, rep.witness_min_type) == 2


def test_against_permutation_oracle():
    checked = 0
    for p, lam, coeffs in small_cases():
        g = build(PolySpec(p, coeffs, lam))
        for comp in weak_components(g).components:
            if len(comp) > 9:
                continue
            want = oracle(g, comp)
            rep = enumerate_cycles(g, comp)
            assert rep.total == len(want)
            types = {}
            for t, _ in want.values():
                types[t] = types.get(t, 0) + 1
            assert rep.by_type == types
            got = {c.vertices for c in iter_cycles(g, comp)}
            assert got == set(want)
            for c in iter_cycles(g, comp):
                assert classify_type(g, c) == want[c.vertices][0]
            checked += 1
    assert checked > 100


@pytest.mark.parametrize("p", [13, 17, 19])
def test_pruned_counts_equal_filtered(p):
    ctx = make_ctx(p)
    for lam in nonsquares(ctx)[:2]:
        for a in range(1, p, 3):
            g = build(PolySpec.linear(p, a, lam), ctx)
            for comp in weak_components(g).components:
                full = enumerate_cycles(g, comp)
                for n in (1, 2, 3, 4):
                    pruned = enumerate_cycles(g, comp, max_type=n)
                    assert pruned.total == sum(c for t, c in full.by_type.items() if t <= n)
                    assert pruned.by_type == {t: c for t, c in full.by_type.items() if t <= n}


@pytest.mark.parametrize("p", [13, 17])
def test_iter_cycles_matches_kernel(p):
    ctx = make_ctx(p)
    lam = nonsquares(ctx)[0]
    for a in range(1, p):
        g = build(PolySpec.linear(p, a, lam), ctx)
        for comp in weak_components(g).components:
            rep = enumerate_cycles(g, comp)
            cycles = list(iter_cycles(g, comp))
            assert len(cycles) == rep.total
            types = {}
            for c in cycles:
                t = classify_type(g, c)
                types[t] = types.get(t, 0) + 1
            assert types == rep.by_type
            if cycles:
                assert classify_type(g, rep.witness_min_type) == min(types)


def test_loop_at_zero_is_type_zero():
    # G(lam, X) has the loop 0 -> 0 as its own component
    g = build(PolySpec.linear(7, 0, 3))
    rep = enumerate_cycles(g, frozenset({0}))
    assert rep.total == 1 and rep.by_type == {0: 1}
    assert classify_type(g, Cycle.from_vertices(g, [0])) == 0


def test_zero_free_cycle_uses_cyclic_run():
    # G(3, X + 2) over F_7 has the 2-cycle 1 <-> 6 away from 0
    g = build(PolySpec.linear(7, 2, 3))
    c = Cycle.from_vertices(g, [6, 1])
    assert c.vertices == (1, 6)
    assert classify_type(g, c) == run_type(list(c.weights), cyclic=True)


def test_cycle_validation():
    g = build(PolySpec.linear(7, 1, 3))
    with pytest.raises(ValueError):
        Cycle.from_vertices(g, [0, 2, 1])
    with pytest.raises(ValueError):
        Cycle.from_vertices(g, [0, 1, 0])
    with pytest.raises(ValueError):
        Cycle.from_vertices(g, [])


def test_balance_requires_hamiltonian_cycle():
    g = build(PolySpec.linear(7, 1, 3))
    with pytest.raises(NotHamiltonian):
        balance_sequence(g, Cycle.from_vertices(g, [4, 5]))


def test_component_cap():
    g = build(PolySpec.linear(31, 1, 3))
    with pytest.raises(ComponentTooLarge):
        enumerate_cycles(g, max_component=30)


def test_unconnected_graph_needs_component():
    g = build(PolySpec.linear(7, 2, 3))
    with pytest.raises(ValueError):
        enumerate_cycles(g)
    with pytest.raises(ValueError):
        enumerate_cycles(g, [0, 2, 3])


def test_max_type_must_be_positive():
    with pytest.raises(ValueError):
        enumerate_cycles(build(PolySpec.linear(7, 1, 3)), max_type=0)


def brute_longest_alternating(g):
    best = 1

    def dfs(path, last):
        nonlocal best
        best = max(best, len(path))
        v = path[-1]
        for y in g.successors(v):
            w = g.edge_weight(v, y)
            if y in path or w == last:
                continue
            path.append(y)
            dfs(path, w)
            path.pop()

    for s in range(g.p):
        dfs([s], None)
    return best


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_longest_type1_path_against_brute_force(p):
    ctx = make_ctx(p)
    for lam in nonsquares(ctx):
        for coeffs in [(a, 1) for a in range(p)] + [(a, 0, 1) for a in range(p)]:
            g = build(PolySpec(p, coeffs, lam), ctx)
            assert longest_type1_path(g) == brute_longest_alternating(g)


def test_longest_type1_path_example_and_cap():
    g = build(PolySpec.linear(19, 0, 2))
    assert longest_type1_path(g) == 18
    with pytest.raises(SearchBudgetExceeded):
        longest_type1_path(g, cap=17)


def test_type_table():
    g = build(PolySpec.linear(17, 1, 3))
    tt = type_table(g)
    full = enumerate_cycles(g)
    assert tt.by_type == full.by_type
    assert tt.at_most[3] == sum(c for t, c in full.by_type.items() if t <= 3)
    assert not tt.has_type(1)


def test_report_to_dict():
    d = enumerate_cycles(build(PolySpec.linear(7, 1, 3))).to_dict()
    assert d["total"] == 2 and d["by_type"] == {"2": 1, "3": 1}
    assert d["component"] == list(range(7))
    assert d["witness"][0] == 0
