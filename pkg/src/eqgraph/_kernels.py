"""Compiled inner loops. Callers in graph/hamilton/survey own validation."""

import numpy as np
from numba import njit


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True)
def components_batch(p, chi, root, base, lam_inv, shifts):
    """Weak components of ``G(lam, base + a)`` for every ``a`` in ``shifts``.

    Returns ``(counts, labels)`` where ``labels[k, x]`` is the smallest
    vertex of the component holding ``x`` in the k-th graph.
    """
    n = shifts.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    labels = np.empty((n, p), dtype=np.int32)
    parent = np.empty(p, dtype=np.int64)
    for k in range(n):
        a = shifts[k]
        for x in range(p):
            parent[x] = x
        comps = p
        for x in range(p):
            v = base[x] + a
            if v >= p:
                v -= p
            if v == 0:
                y = 0
            elif chi[v] == 1:
                y = root[v]
            else:
                y = root[v * lam_inv % p]
            # the second target p - y lies in the same component only
            # through other edges, so both are unioned explicitly
            rx = _find(parent, x)
            ry = _find(parent, y)
            if rx != ry:
                if rx < ry:
                    parent[ry] = rx
                else:
                    parent[rx] = ry
                comps -= 1
            if v != 0:
                rx = _find(parent, x)
                ry = _find(parent, p - y)
                if rx != ry:
                    if rx < ry:
                        parent[ry] = rx
                    else:
                        parent[rx] = ry
                    comps -= 1
        counts[k] = comps
        for x in range(p):
            labels[k, x] = _find(parent, x)
    return counts, labels


@njit(cache=True)
def _cyclic_max_run(w, n):
    first = -1
    for j in range(1, n):
        if w[j] != w[j - 1]:
            first = j
            break
    if first < 0:
        if n > 1 and w[0] != w[n - 1]:
            first = 0
        else:
            return n
    best = 0
    run = 0
    prev = -1
    for t in range(n):
        j = (first + t) % n
        if w[j] == prev:
            run += 1
        else:
            run = 1
            prev = w[j]
        if run > best:
            best = run
    return best


@njit(cache=True)
def hamilton_search(succ, weight, outdeg, start, n, max_type, contains_zero, cut_first):
    """Count directed Hamiltonian cycles through ``n`` vertices from ``start``.

    Cycles are grouped by type in ``by_type[t]``. With ``contains_zero`` the
    type ignores the closing edge into 0 (and, with ``cut_first``, the edge
    leaving 0 too); otherwise the maximal run is taken cyclically.
    ``max_type > 0`` prunes any partial path with a longer run.

    Returns ``(by_type, balance_ok, witness, witness_type)``.
    """
    p = succ.shape[0]
    by_type = np.zeros(n + 1, dtype=np.int64)
    witness = np.full(n, -1, dtype=np.int64)
    witness_type = n + 1
    balance_ok = True
    path = np.empty(n, dtype=np.int64)
    nxt = np.zeros(n, dtype=np.int64)
    wts = np.zeros(n, dtype=np.int64)
    run = np.zeros(n, dtype=np.int64)
    mx = np.zeros(n, dtype=np.int64)
    cyc = np.zeros(n, dtype=np.int64)
    visited = np.zeros(p, dtype=np.bool_)
    target_zeros = 1 if contains_zero else 0

    path[0] = start
    visited[start] = True
    depth = 0
    while depth >= 0:
        v = path[depth]
        i = nxt[depth]
        if i >= outdeg[v]:
            visited[v] = False
            depth -= 1
            continue
        nxt[depth] = i + 1
        w = succ[v, i]
        ew = weight[v, i]
        if depth == n - 1:
            if w != start:
                continue
            # closing edge: the cycle is complete
            ones = ew
            for j in range(n - 1):
                ones += wts[j]
            if (n - ones) - ones != target_zeros:
                balance_ok = False
            if contains_zero:
                t = mx[n - 2] if n >= 2 else 0
            else:
                for j in range(n - 1):
                    cyc[j] = wts[j]
                cyc[n - 1] = ew
                t = _cyclic_max_run(cyc, n)
            if max_type > 0 and t > max_type:
                continue
            by_type[t] += 1
            if t < witness_type:
                witness_type = t
                for j in range(n):
                    witness[j] = path[j]
            continue
        if visited[w]:
            continue
        counted = not (contains_zero and cut_first and depth == 0)
        if counted:
            if depth > 0 and run[depth - 1] > 0 and wts[depth - 1] == ew:
                r = run[depth - 1] + 1
            else:
                r = 1
        else:
            r = 0
        if max_type > 0 and r > max_type:
            continue
        wts[depth] = ew
        run[depth] = r
        m = mx[depth - 1] if depth > 0 else 0
        mx[depth] = r if r > m else m
        depth += 1
        path[depth] = w
        nxt[depth] = 0
        visited[w] = True
    return by_type, balance_ok, witness, witness_type


@njit(cache=True)
def longest_alternating_path(succ, outdeg, cls):
    """Most vertices on a simple path whose consecutive edges alternate weight.

    The weight of an edge equals ``cls`` of its source, so alternation is a
    condition on consecutive source vertices.
    """
    p = succ.shape[0]
    best = 1
    path = np.empty(p, dtype=np.int64)
    nxt = np.zeros(p, dtype=np.int64)
    visited = np.zeros(p, dtype=np.bool_)
    unvisited = np.zeros(2, dtype=np.int64)
    for s in range(p):
        if best == p:
            break
        unvisited[0] = 0
        unvisited[1] = 0
        for x in range(p):
            unvisited[cls[x]] += 1
        path[0] = s
        nxt[0] = 0
        visited[s] = True
        unvisited[cls[s]] -= 1
        depth = 0
        while depth >= 0:
            v = path[depth]
            if depth + 1 > best:
                best = depth + 1
            i = nxt[depth]
            can_extend = depth == 0 or cls[v] != cls[path[depth - 1]]
            if can_extend and i < outdeg[v]:
                # optimistic length of any extension from here
                c = 1 - cls[v]
                uc = unvisited[c]
                uo = unvisited[1 - c]
                m = 2 * min(uc, uo) + (1 if uc > uo else 0)
                extra = min(m + 1, uc + uo)
                if depth + 1 + extra <= best:
                    i = outdeg[v]
            if not can_extend or i >= outdeg[v]:
                visited[v] = False
                unvisited[cls[v]] += 1
                depth -= 1
                continue
            nxt[depth] = i + 1
            w = succ[v, i]
            if visited[w]:
                continue
            depth += 1
            path[depth] = w
            nxt[depth] = 0
            visited[w] = True
            unvisited[cls[w]] -= 1
    return best


@njit(cache=True)
def weil_scan(p, deg, chi, is_square):
    """Scan every monic polynomial of degree ``deg < p`` in base-``p`` code order.

    Returns ``(checked, worst)`` where ``worst`` holds the first violation of
    ``sum^2 <= (d - 1)^2 p`` as ``[code, sum, d]`` (code -1 if none). Squares,
    flagged by code in ``is_square``, are skipped.
    """
    n = p**deg
    c = np.zeros(deg + 1, dtype=np.int64)
    d1 = np.zeros(deg + 1, dtype=np.int64)
    d2 = np.zeros(deg + 1, dtype=np.int64)
    d3 = np.zeros(deg + 1, dtype=np.int64)
    worst = np.full(3, -1, dtype=np.int64)
    checked = 0
    for code in range(n):
        if is_square.shape[0] > 0 and is_square[code]:
            continue
        r = code
        for j in range(deg):
            c[j] = r % p
            r //= p
        c[deg] = 1
        for j in range(deg):
            d1[j] = c[j + 1] * (j + 1) % p
        for j in range(deg - 1):
            d2[j] = d1[j + 1] * (j + 1) % p
        for j in range(deg - 2):
            d3[j] = d2[j + 1] * (j + 1) % p
        s = 0
        excess = 0
        for x in range(p):
            v = 0
            for j in range(deg, -1, -1):
                v = (v * x + c[j]) % p
            s += chi[v]
            if v != 0:
                continue
            v = 0
            for j in range(deg - 1, -1, -1):
                v = (v * x + d1[j]) % p
            if v != 0:
                continue
            excess += 1
            v = 0
            for j in range(deg - 2, -1, -1):
                v = (v * x + d2[j]) % p
            if v != 0:
                continue
            excess += 1
            v = 0
            for j in range(deg - 3, -1, -1):
                v = (v * x + d3[j]) % p
            if v == 0:
                excess += 1
        d = deg - excess
        checked += 1
        if s * s > (d - 1) * (d - 1) * p and worst[0] < 0:
            worst[0] = code
            worst[1] = s
            worst[2] = d
    return checked, worst


@njit(cache=True)
def scale_isomorphisms(p, chi, src, src_lam_inv, dst, dst_lam_inv, mult):
    """For each row k: does ``x -> mult[k] x`` map G(src[k]) onto G(dst[k])?

    Successor sets are the square roots of ``t(x)`` (``f(x)``, or
    ``f(x)/lam`` when that is a non-square), so the map is an isomorphism
    iff ``c^2 t_src(x) = t_dst(c x)`` for all ``x``.
    """
    k, w = src.shape
    pw = np.empty((w, p), dtype=np.int64)
    for x in range(p):
        pw[0, x] = 1
        for j in range(1, w):
            pw[j, x] = pw[j - 1, x] * x % p
    out = np.ones(k, dtype=np.bool_)
    for i in range(k):
        c = mult[i]
        c2 = c * c % p
        cx = 0
        for x in range(p):
            s = 0
            d = 0
            for j in range(w):
                s += src[i, j] * pw[j, x]
                d += dst[i, j] * pw[j, cx]
            s %= p
            d %= p
            if chi[s] == -1:
                s = s * src_lam_inv[i] % p
            if chi[d] == -1:
                d = d * dst_lam_inv[i] % p
            if s * c2 % p != d:
                out[i] = False
                break
            cx += c
            if cx >= p:
                cx -= p
    return out
