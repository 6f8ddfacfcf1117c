"""Compiled kernels: grid Dijkstra and the restricted-problem dual ascent.

Tie-breaking in the shortest-path kernel is total and deterministic:
heap keys are (distance, hop count, vertex id), and at equal keys a smaller
predecessor id wins.  Identical inputs therefore give identical paths.
"""

import numpy as np
from numba import njit

__all__ = ["grid_dijkstra", "extract_path", "dual_ascent"]

_BIG_HOPS = np.int64(2**62)


@njit(cache=True, inline="always")
def _less(d1, h1, v1, d2, h2, v2):
    if d1 != d2:
        return d1 < d2
    if h1 != h2:
        return h1 < h2
    return v1 < v2


@njit(cache=True)
def _sift_up(hd, hh, hv, i):
    while i > 0:
        p = (i - 1) >> 1
        if _less(hd[i], hh[i], hv[i], hd[p], hh[p], hv[p]):
            hd[i], hd[p] = hd[p], hd[i]
            hh[i], hh[p] = hh[p], hh[i]
            hv[i], hv[p] = hv[p], hv[i]
            i = p
        else:
            break


@njit(cache=True)
def _sift_down(hd, hh, hv, size):
    i = 0
    while True:
        l = 2 * i + 1
        if l >= size:
            break
        r = l + 1
        m = l
        if r < size and _less(hd[r], hh[r], hv[r], hd[l], hh[l], hv[l]):
            m = r
        if _less(hd[m], hh[m], hv[m], hd[i], hh[i], hv[i]):
            hd[i], hd[m] = hd[m], hd[i]
            hh[i], hh[m] = hh[m], hh[i]
            hv[i], hv[m] = hv[m], hv[i]
            i = m
        else:
            break


@njit(cache=True)
def grid_dijkstra(indptr, indices, elen, rho, sources, sink_mask, early_exit):
    """Multi-source Dijkstra with edge weight elen * (rho[u] + rho[v]) / 2.

    Returns (dist, hops, pred, first_sink); first_sink is -1 when no sink was
    settled.  With early_exit the search stops at the first settled sink,
    which by the heap order carries the minimal (dist, hops, id) key.
    """
    n = indptr.size - 1
    dist = np.full(n, np.inf)
    hops = np.full(n, _BIG_HOPS)
    pred = np.full(n, np.int64(-1))
    done = np.zeros(n, dtype=np.bool_)

    cap = 2 * n + 16
    hd = np.empty(cap, dtype=np.float64)
    hh = np.empty(cap, dtype=np.int64)
    hv = np.empty(cap, dtype=np.int64)
    size = 0

    for s in sources:
        dist[s] = 0.0
        hops[s] = 0
        hd[size] = 0.0
        hh[size] = 0
        hv[size] = s
        _sift_up(hd, hh, hv, size)
        size += 1

    first_sink = np.int64(-1)
    while size > 0:
        d = hd[0]
        hp = hh[0]
        v = hv[0]
        size -= 1
        hd[0] = hd[size]
        hh[0] = hh[size]
        hv[0] = hv[size]
        _sift_down(hd, hh, hv, size)
        if done[v]:
            continue
        if d > dist[v] or (d == dist[v] and hp > hops[v]):
            continue
        done[v] = True
        if sink_mask[v] and first_sink < 0:
            first_sink = v
            if early_exit:
                break
        row_end = indptr[v + 1]
        for e in range(indptr[v], row_end):
            u = indices[e]
            if done[u]:
                continue
            nd = d + elen[e] * 0.5 * (rho[v] + rho[u])
            nh = hp + 1
            better = False
            push = False
            if nd < dist[u]:
                better = True
                push = True
            elif nd == dist[u]:
                if nh < hops[u]:
                    better = True
                    push = True
                elif nh == hops[u] and (pred[u] == -1 or v < pred[u]):
                    better = True
            if better:
                dist[u] = nd
                hops[u] = nh
                pred[u] = v
                if push:
                    if size >= cap:
                        newcap = cap * 2
                        nhd = np.empty(newcap, dtype=np.float64)
                        nhh = np.empty(newcap, dtype=np.int64)
                        nhv = np.empty(newcap, dtype=np.int64)
                        nhd[:size] = hd[:size]
                        nhh[:size] = hh[:size]
                        nhv[:size] = hv[:size]
                        hd, hh, hv, cap = nhd, nhh, nhv, newcap
                    hd[size] = nd
                    hh[size] = nh
                    hv[size] = u
                    _sift_up(hd, hh, hv, size)
                    size += 1
    return dist, hops, pred, first_sink


@njit(cache=True)
def extract_path(pred, start):
    """Walk predecessor pointers from start back to a root (pred == -1)."""
    count = 1
    v = start
    while pred[v] >= 0:
        v = pred[v]
        count += 1
    out = np.empty(count, dtype=np.int64)
    v = start
    for i in range(count):
        out[i] = v
        v = pred[v]
    return out


@njit(cache=True)
def dual_ascent(cc, ww, cid, cptr, lam, rho, scratch, p, cell_measure, step, max_inner, inner_tol):
    """Multiplicative dual ascent for the restricted density problem.

    Solves min sum rho^p * h^n subject to the active curves' unit-length
    constraints, via lam <- lam * max(0, 1 + step * (1 - length)) and the
    stationarity closed form rho_c = (sum_g lam_g w_gc / (p h^n))^(1/(p-1)).

    Arrays cc/ww/cid hold the concatenated (cell, weight, curve id) incidence,
    cptr the per-curve offsets.  lam and rho are updated in place.  Returns
    (lengths, primal, dual, n_iterations).
    """
    n_curves = lam.size
    n_cells = rho.size
    expo = 1.0 / (p - 1.0)
    inv_phn = 1.0 / (p * cell_measure)
    lengths = np.zeros(n_curves)
    primal = 0.0
    dual = 0.0
    updates = 0
    for it in range(max_inner + 1):
        if it > 0:
            for k in range(n_curves):
                f = 1.0 + step * (1.0 - lengths[k])
                lam[k] = lam[k] * f if f > 0.0 else 0.0
            updates += 1
        for c in range(n_cells):
            scratch[c] = 0.0
        for j in range(cc.size):
            scratch[cc[j]] += lam[cid[j]] * ww[j]
        if p == 2.0:
            for c in range(n_cells):
                rho[c] = scratch[c] * inv_phn
        else:
            for c in range(n_cells):
                s = scratch[c] * inv_phn
                rho[c] = s**expo if s > 0.0 else 0.0
        lam_sum = 0.0
        weighted = 0.0  # sum_g lam_g * length_g = p * h^n * sum rho^p
        worst_violation = 0.0
        for k in range(n_curves):
            acc = 0.0
            for j in range(cptr[k], cptr[k + 1]):
                acc += ww[j] * rho[cc[j]]
            lengths[k] = acc
            lam_sum += lam[k]
            weighted += lam[k] * acc
            if 1.0 - acc > worst_violation:
                worst_violation = 1.0 - acc
        primal = weighted / p
        dual = lam_sum - (p - 1.0) * primal
        gap = weighted - lam_sum  # = sum lam * (length - 1)
        if worst_violation <= inner_tol and abs(gap) <= inner_tol * max(primal, 1e-300):
            break
    return lengths, primal, dual, updates
