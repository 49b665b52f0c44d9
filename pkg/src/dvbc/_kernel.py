"""Compiled phase kernel over arc-indexed state arrays (float contributions, int64 counts).

Layout, for ``n`` nodes and CSR arcs ``j = (v, indices[j])``:

``D[v, t]``, ``Sself[v, t]``, ``Bself[v, t]``, ``C[v]`` per node;
``NH[j, t]``, ``PH[j, t]``, ``Snb[j, t]``, ``Bnb[j, t]``, ``A[j, t]`` per arc.

Arithmetic and operation order mirror :mod:`dvbc.protocol` exactly, so both
engines produce bit-identical floats.
"""

from __future__ import annotations

import numpy as np
from numba import njit

INF = np.iinfo(np.int64).max
INT64_MAX = np.iinfo(np.int64).max

MODE_BF, MODE_REF, MODE_FAST = 0, 1, 2

# change-mask bits, shared with the pure-Python engine
CH_D, CH_NH, CH_PH, CH_SNB, CH_S, CH_BNB, CH_B, CH_BSELF, CH_C = (1 << i for i in range(9))

_GOLD = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True)
def _splitmix(state):
    state = state + _GOLD
    z = state
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return state, z ^ (z >> np.uint64(31))


@njit(cache=True, error_model="numpy")
def message_order(seed, phase, node, total):
    """Seeded Fisher-Yates permutation of ``range(total)`` for one node's inbox in one phase."""
    st = np.uint64(seed) * _GOLD + np.uint64(phase) * _MIX1 + np.uint64(node) * _MIX2
    perm = np.arange(total)
    for i in range(total - 1, 0, -1):
        st, r = _splitmix(st)
        k = np.int64(r % np.uint64(i + 1))
        tmp = perm[i]
        perm[i] = perm[k]
        perm[k] = tmp
    return perm


@njit(cache=True, error_model="numpy")
def run_phase(mode, indptr, indices, weights, D, NH, PH, Snb, Sself, Bnb, Bself, A, C,
              shuffle, seed, phase, changes, msgs, ops):
    """One bulk-synchronous phase in place. Returns 0, or ``-(v+1)`` on count overflow at ``v``."""
    n = D.shape[0]
    outD = D.copy()
    outS = Sself.copy()
    outB = Bself.copy()
    NH0 = NH.copy()
    PH0 = PH.copy()
    Snb0 = Snb.copy()
    Bnb0 = Bnb.copy()
    empty = np.empty(0, dtype=np.int64)
    for v in range(n):
        lo = indptr[v]
        hi = indptr[v + 1]
        total = (hi - lo) * n
        C0 = C[v]
        order = message_order(seed, phase, v, total) if shuffle else empty
        nops = 0
        j = lo
        t = -1
        for idx in range(total):
            if shuffle:
                m = order[idx]
                q = m // n
                j = lo + q
                t = m - q * n
            else:
                t += 1
                if t == n:
                    t = 0
                    j += 1
            u = indices[j]
            w = weights[j]
            d = outD[u, t]
            if mode == MODE_BF:
                nops += 2
                if d != INF and d + w < D[v, t]:
                    D[v, t] = d + w
                    nops += 1
                continue
            s = outS[u, t]
            b = outB[u, t]
            if mode == MODE_REF:
                nops += 7
                NH[j, t] = False
                PH[j, t] = False
                if d != INF:
                    if d + w < D[v, t]:
                        D[v, t] = d + w
                    elif d + w == D[v, t]:
                        NH[j, t] = True
                    elif d - w == D[v, t]:
                        PH[j, t] = True
                Snb[j, t] = s
                Bnb[j, t] = b
                if t != v:
                    tot = np.int64(0)
                    for jj in range(lo, hi):
                        if NH[jj, t]:
                            x = Snb[jj, t]
                            if tot > INT64_MAX - x:
                                return -(v + 1)
                            tot += x
                            nops += 1
                    Sself[v, t] = tot
                acc = 0.0
                for jj in range(lo, hi):
                    if PH[jj, t]:
                        nops += 1
                        sx = Snb[jj, t]
                        if sx != 0:
                            acc = acc + (Bnb[jj, t] + 1.0) / float(sx)
                Bself[v, t] = float(Sself[v, t]) * acc
                nops += n - 1
                continue
            # fast mode: net update so an unchanged contribution leaves floats untouched
            nops += 4
            b_old = Bself[v, t]
            changed = False
            removed = 0.0
            if NH[j, t]:
                NH[j, t] = False
                if t != v:
                    Sself[v, t] -= Snb[j, t]
                nops += 2
            if PH[j, t]:
                PH[j, t] = False
                removed = A[j, t]
                changed = True
                nops += 2
            Snb[j, t] = s
            Bnb[j, t] = b
            added = 0.0
            if d != INF:
                nops += 1
                dv = D[v, t]
                if d + w < dv:
                    D[v, t] = d + w
                    nops += 1
                elif d + w == dv:
                    NH[j, t] = True
                    if t != v:
                        if Sself[v, t] > INT64_MAX - s:
                            return -(v + 1)
                        Sself[v, t] += s
                    nops += 3
                elif d - w == dv:
                    PH[j, t] = True
                    if s != 0:
                        added = float(Sself[v, t]) * (b + 1.0) / float(s)
                    A[j, t] = added
                    changed = True
                    nops += 5
            if changed:
                Bself[v, t] = Bself[v, t] + (added - removed)
                nops += 1
            if t != v:
                C[v] = C[v] + (Bself[v, t] - b_old)
                nops += 1
        if mode == MODE_REF:
            c = 0.0
            for x in range(n):
                if x != v:
                    c = c + Bself[v, x]
            C[v] = c
        msgs[v] += total
        ops[v] += nops
        mask = 0
        for t in range(n):
            if D[v, t] != outD[v, t]:
                mask |= CH_D
            if Sself[v, t] != outS[v, t]:
                mask |= CH_S
            if Bself[v, t] != outB[v, t]:
                mask |= CH_BSELF if t == v else CH_B
        for j in range(lo, hi):
            for t in range(n):
                if NH[j, t] != NH0[j, t]:
                    mask |= CH_NH
                if PH[j, t] != PH0[j, t]:
                    mask |= CH_PH
                if Snb[j, t] != Snb0[j, t]:
                    mask |= CH_SNB
                if Bnb[j, t] != Bnb0[j, t]:
                    mask |= CH_BNB
        if C[v] != C0:
            mask |= CH_C
        changes[v] = mask
    return 0
