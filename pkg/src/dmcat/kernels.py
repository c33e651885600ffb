"""Hot enumeration kernels over composition tables.

Every kernel exists twice: a loop version compiled with numba and a
vectorised numpy version.  ``DMCAT_NO_NUMBA=1`` selects the numpy path.
Both take the raw table arrays of a :class:`~dmcat.fincat.FinCat`:

``src``, ``dst``
    int64[M] endpoints of every morphism.
``comp``
    int64[M, M]; ``comp[g, f]`` is ``g o f`` or -1 when not composable.
``hom_ptr``, ``hom_idx``
    CSR layout of the hom-sets: ``hom(a, b)`` is
    ``hom_idx[hom_ptr[a*N + b]:hom_ptr[a*N + b + 1]]`` in ascending order.
"""
import numpy as np

from . import _accel
from ._accel import njit


# ---------------------------------------------------------------- lifting

@njit(cache=True, nogil=True)
def _lift_table_jit(src, dst, comp, hom_ptr, hom_idx, n_obj, lefts, rights):
    out = np.ones((lefts.shape[0], rights.shape[0]), dtype=np.bool_)
    for a in range(lefts.shape[0]):
        f = lefts[a]
        A = src[f]
        B = dst[f]
        for b in range(rights.shape[0]):
            g = rights[b]
            X = src[g]
            Y = dst[g]
            k_ax = A * n_obj + X
            k_by = B * n_obj + Y
            k_bx = B * n_obj + X
            ok = True
            for ti in range(hom_ptr[k_ax], hom_ptr[k_ax + 1]):
                t = hom_idx[ti]
                gt = comp[g, t]
                for bi in range(hom_ptr[k_by], hom_ptr[k_by + 1]):
                    bo = hom_idx[bi]
                    if comp[bo, f] != gt:
                        continue
                    found = False
                    for hi in range(hom_ptr[k_bx], hom_ptr[k_bx + 1]):
                        h = hom_idx[hi]
                        if comp[h, f] == t and comp[g, h] == bo:
                            found = True
                            break
                    if not found:
                        ok = False
                        break
                if not ok:
                    break
            out[a, b] = ok
    return out


def _hom(hom_ptr, hom_idx, n_obj, a, b):
    k = a * n_obj + b
    return hom_idx[hom_ptr[k]:hom_ptr[k + 1]]


def _lift_table_np(src, dst, comp, hom_ptr, hom_idx, n_obj, lefts, rights):
    m = comp.shape[0]
    out = np.ones((lefts.shape[0], rights.shape[0]), dtype=np.bool_)
    for a, f in enumerate(lefts):
        A, B = src[f], dst[f]
        for b, g in enumerate(rights):
            X, Y = src[g], dst[g]
            tops = _hom(hom_ptr, hom_idx, n_obj, A, X)
            bots = _hom(hom_ptr, hom_idx, n_obj, B, Y)
            if tops.size == 0 or bots.size == 0:
                continue
            comm = comp[g, tops][:, None] == comp[bots, f][None, :]
            if not comm.any():
                continue
            diag = _hom(hom_ptr, hom_idx, n_obj, B, X)
            if diag.size == 0:
                out[a, b] = False
                continue
            solved = comp[diag, f] * m + comp[g, diag]
            wanted = tops[:, None] * m + bots[None, :]
            out[a, b] = not (comm & ~np.isin(wanted, solved)).any()
    return out


def lift_table(cat, lefts, rights, use_numba=None):
    """Boolean table ``T[a, b]``: ``lefts[a]`` lifts against ``rights[b]``."""
    lefts = np.asarray(lefts, dtype=np.int64)
    rights = np.asarray(rights, dtype=np.int64)
    fn = _pick(_lift_table_jit, _lift_table_np, use_numba)
    return fn(cat.src, cat.dst, cat.comp, cat.hom_ptr, cat.hom_idx,
              cat.n_obj, lefts, rights)


# --------------------------------------------------------------- retracts

@njit(cache=True, nogil=True)
def _retract_table_jit(src, dst, comp, ident, hom_ptr, hom_idx, n_obj, fs, gs):
    out = np.zeros((fs.shape[0], gs.shape[0]), dtype=np.bool_)
    for a in range(fs.shape[0]):
        f = fs[a]
        A = src[f]
        B = dst[f]
        for b in range(gs.shape[0]):
            g = gs[b]
            X = src[g]
            Y = dst[g]
            found = False
            for i0i in range(hom_ptr[A * n_obj + X], hom_ptr[A * n_obj + X + 1]):
                i0 = hom_idx[i0i]
                gi0 = comp[g, i0]
                for s0i in range(hom_ptr[X * n_obj + A], hom_ptr[X * n_obj + A + 1]):
                    s0 = hom_idx[s0i]
                    if comp[s0, i0] != ident[A]:
                        continue
                    fs0 = comp[f, s0]
                    for i1i in range(hom_ptr[B * n_obj + Y], hom_ptr[B * n_obj + Y + 1]):
                        i1 = hom_idx[i1i]
                        if comp[i1, f] != gi0:
                            continue
                        for s1i in range(hom_ptr[Y * n_obj + B], hom_ptr[Y * n_obj + B + 1]):
                            s1 = hom_idx[s1i]
                            if comp[s1, i1] == ident[B] and comp[s1, g] == fs0:
                                found = True
                                break
                        if found:
                            break
                    if found:
                        break
                if found:
                    break
            out[a, b] = found
    return out


def _retract_table_np(src, dst, comp, ident, hom_ptr, hom_idx, n_obj, fs, gs):
    out = np.zeros((fs.shape[0], gs.shape[0]), dtype=np.bool_)
    for a, f in enumerate(fs):
        A, B = src[f], dst[f]
        for b, g in enumerate(gs):
            X, Y = src[g], dst[g]
            i0 = _hom(hom_ptr, hom_idx, n_obj, A, X)
            s0 = _hom(hom_ptr, hom_idx, n_obj, X, A)
            i1 = _hom(hom_ptr, hom_idx, n_obj, B, Y)
            s1 = _hom(hom_ptr, hom_idx, n_obj, Y, B)
            if not (i0.size and s0.size and i1.size and s1.size):
                continue
            p0 = np.argwhere(comp[s0[None, :], i0[:, None]] == ident[A])
            p1 = np.argwhere(comp[s1[None, :], i1[:, None]] == ident[B])
            if not (p0.size and p1.size):
                continue
            I0, S0 = i0[p0[:, 0]], s0[p0[:, 1]]
            I1, S1 = i1[p1[:, 0]], s1[p1[:, 1]]
            c1 = comp[g, I0][:, None] == comp[I1, f][None, :]
            c2 = comp[f, S0][:, None] == comp[S1, g][None, :]
            out[a, b] = bool((c1 & c2).any())
    return out


def retract_table(cat, fs, gs, use_numba=None):
    """``T[a, b]``: ``fs[a]`` is a retract of ``gs[b]`` in the arrow category."""
    fs = np.asarray(fs, dtype=np.int64)
    gs = np.asarray(gs, dtype=np.int64)
    fn = _pick(_retract_table_jit, _retract_table_np, use_numba)
    return fn(cat.src, cat.dst, cat.comp, cat.ident, cat.hom_ptr, cat.hom_idx,
              cat.n_obj, fs, gs)


# -------------------------------------------------------------- pullbacks

@njit(cache=True, nogil=True)
def _cone_counts_jit(comp, hom_ptr, hom_idx, n_obj, f, g, A, B):
    counts = np.zeros(n_obj, dtype=np.int64)
    for Q in range(n_obj):
        c = 0
        for ai in range(hom_ptr[Q * n_obj + A], hom_ptr[Q * n_obj + A + 1]):
            fq = comp[f, hom_idx[ai]]
            for bi in range(hom_ptr[Q * n_obj + B], hom_ptr[Q * n_obj + B + 1]):
                if comp[g, hom_idx[bi]] == fq:
                    c += 1
        counts[Q] = c
    return counts


@njit(cache=True, nogil=True)
def _is_universal_jit(comp, hom_ptr, hom_idx, n_obj, counts, P, p0, p1):
    m = comp.shape[0]
    for Q in range(n_obj):
        lo = hom_ptr[Q * n_obj + P]
        hi = hom_ptr[Q * n_obj + P + 1]
        if hi - lo != counts[Q]:
            return False
        codes = np.empty(hi - lo, dtype=np.int64)
        for k in range(lo, hi):
            h = hom_idx[k]
            codes[k - lo] = comp[p0, h] * m + comp[p1, h]
        codes.sort()
        for k in range(1, codes.shape[0]):
            if codes[k] == codes[k - 1]:
                return False
    return True


@njit(cache=True, nogil=True)
def _pullback_search_jit(src, comp, hom_ptr, hom_idx, n_obj, f, g):
    A = src[f]
    B = src[g]
    counts = _cone_counts_jit(comp, hom_ptr, hom_idx, n_obj, f, g, A, B)
    for P in range(n_obj):
        if counts[P] == 0:
            continue
        for ai in range(hom_ptr[P * n_obj + A], hom_ptr[P * n_obj + A + 1]):
            p0 = hom_idx[ai]
            fp = comp[f, p0]
            for bi in range(hom_ptr[P * n_obj + B], hom_ptr[P * n_obj + B + 1]):
                p1 = hom_idx[bi]
                if comp[g, p1] != fp:
                    continue
                if _is_universal_jit(comp, hom_ptr, hom_idx, n_obj, counts, P, p0, p1):
                    return P, p0, p1
    return -1, -1, -1


@njit(cache=True, nogil=True)
def _check_pullback_jit(src, comp, hom_ptr, hom_idx, n_obj, f, g, P, p0, p1):
    counts = _cone_counts_jit(comp, hom_ptr, hom_idx, n_obj, f, g, src[f], src[g])
    return _is_universal_jit(comp, hom_ptr, hom_idx, n_obj, counts, P, p0, p1)


def _cone_counts_np(comp, hom_ptr, hom_idx, n_obj, f, g, A, B):
    counts = np.zeros(n_obj, dtype=np.int64)
    for Q in range(n_obj):
        qa = _hom(hom_ptr, hom_idx, n_obj, Q, A)
        qb = _hom(hom_ptr, hom_idx, n_obj, Q, B)
        if qa.size and qb.size:
            counts[Q] = int((comp[f, qa][:, None] == comp[g, qb][None, :]).sum())
    return counts


def _is_universal_np(comp, hom_ptr, hom_idx, n_obj, counts, P, p0, p1):
    m = comp.shape[0]
    for Q in range(n_obj):
        hs = _hom(hom_ptr, hom_idx, n_obj, Q, P)
        if hs.size != counts[Q]:
            return False
        codes = comp[p0, hs] * m + comp[p1, hs]
        if np.unique(codes).size != codes.size:
            return False
    return True


def _pullback_search_np(src, comp, hom_ptr, hom_idx, n_obj, f, g):
    A, B = src[f], src[g]
    counts = _cone_counts_np(comp, hom_ptr, hom_idx, n_obj, f, g, A, B)
    for P in range(n_obj):
        if counts[P] == 0:
            continue
        pa = _hom(hom_ptr, hom_idx, n_obj, P, A)
        pb = _hom(hom_ptr, hom_idx, n_obj, P, B)
        ok = comp[f, pa][:, None] == comp[g, pb][None, :]
        for i, j in np.argwhere(ok):
            if _is_universal_np(comp, hom_ptr, hom_idx, n_obj, counts, P, pa[i], pb[j]):
                return int(P), int(pa[i]), int(pb[j])
    return -1, -1, -1


def _check_pullback_np(src, comp, hom_ptr, hom_idx, n_obj, f, g, P, p0, p1):
    counts = _cone_counts_np(comp, hom_ptr, hom_idx, n_obj, f, g, src[f], src[g])
    return _is_universal_np(comp, hom_ptr, hom_idx, n_obj, counts, P, p0, p1)


def pullback_search(cat, f, g, use_numba=None):
    """Least ``(apex, proj0, proj1)`` over the cospan ``(f, g)`` or ``None``."""
    fn = _pick(_pullback_search_jit, _pullback_search_np, use_numba)
    P, p0, p1 = fn(cat.src, cat.comp, cat.hom_ptr, cat.hom_idx, cat.n_obj,
                   int(f), int(g))
    if P < 0:
        return None
    return int(P), int(p0), int(p1)


def is_pullback(cat, f, g, apex, p0, p1, use_numba=None):
    """Exhaustive universal-property check of a commuting square over ``(f, g)``."""
    if cat.comp[f, p0] < 0 or cat.comp[f, p0] != cat.comp[g, p1]:
        return False
    fn = _pick(_check_pullback_jit, _check_pullback_np, use_numba)
    return bool(fn(cat.src, cat.comp, cat.hom_ptr, cat.hom_idx, cat.n_obj,
                   int(f), int(g), int(apex), int(p0), int(p1)))


def _pick(jit_fn, np_fn, use_numba):
    if use_numba is None:
        use_numba = _accel.USE_NUMBA
    return jit_fn if use_numba else np_fn
