"""Scan kernels for the exchange and circuit conditions.

The tropical values of a table are scaled by a common denominator into
int64 with a large sentinel for infinity.  Each scan has three
implementations that must agree exactly:

* ``numba``: compiled loops with early exit (default when numba imports),
* ``numpy``: chunked vectorized version,
* ``python``: plain loops on the exact values, used as the reference and
  as the fallback when scaled values would not fit in int64.

``TROPBUILD_JIT=0`` in the environment selects the numpy path at import
time; ``set_backend`` switches at run time.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

INF = math.inf
BIG = np.int64(1 << 60)
# scaled finite values must stay below this so sums never reach BIG
LIMIT = 1 << 57

_BACKENDS = ("numba", "numpy", "python")


def _default_backend() -> str:
    flag = os.environ.get("TROPBUILD_JIT", "1").strip().lower()
    if flag in ("0", "false", "no", "off") or not HAVE_NUMBA:
        return "numpy"
    return "numba"


_backend = _default_backend()


def set_backend(name: str) -> str:
    """Select the scan implementation; returns the previous one."""
    global _backend
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    old, _backend = _backend, name
    return old


def get_backend() -> str:
    return _backend


# -- index tables -----------------------------------------------------------


@lru_cache(maxsize=64)
def subset_index(n1: int, k: int) -> dict:
    return {s: i for i, s in enumerate(combinations(range(n1), k))}


@lru_cache(maxsize=64)
def circuit_tables(n1: int, k: int):
    """``(tau_elems, tau_minus)`` for all (k+1)-subsets tau.

    ``tau_minus[t, pos]`` is the index of ``tau - tau[pos]`` among the
    k-subsets in combinations order.
    """
    idx = subset_index(n1, k)
    taus = list(combinations(range(n1), k + 1))
    elems = np.array(taus, dtype=np.int64).reshape(len(taus), k + 1)
    minus = np.empty_like(elems)
    for t, tau in enumerate(taus):
        for pos in range(k + 1):
            minus[t, pos] = idx[tau[:pos] + tau[pos + 1:]]
    return elems, minus


@lru_cache(maxsize=64)
def exchange_tables(n1: int, k: int):
    """``sigma_plus[s, e]``: index of sigma + e among k-subsets, -1 if e in sigma."""
    idx = subset_index(n1, k)
    sigmas = list(combinations(range(n1), k - 1))
    plus = np.full((len(sigmas), n1), -1, dtype=np.int64)
    for s, sigma in enumerate(sigmas):
        members = set(sigma)
        for e in range(n1):
            if e not in members:
                plus[s, e] = idx[tuple(sorted(sigma + (e,)))]
    return sigmas, plus


# -- encoding ---------------------------------------------------------------


def encode(*arrays: Sequence):
    """Scale exact tropical values into int64 arrays; ``None`` on overflow."""
    den = 1
    for arr in arrays:
        for x in arr:
            if x != INF and isinstance(x, Fraction):
                den = math.lcm(den, x.denominator)
    out = []
    for arr in arrays:
        enc = np.empty(len(arr), dtype=np.int64)
        for i, x in enumerate(arr):
            if x == INF:
                enc[i] = BIG
            else:
                y = x * den
                if abs(y) >= LIMIT:
                    return None
                enc[i] = int(y)
        out.append(enc)
    return out


# -- exchange (Pluecker) scan -----------------------------------------------


def _plucker_py(values, n1, k):
    idx = subset_index(n1, k)
    for tau in combinations(range(n1), k + 1):
        for sigma in combinations(range(n1), k - 1):
            terms = []
            for pos, j in enumerate(tau):
                if j in sigma:
                    continue
                a = values[idx[tau[:pos] + tau[pos + 1:]]]
                b = values[idx[tuple(sorted(sigma + (j,)))]]
                terms.append(INF if a == INF or b == INF else a + b)
            if terms and not _twice(terms):
                return tau, sigma
    return None


def _twice(terms):
    m = min(terms)
    return m == INF or terms.count(m) >= 2


def _plucker_np(V, elems, minus, plus, chunk=64):
    # chunk over tau so the first hit is the same one the loops would find
    for t0 in range(0, elems.shape[0], chunk):
        E = elems[t0:t0 + chunk]  # (nt, k+1)
        A = V[minus[t0:t0 + chunk]]  # (nt, k+1)
        bidx = plus[:, E].transpose(1, 0, 2)  # (nt, nsig, k+1)
        valid = bidx >= 0
        B = np.where(valid, V[np.where(valid, bidx, 0)], BIG)
        Ab = A[:, None, :]
        tot = np.where(valid & (Ab < BIG) & (B < BIG), Ab + B, BIG)
        m = tot.min(axis=2)
        cnt = (tot == m[:, :, None]).sum(axis=2)
        bad = (m < BIG) & (cnt < 2)
        if bad.any():
            t, s = np.argwhere(bad)[0]
            return int(t0 + t), int(s)
    return None


if HAVE_NUMBA:

    @njit(cache=True)
    def _plucker_nb(V, elems, minus, plus):  # pragma: no cover - compiled
        ntau, w = elems.shape
        nsig = plus.shape[0]
        for t in range(ntau):
            for s in range(nsig):
                best = BIG
                cnt = 0
                for pos in range(w):
                    sp = plus[s, elems[t, pos]]
                    if sp < 0:
                        continue
                    a = V[minus[t, pos]]
                    b = V[sp]
                    if a >= BIG or b >= BIG:
                        continue
                    x = a + b
                    if x < best:
                        best = x
                        cnt = 1
                    elif x == best:
                        cnt += 1
                if best < BIG and cnt == 1:
                    return t, s
        return -1, -1

    @njit(cache=True)
    def _circuit_nb(V, u, elems, minus):  # pragma: no cover - compiled
        ntau, w = elems.shape
        for t in range(ntau):
            best = BIG
            cnt = 0
            for pos in range(w):
                a = V[minus[t, pos]]
                b = u[elems[t, pos]]
                if a >= BIG or b >= BIG:
                    continue
                x = a + b
                if x < best:
                    best = x
                    cnt = 1
                elif x == best:
                    cnt += 1
            if best < BIG and cnt == 1:
                return t
        return -1


def plucker_violation(values: Sequence, n1: int, k: int, backend: str | None = None):
    """First ``(tau, sigma)`` breaking the exchange condition, or ``None``.

    ``values`` lists the k-subset values in combinations order.
    """
    if k + 1 > n1:
        return None
    backend = backend or _backend
    enc = None if backend == "python" else encode(values)
    if enc is None:
        return _plucker_py(values, n1, k)
    (V,) = enc
    elems, minus = circuit_tables(n1, k)
    sigmas, plus = exchange_tables(n1, k)
    if backend == "numba":
        t, s = _plucker_nb(V, elems, minus, plus)
        hit = None if t < 0 else (t, s)
    else:
        hit = _plucker_np(V, elems, minus, plus)
    if hit is None:
        return None
    t, s = hit
    return tuple(int(x) for x in elems[t]), tuple(sigmas[s])


# -- circuit scan (tropical linear space membership) ------------------------


def _circuit_py(values, u, n1, k):
    idx = subset_index(n1, k)
    for tau in combinations(range(n1), k + 1):
        terms = []
        for pos, e in enumerate(tau):
            a = values[idx[tau[:pos] + tau[pos + 1:]]]
            terms.append(INF if a == INF or u[e] == INF else a + u[e])
        if not _twice(terms):
            return tau
    return None


def _circuit_np(V, u, elems, minus):
    A = V[minus]
    B = u[elems]
    tot = np.where((A >= BIG) | (B >= BIG), BIG, A + B)
    m = tot.min(axis=1)
    cnt = (tot == m[:, None]).sum(axis=1)
    bad = np.nonzero((m < BIG) & (cnt < 2))[0]
    return int(bad[0]) if len(bad) else None


def circuit_violation(values: Sequence, u: Sequence, n1: int, k: int, backend: str | None = None):
    """First (k+1)-set whose circuit minimum is attained once, or ``None``."""
    if k + 1 > n1:
        return None
    backend = backend or _backend
    enc = None if backend == "python" else encode(values, u)
    if enc is None:
        return _circuit_py(values, u, n1, k)
    V, U = enc
    elems, minus = circuit_tables(n1, k)
    if backend == "numba":
        t = _circuit_nb(V, U, elems, minus)
        t = None if t < 0 else t
    else:
        t = _circuit_np(V, U, elems, minus)
    return None if t is None else tuple(int(x) for x in elems[t])


# -- batched valuations for probe evaluation --------------------------------

NO_VAL = -1  # marks a zero entry in the batched valuation arrays


def ord_p_batch(a: np.ndarray, p: int) -> np.ndarray:
    """Elementwise p-adic order of an integer array; ``NO_VAL`` where zero."""
    a = np.abs(a)
    out = np.full(a.shape, NO_VAL, dtype=np.int64)
    nz = a != 0
    work = a[nz]
    v = np.zeros(work.shape, dtype=np.int64)
    while work.size:
        hit = work % p == 0
        if not hit.any():
            break
        v[hit] += 1
        work = np.where(hit, work // p, work)
    out[nz] = v
    return out


def ord_t_batch(coeffs: np.ndarray) -> np.ndarray:
    """Index of the first nonzero coefficient along the last axis; ``NO_VAL`` if none."""
    nz = coeffs != 0
    first = nz.argmax(axis=-1).astype(np.int64)
    return np.where(nz.any(axis=-1), first, NO_VAL)
