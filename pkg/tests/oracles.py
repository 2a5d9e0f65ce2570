"""Brute-force reference computations, independent of the package's algorithms."""
import functools
import itertools
import math

import numpy as np
from scipy.integrate import trapezoid


@functools.lru_cache(maxsize=None)
def _perms(n):
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64)


def min_span(w):
    """Minimum ``max - min`` over all index assignments with ``|x_a - x_b| >= w[a, b]``.

    Enumerates every ordering of the links and places each one as early as
    the already placed ones allow; for a fixed ordering that schedule has
    the smallest span, so the minimum over orderings is exact.
    """
    w = np.asarray(w, dtype=np.int64)
    n = w.shape[0]
    if n <= 1:
        return 0
    p = _perms(n)
    x = np.zeros(p.shape, dtype=np.int64)
    for k in range(1, n):
        need = np.zeros(len(p), dtype=np.int64)
        for j in range(k):
            need = np.maximum(need, x[:, j] + w[p[:, j], p[:, k]])
        x[:, k] = need
    # placements never decrease along an ordering, so the last one is the span
    return int(x[:, -1].min())


def _fits(q, values):
    """Can every link take a value from ``values`` without violations?"""
    n = q.shape[0]
    x = [0] * n
    order = sorted(range(n), key=lambda v: -int((q[v] > 0).sum()))

    def place(t):
        if t == n:
            return True
        v = order[t]
        for f in values:
            if all(abs(f - x[u]) >= q[v, u] for u in order[:t]):
                x[v] = f
                if place(t + 1):
                    return True
        return False

    return place(0)


def min_used_count(q, n_freqs):
    """Smallest number of distinct indices in ``1..n_freqs`` over feasible
    assignments, or None when no assignment exists."""
    q = np.asarray(q, dtype=np.int64)
    n = q.shape[0]
    if n == 0:
        return 0
    for k in range(1, min(n, n_freqs) + 1):
        for values in itertools.combinations(range(1, n_freqs + 1), k):
            if _fits(q, values):
                return k
    return None


def nfd_numeric(mask, filt, delta_f, points=200001):
    """NFD by dense trapezoid integration of the linear-power spectra."""
    def level(m, f):
        xs, ys = m.full()
        out = np.interp(f, xs, ys)
        return np.where(np.abs(f) > m.extent, m.floor_db, out)

    lim = max(mask.extent, filt.extent) + abs(delta_f) + 1.0
    f = np.linspace(-lim, lim, points)
    pt = 10 ** (level(mask, f) / 10)
    pr = 10 ** (level(filt, f - delta_f) / 10)
    pr0 = 10 ** (level(filt, f) / 10)
    return 10 * math.log10(trapezoid(pt * pr0, f) / trapezoid(pt * pr, f))


def path_loss_calc(f_mhz, d_km):
    return 32.4 + 20 * math.log10(f_mhz) + 20 * math.log10(d_km)
