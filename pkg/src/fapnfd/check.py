"""Independent feasibility checker.

Written as plain pairwise loops on purpose: it must not share code paths
with the solvers it verifies.
"""
from __future__ import annotations

from .model import SolutionMetrics


def check_feasibility(assignment, sep, plan, range_cap_mhz=None):
    """Verify an assignment against every constraint and count failing links.

    A link fails when it has no index or one outside ``[1, n_freqs]``, when it
    violates a separation with another link (both ends fail), or when a
    range cap is set and its index lies beyond ``min + cap`` span.
    Never raises; infeasibility is reported in the returned metrics.
    """
    links = list(sep.link_ids)
    q = sep.quantized
    idx = {}
    failed = set()
    for l in links:
        k = assignment.freq_index.get(l)
        if k is None or not (1 <= k <= plan.n_freqs):
            failed.add(l)
        else:
            idx[l] = k
    # links the instance does not know about are failures too
    failed.update(set(assignment.freq_index) - set(links))
    n = len(links)
    for a in range(n):
        la = links[a]
        if la not in idx:
            continue
        for b in range(a + 1, n):
            lb = links[b]
            if lb not in idx:
                continue
            need = int(q[a][b])
            if need > 0 and abs(idx[la] - idx[lb]) < need:
                failed.add(la)
                failed.add(lb)

    values = list(idx.values())
    used = len(set(values))
    if values:
        lo, hi = min(values), max(values)
        span = hi - lo
        range_mhz = span * plan.delta_f + plan.bandwidth
    else:
        lo = span = 0
        range_mhz = 0.0
    if range_cap_mhz is not None and values and range_mhz > range_cap_mhz + 1e-9:
        cap_span = int((range_cap_mhz - plan.bandwidth) / plan.delta_f + 1e-9)
        for l, k in idx.items():
            if k - lo > cap_span:
                failed.add(l)
    feasible = not failed
    return SolutionMetrics(used, range_mhz, feasible, len(failed), span)


def count_violations(assignment, sep):
    """Number of violated pairwise separation constraints."""
    links = list(sep.link_ids)
    q = sep.quantized
    f = assignment.freq_index
    bad = 0
    for a in range(len(links)):
        for b in range(a + 1, len(links)):
            need = int(q[a][b])
            if need and abs(f[links[a]] - f[links[b]]) < need:
                bad += 1
    return bad
