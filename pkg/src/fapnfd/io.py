"""Flat-file formats.

* topology: JSON with ``nodes`` (``id, x, y`` in km), ``links``
  (``id, tx, rx``) and an optional ``plan`` block (``f_start, f_end, B,
  delta_f`` in MHz);
* assignment: JSON with ``assignment`` (link id -> 1-based index), a
  ``metrics`` block and free-form ``meta``;
* separation CSV ``i,j,S_MHz,sep_quantized`` for ``i < j`` with a positive
  quantized separation.  It doubles as a topology-free solver input;
* pool CSV and bounds CSV for aggregation.

Every CSV starts with one ``#`` comment line holding JSON metadata (package
version, seeds, ...) followed by a header row.  Output is byte-stable: keys
are sorted and nothing time-dependent is written.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from ._version import __version__
from .errors import InvalidParameters
from .model import Assignment, Link, Node, Topology, build_plan, plan_from_count
from .nfd import SeparationMatrix

SEPARATION_HEADER = ("i", "j", "S_MHz", "sep_quantized")
POOL_HEADER = ("seed", "strategy", "used_count", "range_mhz", "psi", "pareto_flag")


def _bad(msg):
    return InvalidParameters(msg)


def _num(x):
    """JSON-friendly number: ints stay ints, floats are rounded to 1e-9."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(round(float(x), 9))


# -- plan -----------------------------------------------------------------
def plan_to_dict(plan):
    return {"f_start": plan.f_start, "f_end": plan.f_end, "B": plan.bandwidth, "delta_f": plan.delta_f}


def plan_from_dict(d):
    try:
        return build_plan(float(d["f_start"]), float(d["f_end"]), float(d["B"]), float(d["delta_f"]))
    except KeyError as e:
        raise _bad(f"plan block lacks {e.args[0]!r}") from None


# -- topology -------------------------------------------------------------
def topology_to_dict(topology, plan=None, meta=None):
    d = {
        "nodes": [{"id": n.id, "x": n.x, "y": n.y} for n in topology.nodes],
        "links": [{"id": l.id, "tx": l.tx, "rx": l.rx} for l in topology.links],
    }
    if plan is not None:
        d["plan"] = plan_to_dict(plan)
    d["meta"] = {"version": __version__, **(meta or {})}
    return d


def topology_from_dict(d):
    """``(topology, plan)``; ``plan`` is None when the file has no plan block."""
    try:
        nodes = [Node(int(n["id"]), float(n["x"]), float(n["y"])) for n in d["nodes"]]
        links = [Link(int(l["id"]), int(l["tx"]), int(l["rx"])) for l in d["links"]]
    except (KeyError, TypeError, ValueError) as e:
        raise _bad(f"malformed topology: {e}") from None
    plan = plan_from_dict(d["plan"]) if d.get("plan") else None
    return Topology(tuple(nodes), tuple(links)), plan


def write_topology(path, topology, plan=None, meta=None):
    Path(path).write_text(json.dumps(topology_to_dict(topology, plan, meta), indent=1, sort_keys=True) + "\n")


def read_topology(path):
    return topology_from_dict(_load_json(path))


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise _bad(f"{path}: not valid JSON ({e})") from None


# -- assignment -----------------------------------------------------------
def metrics_to_dict(m):
    return {k: _num(v) for k, v in asdict(m).items()}


def write_assignment(path, assignment, metrics=None, meta=None):
    d = {
        "assignment": {str(l): int(k) for l, k in sorted(assignment.items())},
        "metrics": metrics_to_dict(metrics) if metrics is not None else {},
        "meta": {"version": __version__, **(meta or {})},
    }
    Path(path).write_text(json.dumps(d, indent=1, sort_keys=True) + "\n")


def read_assignment(path):
    """``(assignment, metrics dict, meta dict)``.

    A bare ``{link_id: index}`` object is accepted as well.
    """
    d = _load_json(path)
    body = d.get("assignment", d) if isinstance(d, dict) else None
    if not isinstance(body, dict):
        raise _bad(f"{path}: expected an object of link id -> index")
    try:
        a = Assignment({int(l): int(k) for l, k in body.items()})
    except (TypeError, ValueError) as e:
        raise _bad(f"{path}: malformed assignment ({e})") from None
    return a, d.get("metrics", {}), d.get("meta", {})


# -- CSV helpers ----------------------------------------------------------
def _csv_text(meta, header, rows):
    buf = io.StringIO()
    buf.write("# " + json.dumps({"version": __version__, **meta}, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def read_csv(path):
    """``(meta, header, rows)`` of a CSV written by this module."""
    meta, lines = {}, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            if not meta:
                try:
                    meta = json.loads(line[1:].strip())
                except json.JSONDecodeError:
                    pass
            continue
        if line.strip():
            lines.append(line)
    if not lines:
        raise _bad(f"{path}: no header row")
    rows = list(csv.reader(lines))
    return meta, tuple(rows[0]), rows[1:]


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return repr(round(float(x), 9))
    return x


# -- separation CSV -------------------------------------------------------
def separation_csv(sep, plan=None, meta=None):
    """Text of the separation CSV.  The metadata line lists every link (so
    unconstrained links survive a round trip), ``delta_f`` and ``n_freqs``."""
    m = {"links": list(sep.link_ids), "delta_f": sep.delta_f, **(meta or {})}
    if plan is not None:
        m["n_freqs"] = plan.n_freqs
        m["plan"] = plan_to_dict(plan)
    rows = []
    q = sep.quantized
    for a in range(sep.n_links):
        for b in range(a + 1, sep.n_links):
            if q[a, b] > 0:
                raw = sep.raw_mhz[a, b] if sep.raw_mhz is not None else q[a, b] * sep.delta_f
                s_mhz = "inf" if not np.isfinite(raw) else _fmt(float(raw))
                rows.append((sep.link_ids[a], sep.link_ids[b], s_mhz, int(q[a, b])))
    return _csv_text(m, SEPARATION_HEADER, rows)


def write_separation_csv(path, sep, plan=None, meta=None):
    Path(path).write_text(separation_csv(sep, plan, meta))


def read_separation_csv(path, n_freqs=None):
    """``(separation matrix, plan)`` from a separation CSV.

    The plan comes from the metadata when present; otherwise a plan of
    ``n_freqs`` indices (argument, then metadata, then the sum of all
    separations plus one) at the file's ``delta_f``.
    """
    meta, header, rows = read_csv(path)
    if tuple(h.strip() for h in header) != SEPARATION_HEADER:
        raise _bad(f"{path}: expected header {','.join(SEPARATION_HEADER)}")
    delta_f = float(meta.get("delta_f", 1.0))
    pairs, ids = [], set(int(l) for l in meta.get("links", []))
    raw = {}
    try:
        for r in rows:
            i, j, s_mhz, qv = int(r[0]), int(r[1]), float(r[2]), int(r[3])
            if qv < 0:
                raise ValueError("negative separation")
            ids.update((i, j))
            pairs.append((i, j, qv))
            raw[(i, j)] = s_mhz
    except (ValueError, IndexError) as e:
        raise _bad(f"{path}: malformed row ({e})") from None
    base = SeparationMatrix.from_pairs(sorted(ids), pairs, delta_f)
    raw_mhz = np.zeros(base.quantized.shape)
    for (i, j), s in raw.items():
        a, b = base.position(i), base.position(j)
        raw_mhz[a, b] = raw_mhz[b, a] = s
    sep = SeparationMatrix(base.link_ids, base.quantized, delta_f, raw_mhz)
    if "plan" in meta and n_freqs is None:
        plan = plan_from_dict(meta["plan"])
    else:
        n = n_freqs or meta.get("n_freqs") or int(sum(p[2] for p in pairs)) + 1
        plan = plan_from_count(int(n), delta_f=delta_f, bandwidth=delta_f)
    return sep, plan


# -- pool and bounds CSV --------------------------------------------------
def pool_rows(pool, bf):
    scores = pool.scores(bf)
    pareto = pool.pareto_mask() if len(pool) else []
    return [
        (e.seed if e.seed is not None else "", e.strategy, e.metrics.used_count,
         _fmt(e.metrics.range_mhz), _fmt(float(s)), int(p))
        for e, s, p in zip(pool, scores, pareto)
    ]


def pool_csv(pool, bf, meta=None):
    return _csv_text({"bf": bf, **(meta or {})}, POOL_HEADER, pool_rows(pool, bf))


def write_pool_csv(path, pool, bf, meta=None):
    Path(path).write_text(pool_csv(pool, bf, meta))


def bounds_csv(report, meta=None):
    d = report.as_dict()
    header = tuple(d)
    return _csv_text(meta or {}, header, [tuple(_fmt(v) for v in d.values())])


def write_bounds_csv(path, report, meta=None):
    Path(path).write_text(bounds_csv(report, meta))


def write_bounds_json(path, report, meta=None):
    d = {k: _num(v) for k, v in report.as_dict().items()}
    d["meta"] = {"version": __version__, **(meta or {})}
    Path(path).write_text(json.dumps(d, indent=1, sort_keys=True) + "\n")
