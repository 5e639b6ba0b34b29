"""Second opinions: trace replay, brute-force colorings, rational rank.

Nothing here shares arithmetic with :mod:`zcolor.coloring`'s kernel code.
Trace replay does reuse the move engine to rebuild each step, but every
check made on the rebuilt state is computed here from scratch.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .coloring import ColoringMatrix, canonicalize, kernel_colorings, palette
from .diagram import (Diagram, DiagramError, MoveError, Workspace, components, dump_diagram,
                      linking_matrix, validate_diagram)


class TooLargeError(ValueError):
    pass


# ---------------------------------------------------------------------------
# trace replay


@dataclass
class TraceVerdict:
    ok: bool
    step: int | None = None          # 1-based index of the first failing step; 0 = input state
    invariant: str | None = None
    message: str = ""
    steps_checked: int = 0

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {"ok": self.ok, "step": self.step, "invariant": self.invariant,
                "message": self.message, "steps_checked": self.steps_checked}


class _LogDict(dict):
    """A dict that remembers which keys were written or removed."""

    def __init__(self, *a):
        super().__init__(*a)
        self.written: set = set()

    def __setitem__(self, k, v):
        self.written.add(k)
        super().__setitem__(k, v)

    def __delitem__(self, k):
        self.written.add(k)
        super().__delitem__(k)


class _ReplayWorkspace(Workspace):
    """Workspace that logs every crossing whose PD row it writes."""

    def __init__(self, d, colors):
        super().__init__(d, colors)
        self.edge_arc = _LogDict(self.edge_arc)
        self.color = _LogDict(self.color)
        self.rows_written: set[int] = set()

    def _set(self, c, k, label):
        self.rows_written.add(c)
        super()._set(c, k, label)

    def _add_crossing(self, cid, slots, sign):
        self.rows_written.add(cid)
        super()._add_crossing(cid, slots, sign)

    def reset_logs(self):
        self.rows_written = set()
        self.edge_arc.written = set()
        self.color.written = set()


def _link_fingerprint(d: Diagram):
    """Linking matrix up to renumbering of components.

    Zero rows are dropped: a component that an R2 pull turns into a free
    loop leaves the matrix but was unlinked from everything already.
    """
    lm = linking_matrix(d)
    return tuple(sorted(tuple(sorted(r)) for r in lm if any(r)))


def _edge_labels(ws: Workspace) -> dict[int, int]:
    """Component label per edge, from a fresh walk along strands."""
    label: dict[int, int] = {}
    nxt = 0
    for e0 in sorted(ws.occ):
        if e0 in label:
            continue
        e = e0
        while e not in label:
            label[e] = nxt
            c, k = _head(ws, e)
            e = ws.pd[c][(k + 2) % 4]
        if label[e] != nxt:
            raise DiagramError("strand walk merged into another component")
        nxt += 1
    return label


def _head(ws: Workspace, e: int):
    for c, k in ws.occ[e]:
        if k == 0 or k == (3 if ws.sign[c] > 0 else 1):
            return c, k
    raise DiagramError(f"edge {e} has no head")


def _equation_ok(ws: Workspace, c: int) -> bool:
    row = ws.pd[c]
    ea, col = ws.edge_arc, ws.color
    return 2 * col[ea[row[1]]] == col[ea[row[0]]] + col[ea[row[2]]]


def _norm(obj):
    """JSON-style normal form so tuples and lists compare equal."""
    if isinstance(obj, dict):
        return {str(k): _norm(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_norm(x) for x in obj]
    return obj


def verify_trace(d_in: Diagram, g_in, trace, d_out: Diagram, g_out, full_every: int = 64) -> TraceVerdict:
    """Replay ``trace`` from (d_in, g_in) and compare with (d_out, g_out).

    Every step is checked locally and exactly: the site must be legal, the
    recorded colors must satisfy the crossing equation at every crossing
    whose row, arcs or colors the step touched, each edge keeps a
    consistent component label, and the crossings a step adds and removes
    must cancel in every pairwise linking number.  Every ``full_every``
    steps and after the last one the whole diagram is rechecked from
    scratch (validity, coloring, component count, linking matrix).
    """
    def fail(step, inv, msg, n):
        return TraceVerdict(False, step, inv, msg, n)

    try:
        validate_diagram(d_in)
    except DiagramError as exc:
        return fail(0, "diagram", str(exc), 0)
    if any(a not in g_in for a in d_in.arcs) or any(
            2 * g_in[c.over] != g_in[c.under_in] + g_in[c.under_out] for c in d_in.crossings):
        return fail(0, "coloring", "input coloring is not valid", 0)

    ws = _ReplayWorkspace(d_in, g_in)
    n_comp0 = components(d_in)[1]
    fp0 = _link_fingerprint(d_in)
    label = _edge_labels(ws)
    count = Counter(label.values())
    info = {c: (label[ws.pd[c][1]], label[ws.pd[c][0]], ws.sign[c]) for c in ws.pd}
    total = len(trace)

    for i, rec in enumerate(trace, start=1):
        ws.reset_logs()
        try:
            rep = ws.apply(rec)
        except (MoveError, DiagramError, AssertionError, KeyError, TypeError, ValueError, IndexError) as exc:
            return fail(i, "site", f"move {rec.get('move')!r} cannot be replayed: {exc}", i - 1)
        # adopt the colors the trace claims for the arcs this step created
        claimed = rec.get("colors", {})
        for a, v in claimed.items():
            a = int(a)
            if a in ws.color:
                ws.color[a] = v
        suspects = {c for c in ws.rows_written if c in ws.pd}
        for e in ws.edge_arc.written:
            for c, _k in ws.occ.get(e, ()):
                suspects.add(c)
        recolored = {a for a in ws.color.written if a in ws.color}
        if recolored:
            # every crossing along a recolored arc: start from an edge of it
            start_edges = {}
            for e in ws.edge_arc.written:
                a = ws.edge_arc.get(e)
                if a in recolored:
                    start_edges.setdefault(a, e)
            if len(start_edges) < len(recolored):
                for e, a in ws.edge_arc.items():
                    if a in recolored:
                        start_edges.setdefault(a, e)
            for e in start_edges.values():
                for x in ws._chain(e):
                    for c, _k in ws.occ[x]:
                        suspects.add(c)
        bad = [c for c in sorted(suspects) if not _equation_ok(ws, c)]
        if bad:
            return fail(i, "coloring", f"crossing equation fails at {bad[:5]} after {rec.get('move')}", i - 1)
        if _norm(rep["created"]) != _norm(rec.get("created")) or _norm(rep["deleted"]) != _norm(rec.get("deleted")):
            return fail(i, "record", "replayed move creates or deletes different objects than recorded", i - 1)
        if _norm(rep["colors"]) != _norm(claimed):
            return fail(i, "coloring", "recorded colors differ from the forced ones", i - 1)

        # component labels
        gone = [e for e in rep["deleted"]["edges"] if e in label]
        if any(e in ws.occ for e in gone):
            return fail(i, "record", "a deleted edge is still in the diagram", i - 1)
        for e in gone:
            lab = label.pop(e)
            count[lab] -= 1
            if not count[lab]:
                del count[lab]
        fresh = [e for e in rep["created"]["edges"] if e in ws.occ]
        if any(e in label for e in fresh):
            return fail(i, "record", "a created edge already existed", i - 1)
        for e in fresh:
            lab = None
            x = e
            seen = set()
            while x not in seen:
                seen.add(x)
                c, k = _head(ws, x)
                x = ws.pd[c][(k + 2) % 4]
                if x in label:
                    lab = label[x]
                    break
            if lab is None:
                return fail(i, "components", f"edge {e} lies on a strand with no surviving edge", i - 1)
            label[e] = lab
            count[lab] += 1
        for c in suspects:
            row = ws.pd[c]
            if any(e not in label for e in row):
                return fail(i, "record", f"crossing {c} uses an edge the record does not mention", i - 1)
            if label[row[0]] != label[row[2]] or label[row[1]] != label[row[3]]:
                return fail(i, "components", f"strands through crossing {c} join different components", i - 1)
        if len(count) + ws.free_loops != n_comp0:
            return fail(i, "components", f"component count became {len(count) + ws.free_loops}", i - 1)

        # linking numbers: what the step adds and removes must cancel
        delta: Counter = Counter()
        for c in rep["deleted"]["crossings"]:
            lo, lu, s = info.pop(c)
            if lo != lu:
                delta[frozenset((lo, lu))] -= s
        for c in suspects:
            new = (label[ws.pd[c][1]], label[ws.pd[c][0]], ws.sign[c])
            old = info.get(c)
            if old is not None and old != new:
                return fail(i, "linking", f"crossing {c} changed its components or sign", i - 1)
            if old is None:
                info[c] = new
                if new[0] != new[1]:
                    delta[frozenset(new[:2])] += new[2]
        if any(delta.values()):
            return fail(i, "linking", "step changes a pairwise linking number", i - 1)

        if i % full_every == 0 or i == total:
            d_now, g_now = ws.freeze()
            try:
                validate_diagram(d_now)
            except DiagramError as exc:
                return fail(i, "diagram", str(exc), i - 1)
            if any(2 * g_now[c.over] != g_now[c.under_in] + g_now[c.under_out] for c in d_now.crossings):
                return fail(i, "coloring", "global coloring check failed", i - 1)
            if components(d_now)[1] != n_comp0:
                return fail(i, "components", "global component count changed", i - 1)
            if _link_fingerprint(d_now) != fp0:
                return fail(i, "linking", "global linking matrix changed", i - 1)

    d_end, g_end = ws.freeze()
    if dump_diagram(d_end) != dump_diagram(d_out):
        return fail(None, "output", "replayed diagram differs from the claimed output", total)
    if {a: g_end[a] for a in sorted(g_end)} != {a: g_out.get(a) for a in sorted(g_end)} or set(g_out) != set(g_end):
        return fail(None, "output", "replayed coloring differs from the claimed output", total)
    return TraceVerdict(True, None, None, "", total)


# ---------------------------------------------------------------------------
# brute force


def rational_nullity(m) -> int:
    """Number of columns minus the rank, by Gaussian elimination over the rationals."""
    if isinstance(m, ColoringMatrix):
        rows = [[Fraction(x) for x in r] for r in m.rows]
        ncols = len(m.col_ids)
    else:
        rows = [[Fraction(x) for x in r] for r in m]
        ncols = len(rows[0]) if rows else 0
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        prow = [x / p for x in rows[rank]]
        rows[rank] = prow
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], prow)]
        rank += 1
    return ncols - rank


def exhaustive_small_coloring_check(d: Diagram, values) -> list[dict[int, int]]:
    """Every assignment of ``values`` to arcs that satisfies the crossing equation.

    Backtracks arc by arc and prunes as soon as a crossing has all three
    of its arcs assigned.
    """
    values = sorted(set(values))
    arcs = sorted(d.arcs)
    if len(arcs) > 8 or len(values) > 9:
        raise TooLargeError(f"{len(arcs)} arcs and {len(values)} values is too large for enumeration")
    pos = {a: i for i, a in enumerate(arcs)}
    ready: list[list] = [[] for _ in arcs]
    for c in d.crossings:
        last = max(pos[c.over], pos[c.under_in], pos[c.under_out])
        ready[last].append(c)
    out = []
    cur: dict[int, int] = {}

    def go(i):
        if i == len(arcs):
            out.append(dict(cur))
            return
        for v in values:
            cur[arcs[i]] = v
            if all(2 * cur[c.over] == cur[c.under_in] + cur[c.under_out] for c in ready[i]):
                go(i + 1)
        del cur[arcs[i]]

    if arcs:
        go(0)
    else:
        out.append({})
    return out


def lattice_coordinates(vec: dict[int, int], basis: list[dict[int, int]]):
    """Integer coordinates of ``vec`` in a Hermite-form basis, or None."""
    if not basis:
        return [] if not any(vec.values()) else None
    cols = sorted(basis[0])
    rest = [vec.get(a, 0) for a in cols]
    coords = []
    for b in basis:
        row = [b[a] for a in cols]
        p = next(j for j, x in enumerate(row) if x)
        q, r = divmod(rest[p], row[p])
        if r:
            return None
        coords.append(q)
        rest = [x - q * y for x, y in zip(rest, row)]
    return coords if not any(rest) else None


EXHAUSTED = "exhausted"


def bounded_palette_search(d: Diagram, k: int, B: int, basis=None):
    """First non-constant coloring with at most ``k`` colors among integer
    combinations of the kernel basis with coefficients in [-B, B].

    Coefficient tuples are visited in lexicographic order and every
    candidate is canonicalized before its palette is counted.  Returns the
    canonical coloring, or the string ``"exhausted"`` when nothing in the
    box qualifies (which says nothing about larger coefficients).

    ``basis`` may supply any lattice basis of the colorings to search
    instead of the kernel basis; the box then refers to that basis.
    """
    if k < 2:
        return EXHAUSTED
    if basis is None:
        basis = kernel_colorings(d)
    arcs = sorted(d.arcs)
    vecs = [[v[a] for a in arcs] for v in basis]
    seen = set()
    for co in itertools.product(range(-B, B + 1), repeat=len(vecs)):
        vals = [sum(c * v[j] for c, v in zip(co, vecs)) for j in range(len(arcs))]
        if len(set(vals)) <= 1:
            continue
        canon = canonicalize(dict(zip(arcs, vals)))
        key = tuple(canon[a] for a in arcs)
        if key in seen:
            continue
        seen.add(key)
        if palette(canon)[1] <= k:
            return canon
    return EXHAUSTED
