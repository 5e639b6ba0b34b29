"""Id-independent fingerprints of diagrams, for round-trip tests."""

from __future__ import annotations

from collections import deque

from .model import Diagram, edge_occurrences


def canonical_form(d: Diagram, colors=None):
    """Relabel crossings, edges and arcs by breadth-first order.

    The search starts at the smallest crossing id and walks slots in PD
    order; disconnected pieces restart from the smallest unvisited id.  Two
    diagrams related by a renaming of ids get equal forms.  Colors, when
    given, ride along on the relabeled arcs.
    """
    if d.pd is None:
        raise ValueError("canonical_form needs rotation data")
    occ = edge_occurrences(d.pd)
    cmap: dict[int, int] = {}
    emap: dict[int, int] = {}
    amap: dict[int, int] = {}
    edge_arc = d.edge_arc
    order: list[int] = []
    for root in sorted(d.pd):
        if root in cmap:
            continue
        cmap[root] = len(cmap)
        queue = deque([root])
        while queue:
            c = queue.popleft()
            order.append(c)
            for k, e in enumerate(d.pd[c]):
                if e not in emap:
                    emap[e] = len(emap)
                    a = edge_arc[e]
                    if a not in amap:
                        amap[a] = len(amap)
                a1, a2 = occ[e]
                oc = a2[0] if a1 == (c, k) else a1[0]
                if oc not in cmap:
                    cmap[oc] = len(cmap)
                    queue.append(oc)
    signs = {c.id: c.sign for c in d.crossings}
    rows = tuple(
        (tuple(emap[e] for e in d.pd[c]), signs[c]) for c in order
    )
    arcs = tuple(sorted((amap[edge_arc[e]], emap[e]) for e in emap))
    col = None
    if colors is not None:
        col = tuple(colors[a] for a, _ in sorted(amap.items(), key=lambda kv: kv[1]))
    return (rows, arcs, d.free_loops, col)
