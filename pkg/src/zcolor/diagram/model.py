"""Link diagram value type.

A diagram is stored two ways at once.  The arc-level view (arcs, crossings
with over/under_in/under_out arcs and a sign) is all the coloring code needs.
The optional planar view is a PD code: for every crossing the four incident
edge labels in counterclockwise order, starting with the incoming under edge.
Moves need the planar view because face structure decides where a move is
legal.

Orientation convention: slot 0 is the under strand coming in and slot 2 the
under strand going out.  A positive crossing has its over strand entering at
slot 3 and leaving at slot 1; a negative one enters at slot 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping


class DiagramError(ValueError):
    """Base class for diagram problems."""


class DiagramSyntaxError(DiagramError):
    pass


class DiagramValidityError(DiagramError):
    pass


@dataclass(frozen=True, order=True)
class Crossing:
    id: int
    over: int
    under_in: int
    under_out: int
    sign: int

    def arcs(self):
        return (self.under_in, self.over, self.under_out)


def over_in_slot(sign: int) -> int:
    return 3 if sign > 0 else 1


def in_slots(sign: int) -> tuple[int, int]:
    return (0, over_in_slot(sign))


@dataclass(frozen=True)
class Diagram:
    arcs: tuple[int, ...]
    crossings: tuple[Crossing, ...]
    free_loops: int = 0
    pd: Mapping[int, tuple[int, int, int, int]] | None = field(default=None, compare=True)
    # next fresh (crossing, arc, edge) ids; None means "one past the largest in use"
    next_ids: tuple[int, int, int] | None = None

    __hash__ = None  # type: ignore[assignment]

    @cached_property
    def crossing_map(self) -> dict[int, Crossing]:
        return {c.id: c for c in self.crossings}

    def crossing(self, cid: int) -> Crossing:
        return self.crossing_map[cid]

    @property
    def has_rotation(self) -> bool:
        return self.pd is not None

    @cached_property
    def edge_arc(self) -> dict[int, int]:
        """Arc id of every PD edge (empty when there is no planar view)."""
        if self.pd is None:
            return {}
        out: dict[int, int] = {}
        for c in self.crossings:
            a, b, cc, dd = self.pd[c.id]
            for e, arc in ((a, c.under_in), (cc, c.under_out), (b, c.over), (dd, c.over)):
                if out.setdefault(e, arc) != arc:
                    raise DiagramValidityError(f"edge {e} lies on two arcs ({out[e]} and {arc})")
        return out

    def fresh_ids(self) -> tuple[int, int, int]:
        if self.next_ids is not None:
            return self.next_ids
        nc = max((c.id for c in self.crossings), default=-1) + 1
        na = max(self.arcs, default=-1) + 1
        ne = max(self.edge_arc, default=-1) + 1
        return (nc, na, ne)

    def circle_arcs(self) -> tuple[int, ...]:
        """Arcs that never pass under anything (closed over-strand circles)."""
        under = set()
        for c in self.crossings:
            under.add(c.under_in)
            under.add(c.under_out)
        return tuple(a for a in self.arcs if a not in under)


# ---------------------------------------------------------------------------
# validation


def validate_diagram(d: Diagram) -> None:
    """Raise DiagramValidityError unless ``d`` is a well-formed diagram."""
    if d.free_loops < 0:
        raise DiagramValidityError("free_loops must be nonnegative")
    arcs = set(d.arcs)
    if len(arcs) != len(d.arcs):
        raise DiagramValidityError("duplicate arc id")
    seen_ids = set()
    n_in: dict[int, int] = {}
    n_out: dict[int, int] = {}
    used = set()
    for c in d.crossings:
        if c.id in seen_ids:
            raise DiagramValidityError(f"duplicate crossing id {c.id}")
        seen_ids.add(c.id)
        if c.sign not in (1, -1):
            raise DiagramValidityError(f"crossing {c.id}: sign must be +1 or -1")
        for a in c.arcs():
            if a not in arcs:
                raise DiagramValidityError(f"crossing {c.id} references undefined arc {a}")
            used.add(a)
        n_in[c.under_in] = n_in.get(c.under_in, 0) + 1
        n_out[c.under_out] = n_out.get(c.under_out, 0) + 1
    for a in d.arcs:
        i, o = n_in.get(a, 0), n_out.get(a, 0)
        if i > 1:
            raise DiagramValidityError(f"arc {a} appears {i} times as under_in")
        if o > 1:
            raise DiagramValidityError(f"arc {a} appears {o} times as under_out")
        if i != o:
            raise DiagramValidityError(f"arc {a} has an unmatched under end")
        if a not in used:
            raise DiagramValidityError(f"arc {a} touches no crossing (use free_loops)")
    if d.pd is not None:
        _validate_pd(d)


def _validate_pd(d: Diagram) -> None:
    pd = d.pd
    assert pd is not None
    if set(pd) != {c.id for c in d.crossings}:
        raise DiagramValidityError("rotation data does not cover exactly the crossings")
    heads: dict[int, int] = {}
    tails: dict[int, int] = {}
    for c in d.crossings:
        slots = pd[c.id]
        if len(slots) != 4:
            raise DiagramValidityError(f"crossing {c.id}: rotation needs 4 slots")
        oin = over_in_slot(c.sign)
        for k, e in enumerate(slots):
            book = heads if k in (0, oin) else tails
            book[e] = book.get(e, 0) + 1
    edges = set(heads) | set(tails)
    for e in edges:
        if heads.get(e, 0) != 1 or tails.get(e, 0) != 1:
            raise DiagramValidityError(f"edge {e} is not oriented consistently (needs one head, one tail)")
    edge_arc = d.edge_arc  # raises on conflicting arc labels
    # every arc is one chain of edges: walking over-passes must stay on the arc
    for c in d.crossings:
        slots = pd[c.id]
        if edge_arc[slots[1]] != edge_arc[slots[3]]:
            raise DiagramValidityError(f"crossing {c.id}: over edges on different arcs")
    chains = _count_edge_chains(d)
    if chains != len(d.arcs):
        raise DiagramValidityError("arc labels do not match the over-strand chains of the rotation data")
    _check_planarity(d)


def _other_end(occ, e, here):
    a, b = occ[e]
    return b if a == here else a


def edge_occurrences(pd: Mapping[int, tuple]) -> dict[int, list[tuple[int, int]]]:
    occ: dict[int, list[tuple[int, int]]] = {}
    for cid in sorted(pd):
        for k, e in enumerate(pd[cid]):
            occ.setdefault(e, []).append((cid, k))
    return occ


def _count_edge_chains(d: Diagram) -> int:
    """Number of maximal over-strand chains (arcs) in the rotation data."""
    pd = d.pd
    occ = edge_occurrences(pd)
    parent = {e: e for e in occ}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for cid, slots in pd.items():
        ra, rb = find(slots[1]), find(slots[3])
        if ra != rb:
            parent[ra] = rb
    return len({find(e) for e in occ})


def faces_of(pd: Mapping[int, tuple]) -> list[list[tuple[int, int]]]:
    """All faces as dart cycles.  A dart (c, k) leaves crossing c along slot k;
    the face lies to its right."""
    occ = edge_occurrences(pd)
    seen = set()
    faces = []
    for cid in sorted(pd):
        for k in range(4):
            if (cid, k) in seen:
                continue
            face = []
            cur = (cid, k)
            while cur not in seen:
                seen.add(cur)
                face.append(cur)
                c, s = cur
                nc, ns = _other_end(occ, pd[c][s], cur)
                cur = (nc, (ns + 1) % 4)
            faces.append(face)
    return faces


def _check_planarity(d: Diagram) -> None:
    pd = d.pd
    comps = crossing_graph_components(d)
    face_count: dict[int, int] = {}
    where = {}
    for i, comp in enumerate(comps):
        for c in comp:
            where[c] = i
    for face in faces_of(pd):
        i = where[face[0][0]]
        face_count[i] = face_count.get(i, 0) + 1
    for i, comp in enumerate(comps):
        if face_count.get(i, 0) != len(comp) + 2:
            raise DiagramValidityError("rotation data is not planar (Euler characteristic check failed)")


def crossing_graph_components(d: Diagram) -> list[list[int]]:
    """Crossings grouped by connectivity of the diagram as a plane graph."""
    parent = {c.id: c.id for c in d.crossings}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    by_arc: dict[int, int] = {}
    for c in d.crossings:
        for a in c.arcs():
            if a in by_arc:
                ra, rb = find(by_arc[a]), find(c.id)
                if ra != rb:
                    parent[ra] = rb
            else:
                by_arc[a] = c.id
    groups: dict[int, list[int]] = {}
    for c in d.crossings:
        groups.setdefault(find(c.id), []).append(c.id)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


# ---------------------------------------------------------------------------
# components and linking numbers


def components(d: Diagram) -> tuple[list[list[int]], int]:
    """Partition arcs into link components by under_in/under_out chaining.

    Returns (groups of arc ids, component count).  The count includes free
    loops, which own no arcs.  Groups are sorted by their smallest arc id.
    """
    parent = {a: a for a in d.arcs}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in d.crossings:
        ra, rb = find(c.under_in), find(c.under_out)
        if ra != rb:
            parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for a in sorted(d.arcs):
        groups.setdefault(find(a), []).append(a)
    out = sorted(groups.values(), key=lambda g: g[0])
    return out, len(out) + d.free_loops


def diagram_components(d: Diagram) -> list[list[int]]:
    """Arc sets of the connected pieces of the diagram drawn in the plane."""
    parent = {a: a for a in d.arcs}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in d.crossings:
        for a in (c.over, c.under_out):
            ra, rb = find(c.under_in), find(a)
            if ra != rb:
                parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for a in sorted(d.arcs):
        groups.setdefault(find(a), []).append(a)
    return sorted(groups.values(), key=lambda g: g[0])


def linking_matrix(d: Diagram) -> list[list[int]]:
    """Pairwise linking numbers, indexed like ``components(d)[0]``.

    Free loops link nothing and are left out of the matrix.
    """
    groups, _ = components(d)
    comp_of = {}
    for i, g in enumerate(groups):
        for a in g:
            comp_of[a] = i
    k = len(groups)
    twice = [[0] * k for _ in range(k)]
    for c in d.crossings:
        i, j = comp_of[c.over], comp_of[c.under_in]
        if i != j:
            twice[i][j] += c.sign
            twice[j][i] += c.sign
    out = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            if twice[i][j] % 2:
                raise DiagramValidityError(
                    f"odd signed crossing sum between components {i} and {j}; signs are inconsistent")
            out[i][j] = twice[i][j] // 2
    return out


def linking_graph_connected(d: Diagram) -> bool:
    """True when nonzero linking numbers connect all arc-carrying components.

    This certifies non-splittability; False only means "not certified".
    """
    m = linking_matrix(d)
    k = len(m)
    if d.free_loops or k == 0:
        return k == 1 and not d.free_loops
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(k):
            if m[i][j] and j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == k


# ---------------------------------------------------------------------------
# file format


def diagram_to_json(d: Diagram) -> dict:
    obj = {
        "arcs": sorted(d.arcs),
        "crossings": [
            {"id": c.id, "over": c.over, "under_in": c.under_in, "under_out": c.under_out, "sign": c.sign}
            for c in sorted(d.crossings)
        ],
        "free_loops": d.free_loops,
        "rotation": {},
    }
    if d.pd is not None:
        obj["rotation"] = {
            "pd": {str(cid): list(d.pd[cid]) for cid in sorted(d.pd)},
            "next_ids": list(d.fresh_ids()),
        }
    return obj


def dump_diagram(d: Diagram) -> str:
    return json.dumps(diagram_to_json(d), indent=1) + "\n"


def _as_int(x, what):
    if isinstance(x, bool) or not isinstance(x, int):
        raise DiagramSyntaxError(f"{what} must be an integer, got {x!r}")
    return x


def diagram_from_json(obj) -> Diagram:
    if not isinstance(obj, dict):
        raise DiagramSyntaxError("diagram file must hold a JSON object")
    try:
        arcs = tuple(_as_int(a, "arc id") for a in obj["arcs"])
        raw = obj["crossings"]
    except KeyError as exc:
        raise DiagramSyntaxError(f"missing field {exc}") from None
    except TypeError:
        raise DiagramSyntaxError("arcs must be a list") from None
    crossings = []
    if not isinstance(raw, list):
        raise DiagramSyntaxError("crossings must be a list")
    for item in raw:
        if not isinstance(item, dict):
            raise DiagramSyntaxError("each crossing must be an object")
        try:
            crossings.append(Crossing(*(_as_int(item[k], k) for k in ("id", "over", "under_in", "under_out", "sign"))))
        except KeyError as exc:
            raise DiagramSyntaxError(f"crossing missing field {exc}") from None
    free = _as_int(obj.get("free_loops", 0), "free_loops")
    rot = obj.get("rotation") or {}
    if not isinstance(rot, dict):
        raise DiagramSyntaxError("rotation must be an object")
    pd = None
    next_ids = None
    if rot:
        try:
            pd = {int(k): tuple(_as_int(e, "edge label") for e in v) for k, v in rot["pd"].items()}
        except (KeyError, AttributeError, ValueError, TypeError):
            raise DiagramSyntaxError("rotation.pd must map crossing ids to 4 edge labels") from None
        if "next_ids" in rot:
            ni = rot["next_ids"]
            if not isinstance(ni, list) or len(ni) != 3:
                raise DiagramSyntaxError("rotation.next_ids must be a list of 3 integers")
            next_ids = tuple(_as_int(x, "next id") for x in ni)
    d = Diagram(arcs=tuple(sorted(arcs)), crossings=tuple(sorted(crossings)), free_loops=free,
                pd=pd, next_ids=next_ids)
    if len(set(arcs)) != len(arcs):
        raise DiagramValidityError("duplicate arc id")
    validate_diagram(d)
    if next_ids is not None:
        _check_next_ids(d)
    return d


def _check_next_ids(d: Diagram) -> None:
    nc, na, ne = d.next_ids
    if any(c.id >= nc for c in d.crossings) or any(a >= na for a in d.arcs) or any(e >= ne for e in d.edge_arc):
        raise DiagramValidityError("next_ids must exceed every id in use")


def parse_diagram(text: str) -> Diagram:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramSyntaxError(f"malformed JSON: {exc}") from None
    return diagram_from_json(obj)


def from_pd(pd: Mapping[int, tuple], signs: Mapping[int, int] | None = None, free_loops: int = 0,
            arc_ids: Mapping[int, int] | None = None) -> Diagram:
    """Build a diagram from rotation data alone.

    Signs default to what slot positions imply once edge orientation is read
    off the labels; pass ``signs`` when the PD code alone is ambiguous.  Arcs
    are numbered in order of their smallest edge label unless ``arc_ids``
    maps edges to arc ids.
    """
    pd = {int(k): tuple(v) for k, v in pd.items()}
    if signs is None:
        signs = infer_signs(pd)
    occ = edge_occurrences(pd)
    parent = {e: e for e in occ}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for slots in pd.values():
        ra, rb = find(slots[1]), find(slots[3])
        if ra != rb:
            parent[ra] = rb
    chains: dict[int, list[int]] = {}
    for e in sorted(occ):
        chains.setdefault(find(e), []).append(e)
    edge_arc = {}
    if arc_ids is None:
        for i, chain in enumerate(sorted(chains.values(), key=lambda ch: ch[0])):
            for e in chain:
                edge_arc[e] = i
    else:
        edge_arc = dict(arc_ids)
    crossings = []
    for cid in sorted(pd):
        a, b, c, _ = pd[cid]
        crossings.append(Crossing(cid, edge_arc[b], edge_arc[a], edge_arc[c], signs[cid]))
    d = Diagram(arcs=tuple(sorted(set(edge_arc.values()))), crossings=tuple(crossings),
                free_loops=free_loops, pd=pd)
    validate_diagram(d)
    return d


def infer_signs(pd: Mapping[int, tuple]) -> dict[int, int]:
    """Recover crossing signs from a PD code.

    Under strands are oriented by convention (slot 0 in, slot 2 out).  Over
    strands inherit orientation from whatever their edges connect to.  A
    component that never passes under anything has no preferred direction;
    it is oriented arbitrarily by fixing one of its crossings as positive.
    """
    occ = edge_occurrences(pd)
    sign: dict[int, int] = {}

    def end_kind(c, k):
        """'in', 'out' or None for the slot k of crossing c."""
        if k == 0:
            return "in"
        if k == 2:
            return "out"
        if c not in sign:
            return None
        return "in" if k == over_in_slot(sign[c]) else "out"

    pending = sorted(pd)
    while pending:
        progress = True
        while progress:
            progress = False
            for cid in pending:
                if cid in sign:
                    continue
                for k in (1, 3):
                    oc, os = _other_end(occ, pd[cid][k], (cid, k))
                    kind = end_kind(oc, os)
                    if kind is None:
                        continue
                    # the far end is a head, so this slot is a tail, and vice versa
                    here_in = kind == "out"
                    oin = k if here_in else (k + 2) % 4
                    sign[cid] = 1 if oin == 3 else -1
                    progress = True
                    break
            pending = [c for c in pending if c not in sign]
        if pending:
            sign[pending[0]] = 1
            pending = pending[1:]
    return sign
