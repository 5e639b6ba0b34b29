"""Coloring-aware Reidemeister moves on PD rotation data.

All moves run on a mutable :class:`Workspace`; the public functions at the
bottom wrap a single move as a pure function on (Diagram, coloring).  Every
move keeps the coloring valid: colors of untouched arcs are kept and arcs
that a move creates get the one color the crossing equation allows.

A dart ``(c, k)`` names edge ``pd[c][k]`` traversed away from crossing ``c``;
the face it bounds lies on its right.  Faces are traced on demand so a move
costs time proportional to the faces it touches, not to the diagram size.
"""

from __future__ import annotations

from typing import Iterable

from .model import Crossing, Diagram, DiagramError, over_in_slot


class MoveError(DiagramError):
    """The requested move site is not legal in this diagram."""


R1_ADD = "R1+"
R1_REMOVE = "R1-"
R2_PUSH_OVER = "R2-push-over"
R2_PUSH_UNDER = "R2-push-under"
R2_PULL = "R2-pull"
R3 = "R3"
MOVE_KINDS = (R1_ADD, R1_REMOVE, R2_PUSH_OVER, R2_PUSH_UNDER, R2_PULL, R3)


def _rotate(slots, u_in, o_in):
    """Rotate a counterclockwise slot list so the under-in edge comes first."""
    rot = slots[u_in:] + slots[:u_in]
    oin = (o_in - u_in) % 4
    if oin not in (1, 3):
        raise AssertionError("over and under strands must alternate around a crossing")
    return rot, (1 if oin == 3 else -1)


class Workspace:
    """Mutable diagram plus coloring; moves edit it in place."""

    def __init__(self, d: Diagram, colors):
        if d.pd is None:
            raise MoveError("diagram has no rotation data; moves need it")
        missing = [a for a in d.arcs if a not in colors]
        if missing:
            raise MoveError(f"coloring misses arcs {missing[:5]}")
        self.pd: dict[int, list[int]] = {c: list(v) for c, v in d.pd.items()}
        self.sign: dict[int, int] = {c.id: c.sign for c in d.crossings}
        self.occ: dict[int, list[tuple[int, int]]] = {}
        for c in sorted(self.pd):
            for k, e in enumerate(self.pd[c]):
                self.occ.setdefault(e, []).append((c, k))
        self.edge_arc: dict[int, int] = dict(d.edge_arc)
        self.color: dict[int, int] = {a: colors[a] for a in d.arcs}
        self.free_loops = d.free_loops
        self.next_c, self.next_a, self.next_e = d.fresh_ids()
        self.records: list[dict] = []
        self.on_move = None  # optional callback(record) after every move

    # -- copying and export ------------------------------------------------

    def clone(self) -> "Workspace":
        w = object.__new__(Workspace)
        w.pd = {c: v[:] for c, v in self.pd.items()}
        w.sign = dict(self.sign)
        w.occ = {e: v[:] for e, v in self.occ.items()}
        w.edge_arc = dict(self.edge_arc)
        w.color = dict(self.color)
        w.free_loops = self.free_loops
        w.next_c, w.next_a, w.next_e = self.next_c, self.next_a, self.next_e
        w.records = list(self.records)
        w.on_move = self.on_move
        return w

    def crossing(self, c: int) -> Crossing:
        a, b, cc, _ = self.pd[c]
        ea = self.edge_arc
        return Crossing(c, ea[b], ea[a], ea[cc], self.sign[c])

    def freeze(self) -> tuple[Diagram, dict[int, int]]:
        crossings = tuple(self.crossing(c) for c in sorted(self.pd))
        arcs = tuple(sorted(set(self.edge_arc.values())))
        pd = {c: tuple(self.pd[c]) for c in sorted(self.pd)}
        d = Diagram(arcs=arcs, crossings=crossings, free_loops=self.free_loops, pd=pd,
                    next_ids=(self.next_c, self.next_a, self.next_e))
        return d, {a: self.color[a] for a in arcs}

    # -- local queries ---------------------------------------------------------

    def other_end(self, e: int, here: tuple[int, int]) -> tuple[int, int]:
        a, b = self.occ[e]
        return b if a == here else a

    def is_in_slot(self, c: int, k: int) -> bool:
        return k == 0 or k == (3 if self.sign[c] > 0 else 1)

    def head(self, e: int) -> tuple[int, int]:
        sign = self.sign
        for c, k in self.occ[e]:
            if k == 0 or k == (3 if sign[c] > 0 else 1):
                return (c, k)
        raise AssertionError(f"edge {e} has no head")

    def tail(self, e: int) -> tuple[int, int]:
        sign = self.sign
        for c, k in self.occ[e]:
            if k != 0 and k != (3 if sign[c] > 0 else 1):
                return (c, k)
        raise AssertionError(f"edge {e} has no tail")

    def face(self, dart: tuple[int, int]) -> list[tuple[int, int]]:
        start = (dart[0], dart[1])
        out = []
        cur = start
        while True:
            out.append(cur)
            c, k = cur
            nc, nk = self.other_end(self.pd[c][k], cur)
            cur = (nc, (nk + 1) % 4)
            if cur == start:
                return out
            if len(out) > 4 * len(self.pd) + 4:
                raise AssertionError("face walk did not close")

    def arc_color(self, e: int) -> int:
        return self.color[self.edge_arc[e]]

    def diff(self, c: int) -> int:
        s = self.pd[c]
        return abs(self.arc_color(s[1]) - self.arc_color(s[0]))

    def crossing_ok(self, c: int) -> bool:
        s = self.pd[c]
        return 2 * self.arc_color(s[1]) == self.arc_color(s[0]) + self.arc_color(s[2])

    # -- low level editing --------------------------------------------------

    def _fresh_edge(self) -> int:
        self.next_e += 1
        return self.next_e - 1

    def _fresh_crossing(self) -> int:
        self.next_c += 1
        return self.next_c - 1

    def _fresh_arc(self) -> int:
        self.next_a += 1
        return self.next_a - 1

    def _set(self, c: int, k: int, label: int) -> None:
        old = self.pd[c][k]
        if old == label:
            return
        lst = self.occ[old]
        lst.remove((c, k))
        if not lst:
            del self.occ[old]
        self.pd[c][k] = label
        self.occ.setdefault(label, []).append((c, k))

    def _add_crossing(self, cid: int, slots: list[int], sign: int) -> None:
        self.pd[cid] = list(slots)
        self.sign[cid] = sign
        for k, e in enumerate(slots):
            self.occ.setdefault(e, []).append((cid, k))

    def _drop_crossing(self, cid: int) -> None:
        for k, e in enumerate(self.pd[cid]):
            lst = self.occ[e]
            lst.remove((cid, k))
            if not lst:
                del self.occ[e]
        del self.pd[cid]
        del self.sign[cid]

    def _chain(self, e: int) -> list[int]:
        """Edges of the arc containing e, in flow order."""
        cur = e
        while True:
            c, k = self.tail(cur)
            if k == 2:
                break
            prev = self.pd[c][over_in_slot(self.sign[c])]
            if prev == e:
                # closed over-strand circle; start at the smallest label
                cyc = [e]
                x = e
                while True:
                    hc, hk = self.head(x)
                    x = self.pd[hc][(hk + 2) % 4]
                    if x == e:
                        break
                    cyc.append(x)
                i = cyc.index(min(cyc))
                return cyc[i:] + cyc[:i]
            cur = prev
        chain = [cur]
        while True:
            c, k = self.head(chain[-1])
            if k == 0:
                return chain
            chain.append(self.pd[c][(k + 2) % 4])

    def _rebuild_arcs(self, touched: Iterable[int], removed: Iterable[int]) -> tuple[list[int], list[int]]:
        """Recompute arcs around edited edges.

        Arcs keep their id when they still contain an edge that carried it.
        When an old arc is split, the piece holding its smallest surviving
        edge label keeps the id.  Pieces without a claim get fresh ids and
        colors forced by the crossing equations.  Returns (created, deleted)
        arc ids.
        """
        removed = [e for e in removed if e in self.edge_arc and e not in self.occ]
        old_ids = {self.edge_arc[e] for e in removed}
        chains: list[list[int]] = []
        seen: set[int] = set()
        for e in sorted(set(touched)):
            if e in self.occ and e not in seen:
                ch = self._chain(e)
                seen.update(ch)
                chains.append(ch)
        for ch in chains:
            for e in ch:
                if e in self.edge_arc:
                    old_ids.add(self.edge_arc[e])
        # who claims which old id, and with which smallest edge label
        claims: dict[int, list[tuple[int, int]]] = {}
        for i, ch in enumerate(chains):
            best: dict[int, int] = {}
            for e in ch:
                a = self.edge_arc.get(e)
                if a is not None and (a not in best or e < best[a]):
                    best[a] = e
            for a, e in best.items():
                claims.setdefault(a, []).append((e, i))
        assigned: dict[int, int] = {}
        for a in sorted(claims):
            for _e, i in sorted(claims[a]):
                if i not in assigned:
                    assigned[i] = a
                    break
        for e in removed:
            del self.edge_arc[e]
        created: list[int] = []
        order = sorted(range(len(chains)), key=lambda i: min(chains[i]))
        fresh: list[int] = []
        for i in order:
            if i not in assigned:
                a = self._fresh_arc()
                assigned[i] = a
                created.append(a)
                fresh.append(a)
        ea = self.edge_arc
        for i, ch in enumerate(chains):
            a = assigned[i]
            for e in ch:
                if ea.get(e) != a:
                    ea[e] = a
        alive = set(assigned.values())
        deleted = sorted(a for a in old_ids if a not in alive)
        for a in deleted:
            self.color.pop(a, None)
        if fresh:
            self._solve_colors(fresh, chains, assigned)
        return created, deleted

    def _solve_colors(self, fresh: list[int], chains, assigned) -> None:
        unknown = set(fresh)
        crossings: set[int] = set()
        for i, ch in enumerate(chains):
            if assigned[i] in unknown:
                for e in ch:
                    for c, _k in self.occ[e]:
                        crossings.add(c)
        pending = sorted(crossings)
        while unknown:
            progress = False
            for c in pending:
                s = self.pd[c]
                ui, o, uo = (self.edge_arc[s[0]], self.edge_arc[s[1]], self.edge_arc[s[2]])
                unk = {x for x in (ui, o, uo) if x in unknown}
                if len(unk) != 1:
                    continue
                x = unk.pop()
                if x == o and x not in (ui, uo):
                    total = self.color[ui] + self.color[uo]
                    if total % 2:
                        raise AssertionError("no integer color fits an over arc")
                    self.color[x] = total // 2
                elif x == ui and x != uo and x != o:
                    self.color[x] = 2 * self.color[o] - self.color[uo]
                elif x == uo and x != ui and x != o:
                    self.color[x] = 2 * self.color[o] - self.color[ui]
                elif x == ui == uo and x != o:
                    self.color[x] = self.color[o]
                elif x == o == ui and x != uo:
                    self.color[x] = self.color[uo]
                elif x == o == uo and x != ui:
                    self.color[x] = self.color[ui]
                else:
                    continue
                unknown.discard(x)
                progress = True
            if not progress:
                raise AssertionError(f"could not force colors for new arcs {sorted(unknown)}")

    def _finish(self, kind: str, site: dict, new_crossings: list[int], gone_crossings: list[int],
                new_edges: list[int], gone_edges: list[int], touched: Iterable[int],
                check: Iterable[int]) -> dict:
        created_arcs, deleted_arcs = self._rebuild_arcs(touched, gone_edges)
        for c in check:
            if c in self.pd and not self.crossing_ok(c):
                raise AssertionError(f"{kind} left crossing {c} badly colored")
        rec = {
            "move": kind,
            "site": site,
            "created": {"crossings": list(new_crossings), "arcs": created_arcs, "edges": list(new_edges)},
            "deleted": {"crossings": list(gone_crossings), "arcs": deleted_arcs, "edges": list(gone_edges)},
            "colors": {str(a): self.color[a] for a in created_arcs},
        }
        self.records.append(rec)
        if self.on_move is not None:
            self.on_move(rec)
        return rec

    # -- R2 ---------------------------------------------------------------

    def r2_push(self, mover: tuple[int, int], target: tuple[int, int], over: bool) -> dict:
        """Push a finger of the mover edge across the target edge.

        Both darts must bound the same face; the finger runs through that
        face and its tip ends up in the face on the far side of the target.
        ``over`` puts the mover on top.
        """
        ce, ie = mover
        cf, jf0 = target
        if ce not in self.pd or cf not in self.pd:
            raise MoveError("unknown crossing in R2 site")
        e = self.pd[ce][ie]
        f = self.pd[cf][jf0]
        if e == f:
            raise MoveError("R2 needs two distinct edges")
        face = self.face((ce, ie))
        if (cf, jf0) not in face:
            raise MoveError("R2 edges do not bound a common face")
        ce2, je = self.other_end(e, (ce, ie))
        cf2, jf = self.other_end(f, (cf, jf0))
        e_fwd = self.is_in_slot(ce2, je)
        f_fwd = self.is_in_slot(cf2, jf)
        new_edges = []

        def fresh():
            x = self._fresh_edge()
            new_edges.append(x)
            return x

        if e_fwd:
            e_east, e_tip, e_west = e, fresh(), fresh()
        else:
            e_west, e_tip, e_east = e, fresh(), fresh()
        if f_fwd:
            f_west, f_mid, f_east = f, fresh(), fresh()
        else:
            f_east, f_mid, f_west = f, fresh(), fresh()
        P = [e_west, f_mid, e_tip, f_west]
        Q = [e_east, f_east, e_tip, f_mid]
        e_p = (2, 0) if e_fwd else (0, 2)
        e_q = (0, 2) if e_fwd else (2, 0)
        f_p = (3, 1) if f_fwd else (1, 3)
        f_q = (3, 1) if f_fwd else (1, 3)
        if over:
            p_slots, p_sign = _rotate(P, f_p[0], e_p[0])
            q_slots, q_sign = _rotate(Q, f_q[0], e_q[0])
        else:
            p_slots, p_sign = _rotate(P, e_p[0], f_p[0])
            q_slots, q_sign = _rotate(Q, e_q[0], f_q[0])
        mover_arc = self.edge_arc[e]
        target_arc = self.edge_arc[f]
        self._set(ce, ie, e_east)
        self._set(ce2, je, e_west)
        self._set(cf, jf0, f_west)
        self._set(cf2, jf, f_east)
        p = self._fresh_crossing()
        q = self._fresh_crossing()
        self._add_crossing(p, p_slots, p_sign)
        self._add_crossing(q, q_slots, q_sign)
        site = {"mover": [ce, ie], "target": [cf, jf0], "mover_arc": mover_arc, "target_arc": target_arc}
        kind = R2_PUSH_OVER if over else R2_PUSH_UNDER
        return self._finish(kind, site, [p, q], [], new_edges, [],
                            touched=[e, f] + new_edges, check=[p, q, ce, ce2, cf, cf2])

    def bigon(self, c1: int, c2: int):
        """Darts of a cancellable bigon between c1 and c2, or None."""
        if c1 == c2 or c1 not in self.pd or c2 not in self.pd:
            return None
        for k in range(4):
            fc = self.face((c1, k))
            if len(fc) == 2 and fc[1][0] == c2:
                (a, ka), (b, kb) = fc
                g, h = self.pd[a][ka], self.pd[b][kb]
                jg = self.other_end(g, (a, ka))[1]
                jh = self.other_end(h, (b, kb))[1]
                if ka % 2 == jg % 2 and kb % 2 == jh % 2:
                    return fc
        return None

    def r2_pull(self, c1: int, c2: int) -> dict:
        fc = self.bigon(c1, c2)
        if fc is None:
            raise MoveError(f"crossings {c1} and {c2} do not bound a cancellable bigon")
        (a, ka), (b, kb) = fc
        g, h = self.pd[a][ka], self.pd[b][kb]
        jg = self.other_end(g, (a, ka))[1]
        jh = self.other_end(h, (b, kb))[1]
        links = [((a, (ka + 2) % 4), (b, (jg + 2) % 4)), ((b, (kb + 2) % 4), (a, (jh + 2) % 4))]
        site = {"crossings": sorted([c1, c2])}
        return self._splice(R2_PULL, site, [a, b], links)

    def _splice(self, kind: str, site: dict, gone: list[int], links) -> dict:
        """Delete crossings and reconnect the strands that ran through them.

        ``links`` pairs up slots of the deleted crossings that the strands
        join once the crossings are gone.  Each reconnected strand becomes a
        single edge, or a free loop if it closes up without meeting any
        remaining crossing.
        """
        gone_set = set(gone)
        partner = {}
        for x, y in links:
            partner[x] = y
            partner[y] = x
        visited: set[tuple[int, int]] = set()

        def walk(end):
            """Edges from a linked slot outwards; returns (edges, far end or None)."""
            edges = []
            cur = end
            while True:
                visited.add(cur)
                x = self.pd[cur[0]][cur[1]]
                edges.append(x)
                far = self.other_end(x, cur)
                if far[0] not in gone_set:
                    return edges, far
                visited.add(far)
                nxt = partner.get(far)
                if nxt is None:
                    raise AssertionError("strand enters the removed region without a link")
                if nxt in visited:
                    return edges, None
                cur = nxt

        keep: list[tuple[int, tuple[int, int]]] = []
        chained: set[int] = set()
        new_loops = 0
        for x, y in links:
            if x in visited:
                continue
            left, lend = walk(x)
            chained.update(left)
            if lend is None:
                new_loops += 1
                continue
            right, rend = walk(y)
            chained.update(right)
            if self.is_in_slot(*lend):
                first, far_last = right[-1], lend
            else:
                first, far_last = left[-1], rend
            keep.append((first, far_last))
        kept = {label for label, _ in keep}
        inner = {e for c in gone for e in self.pd[c]}
        for c in gone:
            self._drop_crossing(c)
        for label, (c, k) in keep:
            self._set(c, k, label)
        self.free_loops += new_loops
        gone_edges = sorted(e for e in (inner | chained) - kept if e not in self.occ)
        rec = self._finish(kind, site, [], sorted(gone), [], gone_edges, touched=sorted(kept),
                           check=[c for label in kept for c, _ in self.occ[label]])
        if new_loops:
            rec["created"]["free_loops"] = new_loops
        return rec

    # -- R1 ---------------------------------------------------------------

    def r1_add(self, dart: tuple[int, int], over_first: bool) -> dict:
        """Add a kink on the edge of ``dart``, inside the face on its right."""
        c, i = dart
        if c not in self.pd:
            raise MoveError("unknown crossing in R1 site")
        e = self.pd[c][i]
        c2, j = self.other_end(e, (c, i))
        fwd = self.is_in_slot(c2, j)
        loop = self._fresh_edge()
        piece = self._fresh_edge()
        if fwd:
            p1, p2 = e, piece
            first, second = (2, 0), (3, 1)
        else:
            p1, p2 = piece, e
            first, second = (1, 3), (0, 2)
        K = [loop, p2, p1, loop]
        over, under = (first, second) if over_first else (second, first)
        slots, sign = _rotate(K, under[0], over[0])
        arc = self.edge_arc[e]
        self._set(c, i, p1)
        self._set(c2, j, p2)
        k = self._fresh_crossing()
        self._add_crossing(k, slots, sign)
        site = {"dart": [c, i], "over_first": bool(over_first), "arc": arc}
        return self._finish(R1_ADD, site, [k], [], [loop, piece], [], touched=[e, loop, piece],
                            check=[k, c, c2])

    def r1_remove(self, k: int) -> dict:
        if k not in self.pd:
            raise MoveError(f"unknown crossing {k}")
        s = self.pd[k]
        for p in range(4):
            if s[p] == s[(p + 1) % 4]:
                links = [((k, (p + 2) % 4), (k, (p + 3) % 4))]
                return self._splice(R1_REMOVE, {"crossing": k}, [k], links)
        raise MoveError(f"crossing {k} is not a kink")

    # -- R3 ---------------------------------------------------------------

    def triangle_ok(self, dart: tuple[int, int]):
        fc = self.face(dart)
        if len(fc) != 3 or len({c for c, _ in fc}) != 3:
            return None
        kinds = []
        for c, k in fc:
            x = self.pd[c][k]
            _oc, ok = self.other_end(x, (c, k))
            kinds.append((k % 2) + (ok % 2))   # 2 top, 0 bottom, 1 middle
        if sorted(kinds) != [0, 1, 2]:
            return None
        return fc

    def r3(self, dart: tuple[int, int]) -> dict:
        """Slide across the triangular face to the right of ``dart``."""
        if dart[0] not in self.pd:
            raise MoveError("unknown crossing in R3 site")
        fc = self.triangle_ok(dart)
        if fc is None:
            raise MoveError("R3 site is not a triangle with a top, middle and bottom strand")
        old = {c: self.pd[c][:] for c, _ in fc}
        new = {c: self.pd[c][:] for c, _ in fc}
        new_edges = []
        tri_edges = []
        for c, k in fc:
            t = self.pd[c][k]
            tri_edges.append(t)
            d2, j = self.other_end(t, (c, k))
            ox = old[c][(k + 2) % 4]
            oy = old[d2][(j + 2) % 4]
            t2 = self._fresh_edge()
            new_edges.append(t2)
            new[c][k] = oy
            new[d2][j] = ox
            new[c][(k + 2) % 4] = t2
            new[d2][(j + 2) % 4] = t2
        order = sorted(old)
        signs = {c: self.sign[c] for c in order}
        touched = set(new_edges)
        for c in order:
            touched.update(old[c])
        for c in order:
            self._drop_crossing(c)
        mapping = {}
        for c in order:
            nc = self._fresh_crossing()
            mapping[c] = nc
            self._add_crossing(nc, new[c], signs[c])
        touched -= set(tri_edges)
        site = {"face": [list(x) for x in fc], "crossings": order}
        rec = self._finish(R3, site, [mapping[c] for c in order], order, new_edges, tri_edges,
                           touched=touched, check=list(mapping.values()))
        rec["site"]["replaced_by"] = {str(c): mapping[c] for c in order}
        return rec

    # -- replay -------------------------------------------------------------

    def apply(self, rec: dict) -> dict:
        """Re-run a recorded move from its site description."""
        kind = rec.get("move")
        site = rec.get("site", {})
        if kind in (R2_PUSH_OVER, R2_PUSH_UNDER):
            return self.r2_push(tuple(site["mover"]), tuple(site["target"]), kind == R2_PUSH_OVER)
        if kind == R2_PULL:
            a, b = site["crossings"]
            return self.r2_pull(a, b)
        if kind == R1_ADD:
            return self.r1_add(tuple(site["dart"]), bool(site["over_first"]))
        if kind == R1_REMOVE:
            return self.r1_remove(site["crossing"])
        if kind == R3:
            return self.r3(tuple(site["face"][0]))
        raise MoveError(f"unknown move kind {kind!r}")


# ---------------------------------------------------------------------------
# pure single-move wrappers


def _find_site(ws: Workspace, mover_arc: int, target_arc: int):
    for c in sorted(ws.pd):
        for k in range(4):
            if ws.edge_arc[ws.pd[c][k]] != mover_arc:
                continue
            for (fc, fk) in ws.face((c, k)):
                f = ws.pd[fc][fk]
                if ws.edge_arc[f] == target_arc and f != ws.pd[c][k]:
                    return (c, k), (fc, fk)
    raise MoveError(f"arcs {mover_arc} and {target_arc} share no face")


def _wrap(d, colors, fn):
    ws = Workspace(d, colors)
    rec = fn(ws)
    d2, col2 = ws.freeze()
    return d2, col2, rec


def r2_push_over(d: Diagram, colors, mover: int, target: int, site=None):
    """Push arc ``mover`` over arc ``target``; returns (diagram, coloring, record).

    ``site`` may give the two darts explicitly; otherwise the first shared
    face in crossing-id order is used.
    """
    def go(ws):
        m, t = site if site is not None else _find_site(ws, mover, target)
        return ws.r2_push(m, t, True)
    return _wrap(d, colors, go)


def r2_push_under(d: Diagram, colors, mover: int, target: int, site=None):
    def go(ws):
        m, t = site if site is not None else _find_site(ws, mover, target)
        return ws.r2_push(m, t, False)
    return _wrap(d, colors, go)


def r2_pull(d: Diagram, colors, pair: tuple[int, int]):
    return _wrap(d, colors, lambda ws: ws.r2_pull(*pair))


def r1_add(d: Diagram, colors, arc: int, over_first: bool = True, dart=None):
    def go(ws):
        site = dart
        if site is None:
            site = next(((c, k) for c in sorted(ws.pd) for k in range(4) if ws.edge_arc[ws.pd[c][k]] == arc), None)
            if site is None:
                raise MoveError(f"arc {arc} has no edge")
        return ws.r1_add(site, over_first)
    return _wrap(d, colors, go)


def r1_remove(d: Diagram, colors, crossing: int):
    return _wrap(d, colors, lambda ws: ws.r1_remove(crossing))


def r3_slide(d: Diagram, colors, dart: tuple[int, int]):
    return _wrap(d, colors, lambda ws: ws.r3(dart))


def triangle_sites(d: Diagram) -> list[tuple[int, int]]:
    """One dart for every face where an R3 move is legal."""
    ws = Workspace(d, {a: 0 for a in d.arcs})
    out, seen = [], set()
    for c in sorted(ws.pd):
        for k in range(4):
            if (c, k) in seen:
                continue
            fc = ws.face((c, k))
            seen.update(fc)
            if ws.triangle_ok((c, k)) is not None:
                out.append((c, k))
    return out


def bigon_pairs(d: Diagram) -> list[tuple[int, int]]:
    ws = Workspace(d, {a: 0 for a in d.arcs})
    out = set()
    for c in sorted(ws.pd):
        for k in range(4):
            fc = ws.face((c, k))
            if len(fc) == 2 and fc[0][0] != fc[1][0] and ws.bigon(fc[0][0], fc[1][0]):
                out.add(tuple(sorted((fc[0][0], fc[1][0]))))
    return sorted(out)
