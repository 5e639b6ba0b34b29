"""Rewrite a coloring until every crossing diff is 0 or one common value.

The basic step takes two adjacent crossings with diffs n < m that share a
strand S and replaces the m-diff crossing by crossings of diff m - n (twice)
and |m - 2n|, using one R2 push and one R3 slide.  That only works when the
two crossings sit next to each other on S, play the same role for S (both
over or both under) and push S's color the same way.  Otherwise a finger of
the n-diff crossing's other strand is first dragged along S, passing over the
0-diff strands in between, and pushed across S right before the m-diff
crossing.  The finger creates only n-diff crossings, and its last crossing
is a fresh partner with the right role and direction.

Every step removes a crossing of diff m and adds crossings of smaller diff,
so the multiset of diffs drops in the multiset order and the loops below
terminate.  The step is checked at runtime rather than trusted.
"""

from __future__ import annotations

import hashlib
import warnings
from collections import Counter
from dataclasses import dataclass, field
from math import gcd

from .coloring import DiffProfile, diffs, validate
from .diagram import Diagram, MoveError, Workspace, dump_diagram, linking_graph_connected

RIGHT, LEFT = 0, 1
DEFAULT_BUDGET = 100000


class ReductionError(RuntimeError):
    pass


class PreconditionError(ReductionError):
    pass


class BudgetExceeded(ReductionError):
    pass


class StuckError(ReductionError):
    """No adjacent pair with distinct diffs is left, yet the coloring is not simple."""


class InvariantError(ReductionError):
    pass


@dataclass(frozen=True)
class CaseClass:
    case: int
    subcase: int
    roles: tuple[str, str]      # role of the connecting strand at the small, big crossing
    aligned: bool
    small_first: bool

    def to_json(self):
        return {"case": self.case, "subcase": self.subcase, "roles": list(self.roles),
                "aligned": self.aligned, "small_first": self.small_first}


@dataclass(frozen=True)
class AdjacentPair:
    c1: int
    c2: int
    n: int
    m: int
    path: tuple[int, ...]
    case_class: CaseClass
    exit_slot: int = field(default=0, compare=False)               # where S leaves c1
    steps: tuple[tuple[int, int], ...] = field(default=(), compare=False)  # (crossing, entry slot) up to c2

    def to_json(self):
        return {"c1": self.c1, "c2": self.c2, "n": self.n, "m": self.m, "path": list(self.path),
                "case_class": self.case_class.to_json()}


@dataclass
class ReductionReport:
    input_id: str
    output_id: str
    input_profile: DiffProfile
    output_profile: DiffProfile
    steps: int
    trace: list = field(repr=False)
    measure_history: list
    pairs: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "input_id": self.input_id,
            "output_id": self.output_id,
            "input_profile": self.input_profile.to_json(),
            "output_profile": self.output_profile.to_json(),
            "steps": self.steps,
            "measure_history": [list(m) for m in self.measure_history],
            "pairs": self.pairs,
            "warnings": self.warnings,
        }


def diagram_id(d: Diagram) -> str:
    return hashlib.sha256(dump_diagram(d).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# termination measure


def termination_measure(profile: DiffProfile) -> list[int]:
    if profile.gcd_nonzero == 0:
        raise ValueError("all diffs are zero; the measure is undefined")
    g = profile.gcd_nonzero
    return sorted(v // g for v in profile.diffs.values() if v)


def dm_less(new, old) -> bool:
    """Dershowitz-Manna order on multisets of integers: is ``new`` < ``old``?"""
    a, b = Counter(new), Counter(old)
    if a == b:
        return False
    extra = a - b
    gone = b - a
    return all(any(y > x for y in gone) for x in extra)


# ---------------------------------------------------------------------------
# strand walking


def _role(slot: int) -> str:
    return "over" if slot % 2 else "under"


def _sgn(x: int) -> int:
    return (x > 0) - (x < 0)


class _Created:
    """Crossings created since a given record and still alive, kept up to
    date incrementally; call the object to get the current set."""

    def __init__(self, ws: Workspace, start_rec: int):
        self.ws = ws
        self.pos = start_rec
        self.alive: set[int] = set()

    def __call__(self) -> set[int]:
        recs = self.ws.records
        while self.pos < len(recs):
            rec = recs[self.pos]
            self.alive.update(rec["created"]["crossings"])
            self.alive.difference_update(rec["deleted"]["crossings"])
            self.pos += 1
        return self.alive


class _Engine:
    """Reduction steps on a workspace."""

    def __init__(self, ws: Workspace, budget: int | None = None):
        self.ws = ws
        self.budget = budget
        self.start = len(ws.records)
        # a crossing keeps its diff for as long as it lives (moves never
        # recolor surviving arcs, and ids are not reused), so cache it
        self._diffs: dict[int, int] = {}
        if budget is not None:
            ws.on_move = self._count

    def _count(self, rec):
        if len(self.ws.records) - self.start > self.budget:
            raise BudgetExceeded(f"move budget of {self.budget} exhausted")

    @property
    def moves(self) -> int:
        return len(self.ws.records) - self.start

    # -- queries ------------------------------------------------------------

    def diff(self, c: int) -> int:
        v = self._diffs.get(c)
        if v is None:
            v = self._diffs[c] = self.ws.diff(c)
        return v

    def walks_from(self, a: int):
        """Walks from crossing a along its strands, through 0-diff crossings,
        to the next nonzero crossing.  Yields (exit slot, steps)."""
        ws = self.ws
        limit = 2 * len(ws.pd) + 2
        for start in range(4):
            steps = []
            cur = (a, start)
            while len(steps) <= limit:
                e = ws.pd[cur[0]][cur[1]]
                x, j = ws.other_end(e, cur)
                steps.append((x, j))
                if x == a or ws.diff(x):
                    break
                cur = (x, (j + 2) % 4)
            yield start, steps

    def neighbours(self, a: int, simple_only: bool = True):
        """Nonzero crossings adjacent to a, as (crossing, exit slot, steps).

        By default only walks that meet every crossing once are returned: a
        finger dragged along a strand that later crosses itself would have
        to cross its own earlier stretch, which the tongue does not handle.
        """
        out = []
        for start, steps in self.walks_from(a):
            x = steps[-1][0]
            if x == a or not self.diff(x):
                continue
            if simple_only and len({c for c, _ in steps}) < len(steps):
                continue
            out.append((x, start, steps))
        return out

    def walk_between(self, a: int, b: int):
        best = None
        for x, start, steps in self.neighbours(a):
            if x == b and (best is None or len(steps) < len(best[1])):
                best = (start, steps)
        return best

    def gradient(self, x: int, slot: int, b: int, entering: bool) -> int:
        """Direction in which crossing x pushes S's color b.

        When S goes over, this is the color of x's other strand on S's right;
        when S goes under, the color of the strand on top.
        """
        ws = self.ws
        if slot % 2:
            k = (slot + 1) % 4 if entering else (slot - 1) % 4
            return _sgn(ws.arc_color(ws.pd[x][k]) - b)
        return _sgn(ws.arc_color(ws.pd[x][1]) - b)

    def classify_walk(self, a: int, start: int, steps) -> CaseClass:
        ws = self.ws
        b_id = steps[-1][0]
        b = ws.arc_color(ws.pd[a][start])
        jb = steps[-1][1]
        small_first = True
        small, big = (a, b_id)
        s_slot, b_slot = start, jb
        if self.diff(a) > self.diff(b_id):
            small, big = b_id, a
            s_slot, b_slot = jb, start
            small_first = False
        g_small = self.gradient(small, s_slot, b, entering=not small_first)
        g_big = self.gradient(big, b_slot, b, entering=small_first)
        # gradients are read with S pointing from a to b; entering/exiting
        # only changes which slot is on the right
        aligned = g_small == g_big
        roles = (_role(s_slot), _role(b_slot))
        case = {("over", "over"): 1, ("over", "under"): 2, ("under", "under"): 3, ("under", "over"): 4}[roles]
        # orientation of S: does it flow from a to b?
        flows = ws.is_in_slot(*ws.other_end(ws.pd[a][start], (a, start)))
        order_first = small_first == flows
        if case == 4:
            subcase = 1 + (0 if aligned else 1) + (0 if order_first else 2)
        else:
            subcase = 1 if aligned else 2
        return CaseClass(case, subcase, roles, aligned, order_first)

    def adjacent_pairs(self) -> list[AdjacentPair]:
        ws = self.ws
        out = []
        for a in sorted(ws.pd):
            if not self.diff(a):
                continue
            oin = 3 if ws.sign[a] > 0 else 1
            for start in (2, (oin + 2) % 4):      # follow both strands forward
                for s, steps in self.walks_from(a):
                    if s != start:
                        continue
                    x = steps[-1][0]
                    if x == a or not self.diff(x):
                        continue
                    cc = self.classify_walk(a, s, steps)
                    out.append(AdjacentPair(a, x, self.diff(a), self.diff(x),
                                            tuple(c for c, _ in steps[:-1]), cc, s, tuple(steps)))
        out.sort(key=lambda p: (min(p.c1, p.c2), max(p.c1, p.c2), p.c1, p.exit_slot))
        return out

    # -- faces around S ---------------------------------------------------

    def side_dart(self, x: int, exit_slot: int, side: int):
        dart = (x, exit_slot)
        if side == RIGHT:
            return dart
        return self.ws.other_end(self.ws.pd[x][exit_slot], dart)

    @staticmethod
    def _dart_for(ws: Workspace, face, edge):
        for c, k in face:
            if ws.pd[c][k] == edge:
                return (c, k)
        return None

    # -- the two local programs ------------------------------------------

    def gadget(self, p: int, p_exit: int, big: int, jb: int):
        """R2 + R3 on consecutive crossings with equal roles and aligned colors."""
        ws = self.ws
        over = p_exit % 2 == 1
        if (jb % 2 == 1) != over:
            raise InvariantError("gadget needs the same role at both crossings")
        for side in (RIGHT, LEFT):
            if side == RIGHT:
                tp = ws.pd[p][(p_exit - 1) % 4]
                tb = ws.pd[big][(jb + 1) % 4]
            else:
                tp = ws.pd[p][(p_exit + 1) % 4]
                tb = ws.pd[big][(jb - 1) % 4]
            if tp == tb:
                continue
            sd = self.side_dart(p, p_exit, side)
            face = ws.face(sd)
            mover, target = (tp, tb) if over else (tb, tp)
            dm = self._dart_for(ws, face, mover)
            dt = self._dart_for(ws, face, target)
            if dm is None or dt is None:
                continue
            ws.r2_push(dm, dt, True)
            sd = self.side_dart(p, p_exit, side)
            if ws.triangle_ok(sd) is None:
                raise InvariantError("expected a triangle next to the connecting strand")
            rec = ws.r3(sd)
            return rec
        raise InvariantError("no side admits the R2/R3 gadget")

    def tongue(self, a: int, exit_slot: int, steps, side: int, over_s: bool):
        """Drag a finger of a's other strand along S and push it across S
        just before the last crossing of ``steps``.  Returns the new crossing
        next to that last crossing and the slot through which S leaves it."""
        ws = self.ws
        if side == RIGHT:
            tau = ws.pd[a][(exit_slot - 1) % 4]
        else:
            tau = ws.pd[a][(exit_slot + 1) % 4]
        prev = (a, exit_slot)
        for w, j in steps[:-1]:
            omega = ws.pd[w][(j + 1) % 4] if side == RIGHT else ws.pd[w][(j - 1) % 4]
            if omega == tau:
                raise MoveError("finger would cross its own edge")
            face = ws.face(self.side_dart(prev[0], prev[1], side))
            dm = self._dart_for(ws, face, tau)
            dt = self._dart_for(ws, face, omega)
            if dm is None or dt is None:
                raise InvariantError("finger lost track of its face")
            rec = ws.r2_push(dm, dt, True)
            tau = rec["created"]["edges"][0]
            prev = (w, (j + 2) % 4)
        big, jb = steps[-1]
        sdart = self.side_dart(prev[0], prev[1], side)
        face = ws.face(sdart)
        dm = self._dart_for(ws, face, tau)
        if dm is None:
            raise InvariantError("finger lost track of its face")
        ws.r2_push(dm, sdart, over_s)
        e = ws.pd[big][jb]
        f2, k = ws.other_end(e, (big, jb))
        return f2, k

    def _predict(self, a: int, a_exit: int, b: int, side: int, over_s: bool):
        """Role and gradient of the finger crossing a tongue would create."""
        ws = self.ws
        k = (a_exit - 1) % 4 if side == RIGHT else (a_exit + 1) % 4
        c = ws.arc_color(ws.pd[a][k])
        if over_s:
            return "under", _sgn(c - b)
        tr = c if side == RIGHT else 2 * b - c
        return "over", _sgn(tr - b)

    def reduce_big(self, small: int, big: int) -> set[int]:
        """Replace crossing ``big`` using its neighbour ``small`` (smaller diff).

        Returns the ids of crossings created and still alive.
        """
        ws = self.ws
        m = self.diff(big)
        n = self.diff(small)
        if not 0 < n < m:
            raise PreconditionError(f"need 0 < diff({small}) < diff({big}), got {n}, {m}")
        found = self.walk_between(small, big)
        if found is None:
            raise PreconditionError(f"crossings {small} and {big} are not adjacent")
        start_rec = len(ws.records)
        exit_slot, steps = found
        self._reduce_walk(small, exit_slot, steps)
        created: set[int] = set()
        for rec in ws.records[start_rec:]:
            created.update(rec["created"]["crossings"])
            created.difference_update(rec["deleted"]["crossings"])
        if big in ws.pd:
            raise InvariantError(f"crossing {big} survived its reduction")
        bad = [c for c in created if self.diff(c) >= m]
        if bad:
            raise InvariantError(f"reduction of a {m}-diff crossing created diffs {[self.diff(c) for c in bad]}")
        return created

    def _reduce_walk(self, small: int, exit_slot: int, steps, depth: int = 0):
        ws = self.ws
        big, jb = steps[-1]
        b = ws.arc_color(ws.pd[small][exit_slot])
        r_small, r_big = _role(exit_slot), _role(jb)
        g_small = self.gradient(small, exit_slot, b, entering=False)
        g_big = self.gradient(big, jb, b, entering=True)
        if len(steps) == 1 and r_small == r_big and g_small == g_big:
            self.gadget(small, exit_slot, big, jb)
            return
        if depth > 1:
            raise InvariantError("finger construction did not produce an aligned pair")
        options = [(RIGHT, True), (LEFT, True), (RIGHT, False), (LEFT, False)]
        first_tau_ok = {}
        for side in (RIGHT, LEFT):
            tau = ws.pd[small][(exit_slot - 1) % 4] if side == RIGHT else ws.pd[small][(exit_slot + 1) % 4]
            ok = True
            if len(steps) > 1:
                w, j = steps[0]
                omega = ws.pd[w][(j + 1) % 4] if side == RIGHT else ws.pd[w][(j - 1) % 4]
                ok = omega != tau
            first_tau_ok[side] = ok
        for side, over_s in options:
            if not first_tau_ok[side]:
                continue
            role, g = self._predict(small, exit_slot, b, side, over_s)
            if role == r_big and g == g_big:
                f2, k = self.tongue(small, exit_slot, steps, side, over_s)
                self._reduce_walk(f2, k, [(big, jb)], depth + 1)
                return
        # two fingers: first one with the opposite role, then a second from it
        for side, over_s in options:
            if not first_tau_ok[side]:
                continue
            role, _g = self._predict(small, exit_slot, b, side, over_s)
            if role != r_big:
                f2, k = self.tongue(small, exit_slot, steps, side, over_s)
                self._reduce_walk(f2, k, [(big, jb)], depth + 1)
                return
        raise InvariantError("no finger can reach the big crossing")

    # -- reduction loops -------------------------------------------------------

    def created_since(self, start_rec: int) -> "_Created":
        return _Created(self.ws, start_rec)

    def best_partner(self, x: int, unit: int):
        # the closest smaller diff wins: reducing m against n leaves m-n twice and
        # |m-2n|, so a near partner shrinks q quickly while the smallest one makes
        # the work grow exponentially in q
        dx = self.diff(x)
        best = None
        for y, _s, _steps in self.neighbours(x):
            dy = self.diff(y)
            if 0 < dy < dx and dy % unit == 0:
                key = (-dy, y)
                if best is None or key < best[0]:
                    best = (key, y)
        return None if best is None else best[1]

    def clean_region(self, region_fn, unit: int, done=None):
        """Reduce region crossings until their diffs lie in {0, unit}."""
        while True:
            if done is not None and done():
                return
            region = region_fn()
            bad = sorted((c for c in region if self.diff(c) not in (0, unit)),
                         key=lambda c: (-self.diff(c), c))
            if not bad:
                return
            for x in bad:
                y = self.best_partner(x, unit)
                if y is not None:
                    self.reduce_big(y, x)
                    break
            else:
                # let a bad crossing serve as partner for a larger neighbour
                for x in sorted(bad, key=lambda c: (self.diff(c), c)):
                    dx = self.diff(x)
                    bigger = [y for y, _s, _t in self.neighbours(x) if self.diff(y) > dx and self.diff(y) % unit == 0]
                    if bigger:
                        self.reduce_big(x, min(bigger, key=lambda y: (-self.diff(y), y)))
                        break
                else:
                    raise StuckError(f"region crossings {bad[:6]} have no usable neighbour")


# ---------------------------------------------------------------------------
# public operations


def _start(d: Diagram, gamma):
    if not validate(d, gamma):
        raise PreconditionError("coloring is not valid")
    return Workspace(d, gamma)


def _report(d_in, g_in, d_out, g_out, eng: _Engine, history, pairs, warn_list) -> ReductionReport:
    return ReductionReport(diagram_id(d_in), diagram_id(d_out), diffs(d_in, g_in), diffs(d_out, g_out),
                           eng.moves, eng.ws.records[eng.start:], history, pairs, warn_list)


def find_adjacent_pairs(d: Diagram, gamma) -> list[AdjacentPair]:
    return _Engine(_start(d, gamma)).adjacent_pairs()


def classify(d: Diagram, gamma, pair: AdjacentPair) -> CaseClass:
    eng = _Engine(_start(d, gamma))
    found = eng.walk_between(pair.c1, pair.c2)
    if found is None:
        raise PreconditionError("pair is not adjacent")
    return eng.classify_walk(pair.c1, found[0], found[1])


def _pair_ids(pair):
    if isinstance(pair, AdjacentPair):
        return pair.c1, pair.c2
    return tuple(pair)


def _small_big(eng: _Engine, pair):
    a, b = _pair_ids(pair)
    if a not in eng.ws.pd or b not in eng.ws.pd:
        raise PreconditionError("pair refers to unknown crossings")
    if eng.walk_between(a, b) is None:
        raise PreconditionError(f"crossings {a} and {b} are not adjacent")
    return (a, b) if eng.diff(a) <= eng.diff(b) else (b, a)


def eliminate_multiple(d: Diagram, gamma, pair, budget: int | None = DEFAULT_BUDGET):
    """Remove the m-diff crossing of a pair with m = q*n, q >= 2, leaving
    only 0- or n-diff crossings among the ones created on the way."""
    ws = _start(d, gamma)
    eng = _Engine(ws, budget)
    small, big = _small_big(eng, pair)
    n, m = eng.diff(small), eng.diff(big)
    if n == 0 or m % n or m // n < 2:
        raise PreconditionError(f"eliminate_multiple needs m = q*n with q >= 2, got n={n}, m={m}")
    prof0 = diffs(d, gamma)
    start = len(ws.records)
    eng.reduce_big(small, big)
    eng.clean_region(eng.created_since(start), n)
    d2, g2 = ws.freeze()
    rep = _report(d, gamma, d2, g2, eng, [termination_measure(prof0), termination_measure(diffs(d2, g2))],
                  [{"c1": small, "c2": big, "n": n, "m": m}], [])
    return d2, g2, rep


def euclid_step(d: Diagram, gamma, pair, budget: int | None = DEFAULT_BUDGET):
    """For n = z and m = q*z + r with 0 < r < z, produce an r-diff crossing
    adjacent to a z-diff crossing.  Returns (diagram, coloring, new pair, report)."""
    ws = _start(d, gamma)
    eng = _Engine(ws, budget)
    small, big = _small_big(eng, pair)
    z, m = eng.diff(small), eng.diff(big)
    if z == 0 or m % z == 0:
        raise PreconditionError("euclid_step needs m not a multiple of z (use eliminate_multiple)")
    r = m % z
    prof0 = diffs(d, gamma)
    start = len(ws.records)
    found: list = []

    def done():
        for c in sorted(created()):
            if eng.diff(c) == r:
                for y, _s, _t in eng.neighbours(c):
                    if eng.diff(y) == z:
                        found.append((y, c))
                        return True
        return False

    eng.reduce_big(small, big)
    created = eng.created_since(start)
    eng.clean_region(lambda: {c for c in created() if eng.diff(c) > z}, z, done=done)
    if not found and not done():
        raise StuckError("Euclid step did not expose an r-diff crossing next to a z-diff one")
    d2, g2 = ws.freeze()
    eng2 = _Engine(Workspace(d2, g2))
    y, c = found[0]
    ex, steps = eng2.walk_between(y, c)
    cc = eng2.classify_walk(y, ex, steps)
    new_pair = AdjacentPair(y, c, z, r, tuple(x for x, _ in steps[:-1]), cc, ex, tuple(steps))
    rep = _report(d, gamma, d2, g2, eng, [termination_measure(prof0), termination_measure(diffs(d2, g2))],
                  [{"c1": small, "c2": big, "n": z, "m": m}], [])
    return d2, g2, new_pair, rep


def _reduce_pair(eng: _Engine, small: int, big: int):
    n, m = eng.diff(small), eng.diff(big)
    d = gcd(n, m)
    if n == m:
        return
    start = len(eng.ws.records)
    keep = {small, big}
    created = eng.created_since(start)

    def region():
        return created() | {c for c in keep if c in eng.ws.pd}

    eng.clean_region(region, d)


def reduce_pair_to_gcd(d: Diagram, gamma, pair, budget: int | None = DEFAULT_BUDGET):
    ws = _start(d, gamma)
    eng = _Engine(ws, budget)
    small, big = _small_big(eng, pair)
    n, m = eng.diff(small), eng.diff(big)
    if n == 0:
        raise PreconditionError("pair crossings must have nonzero diffs")
    prof0 = diffs(d, gamma)
    _reduce_pair(eng, small, big)
    d2, g2 = ws.freeze()
    hist = [termination_measure(prof0), termination_measure(diffs(d2, g2))]
    rep = _report(d, gamma, d2, g2, eng, hist, [{"c1": small, "c2": big, "n": n, "m": m}], [])
    return d2, g2, rep


def select_pair(pairs: list[AdjacentPair], g: int):
    mixed = [p for p in pairs if p.n != p.m]
    if not mixed:
        return None
    return min(mixed, key=lambda p: (-max(p.n, p.m) // g, min(p.c1, p.c2), max(p.c1, p.c2)))


def _current_profile(ws: Workspace) -> DiffProfile:
    out = {}
    g = 0
    for c in sorted(ws.pd):
        v = ws.diff(c)
        out[c] = v
        g = gcd(g, v)
    return DiffProfile(out, g)


def make_simple(d: Diagram, gamma, budget: int = DEFAULT_BUDGET):
    """Rewrite (d, gamma) until gamma is simple; returns (diagram, coloring, report)."""
    if not validate(d, gamma):
        raise PreconditionError("coloring is not valid")
    if len(set(gamma.values())) <= 1:
        raise PreconditionError("coloring is trivial")
    prof0 = diffs(d, gamma)
    if prof0.gcd_nonzero == 0:
        raise PreconditionError("every crossing has diff 0; nothing to reduce")
    warn_list = []
    if not linking_graph_connected(d):
        msg = "linking numbers do not certify the link as non-splittable"
        warn_list.append(msg)
        warnings.warn(msg, stacklevel=2)
    ws = Workspace(d, gamma)
    eng = _Engine(ws, budget)
    D = prof0.gcd_nonzero
    history = [termination_measure(prof0)]
    pairs_done = []
    while True:
        prof = _current_profile(ws)
        if len(set(prof.nonzero())) <= 1:
            break
        pairs = eng.adjacent_pairs()
        pick = select_pair(pairs, D)
        if pick is None:
            d_now, _ = ws.freeze()
            raise StuckError(f"no adjacent pair with distinct diffs; diffs present: {sorted(set(prof.nonzero()))}")
        small, big = (pick.c1, pick.c2) if pick.n <= pick.m else (pick.c2, pick.c1)
        pairs_done.append(pick.to_json())
        _reduce_pair(eng, small, big)
        prof2 = _current_profile(ws)
        meas = termination_measure(prof2)
        if prof2.gcd_nonzero != D:
            raise InvariantError(f"gcd of diffs changed from {D} to {prof2.gcd_nonzero}")
        if not dm_less(meas, history[-1]):
            raise InvariantError("termination measure did not decrease")
        history.append(meas)
    d2, g2 = ws.freeze()
    rep = _report(d, gamma, d2, g2, eng, history, pairs_done, warn_list)
    if rep.output_profile.gcd_nonzero != D:
        raise InvariantError("gcd of diffs changed")
    return d2, g2, rep
