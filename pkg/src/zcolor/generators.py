"""Deterministic diagram families: pretzels, twist composites, braid closures.

Everything is built from a port graph: each crossing has four ports listed
counterclockwise, opposite ports belong to the same strand, and links join
ports pairwise.  Orientation is assigned by walking strands from the first
unused link, and edge labels follow that walk, so the output only depends
on the construction order.
"""

from __future__ import annotations

from .diagram import Diagram, DiagramError
from .diagram.model import from_pd

# 64-bit LCG (Knuth's MMIX constants); state_{k+1} = A*state_k + C mod 2**64
LCG_A = 6364136223846793005
LCG_C = 1442695040888963407
MASK64 = (1 << 64) - 1


class GeneratorError(DiagramError):
    pass


class Lcg:
    """The documented generator behind every seeded corpus.

    Each draw advances the state once and returns its top 32 bits.
    """

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next32(self) -> int:
        self.state = (LCG_A * self.state + LCG_C) & MASK64
        return self.state >> 32

    def below(self, n: int) -> int:
        return self.next32() % n


def _from_ports(n_cross: int, links: list[tuple[tuple[int, int], tuple[int, int]]],
                over_odd: list[bool], free_loops: int = 0) -> Diagram:
    partner = {}
    for a, b in links:
        if a in partner or b in partner:
            raise GeneratorError("a port is linked twice")
        partner[a] = b
        partner[b] = a
    for c in range(n_cross):
        for p in range(4):
            if (c, p) not in partner:
                raise GeneratorError(f"port {p} of crossing {c} is not linked")
    label: dict[frozenset, int] = {}
    head_port: dict[tuple[int, int], bool] = {}
    next_label = 0
    for a, b in links:
        key = frozenset((a, b))
        if key in label:
            continue
        # walk the strand starting with a -> b
        tail, head = a, b
        while True:
            k = frozenset((tail, head))
            if k in label:
                break
            label[k] = next_label
            next_label += 1
            head_port[head] = True
            head_port[tail] = False
            c, p = head
            tail = (c, (p + 2) % 4)
            head = partner[tail]
    pd = {}
    signs = {}
    for c in range(n_cross):
        ports = [label[frozenset(((c, p), partner[(c, p)]))] for p in range(4)]
        under = (0, 2) if over_odd[c] else (1, 3)
        over = (1, 3) if over_odd[c] else (0, 2)
        u_in = under[0] if head_port[(c, under[0])] else under[1]
        o_in = over[0] if head_port[(c, over[0])] else over[1]
        pd[c] = tuple(ports[u_in:] + ports[:u_in])
        signs[c] = 1 if (o_in - u_in) % 4 == 3 else -1
    return from_pd(pd, signs, free_loops=free_loops)


def pretzel(twists: list[int]) -> Diagram:
    """Standard pretzel diagram P(p1, ..., pk) with vertical twist columns.

    Columns sit left to right; column i holds |p_i| crossings stacked
    vertically.  In a column with p > 0 the strand running from upper left
    to lower right is on top at every crossing (right-handed); p < 0 puts
    the other strand on top.  Neighbouring columns are joined by caps at
    the top and cups at the bottom, and the outermost ends by a cap over
    everything and a cup under everything.  Crossings are numbered column by
    column, top to bottom.
    """
    twists = list(twists)
    if len(twists) < 2:
        raise GeneratorError("a pretzel needs at least two columns")
    if any(not isinstance(p, int) or p == 0 for p in twists):
        raise GeneratorError("pretzel twists must be nonzero integers")
    NE, NW, SW, SE = 0, 1, 2, 3
    links = []
    over_odd = []
    tops, bottoms = [], []
    c = 0
    for p in twists:
        ids = list(range(c, c + abs(p)))
        c += abs(p)
        for x in ids:
            over_odd.append(p > 0)   # ports NW(1)/SE(3) are the over strand
        for x, y in zip(ids, ids[1:]):
            links.append(((x, SW), (y, NW)))
            links.append(((x, SE), (y, NE)))
        tops.append(((ids[0], NW), (ids[0], NE)))
        bottoms.append(((ids[-1], SW), (ids[-1], SE)))
    k = len(twists)
    for i in range(k):
        j = (i + 1) % k
        links.append((tops[i][1], tops[j][0]))
        links.append((bottoms[i][1], bottoms[j][0]))
    return _from_ports(c, links, over_odd)


def braid_closure(strands: int, word: list[int]) -> Diagram:
    """Closure of a braid word; letter +i is sigma_i (left strand over), -i its inverse.

    Strands run upward and are numbered 1..strands from the left; crossings
    are numbered in word order.  Positions no letter touches close up into
    free loops.
    """
    if strands < 1:
        raise GeneratorError("need at least one strand")
    for g in word:
        if g == 0 or abs(g) >= strands:
            raise GeneratorError(f"letter {g} does not fit {strands} strands")
    SE, NE, NW, SW = 0, 1, 2, 3
    current: list[tuple] = [("B", p) for p in range(strands)]
    pending = []
    over_odd = []
    for c, g in enumerate(word):
        i = abs(g) - 1
        pending.append((current[i], (c, SW)))
        pending.append((current[i + 1], (c, SE)))
        over_odd.append(g > 0)      # SW-NE strand is ports 3/1
        current[i] = (c, NW)
        current[i + 1] = (c, NE)
    top = {p: current[p] for p in range(strands)}
    links = []
    for a, b in pending:
        while a[0] == "B":
            a = top[a[1]]
            if a[0] == "B":
                raise GeneratorError("internal: bottom placeholder without crossings")
        links.append((a, b))
    free = sum(1 for p in range(strands) if top[p] == ("B", p))
    return _from_ports(len(word), links, over_odd, free_loops=free)


def twist_composite(spec: list[tuple[tuple[int, int], int]]) -> Diagram:
    """Stack full-twist regions between neighbouring strands, then close up.

    ``spec`` lists ((i, i+1), t) entries, bottom to top: t full twists
    (2|t| crossings, right-handed for t > 0) between strands i and i+1,
    counted from 0.  The strand count is one more than the largest index.
    """
    spec = list(spec)
    if not spec:
        raise GeneratorError("empty twist spec")
    word = []
    top = 0
    for pair, t in spec:
        i, j = sorted(pair)
        if j != i + 1 or i < 0:
            raise GeneratorError(f"twist regions need neighbouring strands, got {pair}")
        if t == 0:
            raise GeneratorError("twist count must be nonzero")
        top = max(top, j)
        g = (i + 1) if t > 0 else -(i + 1)
        word.extend([g] * (2 * abs(t)))
    return braid_closure(top + 1, word)


def random_braid_word(seed: int, strands: int, length: int) -> list[int]:
    """Letters drawn from :class:`Lcg`: generator from the bits above the
    lowest one, sign from the lowest bit."""
    if strands < 2:
        raise GeneratorError("random braids need at least two strands")
    if length < 0:
        raise GeneratorError("length must be nonnegative")
    rng = Lcg(seed)
    word = []
    for _ in range(length):
        v = rng.next32()
        g = 1 + (v >> 1) % (strands - 1)
        word.append(g if v & 1 == 0 else -g)
    return word


def random_braid_closure(seed: int, strands: int, length: int) -> Diagram:
    return braid_closure(strands, random_braid_word(seed, strands, length))


def random_twist_spec(rng: Lcg, strands: int, regions: int, max_twist: int = 2) -> list:
    spec = []
    for _ in range(regions):
        i = rng.below(strands - 1)
        t = 1 + rng.below(max_twist)
        if rng.below(2):
            t = -t
        spec.append(((i, i + 1), t))
    return spec


def colorable_twist_corpus(seed: int, count: int, strands: int = 3, regions: int = 6,
                           max_tries: int = 100000) -> list[tuple[list, Diagram]]:
    """The first ``count`` seeded twist composites that admit a nontrivial coloring."""
    from .coloring import is_z_colorable

    rng = Lcg(seed)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise GeneratorError("could not find enough colorable twist composites")
        spec = random_twist_spec(rng, strands, regions)
        d = twist_composite(spec)
        if is_z_colorable(d):
            out.append((spec, d))
    return out


def trefoil() -> Diagram:
    return pretzel([1, 1, 1])


def hopf() -> Diagram:
    return braid_closure(2, [1, 1])


def scramble(d: Diagram, gamma: dict[int, int], seed: int, pushes: int = 6):
    """Apply seeded R2 pushes between differently colored arcs on a common face.

    The link type is unchanged, but the new crossings carry diffs
    |x - y| for whatever colors meet, so a simple coloring usually comes
    out with several distinct diffs.  Returns (diagram, coloring, trace).
    """
    from .diagram import Workspace
    from .diagram.model import faces_of

    ws = Workspace(d, gamma)
    rng = Lcg(seed)
    for _ in range(pushes):
        frozen, _cols = ws.freeze()
        faces = [f for f in faces_of(frozen.pd) if len(f) >= 2]
        if not faces:
            break
        face = faces[rng.below(len(faces))]
        options = [(a, b) for a in face for b in face
                   if ws.pd[a[0]][a[1]] != ws.pd[b[0]][b[1]]
                   and ws.arc_color(ws.pd[a[0]][a[1]]) != ws.arc_color(ws.pd[b[0]][b[1]])]
        if not options:
            continue
        if rng.below(2):
            # favour wide gaps so later pushes compound into larger diffs
            gap = lambda ab: abs(ws.arc_color(ws.pd[ab[0][0]][ab[0][1]]) - ws.arc_color(ws.pd[ab[1][0]][ab[1][1]]))
            widest = max(gap(o) for o in options)
            options = [o for o in options if gap(o) == widest]
        a, b = options[rng.below(len(options))]
        ws.r2_push(a, b, rng.below(2) == 0)
    d2, g2 = ws.freeze()
    return d2, g2, list(ws.records)


# three-column pretzels with 1/p + 1/q + 1/r = 0: determinant zero, no
# integral column, and linking numbers that tie every component together
ZERO_DET_PRETZELS = (
    (-2, 4, 4), (2, -4, -4), (-2, 3, 6), (2, -3, -6), (-4, 8, 8),
    (-4, 6, 12), (-3, 4, 12), (-6, 12, 12),
)


def zero_det_pretzels() -> list[tuple[tuple[int, ...], Diagram]]:
    return [(t, pretzel(list(t))) for t in ZERO_DET_PRETZELS]
