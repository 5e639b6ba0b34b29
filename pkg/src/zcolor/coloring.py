"""Integer colorings: the coloring matrix, its exact kernel, and diff profiles.

A coloring is a plain ``dict`` from arc id to integer.  Everything here is
exact integer arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd

from .diagram import Diagram, diagram_components


class ColoringError(ValueError):
    pass


class MissingArcError(ColoringError):
    pass


class InvalidColoringError(ColoringError):
    pass


class NotColorableError(ColoringError):
    pass


@dataclass(frozen=True)
class ColoringMatrix:
    rows: tuple[tuple[int, ...], ...]
    row_ids: tuple[int, ...]   # crossing ids
    col_ids: tuple[int, ...]   # arc ids

    @property
    def shape(self):
        return (len(self.rows), len(self.col_ids))


def build_matrix(d: Diagram) -> ColoringMatrix:
    cols = tuple(sorted(d.arcs))
    where = {a: i for i, a in enumerate(cols)}
    rows = []
    for c in sorted(d.crossings):
        row = [0] * len(cols)
        row[where[c.over]] += 2
        row[where[c.under_in]] -= 1
        row[where[c.under_out]] -= 1
        rows.append(tuple(row))
    return ColoringMatrix(tuple(rows), tuple(c.id for c in sorted(d.crossings)), cols)


def _rows_of(m) -> tuple[list[list[int]], int]:
    if isinstance(m, ColoringMatrix):
        return [list(r) for r in m.rows], len(m.col_ids)
    rows = [list(r) for r in m]
    ncols = len(rows[0]) if rows else 0
    return rows, ncols


def integer_kernel(m, ncols: int | None = None) -> list[list[int]]:
    """Basis of the integer null space, in Hermite normal form.

    Works on the transpose with unimodular row operations (a gcd-style
    elimination), so the rows of the accumulated transform that end up
    against zero rows form a basis of the full integer kernel.  The basis
    is then put in reduced echelon form with positive pivots, which is
    unique for the lattice.
    """
    rows, n = _rows_of(m)
    if ncols is not None:
        n = ncols
    r = len(rows)
    M = [[rows[i][j] for i in range(r)] for j in range(n)]
    U = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    top = 0
    for col in range(r):
        if top >= n:
            break
        while True:
            nz = [i for i in range(top, n) if M[i][col]]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(M[i][col]), i))
            M[top], M[piv] = M[piv], M[top]
            U[top], U[piv] = U[piv], U[top]
            p = M[top][col]
            clean = True
            for i in range(top + 1, n):
                v = M[i][col]
                if v:
                    q = v // p
                    if q:
                        Mi, Mt = M[i], M[top]
                        for j in range(col, r):
                            if Mt[j]:
                                Mi[j] -= q * Mt[j]
                        Ui, Ut = U[i], U[top]
                        for j in range(n):
                            if Ut[j]:
                                Ui[j] -= q * Ut[j]
                    if M[i][col]:
                        clean = False
            if clean:
                break
        if any(M[i][col] for i in range(top, n)):
            top += 1
    basis = [U[i] for i in range(top, n)]
    return hermite_rows(basis)


def hermite_rows(vectors: list[list[int]]) -> list[list[int]]:
    """Row Hermite normal form of a full-rank set of integer vectors."""
    B = [list(v) for v in vectors]
    k = len(B)
    if not k:
        return []
    n = len(B[0])
    top = 0
    for col in range(n):
        if top >= k:
            break
        while True:
            nz = [i for i in range(top, k) if B[i][col]]
            if not nz:
                break
            piv = min(nz, key=lambda i: (abs(B[i][col]), i))
            B[top], B[piv] = B[piv], B[top]
            p = B[top][col]
            clean = True
            for i in range(top + 1, k):
                if B[i][col]:
                    q = B[i][col] // p
                    B[i] = [x - q * y for x, y in zip(B[i], B[top])]
                    if B[i][col]:
                        clean = False
            if clean:
                break
        if top < k and B[top][col]:
            if B[top][col] < 0:
                B[top] = [-x for x in B[top]]
            p = B[top][col]
            for i in range(top):
                q = B[i][col] // p
                if q:
                    B[i] = [x - q * y for x, y in zip(B[i], B[top])]
            top += 1
    return B[:top]


def nullity(m) -> int:
    return len(integer_kernel(m))


def kernel_colorings(d: Diagram) -> list[dict[int, int]]:
    """The kernel basis of ``d`` as colorings."""
    m = build_matrix(d)
    return [dict(zip(m.col_ids, v)) for v in integer_kernel(m, len(m.col_ids))]


def _nonconstant_somewhere(d: Diagram, gamma: dict[int, int], groups=None) -> bool:
    groups = groups if groups is not None else diagram_components(d)
    return any(len({gamma[a] for a in g}) > 1 for g in groups)


def is_z_colorable(d: Diagram) -> bool:
    groups = diagram_components(d)
    return any(_nonconstant_somewhere(d, v, groups) for v in kernel_colorings(d))


def canonicalize(gamma: dict[int, int]) -> dict[int, int]:
    """Shift so the smallest color is 0, then divide out the common gcd."""
    if not gamma:
        return {}
    lo = min(gamma.values())
    g = 0
    for v in gamma.values():
        g = gcd(g, v - lo)
    if g == 0:
        return {a: 0 for a in gamma}
    return {a: (v - lo) // g for a, v in gamma.items()}


def nontrivial_coloring(d: Diagram) -> dict[int, int]:
    groups = diagram_components(d)
    for v in kernel_colorings(d):
        if _nonconstant_somewhere(d, v, groups):
            return canonicalize(v)
    raise NotColorableError("diagram admits only colorings constant on every piece")


def _check_total(d: Diagram, gamma) -> None:
    missing = [a for a in d.arcs if a not in gamma]
    if missing:
        raise MissingArcError(f"coloring has no value for arcs {missing[:8]}")


def validate(d: Diagram, gamma) -> bool:
    _check_total(d, gamma)
    return all(2 * gamma[c.over] == gamma[c.under_in] + gamma[c.under_out] for c in d.crossings)


@dataclass(frozen=True)
class DiffProfile:
    diffs: dict[int, int]
    gcd_nonzero: int

    def nonzero(self) -> list[int]:
        return [v for v in self.diffs.values() if v]

    def to_json(self) -> dict:
        return {"diffs": {str(k): v for k, v in sorted(self.diffs.items())}, "gcd_nonzero": self.gcd_nonzero}


def diffs(d: Diagram, gamma) -> DiffProfile:
    if not validate(d, gamma):
        raise InvalidColoringError("coloring violates the crossing equation")
    out = {}
    g = 0
    for c in sorted(d.crossings):
        v = abs(gamma[c.over] - gamma[c.under_in])
        out[c.id] = v
        g = gcd(g, v)
    return DiffProfile(out, g)


class SimpleVerdict:
    """Truthy when the coloring is simple; ``d`` holds the common diff."""

    __slots__ = ("simple", "d")

    def __init__(self, simple: bool, d: int | None):
        self.simple = simple
        self.d = d

    def __bool__(self):
        return self.simple

    def __repr__(self):
        return f"SimpleVerdict(simple={self.simple}, d={self.d})"


def is_simple(d: Diagram, gamma) -> SimpleVerdict:
    prof = diffs(d, gamma)
    if len(set(gamma.values())) <= 1:
        return SimpleVerdict(False, None)
    vals = set(prof.nonzero())
    if len(vals) == 1:
        return SimpleVerdict(True, vals.pop())
    return SimpleVerdict(False, None)


def palette(gamma) -> tuple[tuple[int, ...], int]:
    colors = tuple(sorted(set(gamma.values())))
    return colors, len(colors)


def affine(gamma, s: int, t: int) -> dict[int, int]:
    return {a: s * v + t for a, v in gamma.items()}


def dump_coloring(gamma) -> str:
    return json.dumps({"colors": {str(a): gamma[a] for a in sorted(gamma)}}, indent=1) + "\n"


def parse_coloring(text: str) -> dict[int, int]:
    try:
        obj = json.loads(text)
        raw = obj["colors"]
        out = {}
        for k, v in raw.items():
            if isinstance(v, bool) or not isinstance(v, int):
                raise ColoringError(f"color of arc {k} must be an integer")
            out[int(k)] = v
        return out
    except (json.JSONDecodeError, KeyError, TypeError, AttributeError, ValueError) as exc:
        if isinstance(exc, ColoringError):
            raise
        raise ColoringError(f"malformed coloring file: {exc}") from None
