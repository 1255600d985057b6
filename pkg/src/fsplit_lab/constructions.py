"""Builders for the ring and ideal families the experiments run on:
generic determinantal ideals, row/column-restricted mixed minor ideals,
doubled rings with their diagonal ideals, and the smallest Segre example.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

from .errors import AlgebraError, PreconditionError
from .groebner import Ideal
from .poly import PolyRing, Polynomial, PrimeField, format_poly, parse_poly


@dataclass
class RingPresentation:
    """A quotient ring S/I presented by its ambient polynomial ring and a
    defining ideal (possibly zero; then the ring is S itself).

    Flags are assumption bookkeeping, not computed facts: builders set them
    only for families with certified hypotheses; hand-built presentations
    default to False and the harness refuses theorem checks without them.
    """

    ambient: PolyRing
    defining: Ideal
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.defining.ring != self.ambient:
            raise AlgebraError("defining ideal not in the ambient ring")
        if self.defining.gens and self.defining.contains_one():
            raise AlgebraError("defining ideal must be proper or zero")

    def flag(self, name: str) -> bool:
        return bool(self.flags.get(name, False))

    def to_json(self) -> dict:
        return {
            "p": self.ambient.field.p,
            "variables": list(self.ambient.variables),
            "defining": [format_poly(g) for g in self.defining.gens],
            "flags": dict(self.flags),
        }

    @classmethod
    def from_json(cls, data: dict) -> "RingPresentation":
        ring = PolyRing(PrimeField(int(data["p"])), data["variables"])
        gens = [parse_poly(ring, s) for s in data.get("defining", [])]
        return cls(ring, Ideal(ring, gens), dict(data.get("flags", {})))

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "RingPresentation":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass
class MatrixOfVariables:
    """An m x n grid of distinct variable indices into an ambient ring."""

    m: int
    n: int
    entries: list[list[int]]

    def __post_init__(self):
        flat = [i for row in self.entries for i in row]
        if len(flat) != self.m * self.n or len(set(flat)) != len(flat):
            raise AlgebraError("matrix entries must be distinct variable indices")


def generic_matrix(m: int, n: int, field: PrimeField) -> tuple[PolyRing, MatrixOfVariables]:
    """F_p[x1_1 ... xm_n] in row-major order with the generic matrix of its
    variables; grevlex with the declared variable order."""
    if m < 1 or n < 1:
        raise PreconditionError("matrix dimensions must be >= 1")
    names = [f"x{i + 1}_{j + 1}" for i in range(m) for j in range(n)]
    ring = PolyRing(field, names)
    entries = [[i * n + j for j in range(n)] for i in range(m)]
    return ring, MatrixOfVariables(m, n, entries)


def minor(ring: PolyRing, X: MatrixOfVariables, rows: tuple[int, ...], cols: tuple[int, ...]) -> Polynomial:
    """Determinant of the submatrix on sorted row/column index tuples,
    by Laplace expansion along the first row."""
    if len(rows) != len(cols):
        raise PreconditionError("minor wants equally many rows and columns")
    if len(rows) == 1:
        return ring.gens()[X.entries[rows[0]][cols[0]]]
    acc = ring.zero()
    r0 = rows[0]
    rest = rows[1:]
    for k, c in enumerate(cols):
        entry = ring.gens()[X.entries[r0][c]]
        sub = minor(ring, X, rest, cols[:k] + cols[k + 1 :])
        term = entry * sub
        acc = acc + (term if k % 2 == 0 else -term)
    return acc


def minors_ideal(
    ring: PolyRing,
    X: MatrixOfVariables,
    t: int,
    row_limit: int | None = None,
    col_limit: int | None = None,
) -> Ideal:
    """Ideal of all t x t minors of the first `row_limit` rows (resp.
    `col_limit` columns) of X; unrestricted when limits are absent.

    A t-minor of a u x v selection with t > min(u, v) is zero, so
    out-of-range t just yields the zero ideal.
    """
    if t < 1:
        raise PreconditionError("minor size must be >= 1")
    rows_avail = X.m if row_limit is None else row_limit
    cols_avail = X.n if col_limit is None else col_limit
    if rows_avail > X.m or cols_avail > X.n or rows_avail < 0 or cols_avail < 0:
        raise PreconditionError("row/col limit outside matrix dimensions")
    if t > rows_avail or t > cols_avail:
        return Ideal(ring, [])
    gens = []
    for rows in combinations(range(rows_avail), t):
        for cols in combinations(range(cols_avail), t):
            gens.append(minor(ring, X, rows, cols))
    return Ideal(ring, gens)


def thm51_ideal(
    ring: PolyRing,
    X: MatrixOfVariables,
    rows: list[tuple[int, int]],
    cols: list[tuple[int, int]],
) -> Ideal:
    """Mixed minor ideal: for each (u_i, r_i) the r_i-minors of the first u_i
    rows, plus for each (v_j, s_j) the s_j-minors of the first v_j columns.
    The u's, r's, v's, s's must each be strictly increasing."""
    for seq, label in (
        ([u for u, _ in rows], "row limits"),
        ([r for _, r in rows], "row minor sizes"),
        ([v for v, _ in cols], "column limits"),
        ([s for _, s in cols], "column minor sizes"),
    ):
        if any(b <= a for a, b in zip(seq, seq[1:])):
            raise PreconditionError(f"{label} must be strictly increasing")
    for u, _ in rows:
        if not (1 <= u <= X.m):
            raise PreconditionError("row limit outside matrix")
    for v, _ in cols:
        if not (1 <= v <= X.n):
            raise PreconditionError("column limit outside matrix")
    gens: list[Polynomial] = []
    for u, r in rows:
        gens.extend(minors_ideal(ring, X, r, row_limit=u).gens)
    for v, s in cols:
        gens.extend(minors_ideal(ring, X, s, col_limit=v).gens)
    return Ideal(ring, gens)


def determinantal_presentation(m: int, n: int, t: int, field: PrimeField) -> tuple[RingPresentation, MatrixOfVariables]:
    """k[X_{m x n}]/I_t with certified-family flags set.

    These quotients are strongly F-regular with F-split doubled diagonal;
    the flags record that as an assumption consumed by the harness.
    """
    ring, X = generic_matrix(m, n, field)
    ideal = minors_ideal(ring, X, t)
    pres = RingPresentation(
        ring,
        ideal,
        flags={"asserted_domain": True, "asserted_sfr": True, "asserted_diag_fsplit": True},
    )
    return pres, X


def doubled_ring(pres: RingPresentation) -> tuple[RingPresentation, Ideal]:
    """The presentation of R (x) R together with its diagonal ideal.

    Variables are duplicated as name_1 (left copy) then name_2 (right copy),
    left block first; the defining ideal is I(left) + I(right) and the
    diagonal ideal adds the differences left_i - right_i.
    """
    ring = pres.ambient
    left = [f"{v}_1" for v in ring.variables]
    right = [f"{v}_2" for v in ring.variables]
    big = PolyRing(ring.field, left + right)
    n = ring.nvars

    def embed(f: Polynomial, offset: int) -> Polynomial:
        d = {}
        for k, c in f._d.items():
            exps = ring.eng.unpack(k)
            out = [0] * (2 * n)
            for i, e in enumerate(exps):
                out[offset + i] = e
            d[big.eng.pack(tuple(out))] = c
        return Polynomial(big, d)

    defining = [embed(g, 0) for g in pres.defining.gens]
    defining += [embed(g, n) for g in pres.defining.gens]
    gens_big = big.gens()
    diagonal = list(defining) + [gens_big[i] - gens_big[n + i] for i in range(n)]
    flags = {"asserted_domain": False}
    return RingPresentation(big, Ideal(big, defining), flags), Ideal(big, diagonal)


def segre_2x2(field: PrimeField) -> tuple[RingPresentation, MatrixOfVariables]:
    """F_p[a,b,c,d]/(ad - bc): the affine cone over a smooth quadric, the
    smallest determinantal quotient."""
    ring = PolyRing(field, ["a", "b", "c", "d"])
    X = MatrixOfVariables(2, 2, [[0, 1], [2, 3]])
    a, b, c, d = ring.gens()
    det = a * d - b * c
    pres = RingPresentation(
        ring,
        Ideal(ring, [det]),
        flags={"asserted_domain": True, "asserted_sfr": True, "asserted_diag_fsplit": True},
    )
    return pres, X
