"""Symbolic powers of prime ideals, with independent engines that
cross-validate:

* saturation engine: (Q^n + I) : f^infinity for a witness f outside the
  prime.  Always squeezed between the ordinary and symbolic powers; exact
  precisely when f lies in every embedded prime, which the harness treats
  as established only for cross-validated families.
* determinantal engine: products of minors delta_1 ... delta_k weighted by
  sum of (size_i - t + 1) at least the requested power.
* variable-prime engine: for Q = I + (subset V of variables) with I
  generated by V-degree-homogeneous elements in a domain, ordinary and
  symbolic powers agree, so the preimage is just I + (V)^n.  (Multiplying
  by anything outside p cannot kill the lowest V-degree component of an
  element, so p^n has no embedded primes.)

Quotient-ring ideals are always represented by their full preimage in the
ambient polynomial ring.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement

from .constructions import MatrixOfVariables, RingPresentation, minor
from .errors import AlgebraError, PreconditionError
from .groebner import DEFAULT_LIMITS, Ideal, ResourceLimits, ideal_equal
from .ideal_ops import dimension, ideal_power, ideal_sum, saturate
from .poly import PolyRing, Polynomial


@dataclass
class PrimeSpec:
    """A prime ideal p of R = S/I given by the generators of its lift Q.

    The witness, when present, is an element outside Q used by the
    saturation engine.  ``determinantal`` tags primes of the form I_t of a
    generic matrix so the combinatorial engine applies.
    """

    ambient: RingPresentation
    lift_gens: list[Polynomial]
    witness: Polynomial | None = None
    determinantal: tuple[int, int, int] | None = None  # (m, n, t)
    _height: int | None = field(default=None, repr=False)
    _lift: Ideal | None = field(default=None, repr=False)

    def __post_init__(self):
        ring = self.ambient.ambient
        lift = ideal_sum(Ideal(ring, list(self.lift_gens)), self.ambient.defining)
        if lift.contains_one():
            raise PreconditionError("prime lift is the unit ideal")
        if self.witness is not None and lift.contains(self.witness):
            raise PreconditionError("witness element lies in the prime")
        self._lift = lift

    @property
    def ring(self) -> PolyRing:
        return self.ambient.ambient

    @property
    def lift(self) -> Ideal:
        assert self._lift is not None
        return self._lift

    def height(self, limits: ResourceLimits = DEFAULT_LIMITS) -> int:
        """Height of p in R as a dimension difference (catenary domains)."""
        if self._height is None:
            self._height = dimension(self.ambient.defining, limits) - dimension(self.lift, limits)
        return self._height

    # -- engine hypothesis detection ----------------------------------------
    def variable_prime_variables(self) -> tuple[int, ...] | None:
        """Indices V with Q = I + (V), I generated by V-homogeneous elements,
        in an asserted domain; None when the hypotheses fail."""
        ring = self.ring
        vset: set[int] = set()
        for g in self.lift_gens:
            exps = _single_variable(g)
            if exps is None:
                return None
            vset.add(exps)
        defining = self.ambient.defining
        if defining.gens and not self.ambient.flag("asserted_domain"):
            return None
        for g in defining.gens:
            degs = {sum(e[i] for i in vset) for _, e in g.terms()}
            if len(degs) > 1:
                return None
        # Q must equal I + (V): true by construction since lift_gens are the V's
        return tuple(sorted(vset))


def _single_variable(g: Polynomial) -> int | None:
    if len(g) != 1:
        return None
    ((_, exps),) = [(c, e) for c, e in g.terms()]
    if sum(exps) != 1:
        return None
    return exps.index(1)


def ordinary_power_preimage(P: PrimeSpec, n: int) -> Ideal:
    """Full preimage of p^n in the ambient ring: Q^n + I."""
    if n == 0:
        return Ideal(P.ring, [P.ring.one()])
    Qn = ideal_power(Ideal(P.ring, list(P.lift_gens)), n)
    return ideal_sum(Qn, P.ambient.defining)


def symbolic_power_saturation(
    P: PrimeSpec,
    n: int,
    limits: ResourceLimits = DEFAULT_LIMITS,
) -> Ideal:
    """((Q^n + I) : f^infinity) for the witness f.

    Returns an ideal between p^n and p^(n); equality with p^(n) holds when
    the witness lies in every embedded prime of p^n.  Callers that need
    exactness must use a validated engine (see the harness rules).
    """
    if n == 0:
        return Ideal(P.ring, [P.ring.one()])
    if n < 0:
        raise PreconditionError("symbolic power wants n >= 0")
    if P.witness is None:
        raise PreconditionError("saturation engine needs a witness element")
    return saturate(ordinary_power_preimage(P, n), P.witness, limits)


def symbolic_power_variable_prime(P: PrimeSpec, n: int) -> Ideal:
    """Exact symbolic power for variable-generated primes with V-homogeneous
    defining ideal: symbolic equals ordinary."""
    if P.variable_prime_variables() is None:
        raise PreconditionError("variable-prime engine hypotheses not satisfied")
    return ordinary_power_preimage(P, n)


# ---------------------------------------------------------------------------
# determinantal combinatorial engine
# ---------------------------------------------------------------------------

def _matrix_in_ring(ambient: PolyRing, m: int, n: int) -> MatrixOfVariables:
    entries = []
    for i in range(m):
        row = []
        for j in range(n):
            name = f"x{i + 1}_{j + 1}"
            if name not in ambient._var_index:
                raise PreconditionError(f"ambient ring lacks matrix variable {name}")
            row.append(ambient._var_index[name])
        entries.append(row)
    return MatrixOfVariables(m, n, entries)


def dep_determinantal_symbolic(
    m: int,
    n: int,
    t: int,
    power: int,
    ambient: PolyRing,
) -> Ideal:
    """I_t^(power) for the generic m x n matrix: the ideal of products of
    minors whose sizes a_i satisfy sum of max(a_i - t + 1, 0) >= power.

    Only weight-minimal products are emitted (dropping any factor would fall
    below the target weight); factors of weight zero never help, so sizes
    run over [t, min(m, n)].  This generates the same ideal as the full
    enumeration with at most `power` factors.
    """
    if not (1 <= t <= min(m, n)):
        raise PreconditionError("minor size t out of range")
    if power < 1:
        raise PreconditionError("power must be >= 1")
    X = _matrix_in_ring(ambient, m, n)
    sizes = list(range(t, min(m, n) + 1))
    minors_by_size: dict[int, list[Polynomial]] = {}
    for s in sizes:
        polys = []
        for rows in combinations(range(m), s):
            for cols in combinations(range(n), s):
                polys.append(minor(ambient, X, rows, cols))
        minors_by_size[s] = polys
    weights = {s: s - t + 1 for s in sizes}

    gens: list[Polynomial] = []

    def count_vectors(idx: int, remaining_sizes: list[int], counts: dict[int, int], total: int):
        if idx == len(remaining_sizes):
            if total >= power and all(
                total - weights[s] < power for s, c in counts.items() if c
            ):
                gens.extend(_expand_products(ambient, minors_by_size, counts))
            return
        s = remaining_sizes[idx]
        w = weights[s]
        max_c = (power + w - 1) // w + 1
        for c in range(max_c + 1):
            counts[s] = c
            new_total = total + c * w
            if new_total > power + max(weights.values()):
                counts[s] = 0
                break
            count_vectors(idx + 1, remaining_sizes, counts, new_total)
        counts[s] = 0

    count_vectors(0, sizes, {s: 0 for s in sizes}, 0)
    return Ideal(ambient, gens)


def _expand_products(ambient, minors_by_size, counts) -> list[Polynomial]:
    parts: list[list[Polynomial]] = []
    for s, c in sorted(counts.items()):
        if not c:
            continue
        parts.append([_prod(ambient, combo) for combo in combinations_with_replacement(minors_by_size[s], c)])
    if not parts:
        return []
    out = parts[0]
    for block in parts[1:]:
        out = [a * b for a in out for b in block]
    return out


def _prod(ambient: PolyRing, polys) -> Polynomial:
    acc = ambient.one()
    for q in polys:
        acc = acc * q
    return acc


# ---------------------------------------------------------------------------
# engine dispatch
# ---------------------------------------------------------------------------

def symbolic_power(
    P: PrimeSpec,
    n: int,
    engine: str = "auto",
    limits: ResourceLimits = DEFAULT_LIMITS,
) -> tuple[Ideal, str]:
    """Compute p^(n) (as a preimage ideal) and report which engine ran and
    whether its output is exact.

    Returns (ideal, label) with label one of 'variable', 'dep',
    'saturation'.  'auto' prefers exact engines and, when both an exact and
    the saturation engine apply, cross-checks them and fails loudly on
    disagreement.
    """
    if n == 0:
        return Ideal(P.ring, [P.ring.one()]), "variable"
    if engine == "saturation":
        return symbolic_power_saturation(P, n, limits), "saturation"
    if engine == "dep":
        if P.determinantal is None or P.ambient.defining.gens:
            raise PreconditionError("determinantal engine needs a tagged I_t in a polynomial ring")
        m, nn, t = P.determinantal
        return dep_determinantal_symbolic(m, nn, t, n, P.ring), "dep"
    if engine == "variable":
        return symbolic_power_variable_prime(P, n), "variable"
    if engine != "auto":
        raise AlgebraError(f"unknown symbolic engine {engine!r}")

    if P.variable_prime_variables() is not None:
        return symbolic_power_variable_prime(P, n), "variable"
    if P.determinantal is not None and not P.ambient.defining.gens:
        m, nn, t = P.determinantal
        dep = dep_determinantal_symbolic(m, nn, t, n, P.ring)
        if P.witness is not None:
            sat = symbolic_power_saturation(P, n, limits)
            if not ideal_equal(dep, sat):
                raise AlgebraError(
                    "symbolic engines disagree on a determinantal prime: "
                    f"(m,n,t)={P.determinantal}, power={n}"
                )
        return dep, "dep"
    return symbolic_power_saturation(P, n, limits), "saturation"


def exact_engine_available(P: PrimeSpec) -> str | None:
    """Which machine-certified exact engine applies to P, if any."""
    if P.variable_prime_variables() is not None:
        return "variable"
    if P.determinantal is not None and not P.ambient.defining.gens:
        return "dep"
    return None


def thmB_smallest_C(
    P: PrimeSpec,
    n_max: int,
    engine: str = "auto",
    limits: ResourceLimits = DEFAULT_LIMITS,
) -> list[dict]:
    """For each n <= n_max, the least c with p^(c) contained in p^n,
    found by binary search; also checks c <= 2hn.

    Requires an exact symbolic engine; p^(c) shrinks as c grows, so the
    predicate is monotone in c.
    """
    if engine == "auto" and exact_engine_available(P) is None:
        raise PreconditionError("smallest-c search needs an exact symbolic engine")
    h = P.height(limits)
    out = []
    for n in range(1, n_max + 1):
        ordinary = ordinary_power_preimage(P, n)

        def contained(c: int) -> bool:
            sym, _ = symbolic_power(P, c, engine, limits)
            return ordinary.contains_ideal(sym, limits)

        hi = 2 * h * n
        if not contained(hi):
            out.append({"n": n, "smallest_c": None, "bound_2hn": hi, "within_bound": False})
            continue
        lo = 1
        # binary search the least c in [lo, hi] with contained(c)
        while lo < hi:
            mid = (lo + hi) // 2
            if contained(mid):
                hi = mid
            else:
                lo = mid + 1
        out.append({"n": n, "smallest_c": lo, "bound_2hn": 2 * h * n, "within_bound": True})
    return out
