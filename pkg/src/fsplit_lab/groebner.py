"""Buchberger's algorithm, normal forms, membership, equality, elimination.

The decision kernel every higher module calls.  Pair handling follows the
Gebauer-Moeller installation of Buchberger's product and chain criteria with
normal (minimal lcm degree) selection; this keeps the desk-scale
determinantal computations inside their time budgets.

For homogeneous ideals under a graded order, a degree-truncated basis is a
D-Groebner basis: it decides membership for elements of degree <= D.  The
membership helpers exploit that automatically; full bases stay the default
everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import AlgebraError, RingMismatchError
from .poly import Polynomial, PolyRing, TermOrder, _BlockEngine


@dataclass
class ResourceLimits:
    """Abort knobs for runaway basis computations.

    Hitting a limit raises ResourceLimitExceeded; it never yields a wrong
    answer silently.
    """

    max_pairs: int = 400_000
    max_basis: int = 5_000


DEFAULT_LIMITS = ResourceLimits()


class ResourceLimitExceeded(AlgebraError):
    """A Groebner computation exceeded its configured resource limits."""


def spoly(f: Polynomial, g: Polynomial) -> Polynomial:
    """S-polynomial of f and g (both nonzero, same ring)."""
    eng = f.ring.eng
    field = f.ring.field
    kf, kg = f.lead_key(), g.lead_key()
    l = eng.lcm(kf, kg)
    uf = eng.quot(l, kf)
    ug = eng.quot(l, kg)
    cf = field.inv(f.lead_coeff())
    cg = field.inv(g.lead_coeff())
    return f.mul_term(uf, cf) - g.mul_term(ug, cg)


def _reduce_full(f: Polynomial, basis: list[Polynomial]) -> Polynomial:
    """Full normal form of f against basis (leading and tail reduction)."""
    ring = f.ring
    eng = ring.eng
    field = ring.field
    lts = [(g.lead_key(), field.inv(g.lead_coeff()), g) for g in basis if g]
    work = dict(f._d)
    out: dict[int, int] = {}
    p = field.p
    while work:
        m = max(work)
        c = work.pop(m)
        reduced = False
        for lk, linv, g in lts:
            if eng.divides(lk, m):
                factor = c * linv % p
                q = eng.quot(m, lk)
                for k, v in g._d.items():
                    if k == lk:
                        continue
                    kk = eng.mul(k, q)
                    s = (work.get(kk, 0) - factor * v) % p
                    if s:
                        work[kk] = s
                    else:
                        work.pop(kk, None)
                reduced = True
                break
        if not reduced:
            out[m] = c
    return Polynomial(ring, out)


def normal_form(f: Polynomial, basis: list[Polynomial]) -> Polynomial:
    """Remainder of multivariate division of f by basis.

    Unique when basis is a Groebner basis; no term of the result is
    divisible by any leading monomial of the basis.
    """
    for g in basis:
        if g.ring != f.ring:
            raise RingMismatchError("divisor from a different ring")
    return _reduce_full(f, [g for g in basis if g])


def divide_exact(f: Polynomial, g: Polynomial) -> Polynomial:
    """Exact quotient f / g; raises if g does not divide f termwise-exactly.

    Used by colon ideals, where divisibility is a domain invariant.
    """
    from .errors import DivisionError

    if g.is_zero():
        raise DivisionError("division by zero polynomial")
    ring = f.ring
    eng = ring.eng
    field = ring.field
    p = field.p
    lk = g.lead_key()
    linv = field.inv(g.lead_coeff())
    work = dict(f._d)
    quot: dict[int, int] = {}
    while work:
        m = max(work)
        c = work.pop(m)
        if not eng.divides(lk, m):
            raise DivisionError("inexact polynomial division")
        q = eng.quot(m, lk)
        factor = c * linv % p
        quot[q] = factor
        for k, v in g._d.items():
            if k == lk:
                continue
            kk = eng.mul(k, q)
            s = (work.get(kk, 0) - factor * v) % p
            if s:
                work[kk] = s
            else:
                work.pop(kk, None)
    return Polynomial(ring, quot)


class GroebnerBasis:
    """A (possibly degree-truncated) reduced Groebner basis.

    ``degree_cap`` is None for a full basis; otherwise the basis decides
    membership only for homogeneous input ideals and degrees <= cap.
    """

    __slots__ = ("ring", "polys", "degree_cap", "_lts")

    def __init__(self, ring: PolyRing, polys: list[Polynomial], degree_cap: int | None):
        self.ring = ring
        self.polys = tuple(polys)
        self.degree_cap = degree_cap
        field = ring.field
        self._lts = [(g.lead_key(), field.inv(g.lead_coeff()), g) for g in polys]

    def __iter__(self):
        return iter(self.polys)

    def __len__(self):
        return len(self.polys)

    def reduce(self, f: Polynomial) -> Polynomial:
        ring = self.ring
        eng = ring.eng
        p = ring.field.p
        lts = self._lts
        work = dict(f._d)
        out: dict[int, int] = {}
        while work:
            m = max(work)
            c = work.pop(m)
            hit = None
            for lk, linv, g in lts:
                if eng.divides(lk, m):
                    hit = (lk, linv, g)
                    break
            if hit is None:
                out[m] = c
                continue
            lk, linv, g = hit
            factor = c * linv % p
            q = eng.quot(m, lk)
            for k, v in g._d.items():
                if k == lk:
                    continue
                kk = eng.mul(k, q)
                s = (work.get(kk, 0) - factor * v) % p
                if s:
                    work[kk] = s
                else:
                    work.pop(kk, None)
        return Polynomial(ring, out)

    def contains_poly(self, f: Polynomial) -> bool:
        return self.reduce(f).is_zero()


def buchberger(
    gens: list[Polynomial],
    ring: PolyRing,
    limits: ResourceLimits = DEFAULT_LIMITS,
    degree_cap: int | None = None,
) -> GroebnerBasis:
    """Reduced Groebner basis of the given generators in ring's order.

    Deterministic for a fixed input: pairs are processed in (degree, lcm)
    order and the output is sorted by leading monomial.  ``degree_cap``
    truncates pair degrees; only sound for homogeneous input (callers
    guard), where it yields a D-Groebner basis.
    """
    eng = ring.eng
    field = ring.field
    basis: list[Polynomial] = []
    lead: list[int] = []
    alive: list[bool] = []

    def interreduced(gs):
        gs = [g for g in gs if g]
        gs.sort(key=lambda g: g.lead_key())
        out = []
        for g in gs:
            r = _reduce_full(g, out)
            if r:
                out.append(r.monic())
        return out

    for g in interreduced(gens):
        basis.append(g)
        lead.append(g.lead_key())
        alive.append(True)

    # pair queue: (i, j) -> lcm of leads; Gebauer-Moeller maintained.
    # Retired elements stay valid pair members; they just stop reducing
    # and stop forming new pairs.
    pairs: dict[tuple[int, int], int] = {}

    def add_element_pairs(t: int) -> None:
        lt = lead[t]
        cand = {}
        for j in range(t):
            if alive[j]:
                cand[j] = eng.lcm(lt, lead[j])
        # GM criteria M/F: keep pairs with minimal lcm, one per lcm value
        items = sorted(cand.items())
        kept: list[tuple[int, int]] = []
        for j, l in items:
            redundant = False
            for j2, l2 in items:
                if j2 == j:
                    continue
                if l2 == l:
                    if j2 < j:
                        redundant = True
                        break
                elif eng.divides(l2, l):
                    redundant = True
                    break
            if not redundant:
                kept.append((j, l))
        # GM criterion B': drop old pairs whose lcm factors through lt
        for (i, j), l in list(pairs.items()):
            if eng.divides(lt, l):
                if eng.lcm(lead[i], lt) != l and eng.lcm(lead[j], lt) != l:
                    del pairs[(i, j)]
        # Buchberger product criterion on the new pairs
        dt = eng.total_deg(lt)
        for j, l in kept:
            if eng.total_deg(l) == dt + eng.total_deg(lead[j]):
                continue
            pairs[(j, t)] = l

    for t in range(len(basis)):
        add_element_pairs(t)

    processed = 0
    while pairs:
        processed += 1
        if processed > limits.max_pairs:
            raise ResourceLimitExceeded(f"pair limit {limits.max_pairs} exceeded")
        # normal selection: minimal (degree, lcm)
        (i, j), l = min(pairs.items(), key=lambda kv: (eng.total_deg(kv[1]), kv[1]))
        del pairs[(i, j)]
        if degree_cap is not None and eng.total_deg(l) > degree_cap:
            continue
        reducers = [g for g, a in zip(basis, alive) if a]
        h = _reduce_full(spoly(basis[i], basis[j]), reducers)
        if h.is_zero():
            continue
        h = h.monic()
        basis.append(h)
        lead.append(h.lead_key())
        alive.append(True)
        if len(basis) > limits.max_basis:
            raise ResourceLimitExceeded(f"basis limit {limits.max_basis} exceeded")
        t = len(basis) - 1
        add_element_pairs(t)
        # retire elements whose lead became reducible (after pair formation)
        for b in range(t):
            if alive[b] and eng.divides(lead[t], lead[b]):
                alive[b] = False

    survivors = [g for g, a in zip(basis, alive) if a]
    # minimalize: no leading monomial divides another
    survivors.sort(key=lambda g: g.lead_key())
    minimal: list[Polynomial] = []
    for g in survivors:
        if not any(eng.divides(h.lead_key(), g.lead_key()) for h in minimal):
            minimal.append(g)
    # tail-reduce each against the others
    reduced = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1 :]
        reduced.append(_reduce_full(g, others).monic())
    reduced.sort(key=lambda g: g.lead_key())
    return GroebnerBasis(ring, reduced, degree_cap)


class Ideal:
    """An ideal bound to its ring, with write-once cached Groebner bases.

    Zero generators are dropped at construction.  The cache is keyed by term
    order (and degree cap for truncated bases); recomputing under another
    order never disturbs the default-order cache.
    """

    __slots__ = ("ring", "gens", "_gb", "_trunc", "_homog")

    def __init__(self, ring: PolyRing, gens: list[Polynomial] | tuple[Polynomial, ...]):
        gs = []
        seen = set()
        for g in gens:
            if g.ring != ring:
                raise RingMismatchError("generator from a different ring")
            if g.is_zero():
                continue
            key = tuple(sorted(g._d.items()))
            if key in seen:
                continue
            seen.add(key)
            gs.append(g)
        self.ring = ring
        self.gens = tuple(gs)
        self._gb: dict[TermOrder, GroebnerBasis] = {}
        self._trunc: dict[tuple[TermOrder, int], GroebnerBasis] = {}
        self._homog: bool | None = None

    def __repr__(self) -> str:
        inside = ", ".join(str(g) for g in self.gens[:4])
        if len(self.gens) > 4:
            inside += f", ... ({len(self.gens)} gens)"
        return f"Ideal({inside})"

    def is_zero(self) -> bool:
        return not self.gens

    def is_homogeneous(self) -> bool:
        if self._homog is None:
            self._homog = all(g.is_homogeneous() for g in self.gens)
        return self._homog

    def contains_one(self) -> bool:
        gb = self.groebner()
        return len(gb) == 1 and gb.polys[0].total_degree() == 0

    def groebner(self, limits: ResourceLimits = DEFAULT_LIMITS) -> GroebnerBasis:
        """Reduced Groebner basis in the ring's active order (cached, write-once)."""
        order = self.ring.order
        gb = self._gb.get(order)
        if gb is None:
            gb = buchberger(list(self.gens), self.ring, limits)
            self._gb.setdefault(order, gb)
            gb = self._gb[order]
        return gb

    def groebner_upto(self, cap: int, limits: ResourceLimits = DEFAULT_LIMITS) -> GroebnerBasis:
        """D-Groebner basis: decides membership in degrees <= cap.

        Only valid for homogeneous ideals under the graded default order;
        callers must check is_homogeneous().
        """
        order = self.ring.order
        full = self._gb.get(order)
        if full is not None:
            return full
        for (o, c), gb in self._trunc.items():
            if o == order and c >= cap:
                return gb
        gb = buchberger(list(self.gens), self.ring, limits, degree_cap=cap)
        self._trunc[(order, cap)] = gb
        return gb

    def _membership_basis(self, max_deg: int, limits: ResourceLimits) -> GroebnerBasis:
        if self.ring.order.kind == "grevlex" and self.is_homogeneous():
            return self.groebner_upto(max_deg, limits)
        return self.groebner(limits)

    def contains(self, f: Polynomial, limits: ResourceLimits = DEFAULT_LIMITS) -> bool:
        """Ideal membership: normal form against a Groebner basis is zero."""
        if f.ring != self.ring:
            raise RingMismatchError("membership test across rings")
        if f.is_zero():
            return True
        if not self.gens:
            return False
        gb = self._membership_basis(f.total_degree(), limits)
        return gb.contains_poly(f)

    def contains_ideal(self, other: "Ideal", limits: ResourceLimits = DEFAULT_LIMITS) -> bool:
        """other subseteq self, generator by generator."""
        if other.ring != self.ring:
            raise RingMismatchError("containment test across rings")
        if not other.gens:
            return True
        if not self.gens:
            return False
        max_deg = max(g.total_degree() for g in other.gens)
        gb = self._membership_basis(max_deg, limits)
        return all(gb.contains_poly(g) for g in other.gens)

    def equals(self, other: "Ideal", limits: ResourceLimits = DEFAULT_LIMITS) -> bool:
        return self.contains_ideal(other, limits) and other.contains_ideal(self, limits)


def ideal_contains(I: Ideal, J: Ideal) -> bool:
    """J subseteq I."""
    return I.contains_ideal(J)


def ideal_equal(I: Ideal, J: Ideal) -> bool:
    return I.equals(J)


def contains(I: Ideal, f: Polynomial) -> bool:
    return I.contains(f)


def eliminate(I: Ideal, keep: Iterable[str] | set[str], limits: ResourceLimits = DEFAULT_LIMITS) -> Ideal:
    """Generators of I intersect k[keep].

    Runs Buchberger in a block elimination order (dropped variables in a
    leading grevlex block), then selects basis elements free of dropped
    variables.  The result lives in the same ring with zero exponents on
    the dropped variables.
    """
    ring = I.ring
    keep_set = set(keep)
    for v in keep_set:
        if v not in ring._var_index:
            raise AlgebraError(f"unknown variable {v!r} in keep set")
    dropped = tuple(i for i, v in enumerate(ring.variables) if v not in keep_set)
    kept = tuple(i for i, v in enumerate(ring.variables) if v in keep_set)
    if not dropped:
        return Ideal(ring, list(I.gens))

    elim_ring = PolyRing.__new__(PolyRing)
    elim_ring.field = ring.field
    elim_ring.variables = ring.variables
    elim_ring.order = TermOrder("grevlex", nvars=ring.nvars)  # placeholder tag
    elim_ring.eng = _BlockEngine(ring.nvars, dropped, kept)
    elim_ring._var_index = dict(ring._var_index)
    elim_ring._var_polys = None

    conv = [
        Polynomial(elim_ring, {elim_ring.eng.pack(ring.eng.unpack(k)): c for k, c in g._d.items()})
        for g in I.gens
    ]
    gb = buchberger(conv, elim_ring, limits)
    out = []
    for g in gb:
        exps_lead = elim_ring.eng.unpack(g.lead_key())
        if all(exps_lead[i] == 0 for i in dropped):
            # a block-order lead free of dropped variables forces the tail free too
            d = {ring.eng.pack(elim_ring.eng.unpack(k)): c for k, c in g._d.items()}
            out.append(Polynomial(ring, d))
    return Ideal(ring, out)

