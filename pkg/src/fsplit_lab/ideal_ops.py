"""Ideal algebra: sums, products, powers, bracket powers, intersections,
colons, saturations, Krull dimension, and height.

Everything reduces to Groebner computations in the ambient polynomial ring.
Intersections use the classic one-variable trick ``eliminate(t*I + (1-t)*J)``;
saturation defaults to the Rabinowitsch form with an iterated-colon
cross-check mode, plus a divide-out fast path for homogeneous ideals
saturated at a single variable (where grevlex makes the last variable
peelable).
"""

from __future__ import annotations

from .errors import AlgebraError, PreconditionError, RingMismatchError
from .groebner import (
    DEFAULT_LIMITS,
    GroebnerBasis,
    Ideal,
    ResourceLimits,
    buchberger,
    divide_exact,
    eliminate,
    normal_form,
)
from .poly import PolyRing, Polynomial, TermOrder


def _same_ring(I: Ideal, J: Ideal) -> PolyRing:
    if I.ring != J.ring:
        raise RingMismatchError("ideals from different rings")
    return I.ring


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    ring = _same_ring(I, J)
    return Ideal(ring, list(I.gens) + list(J.gens))


def ideal_product(I: Ideal, J: Ideal) -> Ideal:
    ring = _same_ring(I, J)
    gens = [f * g for f in I.gens for g in J.gens]
    return Ideal(ring, gens)


def multiply_by_poly(I: Ideal, f: Polynomial) -> Ideal:
    if f.ring != I.ring:
        raise RingMismatchError("polynomial from a different ring")
    return Ideal(I.ring, [g * f for g in I.gens])


def interreduce_generators(I: Ideal) -> Ideal:
    """Drop generators provably inside the ideal of the others.

    Uses plain division (not a full Groebner basis): a zero remainder proves
    membership, so dropping is always sound; surviving redundancy is only a
    size cost, never a correctness one.
    """
    gens = list(I.gens)
    if len(gens) <= 1:
        return I
    if all(g.is_monomial() for g in gens):
        return Ideal(I.ring, _minimalize_monomials(gens, I.ring))
    gens.sort(key=lambda g: (g.total_degree(), len(g), g.lead_key()))
    kept: list[Polynomial] = []
    for idx, g in enumerate(gens):
        others = kept + gens[idx + 1 :]
        if others and normal_form(g, others).is_zero():
            continue
        kept.append(g)
    return Ideal(I.ring, kept)


def _minimalize_monomials(gens: list[Polynomial], ring: PolyRing) -> list[Polynomial]:
    eng = ring.eng
    keys = sorted({g.lead_key() for g in gens})  # ascending degree-ish
    out: list[int] = []
    for k in keys:
        if not any(eng.divides(m, k) for m in out):
            out.append(k)
    return [Polynomial(ring, {k: 1}) for k in out]


def ideal_power(I: Ideal, n: int) -> Ideal:
    """I^n with interreduction between multiplications; I^0 = (1)."""
    if n < 0:
        raise PreconditionError("ideal power wants n >= 0")
    ring = I.ring
    if n == 0:
        return Ideal(ring, [ring.one()])
    if not I.gens:
        return Ideal(ring, [])
    if all(g.is_monomial() for g in I.gens):
        return _monomial_power(I, n)
    result = interreduce_generators(I)
    for _ in range(n - 1):
        result = interreduce_generators(ideal_product(result, I))
    return result


def _monomial_power(I: Ideal, n: int) -> Ideal:
    """Binary powering on the staircase; pruning is just divisibility."""
    ring = I.ring
    eng = ring.eng
    bias = eng.mulbias

    def prune(keys: list[int]) -> list[int]:
        keys = sorted(set(keys))
        out: list[int] = []
        for k in keys:
            if not any(eng.divides(m, k) for m in out):
                out.append(k)
        return out

    base = prune([g.lead_key() for g in I.gens])
    result: list[int] | None = None
    while n:
        if n & 1:
            result = base if result is None else prune([a + b - bias for a in result for b in base])
        n >>= 1
        if n:
            base = prune([a + b - bias for a in base for b in base])
    assert result is not None
    monic = [Polynomial(ring, {k: 1}) for k in result]
    return Ideal(ring, monic)


def bracket_power(I: Ideal, q: int) -> Ideal:
    """Frobenius bracket power I^[q] = (g^q : g in gens), q a power of p.

    Independent of the generating set over F_p (Frobenius is flat); the
    property tests exercise that.
    """
    p = I.ring.field.p
    qq = q
    while qq % p == 0:
        qq //= p
    if qq != 1 or q < 1:
        raise PreconditionError(f"{q} is not a power of the characteristic {p}")
    return Ideal(I.ring, [g.frobenius_power(q) for g in I.gens])


def ideal_intersect(I: Ideal, J: Ideal, limits: ResourceLimits = DEFAULT_LIMITS) -> Ideal:
    """I intersect J via elimination of a fresh scalar variable."""
    ring = _same_ring(I, J)
    if not I.gens:
        return Ideal(ring, [])
    if not J.gens:
        return Ideal(ring, [])
    tname = _fresh_name(ring, "t")
    big = _extend_ring(ring, [tname])
    t = big.var(tname)
    one = big.one()
    gens = [t * _lift(big, g) for g in I.gens]
    gens += [(one - t) * _lift(big, g) for g in J.gens]
    E = eliminate(Ideal(big, gens), set(ring.variables), limits)
    return Ideal(ring, [_restrict(ring, g) for g in E.gens])


def ideal_colon(I: Ideal, J: Ideal, limits: ResourceLimits = DEFAULT_LIMITS) -> Ideal:
    """(I : J) as the intersection of single-element colons.

    (I : g) = (I intersect (g)) / g, exact in the ambient domain.
    """
    ring = _same_ring(I, J)
    if not J.gens:
        raise PreconditionError("colon by the zero ideal")
    result: Ideal | None = None
    for g in J.gens:
        single = _colon_single(I, g, limits)
        result = single if result is None else ideal_intersect(result, single, limits)
    assert result is not None
    return result


def _colon_single(I: Ideal, g: Polynomial, limits: ResourceLimits) -> Ideal:
    ring = I.ring
    if g.is_zero():
        raise PreconditionError("colon by zero element")
    if not I.gens:
        return Ideal(ring, [])
    if len(I.gens) == 1:
        # principal : element, exact in a domain: (f) : g = (f / gcd) scaled;
        # handled via the same intersect/divide route unless g | f-power shape
        pass
    meet = ideal_intersect(I, Ideal(ring, [g]), limits)
    return Ideal(ring, [divide_exact(f, g) for f in meet.gens])


def saturate(
    I: Ideal,
    f: Polynomial,
    limits: ResourceLimits = DEFAULT_LIMITS,
    method: str = "auto",
) -> Ideal:
    """(I : f^infinity).

    methods: 'rabinowitsch' (default engine, one elimination),
    'colon-chain' (stable value of (I : f^k), cross-check mode),
    'auto' (divide-out fast path for homogeneous I and variable f,
    else Rabinowitsch).
    """
    if f.is_zero():
        raise PreconditionError("saturation by zero")
    if f.ring != I.ring:
        raise RingMismatchError("saturation element from a different ring")
    if not I.gens:
        return Ideal(I.ring, [])
    if method == "colon-chain":
        return _saturate_chain(I, f, limits)
    if method == "auto":
        vi = _as_variable(f)
        if vi is not None and I.is_homogeneous():
            return _saturate_variable(I, vi, limits)
        return _saturate_rabinowitsch(I, f, limits)
    if method == "rabinowitsch":
        return _saturate_rabinowitsch(I, f, limits)
    raise AlgebraError(f"unknown saturation method {method!r}")


def _as_variable(f: Polynomial) -> int | None:
    if len(f) != 1:
        return None
    ((c, exps),) = [(c, e) for c, e in f.terms()]
    if sum(exps) != 1:
        return None
    return exps.index(1)


def _saturate_rabinowitsch(I: Ideal, f: Polynomial, limits: ResourceLimits) -> Ideal:
    ring = I.ring
    yname = _fresh_name(ring, "y")
    big = _extend_ring(ring, [yname])
    y = big.var(yname)
    gens = [_lift(big, g) for g in I.gens]
    gens.append(big.one() - y * _lift(big, f))
    E = eliminate(Ideal(big, gens), set(ring.variables), limits)
    return Ideal(ring, [_restrict(ring, g) for g in E.gens])


def _saturate_chain(I: Ideal, f: Polynomial, limits: ResourceLimits) -> Ideal:
    current = I
    fI = Ideal(I.ring, [f])
    while True:
        nxt = ideal_colon(current, fI, limits)
        if nxt.equals(current, limits):
            return current
        current = nxt


def _saturate_variable(I: Ideal, var_index: int, limits: ResourceLimits) -> Ideal:
    """Peel the variable from a grevlex basis: for a homogeneous ideal in a
    grevlex order with x last, dividing every basis element by its highest
    power of x and repeating computes (I : x^infinity)."""
    ring = I.ring
    perm = [i for i in range(ring.nvars) if i != var_index] + [var_index]
    sat_ring = PolyRing(ring.field, ring.variables, TermOrder("grevlex", tuple(perm)))
    gens = [sat_ring.convert(g) for g in I.gens]
    xkey_exps = [0] * ring.nvars
    xkey_exps[var_index] = 1

    while True:
        gb = buchberger(gens, sat_ring, limits)
        changed = False
        new_gens = []
        for g in gb:
            k = _min_var_exponent(g, var_index, sat_ring)
            if k > 0:
                changed = True
                divisor = sat_ring.monomial(tuple(e * k for e in xkey_exps))
                g = divide_exact(g, divisor)
            new_gens.append(g)
        gens = new_gens
        if not changed:
            break
    return Ideal(ring, [ring.convert(g) for g in gens])


def _min_var_exponent(g: Polynomial, var_index: int, ring: PolyRing) -> int:
    return min(ring.eng.unpack(k)[var_index] for k in g._d)


# ---------------------------------------------------------------------------
# dimension and height
# ---------------------------------------------------------------------------

def dimension(I: Ideal, limits: ResourceLimits = DEFAULT_LIMITS) -> int:
    """Krull dimension of S/I: the largest variable subset independent
    modulo the leading-term ideal of a Groebner basis of I.

    Exhaustive subset search; fine through a dozen or so variables.
    The unit ideal has dimension -1 by convention.
    """
    ring = I.ring
    n = ring.nvars
    if not I.gens:
        return n
    gb = I.groebner(limits)
    lead_supports = []
    for g in gb:
        exps = ring.eng.unpack(g.lead_key())
        supp = frozenset(i for i, e in enumerate(exps) if e)
        if not supp:
            return -1  # unit ideal
        lead_supports.append(supp)

    best = -1
    # DFS over subsets, pruning: S independent iff no lead support inside S
    def independent(s: frozenset[int]) -> bool:
        return all(not supp <= s for supp in lead_supports)

    from itertools import combinations

    for size in range(n, -1, -1):
        if size <= best:
            break
        for combo in combinations(range(n), size):
            if independent(frozenset(combo)):
                best = size
                break
        if best == size:
            break
    return best


def height_in(ring_mod: Ideal, P: Ideal, limits: ResourceLimits = DEFAULT_LIMITS) -> int:
    """Height of P/ring_mod inside S/ring_mod, as a dimension difference.

    Valid because every ring in scope is a catenary domain; the caller
    asserts domain-ness via presentation flags.
    """
    ring = _same_ring(ring_mod, P)
    if not P.contains_ideal(ring_mod, limits):
        raise PreconditionError("height_in wants ring_mod contained in P")
    if P.contains_one() or (ring_mod.gens and ring_mod.contains_one()):
        raise PreconditionError("height_in wants proper ideals")
    return dimension(ring_mod, limits) - dimension(P, limits)


# ---------------------------------------------------------------------------
# ring extension helpers
# ---------------------------------------------------------------------------

def _fresh_name(ring: PolyRing, stem: str) -> str:
    name = f"{stem}0"
    i = 0
    while name in ring._var_index:
        i += 1
        name = f"{stem}{i}"
    return name


def _extend_ring(ring: PolyRing, new_vars: list[str]) -> PolyRing:
    """Extended ring with the fresh variables at highest priority (so the
    default grevlex order on the extension restricts sensibly)."""
    return PolyRing(ring.field, list(new_vars) + list(ring.variables))


def _lift(big: PolyRing, f: Polynomial) -> Polynomial:
    small = f.ring
    pad = big.nvars - small.nvars
    d = {}
    for k, c in f._d.items():
        exps = small.eng.unpack(k)
        d[big.eng.pack((0,) * pad + exps)] = c
    return Polynomial(big, d)


def _restrict(small: PolyRing, f: Polynomial) -> Polynomial:
    big = f.ring
    pad = big.nvars - small.nvars
    d = {}
    for k, c in f._d.items():
        exps = big.eng.unpack(k)
        if any(e for e in exps[:pad]):
            raise AlgebraError("polynomial not in the subring")
        d[small.eng.pack(exps[pad:])] = c
    return Polynomial(small, d)
