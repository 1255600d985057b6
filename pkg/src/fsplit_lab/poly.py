"""Prime fields, term orders, and sparse multivariate polynomials.

Monomials are exponent vectors packed into single Python integers whose
natural ``<`` agrees with the ring's term order, so leading-term extraction
is a native ``max()`` and divisibility is a masked subtraction.  Exponents
are 16-bit-safe (<= 32767) with explicit overflow guards: Frobenius bracket
powers push degrees into the thousands and must fail loudly, not wrap.
"""

from __future__ import annotations

import re
from typing import Iterable, Iterator

from .errors import AlgebraError, OverflowGuardError, RingMismatchError

EXP_BITS = 16
EXP_CAP = (1 << (EXP_BITS - 1)) - 1  # 32767
DEG_BITS = 24
DEG_CAP = (1 << (DEG_BITS - 1)) - 1

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


class ParseError(AlgebraError):
    """Syntax error in polynomial text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin, exact for p < 3.3e24."""
    if p < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if p % small == 0:
            return p == small
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """The field F_p, p prime, 2 <= p < 2^31. Elements are ints in [0, p-1]."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not (2 <= p < 2**31):
            raise AlgebraError(f"characteristic out of range: {p}")
        if not _is_prime(p):
            raise AlgebraError(f"characteristic must be prime, got {p}")
        self.p = p

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"

    def reduce(self, a: int) -> int:
        return a % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0 in prime field")
        return pow(a, self.p - 2, self.p)

    def pow(self, a: int, n: int) -> int:
        return pow(a, n, self.p)

    def elements(self) -> range:
        return range(self.p)


class _OrderEngine:
    """Packs exponent vectors into ints so that int order == term order.

    Layout is order-specific; subclasses fill in pack/unpack.  Common int
    tricks: multiplication of monomials is ``a + b - mulbias``; ``a | b``
    iff the masked difference has no borrows (guard bits stay clear).
    """

    nvars: int
    mulbias: int
    badmask: int
    expmask: int

    def pack(self, exps: tuple[int, ...]) -> int:
        raise NotImplementedError

    def unpack(self, key: int) -> tuple[int, ...]:
        raise NotImplementedError

    def total_deg(self, key: int) -> int:
        raise NotImplementedError

    def mul(self, a: int, b: int) -> int:
        m = a + b - self.mulbias
        if m & self.guards:
            raise OverflowGuardError("monomial exponent overflow")
        return m

    def divides(self, a: int, b: int) -> bool:
        d = (a & self.expmask) - (b & self.expmask)
        return d >= 0 and not (d & self.badmask)

    def quot(self, b: int, a: int) -> int:
        """b / a, assuming a | b."""
        raise NotImplementedError

    def lcm(self, a: int, b: int) -> int:
        ea = self.unpack(a)
        eb = self.unpack(b)
        return self.pack(tuple(max(x, y) for x, y in zip(ea, eb)))


class _GrevlexEngine(_OrderEngine):
    """Graded reverse-lex.  Key = [deg | cap-e(last prio) | ... | cap-e(first prio)]."""

    def __init__(self, nvars: int, priority: tuple[int, ...]):
        self.nvars = nvars
        self.priority = priority  # variable indices, highest priority first
        self.degshift = EXP_BITS * nvars
        # field position (shift) for each variable index: lowest-priority
        # variable occupies the most significant exponent field.
        self.shifts = [0] * nvars
        for rank, v in enumerate(priority):
            self.shifts[v] = EXP_BITS * rank
        self.expmask = (1 << self.degshift) - 1
        self.mulbias = sum(EXP_CAP << (EXP_BITS * i) for i in range(nvars))
        field_guard = 1 << (EXP_BITS - 1)
        self.badmask = sum(field_guard << (EXP_BITS * i) for i in range(nvars))
        self.guards = self.badmask | (1 << (self.degshift + DEG_BITS - 1))

    def pack(self, exps: tuple[int, ...]) -> int:
        deg = 0
        key = 0
        for v in range(self.nvars):
            e = exps[v]
            if e < 0 or e > EXP_CAP:
                raise OverflowGuardError(f"exponent {e} outside [0, {EXP_CAP}]")
            deg += e
            key |= (EXP_CAP - e) << self.shifts[v]
        if deg > DEG_CAP:
            raise OverflowGuardError(f"total degree {deg} exceeds guard")
        return (deg << self.degshift) | key

    def unpack(self, key: int) -> tuple[int, ...]:
        return tuple(
            EXP_CAP - ((key >> self.shifts[v]) & 0xFFFF) for v in range(self.nvars)
        )

    def total_deg(self, key: int) -> int:
        return key >> self.degshift

    def quot(self, b: int, a: int) -> int:
        degq = (b >> self.degshift) - (a >> self.degshift)
        d = (a & self.expmask) - (b & self.expmask)
        return (degq << self.degshift) | (self.mulbias - d)


class _LexEngine(_OrderEngine):
    """Pure lexicographic.  Key = [e(first prio) | ... | e(last prio)]."""

    def __init__(self, nvars: int, priority: tuple[int, ...]):
        self.nvars = nvars
        self.priority = priority
        self.shifts = [0] * nvars
        for rank, v in enumerate(priority):
            self.shifts[v] = EXP_BITS * (nvars - 1 - rank)
        self.expmask = (1 << (EXP_BITS * nvars)) - 1
        self.mulbias = 0
        field_guard = 1 << (EXP_BITS - 1)
        self.badmask = sum(field_guard << (EXP_BITS * i) for i in range(nvars))
        self.guards = self.badmask

    def pack(self, exps: tuple[int, ...]) -> int:
        key = 0
        for v in range(self.nvars):
            e = exps[v]
            if e < 0 or e > EXP_CAP:
                raise OverflowGuardError(f"exponent {e} outside [0, {EXP_CAP}]")
            key |= e << self.shifts[v]
        return key

    def unpack(self, key: int) -> tuple[int, ...]:
        return tuple((key >> self.shifts[v]) & 0xFFFF for v in range(self.nvars))

    def total_deg(self, key: int) -> int:
        return sum(self.unpack(key))

    def divides(self, a: int, b: int) -> bool:
        d = b - a
        return d >= 0 and not (d & self.badmask)

    def quot(self, b: int, a: int) -> int:
        return b - a


class _BlockEngine(_OrderEngine):
    """Elimination (block) order: grevlex on a leading block, ties broken by
    grevlex on the rest.  Any monomial touching the leading block beats any
    monomial that does not, which is exactly the elimination property."""

    def __init__(self, nvars: int, first_block: tuple[int, ...], second_block: tuple[int, ...]):
        self.nvars = nvars
        self.first_block = first_block
        self.second_block = second_block
        n1, n2 = len(first_block), len(second_block)
        self.low_bits = EXP_BITS * n2 + DEG_BITS
        self.shifts = [0] * nvars
        self.degshift2 = EXP_BITS * n2
        self.degshift1 = self.low_bits + EXP_BITS * n1
        for rank, v in enumerate(first_block):
            self.shifts[v] = self.low_bits + EXP_BITS * rank
        for rank, v in enumerate(second_block):
            self.shifts[v] = EXP_BITS * rank
        field_guard = 1 << (EXP_BITS - 1)
        self.expmask = 0
        self.mulbias = 0
        self.badmask = 0
        for v in range(nvars):
            s = self.shifts[v]
            self.expmask |= 0xFFFF << s
            self.mulbias |= EXP_CAP << s
            self.badmask |= field_guard << s
        # multiplication overflow guard: exponent field guards + degree tops
        self.guards = (
            self.badmask
            | (1 << (self.degshift1 + DEG_BITS - 1))
            | (1 << (self.degshift2 + DEG_BITS - 1))
        )
        # masked-subtraction borrows can spill trash into the low degree field
        self.badmask |= ((1 << DEG_BITS) - 1) << self.degshift2

    def pack(self, exps: tuple[int, ...]) -> int:
        d1 = 0
        d2 = 0
        key = 0
        for v in self.first_block:
            e = exps[v]
            if e < 0 or e > EXP_CAP:
                raise OverflowGuardError(f"exponent {e} outside [0, {EXP_CAP}]")
            d1 += e
            key |= (EXP_CAP - e) << self.shifts[v]
        for v in self.second_block:
            e = exps[v]
            if e < 0 or e > EXP_CAP:
                raise OverflowGuardError(f"exponent {e} outside [0, {EXP_CAP}]")
            d2 += e
            key |= (EXP_CAP - e) << self.shifts[v]
        if d1 > DEG_CAP or d2 > DEG_CAP:
            raise OverflowGuardError("total degree exceeds guard")
        return (d1 << self.degshift1) | (d2 << self.degshift2) | key

    def unpack(self, key: int) -> tuple[int, ...]:
        return tuple(
            EXP_CAP - ((key >> self.shifts[v]) & 0xFFFF) for v in range(self.nvars)
        )

    def total_deg(self, key: int) -> int:
        d1 = key >> self.degshift1
        d2 = (key >> self.degshift2) & ((1 << DEG_BITS) - 1)
        return d1 + d2

    def quot(self, b: int, a: int) -> int:
        eb = self.unpack(b)
        ea = self.unpack(a)
        return self.pack(tuple(x - y for x, y in zip(eb, ea)))


class TermOrder:
    """A total order on monomials: kind 'lex' or 'grevlex' plus a variable
    priority permutation (highest priority first)."""

    __slots__ = ("kind", "permutation")

    def __init__(self, kind: str, permutation: tuple[int, ...] | None = None, nvars: int | None = None):
        if kind not in ("lex", "grevlex"):
            raise AlgebraError(f"unknown term order kind {kind!r}")
        if permutation is None:
            if nvars is None:
                raise AlgebraError("TermOrder needs a permutation or nvars")
            permutation = tuple(range(nvars))
        perm = tuple(permutation)
        if sorted(perm) != list(range(len(perm))):
            raise AlgebraError("permutation must be a bijection on variable indices")
        self.kind = kind
        self.permutation = perm

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TermOrder)
            and other.kind == self.kind
            and other.permutation == self.permutation
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.permutation))

    def __repr__(self) -> str:
        return f"TermOrder({self.kind!r}, {self.permutation})"

    def engine(self) -> _OrderEngine:
        if self.kind == "grevlex":
            return _GrevlexEngine(len(self.permutation), self.permutation)
        return _LexEngine(len(self.permutation), self.permutation)


class PolyRing:
    """F_p[x_1, ..., x_n] with a fixed term order.

    Immutable; polynomials hold a reference to their ring.  Rings with the
    same field, variables, and order compare equal.
    """

    __slots__ = ("field", "variables", "order", "eng", "_var_index", "_var_polys")

    def __init__(self, field: PrimeField, variables: Iterable[str], order: TermOrder | None = None):
        vs = tuple(variables)
        if len(set(vs)) != len(vs):
            raise AlgebraError("variable names must be unique")
        for v in vs:
            if not _NAME_RE.fullmatch(v):
                raise AlgebraError(f"bad variable name {v!r}")
        if order is None:
            order = TermOrder("grevlex", nvars=len(vs))
        if len(order.permutation) != len(vs):
            raise AlgebraError("order permutation size != variable count")
        self.field = field
        self.variables = vs
        self.order = order
        self.eng = order.engine()
        self._var_index = {v: i for i, v in enumerate(vs)}
        self._var_polys = None

    # -- identity ----------------------------------------------------------
    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolyRing)
            and other.field == self.field
            and other.variables == self.variables
            and other.order == self.order
        )

    def __hash__(self) -> int:
        return hash((self.field, self.variables, self.order))

    def __repr__(self) -> str:
        return f"PolyRing(F_{self.field.p}, {list(self.variables)}, {self.order.kind})"

    @property
    def nvars(self) -> int:
        return len(self.variables)

    # -- element constructors ----------------------------------------------
    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c: int) -> "Polynomial":
        c = self.field.reduce(c)
        if c == 0:
            return self.zero()
        return Polynomial(self, {self.eng.pack((0,) * self.nvars): c})

    def gens(self) -> tuple["Polynomial", ...]:
        if self._var_polys is None:
            out = []
            for i in range(self.nvars):
                e = [0] * self.nvars
                e[i] = 1
                out.append(Polynomial(self, {self.eng.pack(tuple(e)): 1}))
            self._var_polys = tuple(out)
        return self._var_polys

    def var(self, name: str) -> "Polynomial":
        return self.gens()[self._var_index[name]]

    def monomial(self, exps: tuple[int, ...], coeff: int = 1) -> "Polynomial":
        c = self.field.reduce(coeff)
        if c == 0:
            return self.zero()
        return Polynomial(self, {self.eng.pack(tuple(exps)): c})

    def from_terms(self, terms: Iterable[tuple[int, tuple[int, ...]]]) -> "Polynomial":
        d: dict[int, int] = {}
        for c, exps in terms:
            k = self.eng.pack(tuple(exps))
            d[k] = (d.get(k, 0) + c) % self.field.p
        return Polynomial(self, {k: c for k, c in d.items() if c})

    def convert(self, f: "Polynomial") -> "Polynomial":
        """Re-pack a polynomial from an equal-variables ring (maybe different
        order) into this ring."""
        if f.ring is self or f.ring == self:
            return Polynomial(self, dict(f._d)) if f.ring.order != self.order else f
        if f.ring.variables != self.variables or f.ring.field != self.field:
            raise RingMismatchError("convert requires same field and variables")
        d = {self.eng.pack(f.ring.eng.unpack(k)): c for k, c in f._d.items()}
        return Polynomial(self, d)

    # -- parsing / printing --------------------------------------------------
    def parse(self, text: str) -> "Polynomial":
        return _parse_poly(self, text)


class Polynomial:
    """Canonical sparse polynomial: dict {packed monomial: nonzero coeff}.

    Treat as immutable.  The packed keys order exactly as the ring's term
    order, so ``max`` over keys is the leading monomial.
    """

    __slots__ = ("ring", "_d")

    def __init__(self, ring: PolyRing, d: dict[int, int]):
        self.ring = ring
        self._d = d

    # -- basic queries -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self._d

    def __bool__(self) -> bool:
        return bool(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def lead_key(self) -> int:
        if not self._d:
            raise AlgebraError("zero polynomial has no leading term")
        return max(self._d)

    def lead_coeff(self) -> int:
        return self._d[self.lead_key()]

    def lead_monomial(self) -> tuple[int, ...]:
        return self.ring.eng.unpack(self.lead_key())

    def total_degree(self) -> int:
        """Degree of the zero polynomial is -1 by convention."""
        if not self._d:
            return -1
        return max(self.ring.eng.total_deg(k) for k in self._d)

    def is_homogeneous(self) -> bool:
        degs = {self.ring.eng.total_deg(k) for k in self._d}
        return len(degs) <= 1

    def is_monomial(self) -> bool:
        return len(self._d) == 1

    def terms(self) -> list[tuple[int, tuple[int, ...]]]:
        """Terms as (coeff, exponent vector), descending in the term order."""
        eng = self.ring.eng
        return [(self._d[k], eng.unpack(k)) for k in sorted(self._d, reverse=True)]

    def coefficient(self, exps: tuple[int, ...]) -> int:
        return self._d.get(self.ring.eng.pack(tuple(exps)), 0)

    # -- equality ------------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self._d == other._d

    def __hash__(self) -> int:
        return hash((self.ring, tuple(sorted(self._d.items()))))

    # -- arithmetic ------------------------------------------------------------
    def _check_ring(self, other: "Polynomial") -> None:
        if self.ring is not other.ring and self.ring != other.ring:
            raise RingMismatchError("polynomials from different rings")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_ring(other)
        p = self.ring.field.p
        d = dict(self._d)
        for k, c in other._d.items():
            s = (d.get(k, 0) + c) % p
            if s:
                d[k] = s
            else:
                d.pop(k, None)
        return Polynomial(self.ring, d)

    def __neg__(self) -> "Polynomial":
        p = self.ring.field.p
        return Polynomial(self.ring, {k: p - c for k, c in self._d.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check_ring(other)
        p = self.ring.field.p
        eng = self.ring.eng
        a, b = self._d, other._d
        if len(a) > len(b):
            a, b = b, a
        d: dict[int, int] = {}
        for ka, ca in a.items():
            for kb, cb in b.items():
                k = eng.mul(ka, kb)
                s = (d.get(k, 0) + ca * cb) % p
                if s:
                    d[k] = s
                else:
                    d.pop(k, None)
        return Polynomial(self.ring, d)

    def scale(self, c: int) -> "Polynomial":
        c = self.ring.field.reduce(c)
        if c == 0:
            return self.ring.zero()
        p = self.ring.field.p
        return Polynomial(self.ring, {k: v * c % p for k, v in self._d.items()})

    def mul_term(self, key: int, coeff: int) -> "Polynomial":
        """Multiply by the single term coeff * (monomial with packed key)."""
        p = self.ring.field.p
        eng = self.ring.eng
        return Polynomial(
            self.ring, {eng.mul(k, key): v * coeff % p for k, v in self._d.items()}
        )

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise AlgebraError("negative polynomial power")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def monic(self) -> "Polynomial":
        if not self._d:
            return self
        inv = self.ring.field.inv(self.lead_coeff())
        return self.scale(inv)

    def frobenius_power(self, q: int) -> "Polynomial":
        """f^q for q a power of the characteristic: raise each term (additive)."""
        p = self.ring.field.p
        eng = self.ring.eng
        d = {}
        for k, c in self._d.items():
            exps = eng.unpack(k)
            d[eng.pack(tuple(e * q for e in exps))] = c  # c^q = c over F_p
        return Polynomial(self.ring, d)

    # -- text ------------------------------------------------------------------
    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"<{format_poly(self)}>"


# --------------------------------------------------------------------------
# canonical text format
# --------------------------------------------------------------------------

def format_poly(f: Polynomial) -> str:
    """Bit-exact canonical form: strictly descending terms joined by ' + ';
    coefficients in [1, p-1]; '1's and '^1's suppressed; zero prints '0'."""
    if f.is_zero():
        return "0"
    ring = f.ring
    parts = []
    for coeff, exps in f.terms():
        factors = []
        for v, e in zip(ring.variables, exps):
            if e == 0:
                continue
            factors.append(v if e == 1 else f"{v}^{e}")
        if not factors:
            parts.append(str(coeff))
        elif coeff == 1:
            parts.append("*".join(factors))
        else:
            parts.append(f"{coeff}*" + "*".join(factors))
    return " + ".join(parts)


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*^()]))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}", pos)
        if m.group("int") is not None:
            out.append(("int", int(m.group("int")), m.start()))
        elif m.group("name") is not None:
            out.append(("name", m.group("name"), m.start()))
        else:
            out.append(("op", m.group("op"), m.start()))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


def _parse_poly(ring: PolyRing, text: str) -> Polynomial:
    """Parser for sums of terms.  Accepts arbitrary integer coefficients
    (reduced mod p), omitted '*', '-' separators, and whitespace."""
    tokens = _tokenize(text)
    i = 0
    p = ring.field.p
    acc: dict[int, int] = {}

    def peek():
        return tokens[i]

    kind, val, pos = peek()
    if kind == "end":
        raise ParseError("empty polynomial text", pos)

    sign = 1
    # optional leading sign
    if kind == "op" and val in "+-":
        sign = -1 if val == "-" else 1
        i += 1

    while True:
        kind, val, pos = peek()
        # one term: optional coefficient, then variable factors
        coeff = None
        exps = [0] * ring.nvars
        saw_factor = False
        if kind == "int":
            coeff = val
            i += 1
            kind, val, pos = peek()
            if kind == "op" and val == "*":
                i += 1
                kind, val, pos = peek()
                if kind != "name":
                    raise ParseError("expected variable after '*'", pos)
        while kind == "name":
            saw_factor = True
            if val not in ring._var_index:
                raise ParseError(f"unknown variable {val!r}", pos)
            vi = ring._var_index[val]
            i += 1
            kind, val, pos = peek()
            e = 1
            if kind == "op" and val == "^":
                i += 1
                kind, val, pos = peek()
                if kind != "int":
                    raise ParseError("expected integer exponent after '^'", pos)
                e = val
                i += 1
                kind, val, pos = peek()
            exps[vi] += e
            if kind == "op" and val == "*":
                i += 1
                kind, val, pos = peek()
                if kind != "name" and kind != "int":
                    raise ParseError("expected factor after '*'", pos)
                if kind == "int":
                    raise ParseError("coefficient must lead its term", pos)
        if coeff is None:
            if not saw_factor:
                raise ParseError("expected term", pos)
            coeff = 1
        c = (sign * coeff) % p
        if c:
            k = ring.eng.pack(tuple(exps))
            s = (acc.get(k, 0) + c) % p
            if s:
                acc[k] = s
            else:
                acc.pop(k, None)
        kind, val, pos = peek()
        if kind == "end":
            break
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            i += 1
            kind, val, pos = peek()
            if kind == "end":
                raise ParseError("dangling sign", pos)
            continue
        raise ParseError(f"unexpected token {val!r}", pos)

    return Polynomial(ring, acc)


def parse_poly(ring: PolyRing, text: str) -> Polynomial:
    return _parse_poly(ring, text)
