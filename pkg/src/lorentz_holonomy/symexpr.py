"""Exact sparse polynomials in Walker coordinates and formal functions of ``u``.

An :class:`Expr` is a finite sum ``c * m`` with ``c`` rational and ``m`` a
monomial in the coordinate variables ``v, x1 .. x8, u`` and in the formal
symbols ``F_j^(k)`` (the k-th derivative of the j-th formal function of u).

Monomials are packed into a single Python integer, one 16-bit slot per
variable, with ``v`` in the most significant slot.  Integer comparison of two
packed monomials is then lexicographic order on
``(v, x1, ..., x8, u, F0, F0', ..., F1, ...)``, and multiplying monomials is
integer addition.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

__all__ = [
    "Expr",
    "JetPoint",
    "DenomExpr",
    "InsufficientJet",
    "DivisionByZeroExpr",
    "ExprParseError",
    "parse_expr",
    "coord",
    "formal",
    "const",
    "ZERO",
    "ONE",
    "MAX_X",
    "MAX_FUNCTIONS",
    "MAX_DERIV",
]

MAX_X = 8
MAX_FUNCTIONS = 8
MAX_DERIV = 16

_BITS = 16
_MASK = (1 << _BITS) - 1
_GUARD_BIT = 1 << (_BITS - 1)

_SLOT_V = 0
_SLOT_U = MAX_X + 1
_FIRST_F = MAX_X + 2
_NSLOTS = _FIRST_F + MAX_FUNCTIONS * MAX_DERIV

_GUARD = 0
for _s in range(_NSLOTS):
    _GUARD |= _GUARD_BIT << (_BITS * (_NSLOTS - 1 - _s))
# all formal-symbol slots live in the low bits
_F_REGION = (1 << (_BITS * (_NSLOTS - _FIRST_F))) - 1


class InsufficientJet(ValueError):
    """Evaluation needs a derivative of a formal function beyond the given jet."""


class DivisionByZeroExpr(ZeroDivisionError):
    pass


class ExprParseError(ValueError):
    pass


def _offset(slot: int) -> int:
    return _BITS * (_NSLOTS - 1 - slot)


def _unit(slot: int) -> int:
    return 1 << _offset(slot)


def _coord_slot(name: str) -> int:
    if name == "v":
        return _SLOT_V
    if name == "u":
        return _SLOT_U
    if name.startswith("x") and name[1:].isdigit():
        i = int(name[1:])
        if 1 <= i <= MAX_X:
            return i
    raise ValueError(f"unknown coordinate {name!r}")


def _f_slot(j: int, k: int) -> int:
    if not 0 <= j < MAX_FUNCTIONS:
        raise ValueError(f"formal function index {j} out of range")
    if not 0 <= k < MAX_DERIV:
        raise ValueError(f"derivative order {k} of F{j} exceeds {MAX_DERIV - 1}")
    return _FIRST_F + j * MAX_DERIV + k


def _slot_name(slot: int, names: Sequence[str] | None = None) -> str:
    if slot == _SLOT_V:
        return "v"
    if slot == _SLOT_U:
        return "u"
    if slot < _SLOT_U:
        return f"x{slot}"
    j, k = divmod(slot - _FIRST_F, MAX_DERIV)
    base = names[j] if names is not None and j < len(names) else f"F{j}"
    return f"{base}{chr(39) * k}(u)"


@lru_cache(maxsize=1 << 16)
def _decode(m: int) -> tuple[tuple[int, int], ...]:
    """Packed monomial -> ((slot, exponent), ...) in increasing slot order."""
    out = []
    while m:
        pos = (m.bit_length() - 1) // _BITS
        e = (m >> (pos * _BITS)) & _MASK
        out.append((_NSLOTS - 1 - pos, e))
        m -= e << (pos * _BITS)
    return tuple(out)


def _encode(pairs: Iterable[tuple[int, int]]) -> int:
    m = 0
    for slot, e in pairs:
        if e:
            m += e << _offset(slot)
    return m


def _divides(b: int, a: int) -> bool:
    """True iff monomial b divides monomial a."""
    return ((a | _GUARD) - b) & _GUARD == _GUARD


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _coerce_coeff(c):
    if isinstance(c, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return _norm(c)
    if isinstance(c, str):
        return _norm(Fraction(c))
    raise TypeError(f"cannot use {type(c).__name__} as an exact coefficient")


class Expr:
    """Immutable exact polynomial; see the module docstring for the variables.

    Two expressions are equal iff their canonical term maps agree.
    """

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Mapping[int, int | Fraction] | None = None):
        # caller-supplied maps are copied and cleaned; internal code uses _make
        t = {}
        if terms:
            for m, c in terms.items():
                c = _coerce_coeff(c)
                if c:
                    t[m] = c
        self._t = t
        self._hash = None

    @classmethod
    def _make(cls, t: dict) -> "Expr":
        e = object.__new__(cls)
        e._t = t
        e._hash = None
        return e

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, c) -> "Expr":
        c = _coerce_coeff(c)
        return cls._make({0: c} if c else {})

    @classmethod
    def coord(cls, name: str) -> "Expr":
        return cls._make({_unit(_coord_slot(name)): 1})

    @classmethod
    def formal(cls, j: int, k: int = 0) -> "Expr":
        return cls._make({_unit(_f_slot(j, k)): 1})

    @classmethod
    def sum(cls, items: Iterable["Expr"]) -> "Expr":
        acc: dict = {}
        for e in items:
            for m, c in e._t.items():
                r = acc.get(m, 0) + c
                if r:
                    acc[m] = _norm(r)
                else:
                    acc.pop(m, None)
        return cls._make(acc)

    @classmethod
    def sum_products(cls, pairs: Iterable[tuple["Expr", "Expr"]]) -> "Expr":
        """``sum(a * b for a, b in pairs)`` accumulated into one term map."""
        acc: dict = {}
        get = acc.get
        for a, b in pairs:
            if not a._t or not b._t:
                continue
            for m1, c1 in a._t.items():
                for m2, c2 in b._t.items():
                    m = m1 + m2
                    r = get(m, 0) + c1 * c2
                    if r:
                        acc[m] = r
                    else:
                        del acc[m]
        for m, c in acc.items():
            if type(c) is Fraction and c.denominator == 1:
                acc[m] = c.numerator
        return cls._make(acc)

    # -- basic protocol -----------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_value(self) -> int | Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self._t.get(0, 0)

    def __eq__(self, other) -> bool:
        if isinstance(other, Expr):
            return self._t == other._t
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._t == ({0: _norm(Fraction(other))} if other else {})
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def terms(self) -> list[tuple[int | Fraction, tuple[tuple[int, int], ...]]]:
        """Canonical term list, lex-descending: [(coeff, ((slot, exp), ...)), ...]."""
        return [(self._t[m], _decode(m)) for m in sorted(self._t, reverse=True)]

    def __len__(self) -> int:
        return len(self._t)

    # -- arithmetic ---------------------------------------------------------
    @staticmethod
    def _lift(x) -> "Expr":
        if isinstance(x, Expr):
            return x
        return Expr.const(x)

    def __add__(self, other):
        if isinstance(other, DenomExpr):
            return NotImplemented
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        if not other._t:
            return self
        if not self._t:
            return other
        t = dict(self._t)
        for m, c in other._t.items():
            r = t.get(m, 0) + c
            if r:
                t[m] = _norm(r)
            else:
                del t[m]
        return Expr._make(t)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr._make({m: -c for m, c in self._t.items()})

    def __pos__(self) -> "Expr":
        return self

    def __sub__(self, other):
        if isinstance(other, DenomExpr):
            return NotImplemented
        try:
            other = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, DenomExpr):
            return NotImplemented
        if not isinstance(other, Expr):
            try:
                c = _coerce_coeff(other)
            except TypeError:
                return NotImplemented
            return self.scale(c)
        if not self._t or not other._t:
            return _ZERO
        if len(other._t) == 1 and 0 in other._t:
            return self.scale(other._t[0])
        if len(self._t) == 1 and 0 in self._t:
            return other.scale(self._t[0])
        return Expr.sum_products(((self, other),))

    __rmul__ = __mul__

    def scale(self, c) -> "Expr":
        c = _coerce_coeff(c)
        if not c:
            return _ZERO
        if c == 1:
            return self
        return Expr._make({m: _norm(v * c) for m, v in self._t.items()})

    def __truediv__(self, other):
        if isinstance(other, Expr):
            if not other._t:
                raise DivisionByZeroExpr("division by the zero expression")
            if other.is_constant():
                return self.scale(Fraction(1) / other.constant_value())
            q = self.divide_exact(other)
            if q is None:
                raise ValueError(f"{other} does not divide {self}")
            return q
        c = _coerce_coeff(other)
        if not c:
            raise DivisionByZeroExpr("division by zero")
        return self.scale(Fraction(1) / c)

    def __pow__(self, k: int) -> "Expr":
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- calculus -----------------------------------------------------------
    def diff(self, var: str) -> "Expr":
        """Partial derivative by a coordinate name (``'v'``, ``'x3'``, ``'u'``)."""
        slot = _coord_slot(var)
        off = _offset(slot)
        unit = 1 << off
        acc: dict = {}
        for m, c in self._t.items():
            e = (m >> off) & _MASK
            if e:
                mm = m - unit
                r = acc.get(mm, 0) + c * e
                if r:
                    acc[mm] = r
                else:
                    del acc[mm]
            if slot == _SLOT_U and m & _F_REGION:
                for s, fe in _decode(m & _F_REGION):
                    j, k = divmod(s - _FIRST_F, MAX_DERIV)
                    if k + 1 >= MAX_DERIV:
                        raise ValueError(f"derivative order of F{j} exceeds {MAX_DERIV - 1}")
                    mm = m - _unit(s) + _unit(s + 1)
                    r = acc.get(mm, 0) + c * fe
                    if r:
                        acc[mm] = r
                    else:
                        del acc[mm]
        return Expr._make({m: _norm(c) for m, c in acc.items()})

    # -- inspection ---------------------------------------------------------
    def variables(self) -> set[str]:
        """Coordinate names and formal symbols (as ``'F0'''`` strings) present."""
        out = set()
        for m in self._t:
            for s, _ in _decode(m):
                out.add(_slot_name(s))
        return out

    def depends_on(self, var: str) -> bool:
        off = _offset(_coord_slot(var))
        return any((m >> off) & _MASK for m in self._t)

    def degree(self, var: str) -> int:
        off = _offset(_coord_slot(var))
        return max(((m >> off) & _MASK for m in self._t), default=0)

    def formal_orders(self) -> dict[int, int]:
        """Highest derivative order of each formal function that appears."""
        out: dict[int, int] = {}
        for m in self._t:
            if m & _F_REGION:
                for s, _ in _decode(m & _F_REGION):
                    j, k = divmod(s - _FIRST_F, MAX_DERIV)
                    out[j] = max(out.get(j, -1), k)
        return out

    def has_formal(self) -> bool:
        return any(m & _F_REGION for m in self._t)

    # -- substitution -------------------------------------------------------
    def subs(self, mapping: Mapping[str, "Expr"]) -> "Expr":
        """Substitute coordinates by expressions, e.g. ``{'x2': x2 + b}``.

        Formal symbols are left alone, so substituting for ``u`` is refused
        when formal functions are present.
        """
        slots = {_coord_slot(k): self._lift(v) for k, v in mapping.items()}
        if _SLOT_U in slots and self.has_formal():
            raise ValueError("cannot substitute u in an expression with formal functions of u")
        parts = []
        for m, c in self._t.items():
            keep = []
            factors = []
            for s, e in _decode(m):
                if s in slots:
                    factors.append(slots[s] ** e)
                else:
                    keep.append((s, e))
            term = Expr._make({_encode(keep): c})
            for f in factors:
                term = term * f
            parts.append(term)
        return Expr.sum(parts)

    def subs_formal(self, mapping: Mapping[tuple[int, int], "Expr"]) -> "Expr":
        """Substitute individual formal symbols ``(j, k) -> expr``."""
        slots = {_f_slot(j, k): self._lift(v) for (j, k), v in mapping.items()}
        parts = []
        for m, c in self._t.items():
            keep = []
            factors = []
            for s, e in _decode(m):
                if s in slots:
                    factors.append(slots[s] ** e)
                else:
                    keep.append((s, e))
            term = Expr._make({_encode(keep): c})
            for f in factors:
                term = term * f
            parts.append(term)
        return Expr.sum(parts)

    def freeze(self, functions: Iterable[int]) -> "Expr":
        """Treat the given formal functions as constants: every F_j^(k), k >= 1, -> 0."""
        dead = 0
        for j in functions:
            for k in range(1, MAX_DERIV):
                dead |= _MASK << _offset(_f_slot(j, k))
        if not dead:
            return self
        return Expr._make({m: c for m, c in self._t.items() if not m & dead})

    def rename_formal(self, mapping: Mapping[int, int]) -> "Expr":
        """Relabel formal functions j -> mapping[j] (all derivative orders)."""
        acc: dict = {}
        for m, c in self._t.items():
            pairs = []
            for s, e in _decode(m):
                if s >= _FIRST_F:
                    j, k = divmod(s - _FIRST_F, MAX_DERIV)
                    s = _f_slot(mapping.get(j, j), k)
                pairs.append((s, e))
            # _encode adds exponents, so merged symbols combine correctly
            mm = _encode(pairs)
            r = acc.get(mm, 0) + c
            if r:
                acc[mm] = _norm(r)
            else:
                acc.pop(mm, None)
        return Expr._make(acc)

    # -- evaluation ---------------------------------------------------------
    def eval(self, point: "JetPoint") -> int | Fraction:
        total = 0
        for m, c in self._t.items():
            val = c
            for s, e in _decode(m):
                val *= point._slot_value(s) ** e
                if not val:
                    break
            total += val
        return _norm(total)

    # -- division -----------------------------------------------------------
    def leading(self) -> tuple[int, int | Fraction]:
        m = max(self._t)
        return m, self._t[m]

    def divide_exact(self, other: "Expr") -> "Expr | None":
        """Return q with ``self == q * other`` if such a polynomial exists."""
        if not other._t:
            raise DivisionByZeroExpr("division by the zero expression")
        if not self._t:
            return _ZERO
        lm_b, lc_b = other.leading()
        inv = Fraction(1) / lc_b
        rem = dict(self._t)
        quot: dict = {}
        while rem:
            lm = max(rem)
            if not _divides(lm_b, lm):
                return None
            qm = lm - lm_b
            qc = _norm(rem[lm] * inv)
            quot[qm] = qc
            for m, c in other._t.items():
                mm = qm + m
                r = rem.get(mm, 0) - qc * c
                if r:
                    rem[mm] = r
                else:
                    rem.pop(mm, None)
        return Expr._make(quot)

    def content(self) -> Fraction:
        """Positive rational content, sign taken from the leading coefficient."""
        from math import gcd, lcm

        if not self._t:
            return Fraction(0)
        nums = 0
        dens = 1
        for c in self._t.values():
            c = Fraction(c)
            nums = gcd(nums, c.numerator)
            dens = lcm(dens, c.denominator)
        cont = Fraction(nums, dens)
        return cont if self.leading()[1] > 0 else -cont

    def monomial_gcd(self) -> "Expr":
        if not self._t:
            return ONE
        it = iter(self._t)
        g = dict(_decode(next(it)))
        for m in it:
            d = dict(_decode(m))
            g = {s: min(e, d[s]) for s, e in g.items() if s in d}
            if not g:
                break
        return Expr._make({_encode(g.items()): 1})

    # -- printing -----------------------------------------------------------
    def to_string(self, names: Sequence[str] | None = None) -> str:
        if not self._t:
            return "0"
        parts = []
        for m in sorted(self._t, reverse=True):
            c = self._t[m]
            factors = []
            for s, e in _decode(m):
                nm = _slot_name(s, names)
                factors.append(nm if e == 1 else f"{nm}^{e}")
            neg = c < 0
            a = -c if neg else c
            if factors:
                body = "*".join(factors)
                if a != 1:
                    body = f"{a}*{body}"
            else:
                body = str(a)
            parts.append(("-" if neg else "+", body))
        sign, first = parts[0]
        out = ("-" if sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"Expr({self.to_string()!r})"


_ZERO = Expr._make({})
ZERO = _ZERO
ONE = Expr._make({0: 1})


def coord(name: str) -> Expr:
    return Expr.coord(name)


def formal(j: int, k: int = 0) -> Expr:
    return Expr.formal(j, k)


def const(c) -> Expr:
    return Expr.const(c)


class JetPoint:
    """Rational values of the coordinates and finite jets of the formal functions.

    ``coords`` maps coordinate names to rationals (missing coordinates are 0);
    ``jets[j]`` is ``(F_j(u0), F_j'(u0), ..., F_j^(K)(u0))``.
    """

    def __init__(self, coords: Mapping[str, object] | None = None,
                 jets: Mapping[int, Sequence[object]] | None = None):
        self.coords = {k: _coerce_coeff(Fraction(v) if isinstance(v, float) else v)
                       for k, v in (coords or {}).items()}
        for k in self.coords:
            _coord_slot(k)
        self.jets = {int(j): tuple(_coerce_coeff(x) for x in vals)
                     for j, vals in (jets or {}).items()}

    def _slot_value(self, slot: int):
        if slot < _FIRST_F:
            return self.coords.get(_slot_name(slot), 0)
        j, k = divmod(slot - _FIRST_F, MAX_DERIV)
        vals = self.jets.get(j, ())
        if k >= len(vals):
            raise InsufficientJet(f"F{j}^({k}) needs a jet of order {k}, have {len(vals) - 1}")
        return vals[k]

    def to_json(self) -> dict:
        return {"coords": {k: str(v) for k, v in sorted(self.coords.items())},
                "jets": {str(j): [str(x) for x in vals] for j, vals in sorted(self.jets.items())}}

    @classmethod
    def from_json(cls, data: Mapping) -> "JetPoint":
        coords = data.get("coords", {k: v for k, v in data.items() if k != "jets"})
        jets = data.get("jets", {})
        return cls({k: _coerce_coeff(str(v)) for k, v in coords.items()},
                   {int(j): [_coerce_coeff(str(x)) for x in vals] for j, vals in jets.items()})

    def __repr__(self) -> str:
        return f"JetPoint({self.coords!r}, {self.jets!r})"


class DenomExpr:
    """``num / base**power`` with a fixed polynomial denominator base.

    Used when the transversal metric ``h`` has a non-constant determinant; all
    quantities derived from one metric share the base ``det h``.
    """

    __slots__ = ("num", "base", "power")

    def __init__(self, num: Expr, base: Expr, power: int = 0):
        self.num = num
        self.base = base
        self.power = power

    def _lift(self, x) -> "DenomExpr":
        if isinstance(x, DenomExpr):
            if x.base is not self.base and x.base != self.base:
                raise ValueError("denominator bases differ")
            return x
        return DenomExpr(Expr._lift(x), self.base, 0)

    def _align(self, other: "DenomExpr") -> tuple[Expr, Expr, int]:
        k = max(self.power, other.power)
        a = self.num if self.power == k else self.num * self.base ** (k - self.power)
        b = other.num if other.power == k else other.num * self.base ** (k - other.power)
        return a, b, k

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_zero(self) -> bool:
        return not self.num

    def __add__(self, other):
        other = self._lift(other)
        if not other.num:
            return self
        if not self.num:
            return other
        a, b, k = self._align(other)
        return DenomExpr(a + b, self.base, k)

    __radd__ = __add__

    def __neg__(self):
        return DenomExpr(-self.num, self.base, self.power)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        if not self.num or not other.num:
            return DenomExpr(_ZERO, self.base, 0)
        return DenomExpr(self.num * other.num, self.base, self.power + other.power)

    __rmul__ = __mul__

    def scale(self, c):
        return DenomExpr(self.num.scale(c), self.base, self.power)

    def diff(self, var: str) -> "DenomExpr":
        dn = self.num.diff(var)
        if self.power == 0:
            return DenomExpr(dn, self.base, 0)
        db = self.base.diff(var)
        return DenomExpr(dn * self.base - (self.num * db).scale(self.power),
                         self.base, self.power + 1)

    def __eq__(self, other) -> bool:
        if isinstance(other, (DenomExpr, Expr, int, Fraction)):
            return not (self - other).num
        return NotImplemented

    __hash__ = None

    def reduced(self) -> "DenomExpr":
        num, k = self.num, self.power
        while k and num:
            q = num.divide_exact(self.base)
            if q is None:
                break
            num, k = q, k - 1
        if not num:
            k = 0
        return DenomExpr(num, self.base, k)

    def as_pair(self) -> tuple[Expr, Expr]:
        r = self.reduced()
        return r.num, r.base ** r.power

    def freeze(self, functions) -> "DenomExpr":
        return DenomExpr(self.num.freeze(functions), self.base, self.power)

    def eval(self, point: JetPoint):
        d = self.base.eval(point)
        if not d:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return _norm(Fraction(self.num.eval(point)) / Fraction(d) ** self.power)

    def to_string(self, names=None) -> str:
        r = self.reduced()
        if r.power == 0:
            return r.num.to_string(names)
        den = f"({r.base.to_string(names)})"
        if r.power > 1:
            den += f"^{r.power}"
        return f"({r.num.to_string(names)})/{den}"

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"DenomExpr({self.to_string()!r})"


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)('*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprParseError(f"unexpected character at {pos} in {text!r}")
        num, name, primes, op = m.groups()
        if num is not None:
            toks.append(("num", int(num)))
        elif name is not None:
            toks.append(("name", (name, len(primes))))
        else:
            toks.append(("op", "^" if op == "**" else op))
        pos = m.end()
    toks.append(("end", None))
    return toks


class _Parser:
    def __init__(self, text, functions, forbid):
        self.toks = _tokenize(text)
        self.i = 0
        self.text = text
        self.functions = functions
        self.forbid = forbid

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op):
        t = self.take()
        if t != ("op", op):
            raise ExprParseError(f"expected {op!r} in {self.text!r}")

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek()[0] != "end":
            raise ExprParseError(f"trailing input in {self.text!r}")
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            e = e + t if op == "+" else e - t
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            f = self.unary()
            if op == "*":
                e = e * f
            else:
                if not f.is_constant():
                    raise ExprParseError(f"division by a non-constant in {self.text!r}")
                if not f:
                    raise ExprParseError(f"division by zero in {self.text!r}")
                e = e.scale(Fraction(1) / Fraction(f.constant_value()))
        return e

    def unary(self) -> Expr:
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            t = self.take()
            if t[0] != "num":
                raise ExprParseError(f"exponent must be a non-negative integer in {self.text!r}")
            return base ** t[1]
        return base

    def atom(self) -> Expr:
        kind, val = self.take()
        if kind == "num":
            return Expr.const(val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        if kind == "name":
            name, primes = val
            if self.peek() == ("op", "("):
                j = self.functions.get(name)
                if j is None:
                    raise ExprParseError(f"unknown formal function {name!r} in {self.text!r}")
                self.take()
                arg = self.take()
                if arg != ("name", ("u", 0)):
                    raise ExprParseError(f"formal functions take the argument u only ({self.text!r})")
                self.expect_op(")")
                return Expr.formal(j, primes)
            if primes:
                raise ExprParseError(f"primes only apply to formal functions ({self.text!r})")
            if name in self.forbid:
                raise ExprParseError(f"variable {name!r} is not allowed here ({self.text!r})")
            try:
                return Expr.coord(name)
            except ValueError:
                raise ExprParseError(f"unknown variable {name!r} in {self.text!r}") from None
        raise ExprParseError(f"unexpected token {val!r} in {self.text!r}")


def parse_expr(text: str, functions: Sequence[str] | None = None,
               forbid: Iterable[str] = ()) -> Expr:
    """Parse the expression grammar used by metric files and the CLI.

    ``functions`` lists formal function names; the j-th name denotes F_j.
    By default ``F0 .. F7`` are recognized.  Derivatives are written with
    primes, ``F0''(u)``.
    """
    if functions is None:
        table = {f"F{j}": j for j in range(MAX_FUNCTIONS)}
    else:
        if len(functions) > MAX_FUNCTIONS:
            raise ExprParseError(f"at most {MAX_FUNCTIONS} formal functions")
        table = {name: j for j, name in enumerate(functions)}
    return _Parser(text, table, set(forbid)).parse()
