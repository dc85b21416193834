"""Exact scalars: k = Q, L = Q[q, q^-1] and K = Q(q).

Rationals are :class:`fractions.Fraction`.  ``QLaurent`` stores a sparse
map exponent -> Fraction.  ``QRational`` is a reduced quotient of two
Laurent polynomials, normalized so the denominator is a monic polynomial
with nonzero constant term (all q-powers live in the numerator).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Tuple, Union

from .errors import NotDivisible

Rational = Fraction
ScalarLike = Union[int, Fraction, "QLaurent", "QRational"]


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"not a rational: {c!r}")


class QLaurent:
    """Element of L = Q[q, q^-1]; immutable."""

    __slots__ = ("_t", "_h")

    def __init__(self, terms: Union[Mapping[int, object], int, Fraction, None] = None):
        if terms is None:
            t = {}
        elif isinstance(terms, (int, Fraction)):
            t = {0: Fraction(terms)} if terms else {}
        else:
            t = {}
            for e, c in terms.items():
                c = _frac(c)
                if c:
                    t[int(e)] = c
        self._t: Dict[int, Fraction] = t
        self._h = None

    @classmethod
    def _raw(cls, t: Dict[int, Fraction]) -> "QLaurent":
        obj = object.__new__(cls)
        obj._t = t
        obj._h = None
        return obj

    @classmethod
    def q_power(cls, e: int, c=1) -> "QLaurent":
        return cls._raw({e: _frac(c)}) if c else cls._raw({})

    @property
    def terms(self) -> Dict[int, Fraction]:
        return dict(self._t)

    def items(self):
        return self._t.items()

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def min_exp(self) -> int:
        return min(self._t)

    def max_exp(self) -> int:
        return max(self._t)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = _as_laurent(other)
        if o is None:
            return NotImplemented
        t = dict(self._t)
        for e, c in o._t.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return QLaurent._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return QLaurent._raw({e: -c for e, c in self._t.items()})

    def __sub__(self, other):
        o = _as_laurent(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _as_laurent(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _as_laurent(other)
        if o is None:
            return NotImplemented
        if not self._t or not o._t:
            return QLaurent._raw({})
        t: Dict[int, Fraction] = {}
        for e1, c1 in self._t.items():
            for e2, c2 in o._t.items():
                e = e1 + e2
                t[e] = t.get(e, 0) + c1 * c2
        return QLaurent._raw({e: c for e, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if self.is_monomial():
                (e, c), = self._t.items()
                return QLaurent._raw({e * k: c ** k})
            return QRational(1, self) ** -k
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        o = _as_laurent(other)
        if o is None:
            if isinstance(other, QRational):
                return QRational(self) / other
            return NotImplemented
        if not o:
            raise ZeroDivisionError("division by zero in L")
        if o.is_monomial():
            (e, c), = o._t.items()
            return QLaurent._raw({k - e: v / c for k, v in self._t.items()})
        return QRational(self, o)

    def __rtruediv__(self, other):
        o = _as_laurent(other)
        if o is None:
            return NotImplemented
        return o / self

    def shift(self, s: int) -> "QLaurent":
        """Multiply by q^s."""
        if not s:
            return self
        return QLaurent._raw({e + s: c for e, c in self._t.items()})

    def scale(self, c) -> "QLaurent":
        c = _frac(c)
        if not c:
            return ZERO
        return QLaurent._raw({e: v * c for e, v in self._t.items()})

    def __eq__(self, other):
        if isinstance(other, QLaurent):
            return self._t == other._t
        if isinstance(other, (int, Fraction)):
            return self._t == ({0: Fraction(other)} if other else {})
        if isinstance(other, QRational):
            return other == self
        return NotImplemented

    def __hash__(self):
        if self._h is None:
            self._h = hash(frozenset(self._t.items()))
        return self._h

    def __repr__(self):
        return f"QLaurent({format_laurent(self)!r})"

    def __str__(self):
        return format_laurent(self)

    # semiclassical ----------------------------------------------------------
    def eval_at_one(self) -> Fraction:
        return sum(self._t.values(), Fraction(0))

    def exact_div(self, other: "QLaurent") -> "QLaurent":
        """Exact quotient in L, or NotDivisible."""
        o = _as_laurent(other)
        if o is None or not o:
            raise NotDivisible(f"cannot divide {self} by {other}")
        if not self._t:
            return ZERO
        a_shift, a = _to_poly(self)
        b_shift, b = _to_poly(o)
        quo, rem = _poly_divmod(a, b)
        if any(rem):
            raise NotDivisible(f"{self} is not divisible by {o} in L")
        return _from_poly(quo, a_shift - b_shift)

    def to_laurent(self) -> "QLaurent":
        return self


ZERO = QLaurent._raw({})
ONE = QLaurent._raw({0: Fraction(1)})
Q = QLaurent._raw({1: Fraction(1)})
Q_MINUS_ONE = QLaurent._raw({1: Fraction(1), 0: Fraction(-1)})


def _as_laurent(x):
    if isinstance(x, QLaurent):
        return x
    if isinstance(x, (int, Fraction)):
        return QLaurent(x)
    return None


def q_power(e: int) -> QLaurent:
    return QLaurent._raw({e: Fraction(1)})


# dense polynomial helpers (coefficient lists, low degree first) -------------

def _to_poly(a: QLaurent) -> Tuple[int, List[Fraction]]:
    lo, hi = a.min_exp(), a.max_exp()
    coeffs = [Fraction(0)] * (hi - lo + 1)
    for e, c in a.items():
        coeffs[e - lo] = c
    return lo, coeffs


def _from_poly(coeffs: Iterable[Fraction], shift: int = 0) -> QLaurent:
    return QLaurent._raw({i + shift: c for i, c in enumerate(coeffs) if c})


def _trim(p: List[Fraction]) -> List[Fraction]:
    while p and not p[-1]:
        p.pop()
    return p


def _poly_divmod(a: List[Fraction], b: List[Fraction]):
    a = _trim(list(a))
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return [], a
    quo = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        c = a[-1] / lead
        quo[k] = c
        for i, bc in enumerate(b):
            a[i + k] -= c * bc
        a.pop()
        _trim(a)
    return quo, a


def _poly_gcd(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    a = _trim(list(a))
    b = _trim(list(b))
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    if not a:
        return [Fraction(1)]
    lead = a[-1]
    return [c / lead for c in a]


# K = Q(q) -------------------------------------------------------------------

class QRational:
    """Element of K = Q(q) in canonical reduced form; immutable."""

    __slots__ = ("num", "den")

    def __init__(self, num: ScalarLike = 0, den: ScalarLike = 1):
        if isinstance(num, QRational) or isinstance(den, QRational):
            n = num if isinstance(num, QRational) else QRational(num)
            d = den if isinstance(den, QRational) else QRational(den)
            if d.is_zero():
                raise ZeroDivisionError("division by zero in K")
            num, den = n.num * d.den, n.den * d.num
        n = _as_laurent(num)
        d = _as_laurent(den)
        if n is None or d is None:
            raise TypeError(f"bad QRational parts {num!r}, {den!r}")
        if not d:
            raise ZeroDivisionError("division by zero in K")
        self.num, self.den = _reduce(n, d)

    @classmethod
    def _raw(cls, num: QLaurent, den: QLaurent) -> "QRational":
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_in_L(self) -> bool:
        return self.den == ONE

    def to_laurent(self) -> QLaurent:
        if not self.is_in_L():
            from .errors import CoefficientNotInL

            raise CoefficientNotInL(f"{self} is not in L")
        return self.num

    def _coerce(self, other):
        if isinstance(other, QRational):
            return other
        o = _as_laurent(other)
        if o is None:
            return None
        return QRational._raw(o, ONE)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QRational(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return QRational._raw(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QRational(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero in K")
        return QRational(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return QRational(self.den ** -k, self.num ** -k)
        return QRational(self.num ** k, self.den ** k)

    def shift(self, s: int) -> "QRational":
        return QRational._raw(self.num.shift(s), self.den)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        if self.is_in_L():
            return hash(self.num)
        return hash((self.num, self.den))

    def eval_at_one(self) -> Fraction:
        d = self.den.eval_at_one()
        if not d:
            raise ZeroDivisionError(f"{self} has a pole at q = 1")
        return self.num.eval_at_one() / d

    def __repr__(self):
        return f"QRational({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)


def _reduce(n: QLaurent, d: QLaurent) -> Tuple[QLaurent, QLaurent]:
    if not n:
        return ZERO, ONE
    ns, np_ = _to_poly(n)
    ds, dp = _to_poly(d)
    g = _poly_gcd(np_, dp)
    if len(g) > 1:
        np_, _ = _poly_divmod(np_, g)
        dp, _ = _poly_divmod(dp, g)
    lead = _trim(dp)[-1]
    np_ = [c / lead for c in np_]
    dp = [c / lead for c in dp]
    return _from_poly(np_, ns - ds), _from_poly(dp)


# semiclassical operations ------------------------------------------------------

def eval_at_one(a: ScalarLike) -> Fraction:
    """Substitute q = 1."""
    if isinstance(a, (int, Fraction)):
        return Fraction(a)
    return a.eval_at_one()


def divide_by_q_minus_one(a: ScalarLike) -> QLaurent:
    """Exact quotient a / (q - 1) in L; NotDivisible when a(1) != 0."""
    if isinstance(a, QRational):
        a = a.to_laurent()
    a = _as_laurent(a) if not isinstance(a, QLaurent) else a
    if a.eval_at_one():
        raise NotDivisible(f"{a} does not vanish at q = 1")
    return a.exact_div(Q_MINUS_ONE)


def is_in_L(a: ScalarLike) -> bool:
    if isinstance(a, QRational):
        return a.is_in_L()
    return True


def to_laurent(a: ScalarLike) -> QLaurent:
    if isinstance(a, QLaurent):
        return a
    if isinstance(a, QRational):
        return a.to_laurent()
    return QLaurent(a)


def as_K(a: ScalarLike) -> QRational:
    return a if isinstance(a, QRational) else QRational(a)


def normalize(a: ScalarLike):
    """Return a as a QLaurent when it lies in L, otherwise unchanged."""
    if isinstance(a, QRational) and a.is_in_L():
        return a.num
    return a


# text form ---------------------------------------------------------------------

def format_fraction(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_terms(items, var: str) -> str:
    out = []
    for e, c in items:
        mag = abs(c)
        if e == 0:
            body = format_fraction(mag)
        else:
            mono = var if e == 1 else f"{var}^{e}"
            body = mono if mag == 1 else f"{format_fraction(mag)}*{mono}"
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out) or "0"


def format_laurent(a: QLaurent) -> str:
    """Ascending powers of q, common denominator pulled out: ``(1 - q^2)/2``."""
    if not a:
        return "0"
    items = sorted(a.items())
    den = 1
    for _, c in items:
        den = den * c.denominator // _gcd(den, c.denominator)
    if den == 1 or len(items) == 1:
        return _format_terms(items, "q")
    body = _format_terms([(e, c * den) for e, c in items], "q")
    return f"({body})/{den}"


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def format_scalar(a: ScalarLike) -> str:
    if isinstance(a, QRational):
        if a.is_in_L():
            return format_laurent(a.num)
        return f"({format_laurent(a.num)})/({format_laurent(a.den)})"
    if isinstance(a, QLaurent):
        return format_laurent(a)
    return format_fraction(Fraction(a))


def parse_scalar(text: str):
    """Parse a scalar in q; returns QLaurent when the value lies in L."""
    from .textparse import parse_expression

    val = parse_expression(text, {"q": Q}, what="scalar")
    if isinstance(val, (int, Fraction)):
        return QLaurent(val)
    return normalize(val)


def parse_qrational(text: str) -> QRational:
    return as_K(parse_scalar(text))
