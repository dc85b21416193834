"""Noncommutative arithmetic.

* :class:`OrePresentation` / :class:`OreElement`: iterated Ore extension
  L[X_1][X_2;σ_2,Δ_2]...[X_n;σ_n,Δ_n] in the normal form X_1^{k_1}...X_n^{k_n}.
  The relations are X_j X_i = q^{λ_{ij}} X_i X_j + Δ_j(X_i) for i < j.
* :class:`QTorusPresentation` / :class:`TorusElement`: the quantum torus with
  Y_i Y_j = q^{l_{ij}} Y_j Y_i, normal order Y_1^{v_1}...Y_n^{v_n}.
* :class:`TorusEmbedding`: the map A -> Γ_q given by the Y-sequence and its
  inverse on the image (peeling).

Coefficients are duck-typed: QLaurent normally, QRational where a division
by a non-unit happened.  Structure constants are always QLaurent.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import CapExceeded, NotInSubalgebra, ParseError, SupportViolation
from .poisson import CommLaurent, format_monomial, order_key
from .scalars import (
    ONE,
    Q,
    QLaurent,
    QRational,
    format_scalar,
    normalize,
    q_power,
)
from .textparse import indexed_name, parse_expression

Exp = Tuple[int, ...]
DEFAULT_MAX_PEEL = 100000


def _acc(out: Dict, e, c) -> None:
    v = out.get(e)
    out[e] = c if v is None else v + c


def _clean(t: Dict) -> Dict:
    return {e: c for e, c in t.items() if c}


def _scalar(c):
    if isinstance(c, (int, Fraction)):
        return QLaurent(c)
    if isinstance(c, (QLaurent, QRational)):
        return c
    return None


def _div(c, s):
    """c / s, staying in L when possible."""
    if isinstance(s, QLaurent) and s.is_monomial():
        return c / s
    return normalize(QRational(c) / QRational(s))


def _format_term(c, mono: str) -> Tuple[bool, str]:
    """(negative?, body) for coefficient c times the monomial text."""
    c = normalize(c)
    if isinstance(c, QLaurent) and c.is_monomial():
        (e, v), = c.items()
        neg = v < 0
        mag = QLaurent({e: -v}) if neg else c
        s = format_scalar(mag)
        if not mono:
            return neg, s
        if s == "1":
            return neg, mono
        return neg, f"{s}*{mono}"
    s = format_scalar(c)
    if isinstance(c, QLaurent) and not s.startswith("("):
        s = f"({s})"
    return False, (f"{s}*{mono}" if mono else s)


def _format_terms(terms: Mapping[Exp, object], prefix: str) -> str:
    if not terms:
        return "0"
    out = []
    for e in sorted(terms, key=order_key, reverse=True):
        neg, body = _format_term(terms[e], format_monomial(e, prefix))
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


# ---------------------------------------------------------------------------
# Ore extensions
# ---------------------------------------------------------------------------

class OrePresentation:
    """Generators X_1..X_n with X_j X_i = q^{lam[i][j]} X_i X_j + Δ_j(X_i), i < j.

    ``delta`` maps (i, j) to a dict exponent -> coefficient for Δ_j(X_i).
    Instances are treated as immutable; the multiplication caches are the
    only mutable state.
    """

    def __init__(self, n: int, lam: Mapping[Tuple[int, int], int],
                 delta: Optional[Mapping[Tuple[int, int], Mapping[Exp, object]]] = None,
                 tier: str = "L", check_support: bool = True):
        self.n = n
        self.tier = tier
        self._lam = [[0] * n for _ in range(n)]
        for (i, j), v in lam.items():
            if not 1 <= i < j <= n:
                raise ValueError(f"lambda index ({i},{j}) out of range")
            self._lam[i - 1][j - 1] = int(v)
        self._delta: Dict[Tuple[int, int], Dict[Exp, object]] = {}
        for (i, j), t in (delta or {}).items():
            if not 1 <= i < j <= n:
                raise ValueError(f"delta index ({i},{j}) out of range")
            t = _clean({tuple(e): c for e, c in (t.items() if hasattr(t, "items") else t._t.items())})
            if not t:
                continue
            if check_support:
                for e in t:
                    bad = [v + 1 for v, k in enumerate(e) if k and not i < v + 1 < j]
                    if bad:
                        raise SupportViolation(
                            f"Δ_{j}(X_{i}) uses X_{bad[0]}, outside the open interval ({i},{j})")
            self._delta[(i, j)] = t
        self._has_delta = [False] * (n + 1)
        for (_, j) in self._delta:
            self._has_delta[j] = True
        self._lg: Dict = {}
        self._dm: Dict = {}
        self._mm: Dict = {}

    # construction helpers ---------------------------------------------------
    @classmethod
    def from_relations(cls, n: int, lam: Mapping[Tuple[int, int], int],
                       rel_delta: Mapping[Tuple[int, int], Mapping[Exp, object]], **kw) -> "OrePresentation":
        """Build from the relation form X_i X_j = q^{-λ_{ij}} X_j X_i + Δ_{i,j}."""
        delta = {}
        for (i, j), t in rel_delta.items():
            lij = lam.get((i, j), 0)
            items = t.items() if hasattr(t, "items") else t._t.items()
            delta[(i, j)] = {e: -(c * q_power(lij)) for e, c in items}
        return cls(n, lam, delta, **kw)

    @classmethod
    def commutative(cls, n: int) -> "OrePresentation":
        return cls(n, {})

    def lam(self, i: int, j: int) -> int:
        return self._lam[i - 1][j - 1]

    def lambda_matrix(self) -> List[List[int]]:
        return [row[:] for row in self._lam]

    def delta_terms(self, i: int, j: int) -> Dict[Exp, object]:
        return dict(self._delta.get((i, j), {}))

    def delta_gen(self, i: int, j: int) -> "OreElement":
        """Δ_j(X_i)."""
        return OreElement(self, self._delta.get((i, j), {}))

    def relation_delta(self, i: int, j: int) -> "OreElement":
        """Δ_{i,j} of X_i X_j = q^{-λ_{ij}} X_j X_i + Δ_{i,j}."""
        s = -self.lam(i, j)
        return OreElement(self, {e: -(c * q_power(s)) for e, c in self._delta.get((i, j), {}).items()})

    def nonzero_delta_pairs(self) -> List[Tuple[int, int]]:
        return sorted(self._delta)

    def gen(self, i: int) -> "OreElement":
        e = tuple(1 if k == i - 1 else 0 for k in range(self.n))
        return OreElement(self, {e: ONE})

    def one(self) -> "OreElement":
        return OreElement(self, {(0,) * self.n: ONE})

    def zero(self) -> "OreElement":
        return OreElement(self, {})

    def monomial(self, e: Exp, c=ONE) -> "OreElement":
        return OreElement(self, {tuple(e): _scalar(c)})

    def same_relations(self, other: "OrePresentation") -> bool:
        if self.n != other.n or self._lam != other._lam:
            return False
        keys = set(self._delta) | set(other._delta)
        return all(_clean(self._delta.get(k, {})) == _clean(other._delta.get(k, {})) for k in keys)

    # kernel -------------------------------------------------------------------
    def _left_gen(self, j: int, a: Exp) -> Dict[Exp, object]:
        """X_j * X^a in normal form."""
        key = (j, a)
        r = self._lg.get(key)
        if r is not None:
            return r
        jj = j - 1
        lamcol = [row[jj] for row in self._lam]
        s = 0
        for h in range(jj):
            if a[h]:
                s += a[h] * lamcol[h]
        b = a[:jj] + (a[jj] + 1,) + a[jj + 1:]
        out: Dict[Exp, object] = {b: q_power(s)}
        if self._has_delta[j] and any(a[:jj]):
            P = a[:jj] + (0,) * (self.n - jj)
            dP = self._delta_mono(j, P)
            if dP:
                tail = a[jj:]
                for e, c in dP.items():
                    _acc(out, e[:jj] + tuple(x + y for x, y in zip(e[jj:], tail)), c)
                out = _clean(out)
        self._lg[key] = out
        return out

    def _left_gen_elem(self, j: int, terms: Mapping[Exp, object]) -> Dict[Exp, object]:
        out: Dict[Exp, object] = {}
        for e, c in terms.items():
            for e2, c2 in self._left_gen(j, e).items():
                _acc(out, e2, c * c2)
        return _clean(out)

    def _delta_mono(self, j: int, P: Exp) -> Dict[Exp, object]:
        """Δ_j(X^P) for P supported below j (σ_j-Leibniz on the first letter)."""
        key = (j, P)
        r = self._dm.get(key)
        if r is not None:
            return r
        h0 = next((h for h, k in enumerate(P) if k), None)
        if h0 is None:
            self._dm[key] = {}
            return {}
        rest = P[:h0] + (P[h0] - 1,) + P[h0 + 1:]
        out: Dict[Exp, object] = {}
        d_rest = self._delta_mono(j, rest)
        if d_rest:
            sh = self._lam[h0][j - 1]
            for e, c in d_rest.items():
                for e2, c2 in self._left_gen(h0 + 1, e).items():
                    _acc(out, e2, c * c2.shift(sh))
        tab = self._delta.get((h0 + 1, j))
        if tab:
            for e, c in tab.items():
                for e2, c2 in self._mono_mul(e, rest).items():
                    _acc(out, e2, c * c2)
        out = _clean(out)
        self._dm[key] = out
        return out

    def _mono_mul(self, u: Exp, w: Exp) -> Dict[Exp, object]:
        """X^u * X^w in normal form."""
        key = (u, w)
        r = self._mm.get(key)
        if r is not None:
            return r
        top = max((i for i, k in enumerate(u) if k), default=-1)
        bot = min((i for i, k in enumerate(w) if k), default=self.n)
        if top <= bot:
            out = {tuple(a + b for a, b in zip(u, w)): ONE}
        else:
            # peel the last letter of X^u: X^u = X^{u'} X_top
            u2 = u[:top] + (u[top] - 1,) + u[top + 1:]
            step = self._left_gen(top + 1, w)
            out = {}
            for e, c in step.items():
                for e2, c2 in self._mono_mul(u2, e).items():
                    _acc(out, e2, c * c2)
            out = _clean(out)
        self._mm[key] = out
        return out

    def multiply_terms(self, a: Mapping[Exp, object], b: Mapping[Exp, object]) -> Dict[Exp, object]:
        out: Dict[Exp, object] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                cc = c1 * c2
                for e, c in self._mono_mul(e1, e2).items():
                    _acc(out, e, cc * c)
        return _clean(out)

    def cache_size(self) -> int:
        return len(self._lg) + len(self._dm) + len(self._mm)


class OreElement:
    """Immutable element of an Ore presentation in normal form."""

    __slots__ = ("pres", "_t")

    def __init__(self, pres: OrePresentation, terms: Optional[Mapping[Exp, object]] = None):
        self.pres = pres
        t = {}
        for e, c in (terms or {}).items():
            c = _scalar(c)
            if c:
                t[tuple(e)] = c
        self._t = t

    @property
    def n(self) -> int:
        return self.pres.n

    @property
    def terms(self) -> Dict[Exp, object]:
        return dict(self._t)

    def items(self):
        return self._t.items()

    def __iter__(self):
        return iter(self._t)

    def __len__(self):
        return len(self._t)

    def coeff(self, e: Exp):
        return self._t.get(tuple(e), QLaurent())

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def leading(self) -> Tuple[Exp, object]:
        e = max(self._t, key=order_key)
        return e, self._t[e]

    def support(self) -> set:
        out = set()
        for e in self._t:
            out.update(i + 1 for i, k in enumerate(e) if k)
        return out

    def max_var(self) -> int:
        return max(self.support(), default=0)

    def min_var(self) -> int:
        return min(self.support(), default=self.n + 1)

    def _coerce(self, other):
        if isinstance(other, OreElement):
            if other.pres is not self.pres and other.n != self.n:
                raise ValueError("elements of different presentations")
            return other
        s = _scalar(other)
        if s is None:
            return None
        return OreElement(self.pres, {(0,) * self.n: s})

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        t = dict(self._t)
        for e, c in o._t.items():
            _acc(t, e, c)
        return OreElement(self.pres, t)

    __radd__ = __add__

    def __neg__(self):
        return OreElement(self.pres, {e: -c for e, c in self._t.items()})

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
        if isinstance(other, OreElement):
            return ore_multiply(self.pres, self, other)
        s = _scalar(other)
        if s is None:
            return NotImplemented
        return OreElement(self.pres, {e: c * s for e, c in self._t.items()})

    def __rmul__(self, other):
        s = _scalar(other)
        if s is None:
            return NotImplemented
        return OreElement(self.pres, {e: s * c for e, c in self._t.items()})

    def __truediv__(self, other):
        s = _scalar(other)
        if s is None:
            return NotImplemented
        return OreElement(self.pres, {e: _div(c, s) for e, c in self._t.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = self.pres.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, OreElement):
            return self.n == other.n and _clean(self._t) == _clean(other._t)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self == o

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def map_coeffs(self, f) -> "OreElement":
        return OreElement(self.pres, {e: f(c) for e, c in self._t.items()})

    def shift(self, s: int) -> "OreElement":
        """Multiply by q^s."""
        return OreElement(self.pres, {e: c.shift(s) for e, c in self._t.items()})

    def in_L(self) -> bool:
        return all(not isinstance(c, QRational) or c.is_in_L() for c in self._t.values())

    def to_L(self) -> "OreElement":
        return OreElement(self.pres, {e: normalize(c) for e, c in self._t.items()})

    def eval_at_one(self) -> CommLaurent:
        """Semiclassical image: X^u -> x^u, coefficients at q = 1."""
        return CommLaurent(self.n, {e: c.eval_at_one() for e, c in self._t.items()})

    def in_presentation(self, pres: OrePresentation, offset: int = 0) -> "OreElement":
        """Same expression in another presentation, variable i becoming i + offset."""
        t = {}
        for e, c in self._t.items():
            ne = [0] * pres.n
            for i, k in enumerate(e):
                if k:
                    ne[i + offset] = k
            t[tuple(ne)] = c
        return OreElement(pres, t)

    def to_string(self, prefix: str = "X") -> str:
        return _format_terms(self._t, prefix)

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"OreElement({self.to_string()!r})"


def ore_multiply(pres: OrePresentation, a: OreElement, b: OreElement) -> OreElement:
    """Normal form of a * b."""
    return OreElement(pres, pres.multiply_terms(a._t, b._t))


def _check_below(a: OreElement, j: int, op: str) -> None:
    if a.max_var() >= j:
        raise SupportViolation(f"{op}_{j} is defined on A_{j - 1}, but the argument uses X_{a.max_var()}")


def apply_sigma(pres: OrePresentation, j: int, a: OreElement, power: int = 1) -> OreElement:
    """σ_j^power(a) for a in A_{j-1}: X^u -> q^{power * Σ u_h λ_{hj}} X^u."""
    _check_below(a, j, "σ")
    t = {}
    for e, c in a.items():
        s = sum(k * pres._lam[h][j - 1] for h, k in enumerate(e) if k)
        t[e] = c.shift(power * s)
    return OreElement(pres, t)


def apply_delta(pres: OrePresentation, j: int, a: OreElement) -> OreElement:
    """Δ_j(a) for a in A_{j-1}."""
    _check_below(a, j, "Δ")
    out: Dict[Exp, object] = {}
    for e, c in a.items():
        for e2, c2 in pres._delta_mono(j, e).items():
            _acc(out, e2, c * c2)
    return OreElement(pres, _clean(out))


# ---------------------------------------------------------------------------
# quantum tori
# ---------------------------------------------------------------------------

class QTorusPresentation:
    """Y_i Y_j = q^{l[i][j]} Y_j Y_i with l skew-symmetric."""

    def __init__(self, l_matrix: Sequence[Sequence[int]]):
        n = len(l_matrix)
        self.n = n
        self.l = tuple(tuple(int(x) for x in row) for row in l_matrix)
        for i in range(n):
            if len(self.l[i]) != n:
                raise ValueError("l_matrix must be square")
            for j in range(n):
                if self.l[i][j] != -self.l[j][i]:
                    raise ValueError("l_matrix must be skew-symmetric")

    def reorder_exponent(self, v: Exp, w: Exp) -> int:
        """Y^v Y^w = q^s Y^{v+w} with s = Σ_{i>j} v_i w_j l_{ij}."""
        s = 0
        l = self.l
        for i in range(self.n):
            vi = v[i]
            if vi:
                row = l[i]
                for j in range(i):
                    if w[j]:
                        s += vi * w[j] * row[j]
        return s

    def gen(self, i: int, k: int = 1) -> "TorusElement":
        e = tuple(k if t == i - 1 else 0 for t in range(self.n))
        return TorusElement(self, {e: ONE})

    def one(self) -> "TorusElement":
        return TorusElement(self, {(0,) * self.n: ONE})

    def zero(self) -> "TorusElement":
        return TorusElement(self, {})

    def monomial(self, v: Exp, c=ONE) -> "TorusElement":
        return TorusElement(self, {tuple(v): _scalar(c)})

    def __eq__(self, other):
        return isinstance(other, QTorusPresentation) and self.l == other.l

    def __hash__(self):
        return hash(self.l)


class TorusElement:
    """Immutable element of a quantum torus in Y-normal order."""

    __slots__ = ("tpres", "_t")

    def __init__(self, tpres: QTorusPresentation, terms: Optional[Mapping[Exp, object]] = None):
        self.tpres = tpres
        t = {}
        for e, c in (terms or {}).items():
            c = _scalar(c)
            if c:
                t[tuple(e)] = c
        self._t = t

    @property
    def n(self):
        return self.tpres.n

    @property
    def terms(self):
        return dict(self._t)

    def items(self):
        return self._t.items()

    def __iter__(self):
        return iter(self._t)

    def __len__(self):
        return len(self._t)

    def coeff(self, v: Exp):
        return self._t.get(tuple(v), QLaurent())

    def __bool__(self):
        return bool(self._t)

    def is_zero(self):
        return not self._t

    def is_monomial(self):
        return len(self._t) == 1

    def leading(self) -> Tuple[Exp, object]:
        e = max(self._t, key=order_key)
        return e, self._t[e]

    def _coerce(self, other):
        if isinstance(other, TorusElement):
            return other
        s = _scalar(other)
        if s is None:
            return None
        return TorusElement(self.tpres, {(0,) * self.n: s})

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        t = dict(self._t)
        for e, c in o._t.items():
            _acc(t, e, c)
        return TorusElement(self.tpres, t)

    __radd__ = __add__

    def __neg__(self):
        return TorusElement(self.tpres, {e: -c for e, c in self._t.items()})

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
        if isinstance(other, TorusElement):
            return torus_multiply(self.tpres, self, other)
        s = _scalar(other)
        if s is None:
            return NotImplemented
        return TorusElement(self.tpres, {e: c * s for e, c in self._t.items()})

    def __rmul__(self, other):
        s = _scalar(other)
        if s is None:
            return NotImplemented
        return TorusElement(self.tpres, {e: s * c for e, c in self._t.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = self.tpres.one()
        for _ in range(k):
            out = out * self
        return out

    def inverse(self) -> "TorusElement":
        """Inverse of a monomial c Y^v: q^{s} c^{-1} Y^{-v}."""
        if len(self._t) != 1:
            raise ValueError("only monomials are invertible in the quantum torus")
        (v, c), = self._t.items()
        nv = tuple(-x for x in v)
        s = self.tpres.reorder_exponent(v, nv)
        return TorusElement(self.tpres, {nv: _div(ONE, c).shift(-s)})

    def __eq__(self, other):
        if isinstance(other, TorusElement):
            return _clean(self._t) == _clean(other._t)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self == o

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def shift(self, s: int) -> "TorusElement":
        return TorusElement(self.tpres, {e: c.shift(s) for e, c in self._t.items()})

    def map_coeffs(self, f) -> "TorusElement":
        return TorusElement(self.tpres, {e: f(c) for e, c in self._t.items()})

    def in_L(self) -> bool:
        return all(not isinstance(c, QRational) or c.is_in_L() for c in self._t.values())

    def eval_at_one(self) -> CommLaurent:
        return CommLaurent(self.n, {e: c.eval_at_one() for e, c in self._t.items()})

    def to_string(self, prefix: str = "Y") -> str:
        return _format_terms(self._t, prefix)

    def __str__(self):
        return self.to_string()

    def __repr__(self):
        return f"TorusElement({self.to_string()!r})"


def torus_multiply(tpres: QTorusPresentation, a: TorusElement, b: TorusElement) -> TorusElement:
    out: Dict[Exp, object] = {}
    for v, c1 in a._t.items():
        for w, c2 in b._t.items():
            s = tpres.reorder_exponent(v, w)
            e = tuple(x + y for x, y in zip(v, w))
            _acc(out, e, (c1 * c2).shift(s))
    return TorusElement(tpres, _clean(out))


def f_map(tpres: QTorusPresentation, v: Exp) -> TorusElement:
    """f(y^v) = Y^v (normal-ordered)."""
    return tpres.monomial(tuple(v))


def f_map_laurent(tpres: QTorusPresentation, a: CommLaurent) -> TorusElement:
    """f extended k-linearly."""
    return TorusElement(tpres, {e: QLaurent(c) for e, c in a.items()})


# ---------------------------------------------------------------------------
# the embedding A -> Γ_q and its inverse on the image
# ---------------------------------------------------------------------------

class LeadingTransform:
    """Columns f_j = N^n-degree of Y_j; u = T v maps Y-exponents to X-degrees."""

    def __init__(self, p: Sequence[int]):
        n = len(p)
        cols = []
        for j in range(1, n + 1):
            f = [0] * n
            k = j
            while k:
                f[k - 1] = 1
                k = p[k - 1]
            cols.append(tuple(f))
        self.n = n
        self.p = tuple(p)
        self.columns = tuple(cols)

    def matrix(self) -> List[List[int]]:
        """T[l][j] = f_{j,l}."""
        return [[self.columns[j][l] for j in range(self.n)] for l in range(self.n)]

    def apply(self, v: Sequence[int]) -> Exp:
        u = [0] * self.n
        for j, k in enumerate(v):
            if k:
                for l, f in enumerate(self.columns[j]):
                    if f:
                        u[l] += k * f
        return tuple(u)

    def inverse(self, u: Sequence[int]) -> Exp:
        """T^{-1} u = Σ u_j (e_j - e_{p(j)})."""
        v = list(u)
        for j in range(1, self.n + 1):
            pj = self.p[j - 1]
            if pj and u[j - 1]:
                v[pj - 1] -= u[j - 1]
        return tuple(v)


class TorusEmbedding:
    """X_j -> Y_{p(j)}^{-1} (Y_j + C_j), extended multiplicatively."""

    def __init__(self, pres: OrePresentation, tpres: QTorusPresentation,
                 p: Sequence[int], C: Sequence[OreElement]):
        self.pres = pres
        self.tpres = tpres
        self.p = tuple(p)
        self.transform = LeadingTransform(p)
        n = pres.n
        self.images: List[TorusElement] = []
        self._pow: Dict[Tuple[int, int], TorusElement] = {}
        self._mono: Dict[Exp, TorusElement] = {(0,) * n: tpres.one()}
        for j in range(1, n + 1):
            yj = tpres.gen(j)
            pj = self.p[j - 1]
            cj = C[j - 1] if C[j - 1] is not None else pres.zero()
            if cj and cj.max_var() >= j:
                raise SupportViolation(f"C_{j} must lie in A_{j - 1}")
            if not pj:
                if cj:
                    raise ValueError(f"C_{j} must vanish when p({j}) = 0")
                self.images.append(yj)
                continue
            cy = self.embed(cj) if cj else tpres.zero()
            self.images.append(tpres.gen(pj, -1) * (yj + cy))

    def _power(self, j: int, k: int) -> TorusElement:
        key = (j, k)
        r = self._pow.get(key)
        if r is None:
            r = self.images[j - 1] if k == 1 else self._power(j, k - 1) * self.images[j - 1]
            self._pow[key] = r
        return r

    def embed_monomial(self, u: Exp) -> TorusElement:
        u = tuple(u)
        r = self._mono.get(u)
        if r is not None:
            return r
        top = max(i for i, k in enumerate(u) if k)
        head = u[:top] + (0,) * (self.pres.n - top)
        r = self.embed_monomial(head) * self._power(top + 1, u[top])
        self._mono[u] = r
        return r

    def embed(self, a: OreElement) -> TorusElement:
        out: Dict[Exp, object] = {}
        for u, c in a.items():
            for v, c2 in self.embed_monomial(u).items():
                _acc(out, v, c * c2)
        return TorusElement(self.tpres, _clean(out))

    def to_ore(self, g: TorusElement, max_peel: int = DEFAULT_MAX_PEEL) -> OreElement:
        """Inverse of embed on its image; NotInSubalgebra / CapExceeded otherwise."""
        rem = dict(g._t)
        out: Dict[Exp, object] = {}
        peels = 0
        while rem:
            if peels >= max_peel:
                raise CapExceeded(f"peeling did not terminate within {max_peel} steps")
            peels += 1
            v = max(rem, key=order_key)
            c = rem[v]
            u = self.transform.apply(v)
            if min(u) < 0:
                raise NotInSubalgebra(
                    f"leading Y-exponent {v} maps to X-degree {u}, which is not in N^n")
            img = self.embed_monomial(u)
            lv, lc = img.leading()
            if lv != v or not (isinstance(lc, QLaurent) and lc.is_monomial()):
                raise NotInSubalgebra(f"leading term of the image of X^{u} is not a unit at {v}")
            (s, unit_c), = lc.items()
            a = c.shift(-s)
            if unit_c != 1:
                a = a * QLaurent(1 / unit_c)
            _acc(out, u, a)
            for w, c2 in img.items():
                _acc(rem, w, -(a * c2))
            rem = _clean(rem)
        return OreElement(self.pres, _clean(out))


def embed_to_torus(emb: TorusEmbedding, a: OreElement) -> TorusElement:
    return emb.embed(a)


def torus_to_ore(emb: TorusEmbedding, g: TorusElement, max_peel: int = DEFAULT_MAX_PEEL) -> OreElement:
    return emb.to_ore(g, max_peel)


# ---------------------------------------------------------------------------
# text I/O
# ---------------------------------------------------------------------------

def _strict_mul(left, right):
    """Product that refuses to reorder: used when no presentation is supplied."""
    if isinstance(left, (OreElement, TorusElement)) and isinstance(right, (OreElement, TorusElement)):
        lv = max((i for e in left for i, k in enumerate(e) if k), default=-1)
        rv = min((i for e in right for i, k in enumerate(e) if k), default=10 ** 9)
        if lv > rv:
            raise ParseError("product is not in normal order; supply a presentation to rewrite it")
    return left * right


def parse_ore(text: str, pres: Optional[OrePresentation] = None, n: Optional[int] = None,
              prefix: str = "X", what: str = "element") -> OreElement:
    """Parse ``c*X1^2*X3 + ...``.  Without ``pres`` the input must be normal-ordered."""
    strict = pres is None
    if pres is None:
        if n is None:
            raise ValueError("need a presentation or n")
        pres = OrePresentation.commutative(n)

    def lookup(name):
        return pres.gen(indexed_name(name, prefix, pres.n, what))

    val = parse_expression(text, {"q": Q}, what=what, lookup=lookup,
                           mul=_strict_mul if strict else None)
    if isinstance(val, OreElement):
        return val
    return OreElement(pres, {(0,) * pres.n: _scalar(val)})


def parse_torus(text: str, tpres: Optional[QTorusPresentation] = None, n: Optional[int] = None,
                prefix: str = "Y", what: str = "torus element") -> TorusElement:
    strict = tpres is None
    if tpres is None:
        if n is None:
            raise ValueError("need a presentation or n")
        tpres = QTorusPresentation([[0] * n for _ in range(n)])

    def lookup(name):
        return tpres.gen(indexed_name(name, prefix, tpres.n, what))

    val = parse_expression(text, {"q": Q}, what=what, lookup=lookup,
                           mul=_strict_mul if strict else None)
    if isinstance(val, TorusElement):
        return val
    return TorusElement(tpres, {(0,) * tpres.n: _scalar(val)})
