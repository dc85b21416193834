"""Poisson side: sparse commutative polynomials, the extension spec, brackets.

A single class :class:`CommLaurent` covers both polynomials (all exponents
nonnegative) and Laurent elements of the Poisson torus; ``CommPoly`` is an
alias.  Exponents are tuples of ints of length n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import NotDivisible, ParseError
from .scalars import format_fraction
from .textparse import indexed_name, parse_expression

Exp = Tuple[int, ...]
Weight = Tuple[int, ...]


# total order ---------------------------------------------------------------

def compare_total_order(u: Sequence[int], v: Sequence[int]) -> int:
    """-1, 0, 1 for u < v, u = v, u > v; the last coordinate is most significant."""
    if len(u) != len(v):
        raise ValueError("length mismatch")
    for a, b in zip(reversed(u), reversed(v)):
        if a != b:
            return -1 if a < b else 1
    return 0


def order_key(u: Sequence[int]) -> Tuple[int, ...]:
    """Sort key realizing the total order."""
    return tuple(reversed(u))


def add_exp(u: Exp, v: Exp) -> Exp:
    return tuple(a + b for a, b in zip(u, v))


def sub_exp(u: Exp, v: Exp) -> Exp:
    return tuple(a - b for a, b in zip(u, v))


def unit(n: int, i: int) -> Exp:
    """e_i, 1-indexed."""
    return tuple(1 if k == i - 1 else 0 for k in range(n))


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


# commutative (Laurent) polynomials ---------------------------------------------

class CommLaurent:
    """Sparse element of Q[x_1^{+-1}, ..., x_n^{+-1}]."""

    __slots__ = ("n", "_t")

    def __init__(self, n: int, terms: Optional[Mapping[Exp, object]] = None):
        self.n = n
        t = {}
        if terms:
            for e, c in terms.items():
                c = Fraction(c)
                if c:
                    e = tuple(e)
                    if len(e) != n:
                        raise ValueError(f"exponent {e} has wrong length for n={n}")
                    t[e] = c
        self._t: Dict[Exp, Fraction] = t

    @classmethod
    def _raw(cls, n, t):
        obj = object.__new__(cls)
        obj.n = n
        obj._t = t
        return obj

    @classmethod
    def constant(cls, n: int, c=1) -> "CommLaurent":
        return cls(n, {(0,) * n: c})

    @classmethod
    def monomial(cls, n: int, e: Exp, c=1) -> "CommLaurent":
        return cls(n, {tuple(e): c})

    @classmethod
    def var(cls, n: int, i: int) -> "CommLaurent":
        return cls._raw(n, {unit(n, i): Fraction(1)})

    @property
    def terms(self) -> Dict[Exp, Fraction]:
        return dict(self._t)

    def items(self):
        return self._t.items()

    def __iter__(self):
        return iter(self._t)

    def __len__(self):
        return len(self._t)

    def coeff(self, e: Exp) -> Fraction:
        return self._t.get(tuple(e), Fraction(0))

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def is_polynomial(self) -> bool:
        return all(min(e, default=0) >= 0 for e in self._t)

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def support(self) -> set:
        """1-indexed variables that occur."""
        out = set()
        for e in self._t:
            out.update(i + 1 for i, k in enumerate(e) if k)
        return out

    def leading(self) -> Tuple[Exp, Fraction]:
        e = max(self._t, key=order_key)
        return e, self._t[e]

    def _coerce(self, other):
        if isinstance(other, CommLaurent):
            if other.n != self.n:
                raise ValueError("mixing polynomials in different numbers of variables")
            return other
        if isinstance(other, (int, Fraction)):
            return CommLaurent.constant(self.n, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        t = dict(self._t)
        for e, c in o._t.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return CommLaurent._raw(self.n, t)

    __radd__ = __add__

    def __neg__(self):
        return CommLaurent._raw(self.n, {e: -c for e, c in self._t.items()})

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
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return CommLaurent._raw(self.n, {})
            return CommLaurent._raw(self.n, {e: v * c for e, v in self._t.items()})
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        t: Dict[Exp, Fraction] = {}
        for e1, c1 in self._t.items():
            for e2, c2 in o._t.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return CommLaurent._raw(self.n, {e: c for e, c in t.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        if isinstance(other, CommLaurent) and other.is_monomial():
            (e, c), = other._t.items()
            return self * CommLaurent._raw(self.n, {tuple(-k for k in e): 1 / c})
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if not self.is_monomial():
                raise NotDivisible("only monomials are invertible")
            (e, c), = self._t.items()
            return CommLaurent._raw(self.n, {tuple(a * k for a in e): c ** k})
        out = CommLaurent.constant(self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, CommLaurent):
            return self.n == other.n and self._t == other._t
        if isinstance(other, (int, Fraction)):
            return self == CommLaurent.constant(self.n, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self._t.items())))

    def diff(self, i: int) -> "CommLaurent":
        """Partial derivative in variable i (1-indexed)."""
        k = i - 1
        t = {}
        for e, c in self._t.items():
            if e[k]:
                e2 = e[:k] + (e[k] - 1,) + e[k + 1:]
                t[e2] = c * e[k]
        return CommLaurent._raw(self.n, t)

    def substitute(self, images: Sequence["CommLaurent"]) -> "CommLaurent":
        """Ring map x_i -> images[i-1] (Laurent exponents need monomial images)."""
        m = images[0].n if images else self.n
        out = CommLaurent._raw(m, {})
        cache: Dict[Tuple[int, int], CommLaurent] = {}
        for e, c in self._t.items():
            term = CommLaurent.constant(m, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = images[i] ** k
                    term = term * cache[key]
            out = out + term
        return out

    def eval_at(self, values: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for e, c in self._t.items():
            v = c
            for x, k in zip(values, e):
                if k:
                    v *= Fraction(x) ** k
            total += v
        return total

    def extend(self, n_new: int, offset: int) -> "CommLaurent":
        """Reindex into n_new variables, variable i becoming i + offset."""
        t = {}
        for e, c in self._t.items():
            ne = [0] * n_new
            for i, k in enumerate(e):
                if k:
                    ne[i + offset] = k
            t[tuple(ne)] = c
        return CommLaurent._raw(n_new, t)

    def restrict(self, n_new: int, offset: int) -> "CommLaurent":
        """Inverse of extend: drop the first ``offset`` variables (which must be absent)."""
        t = {}
        for e, c in self._t.items():
            if any(e[:offset]) or any(e[offset + n_new:]):
                raise ValueError("polynomial uses variables outside the target range")
            t[tuple(e[offset:offset + n_new])] = c
        return CommLaurent._raw(n_new, t)

    def divmod(self, b: "CommLaurent") -> Tuple["CommLaurent", "CommLaurent"]:
        """Multivariate division by b under the total order (polynomials only)."""
        if not b:
            raise ZeroDivisionError("division by zero polynomial")
        lb, cb = b.leading()
        quo = CommLaurent._raw(self.n, {})
        rem = CommLaurent._raw(self.n, {})
        p = self
        while p:
            lp, cp = p.leading()
            d = sub_exp(lp, lb)
            if min(d) >= 0:
                t = CommLaurent._raw(self.n, {d: cp / cb})
                quo = quo + t
                p = p - t * b
            else:
                lt = CommLaurent._raw(self.n, {lp: cp})
                rem = rem + lt
                p = p - lt
        return quo, rem

    def exact_div(self, b: "CommLaurent") -> "CommLaurent":
        quo, rem = self.divmod(b)
        if rem:
            raise NotDivisible(f"{self} is not divisible by {b}")
        return quo

    def to_string(self, prefix: str = "x") -> str:
        return format_comm(self, prefix)

    def __str__(self):
        return format_comm(self, "x")

    def __repr__(self):
        return f"CommLaurent({self.n}, {format_comm(self, 'x')!r})"


CommPoly = CommLaurent


def format_monomial(e: Exp, prefix: str, sep: str = "*") -> str:
    parts = []
    for i, k in enumerate(e):
        if k == 1:
            parts.append(f"{prefix}{i + 1}")
        elif k:
            parts.append(f"{prefix}{i + 1}^{k}")
    return sep.join(parts)


def format_comm(a: CommLaurent, prefix: str = "x") -> str:
    """Leading term first under the total order."""
    if not a:
        return "0"
    out = []
    for e in sorted(a._t, key=order_key, reverse=True):
        c = a._t[e]
        mono = format_monomial(e, prefix)
        mag = abs(c)
        if not mono:
            body = format_fraction(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_fraction(mag)}*{mono}"
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def parse_comm(text: str, n: int, prefix: str = "x", what: str = "polynomial") -> CommLaurent:
    def lookup(name):
        return CommLaurent.var(n, indexed_name(name, prefix, n, what))

    val = parse_expression(text, {}, what=what, lookup=lookup)
    if isinstance(val, Fraction):
        return CommLaurent.constant(n, val)
    if not isinstance(val, CommLaurent):
        raise ParseError(f"{what}: {text!r} is not a polynomial")
    return val


# the extension spec ---------------------------------------------------------------

@dataclass(frozen=True)
class ExtensionSpec:
    """Symmetric integral Poisson-CGL extension data.

    ``delta[(i, j)]`` is delta_j(x_i) for i < j (missing entries are zero).
    All indices are 1-based.
    """

    n: int
    r: int
    lambdas: Tuple[Weight, ...]
    h: Tuple[Weight, ...]
    h_prime: Tuple[Weight, ...]
    delta: Mapping[Tuple[int, int], CommLaurent] = field(default_factory=dict)
    name: Optional[str] = None

    def lam(self, i: int, j: int) -> int:
        """lambda_{i,j} = lambda_i(h_j)."""
        return dot(self.lambdas[i - 1], self.h[j - 1])

    def eta(self, j: int) -> int:
        return dot(self.lambdas[j - 1], self.h[j - 1])

    def eta_prime(self, j: int) -> int:
        return dot(self.lambdas[j - 1], self.h_prime[j - 1])

    def weight(self, j: int) -> Weight:
        return tuple(self.lambdas[j - 1])

    def delta_of(self, i: int, j: int) -> CommLaurent:
        d = self.delta.get((i, j))
        return d if d is not None else CommLaurent._raw(self.n, {})

    def x(self, i: int) -> CommLaurent:
        return CommLaurent.var(self.n, i)

    def zero(self) -> CommLaurent:
        return CommLaurent._raw(self.n, {})

    def one(self) -> CommLaurent:
        return CommLaurent.constant(self.n)

    def delta_is_zero(self, j: int) -> bool:
        return all(not self.delta_of(i, j) for i in range(1, j))

    def generator_bracket(self, a: int, b: int) -> CommLaurent:
        """{x_a, x_b}."""
        return _gen_table(self)[(a, b)]

    def sub_spec(self, start: int) -> "ExtensionSpec":
        """The extension generated by x_start, ..., x_n, relabeled from 1."""
        off = start - 1
        m = self.n - off
        delta = {}
        for (i, j), d in self.delta.items():
            if i >= start and d:
                delta[(i - off, j - off)] = d.restrict(m, off)
        return ExtensionSpec(
            n=m,
            r=self.r,
            lambdas=self.lambdas[off:],
            h=self.h[off:],
            h_prime=self.h_prime[off:],
            delta=delta,
            name=None if self.name is None else f"{self.name}[{start}..{self.n}]",
        )

    def __hash__(self):
        return hash((self.n, self.r, self.lambdas, self.h, self.h_prime,
                     tuple(sorted((k, v) for k, v in self.delta.items() if v))))

    def __eq__(self, other):
        if not isinstance(other, ExtensionSpec):
            return NotImplemented
        mine = {k: v for k, v in self.delta.items() if v}
        theirs = {k: v for k, v in other.delta.items() if v}
        return (self.n, self.r, self.lambdas, self.h, self.h_prime, mine) == (
            other.n, other.r, other.lambdas, other.h, other.h_prime, theirs)


def _gen_table(spec: ExtensionSpec) -> Dict[Tuple[int, int], CommLaurent]:
    cached = spec.__dict__.get("_gen_table")
    if cached is not None:
        return cached
    n = spec.n
    tab = {}
    for a in range(1, n + 1):
        tab[(a, a)] = spec.zero()
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            # {x_j, x_i} = lambda_{ij} x_i x_j + delta_j(x_i)
            v = CommLaurent.monomial(n, add_exp(unit(n, i), unit(n, j)), spec.lam(i, j)) + spec.delta_of(i, j)
            tab[(j, i)] = v
            tab[(i, j)] = -v
    object.__setattr__(spec, "_gen_table", tab)
    return tab


def bracket(spec: ExtensionSpec, a: CommLaurent, b: CommLaurent) -> CommLaurent:
    """Poisson bracket extended from the generator table by Leibniz."""
    n = spec.n
    tab = _gen_table(spec)
    da = {i: a.diff(i) for i in range(1, n + 1)}
    db = {j: b.diff(j) for j in range(1, n + 1)}
    out = spec.zero()
    for i, pa in da.items():
        if not pa:
            continue
        for j, pb in db.items():
            if not pb or i == j:
                continue
            g = tab[(i, j)]
            if g:
                out = out + pa * pb * g
    return out


def apply_derivation(images: Mapping[int, CommLaurent], a: CommLaurent) -> CommLaurent:
    """The derivation with x_i -> images[i] (missing images are zero)."""
    out = CommLaurent._raw(a.n, {})
    for i, img in images.items():
        if img:
            d = a.diff(i)
            if d:
                out = out + d * img
    return out


class NotHomogeneous:
    """Returned by weight_of for inhomogeneous input (a value, not an error)."""

    def __init__(self, weights):
        self.weights = weights

    def __bool__(self):
        return False

    def __repr__(self):
        return f"NotHomogeneous({sorted(self.weights)})"


def monomial_weight(spec: ExtensionSpec, e: Exp) -> Weight:
    w = [0] * spec.r
    for i, k in enumerate(e):
        if k:
            for t, v in enumerate(spec.lambdas[i]):
                w[t] += k * v
    return tuple(w)


def weight_of(spec: ExtensionSpec, a: CommLaurent):
    """Torus weight of a homogeneous nonzero a; NotHomogeneous otherwise.

    The zero element has no weight and is reported as None.
    """
    if not a:
        return None
    ws = {monomial_weight(spec, e) for e in a}
    if len(ws) == 1:
        return ws.pop()
    return NotHomogeneous(ws)


def is_homogeneous_of(spec: ExtensionSpec, a: CommLaurent, w: Weight) -> bool:
    return all(monomial_weight(spec, e) == tuple(w) for e in a)


def theta_images(spec: ExtensionSpec, j: int) -> Dict[int, CommLaurent]:
    """theta_j on A_{j-1}: x_i -> lambda_{i,j} x_i."""
    return {i: spec.x(i) * spec.lam(i, j) for i in range(1, j)}


def delta_images(spec: ExtensionSpec, j: int) -> Dict[int, CommLaurent]:
    return {i: spec.delta_of(i, j) for i in range(1, j)}


# validation -------------------------------------------------------------------------

@dataclass
class CheckEntry:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    entries: List[CheckEntry]

    @property
    def ok(self) -> bool:
        return all(e.passed for e in self.entries)

    def failures(self) -> List[CheckEntry]:
        return [e for e in self.entries if not e.passed]

    def by_check(self, prefix: str) -> List[CheckEntry]:
        return [e for e in self.entries if e.name.startswith(prefix)]

    def to_json(self):
        return [{"name": e.name, "passed": e.passed, "detail": e.detail} for e in self.entries]


def _structural_problems(spec: ExtensionSpec) -> List[str]:
    out = []
    if spec.n < 1:
        out.append("n must be positive")
    for label, rows in (("lambda", spec.lambdas), ("h", spec.h), ("h_prime", spec.h_prime)):
        if len(rows) != spec.n:
            out.append(f"{label} has {len(rows)} rows, expected n={spec.n}")
        for k, row in enumerate(rows):
            if len(row) != spec.r:
                out.append(f"{label}[{k + 1}] has length {len(row)}, expected r={spec.r}")
    for (i, j), d in spec.delta.items():
        if not (1 <= i < j <= spec.n):
            out.append(f"delta entry ({i},{j}) needs 1 <= i < j <= n")
        elif d.n != spec.n:
            out.append(f"delta_{j}(x_{i}) has the wrong number of variables")
        elif not d.is_polynomial():
            out.append(f"delta_{j}(x_{i}) has negative exponents")
    return out


def validate_spec(spec: ExtensionSpec) -> ValidationReport:
    """Check conditions (a)-(e) plus Jacobi; every finding is a report entry."""
    entries: List[CheckEntry] = []
    problems = _structural_problems(spec)
    entries.append(CheckEntry("structure", not problems, "; ".join(problems)))
    if problems:
        return ValidationReport(entries)
    n = spec.n

    # (a) support
    bad = []
    for (i, j), d in sorted(spec.delta.items()):
        outside = [v for v in d.support() if not i < v < j]
        if outside:
            bad.append(f"delta_{j}(x_{i}) = {d} uses x{outside[0]}")
    entries.append(CheckEntry("(a) support", not bad, "; ".join(bad)))

    # (b) pairing
    bad = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            lhs = spec.lam(i, j)
            rhs = -dot(spec.lambdas[j - 1], spec.h_prime[i - 1])
            if lhs != rhs:
                bad.append(f"lambda_{i}(h_{j}) = {lhs} but -lambda_{j}(h'_{i}) = {rhs}")
    for j in range(1, n + 1):
        if spec.eta(j) == 0:
            bad.append(f"eta_{j} = lambda_{j}(h_{j}) = 0")
        if spec.eta_prime(j) == 0:
            bad.append(f"lambda_{j}(h'_{j}) = 0")
    entries.append(CheckEntry("(b) pairing", not bad, "; ".join(bad)))

    # (c) homogeneity
    bad = []
    for (i, j), d in sorted(spec.delta.items()):
        w = tuple(a + b for a, b in zip(spec.lambdas[i - 1], spec.lambdas[j - 1]))
        if d and not is_homogeneous_of(spec, d, w):
            bad.append(f"delta_{j}(x_{i}) = {d} is not homogeneous of weight {w}")
    entries.append(CheckEntry("(c) homogeneity", not bad, "; ".join(bad)))

    if not all(e.passed for e in entries):
        # the derivation identities presuppose (a)
        entries.append(CheckEntry("(d) theta-derivation identity", False, "skipped: earlier checks failed"))
        entries.append(CheckEntry("(e) [theta, delta] = eta delta", False, "skipped: earlier checks failed"))
        entries.append(CheckEntry("jacobi", False, "skipped: earlier checks failed"))
        return ValidationReport(entries)

    # (d) theta_j is a Poisson derivation and delta_j a Poisson theta_j-derivation on A_{j-1}
    bad = []
    for j in range(2, n + 1):
        th = theta_images(spec, j)
        de = delta_images(spec, j)
        for a_i, b_i in combinations(range(1, j), 2):
            a, b = spec.x(a_i), spec.x(b_i)
            ab = bracket(spec, a, b)
            ta, tb = apply_derivation(th, a), apply_derivation(th, b)
            da, db = apply_derivation(de, a), apply_derivation(de, b)
            lhs = apply_derivation(th, ab)
            rhs = bracket(spec, ta, b) + bracket(spec, a, tb)
            if lhs != rhs:
                bad.append(f"theta_{j} is not a Poisson derivation on (x{a_i}, x{b_i})")
            lhs = apply_derivation(de, ab)
            rhs = bracket(spec, da, b) + bracket(spec, a, db) + ta * db - da * tb
            if lhs != rhs:
                bad.append(f"delta_{j} identity fails on (x{a_i}, x{b_i}): {lhs} != {rhs}")
    entries.append(CheckEntry("(d) theta-derivation identity", not bad, "; ".join(bad)))

    # (e) [theta_j, delta_j] = eta_j delta_j
    bad = []
    for j in range(2, n + 1):
        th = theta_images(spec, j)
        de = delta_images(spec, j)
        for i in range(1, j):
            xi = spec.x(i)
            lhs = apply_derivation(th, apply_derivation(de, xi)) - apply_derivation(de, apply_derivation(th, xi))
            if lhs != de[i] * spec.eta(j):
                bad.append(f"[theta_{j}, delta_{j}](x{i}) = {lhs}, expected {de[i] * spec.eta(j)}")
    entries.append(CheckEntry("(e) [theta, delta] = eta delta", not bad, "; ".join(bad)))

    # Jacobi on generator triples
    bad = []
    for a_i, b_i, c_i in combinations(range(1, n + 1), 3):
        a, b, c = spec.x(a_i), spec.x(b_i), spec.x(c_i)
        s = (bracket(spec, a, bracket(spec, b, c)) + bracket(spec, b, bracket(spec, c, a))
             + bracket(spec, c, bracket(spec, a, b)))
        if s:
            bad.append(f"Jacobi fails on (x{a_i}, x{b_i}, x{c_i}): {s}")
    entries.append(CheckEntry("jacobi", not bad, "; ".join(bad)))
    return ValidationReport(entries)


def make_spec(lambdas, h, h_prime, delta: Optional[Mapping[Tuple[int, int], str]] = None,
              name: Optional[str] = None) -> ExtensionSpec:
    """Convenience constructor; ``delta`` maps (i, j) to polynomial strings."""
    n = len(lambdas)
    r = len(lambdas[0]) if n else 0
    parsed = {}
    for (i, j), text in (delta or {}).items():
        p = parse_comm(text, n, what=f"delta[{j}][{i}]") if isinstance(text, str) else text
        if p:
            parsed[(i, j)] = p
    return ExtensionSpec(
        n=n, r=r,
        lambdas=tuple(tuple(v) for v in lambdas),
        h=tuple(tuple(v) for v in h),
        h_prime=tuple(tuple(v) for v in h_prime),
        delta=parsed, name=name,
    )
