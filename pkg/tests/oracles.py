"""Independent reference implementations built on sympy.

Nothing here calls the package's arithmetic kernels: the Ore oracle rewrites
words letter by letter, the torus oracle swaps signed letters, and the Poisson
oracle differentiates sympy expressions.  Inputs are read from raw data
(generator tables, spec fields) and compared after conversion.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Tuple

import sympy as sp

from cgl_quantizer.scalars import QLaurent, QRational

q = sp.Symbol("q")


def sym_scalar(c) -> sp.Expr:
    if isinstance(c, QRational):
        return sp.cancel(sym_scalar(c.num) / sym_scalar(c.den))
    if isinstance(c, QLaurent):
        return sp.Add(*[sp.Rational(v.numerator, v.denominator) * q ** e for e, v in c.items()])
    c = Fraction(c)
    return sp.Rational(c.numerator, c.denominator)


def _clean(d: Dict) -> Dict:
    out = {}
    for k, v in d.items():
        v = sp.cancel(sp.expand(v))
        if v != 0:
            out[k] = v
    return out


def sym_terms(el) -> Dict[Tuple[int, ...], sp.Expr]:
    """OreElement / TorusElement / CommLaurent -> {exponent: sympy coefficient}."""
    return _clean({tuple(e): sym_scalar(c) for e, c in el.items()})


def same(a: Dict, b: Dict) -> bool:
    keys = set(a) | set(b)
    return all(sp.simplify(a.get(k, 0) - b.get(k, 0)) == 0 for k in keys)


# ---------------------------------------------------------------------------
# Ore words
# ---------------------------------------------------------------------------

def _word(e) -> Tuple[int, ...]:
    w = []
    for i, k in enumerate(e):
        w += [i + 1] * k
    return tuple(w)


def _exp(w, n) -> Tuple[int, ...]:
    e = [0] * n
    for a in w:
        e[a - 1] += 1
    return tuple(e)


class WordOracle:
    """X_a X_b -> q^{lam(b,a)} X_b X_a + Δ_a(X_b) for a > b, applied to the first descent."""

    def __init__(self, n, lam, delta):
        self.n = n
        self.lam = lam                      # (i, j) -> int, i < j
        self.delta = {k: {_word(e): c for e, c in v.items()} for k, v in delta.items()}

    @classmethod
    def from_presentation(cls, pres):
        lam = {(i, j): pres.lam(i, j) for i in range(1, pres.n + 1) for j in range(i + 1, pres.n + 1)}
        delta = {(i, j): sym_terms(pres.delta_gen(i, j)) for (i, j) in pres.nonzero_delta_pairs()}
        return cls(pres.n, lam, delta)

    def normalize(self, words: Dict[Tuple[int, ...], sp.Expr]) -> Dict[Tuple[int, ...], sp.Expr]:
        done: Dict = {}
        todo = dict(words)
        while todo:
            w, c = todo.popitem()
            if c == 0:
                continue
            pos = next((t for t in range(len(w) - 1) if w[t] > w[t + 1]), None)
            if pos is None:
                done[w] = done.get(w, 0) + c
                continue
            a, b = w[pos], w[pos + 1]
            pre, post = w[:pos], w[pos + 2:]
            sw = pre + (b, a) + post
            todo[sw] = todo.get(sw, 0) + c * q ** self.lam[(b, a)]
            for dw, dc in self.delta.get((b, a), {}).items():
                nw = pre + dw + post
                todo[nw] = todo.get(nw, 0) + c * dc
        return _clean({_exp(w, self.n): v for w, v in _merge(done).items()})

    def multiply(self, a: Dict, b: Dict) -> Dict:
        prod = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                w = _word(ea) + _word(eb)
                prod[w] = prod.get(w, 0) + ca * cb
        return self.normalize(prod)


def _merge(d):
    out = {}
    for w, c in d.items():
        out[w] = out.get(w, 0) + c
    return out


# ---------------------------------------------------------------------------
# torus words
# ---------------------------------------------------------------------------

class TorusOracle:
    """Y_a^s Y_b^t = q^{s t l[a][b]} Y_b^t Y_a^s, swapping signed letters one at a time."""

    def __init__(self, l_matrix):
        self.l = [list(r) for r in l_matrix]
        self.n = len(self.l)

    def _letters(self, v):
        out = []
        for i, k in enumerate(v):
            out += [(i + 1, 1 if k > 0 else -1)] * abs(k)
        return out

    def multiply(self, a: Dict, b: Dict) -> Dict:
        out: Dict = {}
        for va, ca in a.items():
            for vb, cb in b.items():
                word = self._letters(va) + self._letters(vb)
                coeff = ca * cb
                # bubble sort by index, tracking q powers
                changed = True
                while changed:
                    changed = False
                    for t in range(len(word) - 1):
                        (x, s), (y, u) = word[t], word[t + 1]
                        if x > y:
                            coeff *= q ** (s * u * self.l[x - 1][y - 1])
                            word[t], word[t + 1] = word[t + 1], word[t]
                            changed = True
                e = [0] * self.n
                for x, s in word:
                    e[x - 1] += s
                e = tuple(e)
                out[e] = out.get(e, 0) + coeff
        return _clean(out)


# ---------------------------------------------------------------------------
# Poisson brackets
# ---------------------------------------------------------------------------

def xs(n):
    return sp.symbols(" ".join(f"x{i}" for i in range(1, n + 1)), seq=True)


def sym_poly(a, n, names=None) -> sp.Expr:
    names = names or xs(n)
    out = 0
    for e, c in a.items():
        term = sp.Rational(Fraction(c).numerator, Fraction(c).denominator)
        for v, k in zip(names, e):
            term *= v ** k
        out += term
    return sp.expand(out)


class PoissonOracle:
    """{x_j, x_i} = λ_i(h_j) x_i x_j + δ_j(x_i) for i < j, read directly from spec fields."""

    def __init__(self, spec):
        self.n = spec.n
        self.x = xs(spec.n)
        table = {}
        for i in range(1, self.n + 1):
            for j in range(i + 1, self.n + 1):
                lam = sum(a * b for a, b in zip(spec.lambdas[i - 1], spec.h[j - 1]))
                d = spec.delta.get((i, j))
                dj = sym_poly(d, self.n, self.x) if d is not None else 0
                v = lam * self.x[i - 1] * self.x[j - 1] + dj
                table[(j, i)] = v
                table[(i, j)] = -v
        self.table = table

    def bracket(self, f: sp.Expr, g: sp.Expr) -> sp.Expr:
        out = 0
        for a in range(1, self.n + 1):
            fa = sp.diff(f, self.x[a - 1])
            if fa == 0:
                continue
            for b in range(1, self.n + 1):
                if a == b:
                    continue
                gb = sp.diff(g, self.x[b - 1])
                if gb != 0:
                    out += fa * gb * self.table[(a, b)]
        return sp.expand(out)
