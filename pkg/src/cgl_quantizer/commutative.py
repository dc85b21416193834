"""Commutative invariants of a Poisson-CGL extension.

y-sequence, predecessor map p, level sets, the Poisson matrix of the torus
Gamma = Q[y_1^{+-1}, ..., y_n^{+-1}], the embedding A -> Gamma, the
monomials b_k and the d-chain of a prepend step.

Elements of Gamma are CommLaurent objects whose variables are read as the
y_j.  Indices are 1-based; p(j) = 0 means "no predecessor".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    ChainIdentityFailed,
    MultiplePivots,
    NoPivot,
    NotAMonomial,
    NotLogCanonical,
)
from .poisson import (
    CommLaurent,
    ExtensionSpec,
    apply_derivation,
    bracket,
    delta_images,
    dot,
    unit,
)


@dataclass
class YSequence:
    spec: ExtensionSpec
    y: List[CommLaurent]
    p: List[int]
    c: List[CommLaurent]
    _x_images: Optional[List[CommLaurent]] = field(default=None, repr=False)
    _c_torus: Dict[int, CommLaurent] = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.spec.n

    def pred(self, j: int) -> int:
        return self.p[j - 1] if j >= 1 else 0

    def Y(self, j: int) -> CommLaurent:
        return self.y[j - 1] if j else self.spec.one()

    def chain_maxima(self, upto: int) -> List[int]:
        """Maxima of the level sets of A_upto."""
        preds = {self.p[l - 1] for l in range(1, upto + 1)}
        return [i for i in range(1, upto + 1) if i not in preds]

    def successor(self, j: int) -> int:
        """p^{-1}(j), or n + 1 when j is a chain maximum."""
        for l in range(j + 1, self.n + 1):
            if self.p[l - 1] == j:
                return l
        return self.n + 1

    def chain_from(self, k: int) -> List[int]:
        """[k, p(k), p^2(k), ...] down to the last nonzero index."""
        out = []
        while k:
            out.append(k)
            k = self.p[k - 1]
        return out

    def degree(self, j: int) -> Tuple[int, ...]:
        """N^n-degree f_j of y_j: indicator of the chain below j."""
        f = [0] * self.n
        for l in self.chain_from(j):
            f[l - 1] = 1
        return tuple(f)

    def weight(self, j: int):
        w = [0] * self.spec.r
        for l in self.chain_from(j):
            for t, v in enumerate(self.spec.lambdas[l - 1]):
                w[t] += v
        return tuple(w)


def compute_y_sequence(spec: ExtensionSpec) -> YSequence:
    """The homogeneous Poisson prime elements y_1, ..., y_n."""
    n = spec.n
    y: List[CommLaurent] = []
    p: List[int] = []
    c: List[CommLaurent] = []
    for j in range(1, n + 1):
        xj = spec.x(j)
        if spec.delta_is_zero(j):
            p.append(0)
            c.append(spec.zero())
            y.append(xj)
            continue
        de = delta_images(spec, j)
        preds = set(p)
        maxima = [i for i in range(1, j) if i not in preds]
        hits = []
        for i in maxima:
            v = apply_derivation(de, y[i - 1])
            if v:
                hits.append((i, v))
        if not hits:
            raise NoPivot(f"delta_{j} is nonzero but kills every level-set maximum of A_{j - 1}")
        if len(hits) > 1:
            raise MultiplePivots(
                f"delta_{j} is nonzero on several level-set maxima: {[i for i, _ in hits]}")
        i, v = hits[0]
        cj = v / spec.eta(j)
        p.append(i)
        c.append(cj)
        y.append(y[i - 1] * xj - cj)
    return YSequence(spec, y, p, c)


# level sets -----------------------------------------------------------------

@dataclass(frozen=True)
class LevelSets:
    sets: Tuple[Tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.sets)

    def to_json(self):
        return [list(s) for s in self.sets]


def level_sets_from_p(p: Sequence[int]) -> LevelSets:
    n = len(p)
    owner: Dict[int, int] = {}
    sets: List[List[int]] = []
    for j in range(1, n + 1):
        pj = p[j - 1]
        if pj:
            k = owner[pj]
            sets[k].append(j)
        else:
            k = len(sets)
            sets.append([j])
        owner[j] = k
    return LevelSets(tuple(tuple(s) for s in sets))


def compute_level_sets(ys: YSequence) -> LevelSets:
    return level_sets_from_p(ys.p)


def i_sets(ys: YSequence) -> List[Tuple[int, ...]]:
    """I_j for j = 1..n: indices i < j whose y_i stays prime in A_j."""
    out = []
    for j in range(1, ys.n + 1):
        used = {ys.p[l - 1] for l in range(1, j + 1)}
        out.append(tuple(i for i in range(1, j) if i not in used))
    return out


# Poisson matrix ----------------------------------------------------------------

@dataclass(frozen=True)
class PoissonMatrix:
    kappa: Tuple[Tuple[int, ...], ...]

    def lam(self, v: Sequence[int], w: Sequence[int]) -> int:
        """Lambda_Y(v, w) = v^T kappa w."""
        return sum(v[i] * self.kappa[i][j] * w[j]
                   for i in range(len(v)) if v[i]
                   for j in range(len(w)) if w[j])

    def to_json(self):
        return [list(r) for r in self.kappa]


def poisson_matrix(spec: ExtensionSpec, ys: YSequence) -> PoissonMatrix:
    """kappa with {y_i, y_j} = kappa_{ij} y_i y_j."""
    n = spec.n
    k = [[0] * n for _ in range(n)]
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            yi, yj = ys.y[i - 1], ys.y[j - 1]
            br = bracket(spec, yi, yj)
            prod = yi * yj
            if not br:
                continue
            quo, rem = br.divmod(prod)
            if rem or len(quo) != 1 or next(iter(quo)) != (0,) * n:
                raise NotLogCanonical(f"{{y_{i}, y_{j}}} = {br} is not a multiple of y_{i} y_{j}")
            val = quo.coeff((0,) * n)
            if val.denominator != 1:
                raise NotLogCanonical(f"kappa_{i}{j} = {val} is not an integer")
            k[i - 1][j - 1] = int(val)
            k[j - 1][i - 1] = -int(val)
    return PoissonMatrix(tuple(tuple(r) for r in k))


def torus_bracket(kappa: PoissonMatrix, a: CommLaurent, b: CommLaurent) -> CommLaurent:
    """Log-canonical bracket on Gamma."""
    t: Dict[Tuple[int, ...], Fraction] = {}
    for v, ca in a.items():
        for w, cb in b.items():
            lam = kappa.lam(v, w)
            if lam:
                e = tuple(x + y for x, y in zip(v, w))
                t[e] = t.get(e, 0) + lam * ca * cb
    return CommLaurent(a.n, t)


# embedding A -> Gamma ---------------------------------------------------------------

def _x_images(ys: YSequence) -> List[CommLaurent]:
    if ys._x_images is None:
        n = ys.n
        imgs: List[CommLaurent] = []
        for j in range(1, n + 1):
            yj = CommLaurent.var(n, j)
            pj = ys.p[j - 1]
            if not pj:
                imgs.append(yj)
                continue
            cj = ys.c[j - 1]
            cy = cj.substitute(imgs + [CommLaurent.var(n, l) for l in range(j, n + 1)]) if cj else cj
            ys._c_torus[j] = cy
            imgs.append(CommLaurent.var(n, pj) ** -1 * (yj + cy))
        ys._x_images = imgs
    return ys._x_images


def embed_in_torus(ys: YSequence, a: CommLaurent) -> CommLaurent:
    """Rewrite a polynomial in x as an element of Gamma (y-coordinates)."""
    if not a:
        return CommLaurent(ys.n)
    return a.substitute(_x_images(ys))


def c_in_torus(ys: YSequence, j: int) -> CommLaurent:
    _x_images(ys)
    return ys._c_torus.get(j, CommLaurent(ys.n))


def compute_b(ys: YSequence, k: int, kappa: Optional[PoissonMatrix] = None) -> CommLaurent:
    """Constant term of c_k viewed in Gamma'_{k-1}[y_{p(k)}]; must be a monomial.

    When ``kappa`` is given, the two conditions on its exponent v are checked:
    weight(y^v) = weight(y_k) and Lambda(v, e_l) = kappa_{k,l} (+ eta_k at l = p(k)).
    """
    pk = ys.p[k - 1]
    if not pk:
        raise ValueError(f"b_{k} needs p({k}) != 0")
    cy = c_in_torus(ys, k)
    if any(e[pk - 1] < 0 for e in cy):
        raise NotAMonomial(f"c_{k} has negative powers of y_{pk}")
    b = CommLaurent(ys.n, {e: c for e, c in cy.items() if e[pk - 1] == 0})
    if len(b) != 1:
        raise NotAMonomial(f"b_{k} = {b} is not a single nonzero monomial")
    (v, _), = b.items()
    if any(v[k - 1:]):
        raise NotAMonomial(f"b_{k} involves y_l with l >= {k}")
    if kappa is not None:
        spec = ys.spec
        if monomial_weight_y(ys, v) != ys.weight(k):
            raise ChainIdentityFailed(f"b_{k}: weight of y^v differs from weight of y_{k}")
        for l in range(1, k):
            want = kappa.kappa[k - 1][l - 1] + (spec.eta(k) if l == pk else 0)
            got = kappa.lam(v, unit(ys.n, l))
            if got != want:
                raise ChainIdentityFailed(
                    f"b_{k}: Lambda(v, e_{l}) = {got}, expected {want}")
    return b


def monomial_weight_y(ys: YSequence, v: Sequence[int]):
    w = [0] * ys.spec.r
    for j, k in enumerate(v, start=1):
        if k:
            for t, x in enumerate(ys.weight(j)):
                w[t] += k * x
    return tuple(w)


# prepend step data and the d-chain ----------------------------------------------------

@dataclass(frozen=True)
class PrependData:
    """The derivations of a prepend step, expressed on the tail algebra.

    ``delta[j]`` is delta(x_j) in tail-local variables; theta is d_{h'_0},
    i.e. theta(a) = (weight(a) . h_prime0) a for homogeneous a.
    """

    eta: int
    lambda0: Tuple[int, ...]
    h_prime0: Tuple[int, ...]
    delta: Mapping[int, CommLaurent]

    def is_trivial(self) -> bool:
        return not any(self.delta.values())


def prepend_data(spec: ExtensionSpec, k: int) -> PrependData:
    """delta(x_j) = -delta_j(x_k) on the tail k+1..n, eta = lambda_k(h'_k)."""
    m = spec.n - k
    images = {}
    for j in range(k + 1, spec.n + 1):
        d = spec.delta_of(k, j)
        images[j - k] = (-d).restrict(m, k) if d else CommLaurent(m)
    return PrependData(
        eta=spec.eta_prime(k),
        lambda0=tuple(spec.lambdas[k - 1]),
        h_prime0=tuple(spec.h_prime[k - 1]),
        delta=images,
    )


def delta_on_torus(ys: YSequence, data: PrependData, g: CommLaurent) -> CommLaurent:
    """Extend the derivation delta from A to Gamma: delta(y^v) = y^v sum v_i delta(y_i)/y_i."""
    n = ys.n
    dy = [embed_in_torus(ys, apply_derivation(data.delta, ys.y[i])) for i in range(n)]
    out = CommLaurent(n)
    for v, c in g.items():
        mono = CommLaurent(n, {v: c})
        for i, k in enumerate(v):
            if k and dy[i]:
                out = out + mono * dy[i] * CommLaurent(n, {unit(n, i + 1): 1}) ** -1 * k
    return out


def theta_on_torus(ys: YSequence, data: PrependData, g: CommLaurent) -> CommLaurent:
    out = {}
    for v, c in g.items():
        w = monomial_weight_y(ys, v)
        out[v] = c * dot(w, data.h_prime0)
    return CommLaurent(ys.n, out)


@dataclass
class DChain:
    k: int
    m: int
    chain: List[int]            # k, p(k), ..., p^m(k)
    d: List[CommLaurent]        # d^(0), ..., d^(m), d^(m+1) = 0
    big_m: List[CommLaurent]    # M^(0), ..., M^(m)
    eta: int
    checks: List[Tuple[str, bool, str]] = field(default_factory=list)


def find_pivot(ys: YSequence, data: PrependData) -> int:
    """The unique level-set maximum of the tail with delta(y) != 0."""
    hits = [j for j in ys.chain_maxima(ys.n)
            if apply_derivation(data.delta, ys.y[j - 1])]
    if not hits:
        raise NoPivot("prepend derivation kills every level-set maximum")
    if len(hits) > 1:
        raise MultiplePivots(f"prepend derivation is nonzero on maxima {hits}")
    return hits[0]


def compute_d_chain(spec: ExtensionSpec, ys: YSequence, data: PrependData,
                    kappa: Optional[PoissonMatrix] = None) -> DChain:
    """d^{(i)} = delta(y_{p^i(k)}) / (eta y_{p^i(k)}) on the tail, with chain checks.

    ``spec`` is the tail spec that ``ys`` was computed from.
    """
    if data.is_trivial():
        raise ValueError("the prepend derivation is zero; take D = 0 instead")
    n = ys.n
    if kappa is None:
        kappa = poisson_matrix(spec, ys)
    k = find_pivot(ys, data)
    chain = ys.chain_from(k)
    m = len(chain) - 1
    eta = data.eta
    zero = CommLaurent(n)

    def yvar(j):
        return CommLaurent.var(n, j) if j else CommLaurent.constant(n)

    d = []
    for j in chain:
        dy = apply_derivation(data.delta, ys.y[j - 1])
        d.append(embed_in_torus(ys, dy) * yvar(j) ** -1 * Fraction(1, eta))
    d.append(zero)
    checks: List[Tuple[str, bool, str]] = []

    # vanishing pattern along every chain
    bad = []
    for j in range(1, n + 1):
        pj = ys.p[j - 1]
        if pj:
            a = bool(apply_derivation(data.delta, ys.y[j - 1]))
            b = bool(apply_derivation(data.delta, ys.y[pj - 1]))
            if a != b:
                bad.append(f"delta(y_{j}) and delta(y_{pj}) disagree on vanishing")
    checks.append(("vanishing pattern", not bad, "; ".join(bad)))

    # monomial quotients
    big_m = []
    bad = []
    for i in range(m + 1):
        nxt = chain[i + 1] if i + 1 <= m else 0
        mi = (d[i] - d[i + 1]) * yvar(chain[i]) * yvar(nxt)
        if len(mi) != 1 or not mi.is_polynomial():
            bad.append(f"M^({i}) = {mi} is not a nonzero monomial")
        big_m.append(mi)
    checks.append(("d-M monomial quotient", not bad, "; ".join(bad)))

    # recursion through b
    bad = []
    for i in range(m):
        j = chain[i]
        b = compute_b(ys, j, kappa)
        lhs = d[i] - d[i + 1]
        rhs = b * yvar(j) ** -1 * (d[i + 1] - d[i + 2])
        if lhs != rhs:
            bad.append(f"recursion fails at i={i}: {lhs} != {rhs}")
    checks.append(("d-M recursion", not bad, "; ".join(bad)))

    # {d^(i) - d^(i+1), y_l} against theta
    bad = []
    for i in range(m + 1):
        g = d[i] - d[i + 1]
        upper = chain[i - 1] if i >= 1 else n + 1
        for l in range(1, upper):
            yl = CommLaurent.var(n, l)
            lhs = torus_bracket(kappa, g, yl)
            th = theta_on_torus(ys, data, yl)
            if l == chain[i]:
                th = th + yl * eta
            if lhs != th * g:
                bad.append(f"d-y identity fails for i={i}, l={l}")
    checks.append(("d-y identities", not bad, "; ".join(bad)))

    dc = DChain(k=k, m=m, chain=chain, d=d, big_m=big_m, eta=eta, checks=checks)
    failed = [c for c in checks if not c[1]]
    if failed:
        raise ChainIdentityFailed("; ".join(f"{name}: {det}" for name, _, det in failed))
    return dc


def distinguished_identity(ys: YSequence, data: PrependData, d: CommLaurent) -> bool:
    """delta(d) = -eta d^2 in Gamma."""
    return delta_on_torus(ys, data, d) == d * d * (-data.eta)


def distinguished_bracket_identity(spec: ExtensionSpec, ys: YSequence, data: PrependData,
                                   kappa: PoissonMatrix, d: CommLaurent) -> List[str]:
    """{d, x_j} = theta(x_j) d + delta(x_j) for every generator of the tail."""
    bad = []
    for j in range(1, ys.n + 1):
        xj = embed_in_torus(ys, spec.x(j))
        lhs = torus_bracket(kappa, d, xj)
        rhs = theta_on_torus(ys, data, xj) * d + embed_in_torus(ys, data.delta[j])
        if lhs != rhs:
            bad.append(f"x{j}")
    return bad


def d_j_identities(spec: ExtensionSpec, ys: YSequence, kappa: PoissonMatrix) -> List[str]:
    """For every j with p(j) != 0: d_j = c_j / y_{p(j)} on A_{j-1}."""
    bad = []
    n = spec.n
    for j in range(1, n + 1):
        pj = ys.p[j - 1]
        if not pj:
            continue
        dj = c_in_torus(ys, j) * CommLaurent.var(n, pj) ** -1
        de = delta_images(spec, j)
        eta = spec.eta(j)
        # delta_j on Gamma_{j-1}
        dy = {i: embed_in_torus(ys, apply_derivation(de, ys.y[i - 1])) for i in range(1, j)}

        def delta_g(g):
            out = CommLaurent(n)
            for v, c in g.items():
                mono = CommLaurent(n, {v: c})
                for i, kk in enumerate(v, start=1):
                    if kk and dy.get(i):
                        out = out + mono * dy[i] * CommLaurent.var(n, i) ** -1 * kk
            return out

        if delta_g(dj) != dj * dj * (-eta):
            bad.append(f"delta_{j}(d_{j}) != -eta_{j} d_{j}^2")
        for i in range(1, j):
            xi = embed_in_torus(ys, spec.x(i))
            lhs = torus_bracket(kappa, dj, xi)
            rhs = xi * dj * spec.lam(i, j) + embed_in_torus(ys, de[i])
            if lhs != rhs:
                bad.append(f"{{d_{j}, x{i}}} != theta_{j}(x{i}) d_{j} + delta_{j}(x{i})")
    return bad
