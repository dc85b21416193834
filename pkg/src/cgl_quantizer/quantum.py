"""Quantum analogues of the commutative analysis.

Y-sequence with C_j := -(1-ω_j)^{-1} (Δ_j ∘ σ_j^{-1})(Y_{p(j)}) so that
Y_j = Y_{p(j)} X_j - C_j, the monomials B_k, the D-chain of a prepend step,
q-commutation, normality and L-form checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .commutative import DChain, PrependData, YSequence, compute_y_sequence
from .errors import (
    ChainIdentityFailed,
    NotAMonomial,
    NotInSubalgebra,
    NotQCommuting,
    PivotMismatch,
)
from .ore import (
    OreElement,
    OrePresentation,
    QTorusPresentation,
    TorusElement,
    TorusEmbedding,
    apply_delta,
    apply_sigma,
    f_map_laurent,
)
from .poisson import ExtensionSpec, apply_derivation, delta_images, dot
from .scalars import ONE, QLaurent, QRational, normalize, q_power


@dataclass
class QYSequence:
    pres: OrePresentation
    spec: ExtensionSpec
    Y: List[OreElement]
    p: List[int]
    C: List[OreElement]
    l_matrix: Tuple[Tuple[int, ...], ...]
    tpres: QTorusPresentation
    _embedding: Optional[TorusEmbedding] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.pres.n

    @property
    def embedding(self) -> TorusEmbedding:
        if self._embedding is None:
            self._embedding = TorusEmbedding(self.pres, self.tpres, self.p, self.C)
        return self._embedding

    def chain_from(self, k: int) -> List[int]:
        out = []
        while k:
            out.append(k)
            k = self.p[k - 1]
        return out

    def successor(self, j: int) -> int:
        for l in range(j + 1, self.n + 1):
            if self.p[l - 1] == j:
                return l
        return self.n + 1

    def omega_exp(self, j: int) -> int:
        return self.spec.eta(j)

    def weight(self, j: int):
        w = [0] * self.spec.r
        for l in self.chain_from(j):
            for t, v in enumerate(self.spec.lambdas[l - 1]):
                w[t] += v
        return tuple(w)

    def degree(self, j: int) -> Tuple[int, ...]:
        """Leading X-exponent of Y_j."""
        return self.Y[j - 1].leading()[0]


def _divide_by_one_minus_q_power(a: OreElement, eta: int) -> OreElement:
    """a / (1 - q^eta), computed in K then brought back to L when possible."""
    den = QRational(ONE - q_power(eta))
    return a.map_coeffs(lambda c: normalize(QRational(c) / den))


def compute_C(pres: OrePresentation, j: int, pj: int, Ypj: OreElement, eta: int) -> OreElement:
    """C_j = -(1-ω_j)^{-1} (Δ_j ∘ σ_j^{-1})(Y_{p(j)})."""
    inner = apply_delta(pres, j, apply_sigma(pres, j, Ypj, power=-1))
    return -_divide_by_one_minus_q_power(inner, eta)


def _q_commutation(a: OreElement, b: OreElement) -> Optional[int]:
    """s with a*b = q^s b*a, or None."""
    ab = a * b
    ba = b * a
    if not ab and not ba:
        return 0
    if not ab or not ba:
        return None
    e, c1 = ab.leading()
    e2, c2 = ba.leading()
    if e != e2:
        return None
    r = normalize(QRational(c1) / QRational(c2))
    if not (isinstance(r, QLaurent) and r.is_monomial()):
        return None
    (s, v), = r.items()
    if v != 1:
        return None
    return s if ab == ba.shift(s) else None


def compute_Y_sequence(pres: OrePresentation, spec: ExtensionSpec,
                       ys: Optional[YSequence] = None) -> QYSequence:
    """Y-sequence of a quantum-CGL presentation with p inherited from the Poisson side."""
    if ys is None:
        ys = compute_y_sequence(spec)
    n = pres.n
    p = list(ys.p)
    Y: List[OreElement] = []
    C: List[OreElement] = []
    for j in range(1, n + 1):
        Xj = pres.gen(j)
        # vanishing pattern against every level-set maximum of A_{j-1}
        preds = set(p[: j - 1])
        for i in (i for i in range(1, j) if i not in preds):
            qv = bool(apply_delta(pres, j, Y[i - 1]))
            cv = bool(apply_derivation(delta_images(spec, j), ys.y[i - 1]))
            if qv != cv:
                raise PivotMismatch(
                    f"Δ_{j}(Y_{i}) {'!=' if qv else '=='} 0 but δ_{j}(y_{i}) {'!=' if cv else '=='} 0")
        pj = p[j - 1]
        if not pj:
            if any(apply_delta(pres, j, pres.gen(i)) for i in range(1, j)):
                raise PivotMismatch(f"p({j}) = 0 on the Poisson side but Δ_{j} != 0")
            C.append(pres.zero())
            Y.append(Xj)
            continue
        cj = compute_C(pres, j, pj, Y[pj - 1], spec.eta(j))
        C.append(cj)
        Y.append(Y[pj - 1] * Xj - cj)
    l = [[0] * n for _ in range(n)]
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            s = _q_commutation(Y[i - 1], Y[j - 1])
            if s is None:
                raise NotQCommuting(f"Y_{i} and Y_{j} do not q-commute by an integer power of q")
            l[i - 1][j - 1] = s
            l[j - 1][i - 1] = -s
    lt = tuple(tuple(r) for r in l)
    return QYSequence(pres=pres, spec=spec, Y=Y, p=p, C=C, l_matrix=lt,
                      tpres=QTorusPresentation(lt))


def compute_B(qys: QYSequence, k: int) -> TorusElement:
    """Y_{p(k)}-degree-0 part of C_k in the torus; a single monomial."""
    pk = qys.p[k - 1]
    if not pk:
        raise ValueError(f"B_{k} needs p({k}) != 0")
    cy = qys.embedding.embed(qys.C[k - 1])
    if any(v[pk - 1] < 0 for v in cy):
        raise NotAMonomial(f"C_{k} has negative powers of Y_{pk}")
    b = TorusElement(qys.tpres, {v: c for v, c in cy.items() if v[pk - 1] == 0})
    if len(b) != 1:
        raise NotAMonomial(f"B_{k} = {b} is not a single nonzero monomial")
    return b


@dataclass
class QDChain:
    k: int
    m: int
    eta: int
    chain: List[int]
    D: List[TorusElement]          # D^(0), ..., D^(m+1) = 0
    B: List[TorusElement]          # B_{p^i(k)} for i = 0..m-1
    checks: List[Tuple[str, bool, str]] = field(default_factory=list)

    @property
    def omega_exp(self) -> int:
        return self.eta


def sigma_on_torus(qys: QYSequence, h_prime0: Sequence[int], g: TorusElement, power: int = 1) -> TorusElement:
    """σ(Y^v) = q^{weight(Y^v) . h'_0} Y^v."""
    ws = [qys.weight(j) for j in range(1, qys.n + 1)]
    t = {}
    for v, c in g.items():
        w = [0] * qys.spec.r
        for j, k in enumerate(v):
            if k:
                for a, x in enumerate(ws[j]):
                    w[a] += k * x
        t[v] = c.shift(power * dot(w, h_prime0))
    return TorusElement(qys.tpres, t)


def compute_D_chain(qys: QYSequence, dchain: DChain, data: PrependData) -> QDChain:
    """D^{(m)} = f(d^{(m)}), then D^{(i)} = D^{(i+1)} + ω Y^{-1} B (D^{(i+1)} - D^{(i+2)})."""
    tp = qys.tpres
    chain = dchain.chain
    m = dchain.m
    zero = tp.zero()
    D: List[Optional[TorusElement]] = [None] * (m + 2)
    D[m + 1] = zero
    D[m] = f_map_laurent(tp, dchain.d[m])
    B: List[TorusElement] = []
    for i in range(m):
        B.append(compute_B(qys, chain[i]))
    for i in range(m - 1, -1, -1):
        j = chain[i]
        fac = tp.gen(j, -1) * B[i]
        D[i] = D[i + 1] + (fac * (D[i + 1] - D[i + 2])).shift(qys.omega_exp(j))
    checks: List[Tuple[str, bool, str]] = []

    # each difference is one monomial, congruent to the commutative one
    bad = []
    for i in range(m + 1):
        diff = D[i] - D[i + 1]
        if len(diff) != 1:
            bad.append(f"D^({i}) - D^({i + 1}) = {diff} is not a monomial")
        if diff.eval_at_one() != dchain.d[i] - dchain.d[i + 1]:
            bad.append(f"D^({i}) - D^({i + 1}) is not congruent to d^({i}) - d^({i + 1}) mod (q-1)")
    checks.append(("chain monomials and congruence", not bad, "; ".join(bad)))

    # closed product formula for D
    total = zero
    for i in range(m + 1):
        term = f_map_laurent(tp, dchain.d[m])
        for t in range(m - 1, i - 1, -1):
            term = (tp.gen(chain[t], -1) * B[t] * term).shift(qys.omega_exp(chain[t]))
        total = total + term
    checks.append(("product formula", total == D[0], "" if total == D[0] else f"{total} != {D[0]}"))

    # Y_{p^{i+1}(k)} Y_{p^i(k)} (D^(i) - D^(i+1)) is a monomial of A
    bad = []
    for i in range(m + 1):
        nxt = chain[i + 1] if i + 1 <= m else 0
        mono = tp.gen(chain[i]) * (D[i] - D[i + 1])
        if nxt:
            mono = tp.gen(nxt) * mono
        if len(mono) != 1 or min(next(iter(mono))) < 0:
            bad.append(f"M^({i}) = {mono} is not a monomial with nonnegative exponents")
    checks.append(("qd-M monomial structure", not bad, "; ".join(bad)))

    qd = QDChain(k=dchain.k, m=m, eta=data.eta, chain=list(chain), D=D, B=B, checks=checks)
    failed = [c for c in checks if not c[1]]
    if failed:
        raise ChainIdentityFailed("; ".join(f"{nm}: {det}" for nm, _, det in failed))
    return qd


def check_normality(qys: QYSequence, j: int) -> Tuple[bool, Dict[int, Optional[int]]]:
    """Y_j X_i = q^s X_i Y_j for every i < p^{-1}(j); returns (ok, {i: s})."""
    upto = qys.successor(j)
    out: Dict[int, Optional[int]] = {}
    Yj = qys.Y[j - 1]
    for i in range(1, upto):
        out[i] = _q_commutation(Yj, qys.pres.gen(i))
    return all(v is not None for v in out.values()), out


def distinguished_quantum(qys: QYSequence, data: PrependData, D: TorusElement) -> bool:
    """Δ(D) = (1-ω) D^2 with Δ(a) = D a - σ(a) D."""
    delta_D = D * D - sigma_on_torus(qys, data.h_prime0, D) * D
    return delta_D == (D * D) * (ONE - q_power(data.eta))


def check_L_form(qys: QYSequence, qd: Optional[QDChain]) -> List[Tuple[str, bool, str]]:
    out = []
    bad = [f"Y_{j}" for j in range(1, qys.n + 1) if not qys.Y[j - 1].in_L()]
    out.append(("Y in L-form", not bad, ", ".join(bad)))
    if qd is None:
        return out
    bad = []
    for i, j in enumerate(qd.chain):
        g = qys.tpres.gen(j) * qd.D[i]
        try:
            a = qys.embedding.to_ore(g)
        except NotInSubalgebra as exc:
            bad.append(f"Y_{j} D^({i}) not in A: {exc}")
            continue
        if not a.in_L():
            bad.append(f"Y_{j} D^({i}) has coefficients outside L")
        elif a.max_var() > j:
            bad.append(f"Y_{j} D^({i}) does not lie in A_{j}")
    out.append(("Y D^(i) in L-form", not bad, "; ".join(bad)))
    return out
