"""The inductive quantization: start from L[X_n] and prepend X_{n-1}, ..., X_1.

Each step works on the tail algebra (variables k+1..n relabeled 1..n-k):
it builds the commutative d-chain, the quantum D-chain, D = D^{(0)} and
Δ_{[k]}(X_j) = D X_j - σ(X_j) D in the quantum torus of the tail, and converts
the result back to normal form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .commutative import (
    DChain,
    PoissonMatrix,
    PrependData,
    YSequence,
    compute_d_chain,
    compute_y_sequence,
    poisson_matrix,
    prepend_data,
)
from .errors import (
    BadEpsilon,
    CoefficientNotInL,
    NotInSubalgebra,
    SupportViolation,
    ValidationFailed,
)
from .ore import (
    DEFAULT_MAX_PEEL,
    OreElement,
    OrePresentation,
    TorusElement,
)
from .poisson import ExtensionSpec, validate_spec
from .quantum import QDChain, QYSequence, compute_D_chain, compute_Y_sequence
from .scalars import ONE, QLaurent, eval_at_one, format_scalar, q_power


@dataclass
class StepRecord:
    """Audit data for adjoining the generator with global index k."""

    k: int
    trivial: bool
    eta: int
    sigma_exponents: Dict[int, int]          # global j -> l_j = λ_j(h'_k)
    data: PrependData                        # tail-local
    tail: "QuantumPresentation"
    dchain: Optional[DChain] = None
    qdchain: Optional[QDChain] = None
    D: Optional[TorusElement] = None
    delta_new: Dict[int, OreElement] = field(default_factory=dict)   # global j -> Δ_{[k]}(X_j)
    commute_consistent: Optional[bool] = None

    @property
    def offset(self) -> int:
        """Tail-local index + offset = global index."""
        return self.k

    def to_json(self, n_global: int) -> dict:
        out = {
            "k": self.k,
            "trivial": self.trivial,
            "eta": self.eta,
            "omega": format_scalar(q_power(self.eta)),
            "sigma_exponents": {str(j): v for j, v in sorted(self.sigma_exponents.items())},
        }
        if self.trivial:
            out["D"] = "0"
            return out
        off = self.offset
        out.update({
            "pivot": self.dchain.k + off,
            "m": self.dchain.m,
            "chain": [j + off for j in self.dchain.chain],
            "D": globalize(self.D, n_global, off),
            "D_chain": [globalize(d, n_global, off) for d in self.qdchain.D],
            "B": [globalize(b, n_global, off) for b in self.qdchain.B],
            "d_chain": [relabel_comm(d, n_global, off, "y") for d in self.dchain.d],
            "M": [relabel_comm(mm, n_global, off, "y") for mm in self.dchain.big_m],
            "commute_consistent": self.commute_consistent,
        })
        return out


@dataclass
class QuantumPresentation:
    spec: ExtensionSpec
    pres: OrePresentation
    ys: YSequence
    kappa: PoissonMatrix
    qys: QYSequence
    steps: List[StepRecord] = field(default_factory=list)
    epsilon: Optional[QLaurent] = None

    @property
    def n(self) -> int:
        return self.pres.n

    def relation_delta(self, i: int, j: int) -> OreElement:
        return self.pres.relation_delta(i, j)

    def relations(self) -> List[str]:
        out = []
        for i in range(1, self.n + 1):
            for j in range(i + 1, self.n + 1):
                out.append(relation_string(self.pres, i, j))
        return out

    def nontrivial_steps(self) -> List[StepRecord]:
        return [s for s in self.steps if not s.trivial]


def relation_string(pres: OrePresentation, i: int, j: int) -> str:
    s = -pres.lam(i, j)
    lead = pres.monomial(tuple(1 if t in (i - 1, j - 1) else 0 for t in range(pres.n)), q_power(s))
    rhs = lead.to_string().replace(f"X{i}*X{j}", f"X{j}*X{i}")
    d = pres.relation_delta(i, j)
    if d:
        ds = d.to_string()
        rhs += f" - {ds[1:]}" if ds.startswith("-") else f" + {ds}"
    return f"X{i}*X{j} = {rhs}"


def globalize(g, n: int, offset: int, prefix: str = "Y") -> str:
    """Print a tail element with global variable names."""
    from .ore import _format_terms

    t = {}
    for e, c in g.items():
        ne = [0] * n
        for i, k in enumerate(e):
            ne[i + offset] = k
        t[tuple(ne)] = c
    return _format_terms(t, prefix)


def relabel_comm(a, n: int, offset: int, prefix: str = "x") -> str:
    return a.extend(n, offset).to_string(prefix)


def _base(spec: ExtensionSpec) -> QuantumPresentation:
    """L[X_n] as a presentation of the last generator."""
    sub = spec.sub_spec(spec.n)
    pres = OrePresentation(1, {})
    ys = compute_y_sequence(sub)
    return QuantumPresentation(sub, pres, ys, poisson_matrix(sub, ys), compute_Y_sequence(pres, sub, ys))


def prepend(sub: QuantumPresentation, k: int, spec: ExtensionSpec,
            max_peel: int = DEFAULT_MAX_PEEL) -> QuantumPresentation:
    """Adjoin X_k (global index) to the presentation of variables k+1..n."""
    step_spec = spec.sub_spec(k)
    m = sub.n
    n_new = m + 1
    data = prepend_data(step_spec, 1)
    sigma_exp = {j + k: _dot(step_spec.lambdas[j], step_spec.h_prime[0])
                 for j in range(1, m + 1)}
    lam = {(1, j + 1): step_spec.lam(1, j + 1) for j in range(1, m + 1)}
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            lam[(i + 1, j + 1)] = sub.pres.lam(i, j)
    # the tail relations, shifted by one
    delta: Dict[Tuple[int, int], Dict] = {}
    for (i, j) in sub.pres.nonzero_delta_pairs():
        delta[(i + 1, j + 1)] = {(0,) + e: c for e, c in sub.pres.delta_terms(i, j).items()}

    record = StepRecord(k=k, trivial=data.is_trivial(), eta=data.eta,
                        sigma_exponents=sigma_exp, data=data, tail=sub)
    rel_new: Dict[int, Dict] = {}
    if not record.trivial:
        dchain = compute_d_chain(sub.spec, sub.ys, data, sub.kappa)
        qd = compute_D_chain(sub.qys, dchain, data)
        D = qd.D[0]
        emb = sub.qys.embedding
        for j in range(1, m + 1):
            Xj = emb.images[j - 1]
            lj = sigma_exp[j + k]
            g = D * Xj - (Xj * D).shift(lj)
            try:
                a = emb.to_ore(g, max_peel)
            except NotInSubalgebra as exc:
                raise NotInSubalgebra(
                    f"step k={k}: Δ(X_{j + k}) = D X - σ(X) D does not lie in the tail algebra: {exc}") from None
            if not a.in_L():
                raise CoefficientNotInL(f"step k={k}: Δ(X_{j + k}) has coefficients outside L")
            a = a.to_L()
            if a and a.max_var() >= j:
                raise SupportViolation(
                    f"step k={k}: Δ(X_{j + k}) = {a} is not supported strictly between X_{k} and X_{j + k}")
            if a:
                rel_new[j] = {(0,) + e: c for e, c in a.items()}
        record.dchain, record.qdchain, record.D = dchain, qd, D
    for j, t in rel_new.items():
        lij = lam[(1, j + 1)]
        delta[(1, j + 1)] = {e: -(c * q_power(lij)) for e, c in t.items()}
    pres = OrePresentation(n_new, lam, delta, tier="L")
    for j, t in rel_new.items():
        record.delta_new[j + k] = OreElement(pres, t)
    ys = compute_y_sequence(step_spec)
    kappa = poisson_matrix(step_spec, ys)
    qys = compute_Y_sequence(pres, step_spec, ys)
    record.commute_consistent = _commute_cross_check(sub, pres, qys, record)
    return QuantumPresentation(step_spec, pres, ys, kappa, qys, sub.steps + [record])


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _commute_cross_check(sub: QuantumPresentation, pres: OrePresentation,
                         qys: QYSequence, rec: StepRecord) -> bool:
    """Y'_j = X_0 Y_j + ω (1-ω)^{-1} Δ(Y_j) on the pivot chain, Y_j elsewhere."""
    from .quantum import _divide_by_one_minus_q_power

    X0 = pres.gen(1)
    chain = set(rec.dchain.chain) if rec.dchain else set()
    if qys.Y[0] != X0:
        return False
    for j in range(1, sub.n + 1):
        Yj = sub.qys.Y[j - 1].in_presentation(pres, 1)
        if j in chain:
            sigma = OreElement(pres, {
                e: c.shift(sum(kk * rec.sigma_exponents[i + rec.k] for i, kk in enumerate(e) if kk and i))
                for e, c in Yj.items()})
            delta = X0 * Yj - sigma * X0
            expected = X0 * Yj + _divide_by_one_minus_q_power(delta, rec.eta).shift(rec.eta)
        else:
            expected = Yj
        if qys.Y[j] != expected:
            return False
    return True


def quantize(spec: ExtensionSpec, max_peel: int = DEFAULT_MAX_PEEL) -> QuantumPresentation:
    """The preferred quantization of a validated spec."""
    report = validate_spec(spec)
    if not report.ok:
        raise ValidationFailed(
            "spec failed validation: " + "; ".join(f"{e.name}: {e.detail}" for e in report.failures()),
            report)
    qp = _base(spec)
    for k in range(spec.n - 1, 0, -1):
        qp = prepend(qp, k, spec, max_peel)
    return qp


def scaled_variant(qp: QuantumPresentation, epsilon) -> QuantumPresentation:
    """Multiply the final step's Δ table (the relations of X_1) by ε with ε(1) = 1."""
    eps = epsilon if isinstance(epsilon, QLaurent) else QLaurent(epsilon)
    if eval_at_one(eps) != 1:
        raise BadEpsilon(f"epsilon = {format_scalar(eps)} evaluates to {eval_at_one(eps)} at q = 1, expected 1")
    pres = qp.pres
    n = pres.n
    lam = {(i, j): pres.lam(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
    delta = {}
    for (i, j) in pres.nonzero_delta_pairs():
        t = pres.delta_terms(i, j)
        if i == 1:
            t = {e: c * eps for e, c in t.items()}
        delta[(i, j)] = t
    new = OrePresentation(n, lam, delta, tier=pres.tier)
    qys = compute_Y_sequence(new, qp.spec, qp.ys)
    base_eps = qp.epsilon if qp.epsilon is not None else ONE
    return QuantumPresentation(qp.spec, new, qp.ys, qp.kappa, qys, list(qp.steps), base_eps * eps)


def recover_epsilon(original: OrePresentation, scaled: OrePresentation) -> Optional[QLaurent]:
    """The scalar ε with scaled Δ = ε · original Δ on the pairs (1, j), by exact division.

    Returns None if no single ε in L works; ONE when the table is empty.
    """
    eps = None
    for j in range(2, original.n + 1):
        a = original.delta_terms(1, j)
        b = scaled.delta_terms(1, j)
        if set(a) != set(b):
            return None
        for e in a:
            ca, cb = a[e], b[e]
            try:
                r = cb.exact_div(ca)
            except ArithmeticError:
                return None
            if eps is None:
                eps = r
            elif eps != r:
                return None
    return ONE if eps is None else eps


def from_presentation(spec: ExtensionSpec, pres: OrePresentation) -> QuantumPresentation:
    """Wrap an externally supplied presentation of spec for verification (no step audit)."""
    if pres.n != spec.n:
        raise ValueError(f"presentation has {pres.n} generators, spec has {spec.n}")
    ys = compute_y_sequence(spec)
    kappa = poisson_matrix(spec, ys)
    qys = compute_Y_sequence(pres, spec, ys)
    return QuantumPresentation(spec, pres, ys, kappa, qys)
