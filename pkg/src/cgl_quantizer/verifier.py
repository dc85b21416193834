"""Read-only checks of a quantum presentation against its Poisson input.

Every check returns a CheckResult; a failing result always carries a witness.
The suite never aborts: exceptions inside a check become failures.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from .commutative import (
    compute_level_sets,
    distinguished_bracket_identity,
    distinguished_identity,
    level_sets_from_p,
)
from .errors import CapExceeded, CGLError
from .ore import (
    DEFAULT_MAX_PEEL,
    LeadingTransform,
    OreElement,
    OrePresentation,
    TorusElement,
    apply_delta,
)
from .poisson import CommLaurent, ExtensionSpec, bracket, dot, monomial_weight
from .quantizer import QuantumPresentation
from .quantum import check_L_form, check_normality, distinguished_quantum
from .scalars import QLaurent, divide_by_q_minus_one, eval_at_one

DEFAULT_SEED = 1729
DEFAULT_SAMPLES = 20
DEFAULT_MAX_DEGREE = 3
ASSOCIATIVITY_SAMPLES = 200
ROUND_TRIP_SAMPLES = 100
NILPOTENCY_CAP = 64


@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: Optional[str] = None
    details: Dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.passed and not self.witness:
            self.witness = "(no witness recorded)"

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict:
        out = {"name": self.name, "status": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out


@dataclass
class VerificationReport:
    seed: int
    results: List[CheckResult]

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def cap_exceeded(self) -> bool:
        return any(r.details.get("cap_exceeded") for r in self.results)

    def by_name(self, name: str) -> CheckResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"seed": self.seed, "ok": self.ok, "checks": [r.to_json() for r in self.results]}


# ---------------------------------------------------------------------------
# random elements
# ---------------------------------------------------------------------------

def random_exponent(rng: random.Random, n: int, max_degree: int) -> Tuple[int, ...]:
    d = rng.randint(0, max_degree)
    e = [0] * n
    for _ in range(d):
        e[rng.randrange(n)] += 1
    return tuple(e)


def random_scalar(rng: random.Random) -> QLaurent:
    c = rng.choice([-3, -2, -1, 1, 2, 3])
    out = QLaurent({rng.randint(-2, 2): c})
    if rng.random() < 0.3:
        out = out + QLaurent({rng.randint(-2, 2): rng.choice([-1, 1])})
    return out if out else QLaurent(1)


def random_element(rng: random.Random, pres: OrePresentation,
                   max_degree: int = DEFAULT_MAX_DEGREE, max_terms: int = 3) -> OreElement:
    t: Dict = {}
    for _ in range(rng.randint(1, max_terms)):
        e = random_exponent(rng, pres.n, max_degree)
        t[e] = t.get(e, QLaurent(0)) + random_scalar(rng)
    el = OreElement(pres, {e: c for e, c in t.items() if c})
    return el if el else pres.monomial(random_exponent(rng, pres.n, max_degree))


def random_torus_element(rng: random.Random, tpres, max_degree: int = DEFAULT_MAX_DEGREE,
                         max_terms: int = 3) -> TorusElement:
    t: Dict = {}
    for _ in range(rng.randint(1, max_terms)):
        e = tuple(rng.randint(-1, 1) * k for k in random_exponent(rng, tpres.n, max_degree))
        t[e] = t.get(e, QLaurent(0)) + random_scalar(rng)
    el = TorusElement(tpres, {e: c for e, c in t.items() if c})
    return el if el else tpres.one()


def _guard(name: str, fn: Callable[[], CheckResult]) -> CheckResult:
    try:
        return fn()
    except CapExceeded as exc:
        return CheckResult(name, False, f"CapExceeded: {exc}", {"cap_exceeded": True})
    except CGLError as exc:
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}")
    except (ArithmeticError, ValueError) as exc:
        return CheckResult(name, False, f"{type(exc).__name__}: {exc}")


# ---------------------------------------------------------------------------
# semiclassical limit
# ---------------------------------------------------------------------------

def semiclassical_limit(a: OreElement, b: OreElement) -> CommLaurent:
    """(ab - ba)/(q - 1) at q = 1; NotDivisible if the commutator is not divisible."""
    comm = a * b - b * a
    out = {}
    for e, c in comm.items():
        v = eval_at_one(divide_by_q_minus_one(c))
        if v:
            out[e] = v
    return CommLaurent(a.pres.n, out)


def semiclassical_check(spec: ExtensionSpec, qp: QuantumPresentation, seed: int = DEFAULT_SEED,
                        samples: int = DEFAULT_SAMPLES, max_degree: int = DEFAULT_MAX_DEGREE) -> CheckResult:
    name = "semiclassical"

    def run():
        pres = qp.pres
        n = pres.n
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                got = semiclassical_limit(pres.gen(i), pres.gen(j))
                want = bracket(spec, spec.x(i), spec.x(j))
                if got != want:
                    return CheckResult(name, False, f"pair (X{i}, X{j}): limit {got} != bracket {want}")
        rng = random.Random(seed)
        for s in range(samples):
            a = random_element(rng, pres, max_degree)
            b = random_element(rng, pres, max_degree)
            got = semiclassical_limit(a, b)
            want = bracket(spec, a.eval_at_one(), b.eval_at_one())
            if got != want:
                return CheckResult(name, False, f"sample {s}: a = {a}, b = {b}: {got} != {want}")
        return CheckResult(name, True, details={"generator_pairs": n * (n - 1) // 2,
                                                "random_pairs": samples, "seed": seed})

    return _guard(name, run)


def y_congruence_check(spec: ExtensionSpec, qp: QuantumPresentation) -> CheckResult:
    name = "y-congruence"

    def run():
        for j, (Y, y) in enumerate(zip(qp.qys.Y, qp.ys.y), start=1):
            if Y.eval_at_one() != y:
                return CheckResult(name, False, f"Y_{j} = {Y} evaluates to {Y.eval_at_one()}, y_{j} = {y}")
        return CheckResult(name, True, details={"n": qp.n})

    return _guard(name, run)


# ---------------------------------------------------------------------------
# local nilpotency
# ---------------------------------------------------------------------------

def nilpotency_check(pres: OrePresentation, cap: int = NILPOTENCY_CAP) -> CheckResult:
    """Δ_j^N(X_i) = 0 for some N <= cap, plus the open-interval support of Δ_j(X_i)."""
    name = "nilpotency"

    def run():
        orders = {}
        for (i, j) in pres.nonzero_delta_pairs():
            for e in pres.delta_terms(i, j):
                bad = [v + 1 for v, k in enumerate(e) if k and not i < v + 1 < j]
                if bad:
                    return CheckResult(name, False,
                                       f"Δ_{j}(X_{i}) = {pres.delta_gen(i, j)} uses X_{bad[0]}")
        for j in range(2, pres.n + 1):
            for i in range(1, j):
                a = pres.gen(i)
                steps = 0
                while a:
                    if steps >= cap:
                        return CheckResult(name, False, f"Δ_{j}^{cap}(X_{i}) = {a} != 0")
                    a = apply_delta(pres, j, a)
                    steps += 1
                orders[f"{i},{j}"] = steps
        return CheckResult(name, True, details={"cap": cap, "orders": orders})

    return _guard(name, run)


# ---------------------------------------------------------------------------
# distinguished elements
# ---------------------------------------------------------------------------

def distinguished_checks(spec: ExtensionSpec, qp: QuantumPresentation) -> CheckResult:
    name = "distinguished"

    def run():
        steps = qp.nontrivial_steps()
        if not steps:
            return CheckResult(name, True, details={"vacuous": True})
        done = []
        for st in steps:
            tail = st.tail
            d = st.dchain.d[0]
            if not distinguished_identity(tail.ys, st.data, d):
                return CheckResult(name, False, f"step k={st.k}: δ(d) != -η d^2 for d = {d}")
            bad = distinguished_bracket_identity(tail.spec, tail.ys, st.data, tail.kappa, d)
            if bad:
                return CheckResult(name, False, f"step k={st.k}: {{d, r}} != θ(r) d + δ(r) at {bad[0]}")
            if not distinguished_quantum(tail.qys, st.data, st.D):
                return CheckResult(name, False, f"step k={st.k}: Δ(D) != (1-ω) D^2 for D = {st.D}")
            done.append(st.k)
        return CheckResult(name, True, details={"steps": done})

    return _guard(name, run)


# ---------------------------------------------------------------------------
# structure
# ---------------------------------------------------------------------------

def quantum_predecessors(qp: QuantumPresentation) -> List[int]:
    """p recomputed on the quantum side from the vanishing of Δ_j(Y_i)."""
    pres, Y = qp.pres, qp.qys.Y
    p: List[int] = []
    for j in range(1, pres.n + 1):
        maxima = [i for i in range(1, j) if i not in p[: j - 1]]
        hits = [i for i in maxima if apply_delta(pres, j, Y[i - 1])]
        p.append(max(hits) if hits else 0)
    return p


def structure_checks(spec: ExtensionSpec, qp: QuantumPresentation) -> CheckResult:
    name = "structure"
    pres, n = qp.pres, qp.n
    parts: Dict[str, Dict] = {}

    def record(key: str, problems: List[str], extra=None):
        parts[key] = {"status": "fail" if problems else "pass"}
        if problems:
            parts[key]["witness"] = problems[0]
        if extra is not None:
            parts[key]["value"] = extra

    def run():
        # symmetric support and homogeneity of Δ_j(X_i)
        sup, hom = [], []
        for (i, j) in pres.nonzero_delta_pairs():
            target = tuple(a + b for a, b in zip(spec.lambdas[i - 1], spec.lambdas[j - 1]))
            for e in pres.delta_terms(i, j):
                if any(k and not i < v + 1 < j for v, k in enumerate(e)):
                    sup.append(f"Δ_{j}(X_{i}) has a term outside ({i},{j})")
                if monomial_weight(spec, e) != target:
                    hom.append(f"Δ_{j}(X_{i}) not of weight λ_{i} + λ_{j}")
        record("symmetric support", sup)
        record("homogeneity", hom)

        # λ_i(h_j) = -λ_j(h'_i) = relation exponent
        exp = []
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                a = dot(spec.lambdas[i - 1], spec.h[j - 1])
                b = -dot(spec.lambdas[j - 1], spec.h_prime[i - 1])
                if not a == b == pres.lam(i, j):
                    exp.append(f"({i},{j}): λ_i(h_j) = {a}, -λ_j(h'_i) = {b}, relation exponent {pres.lam(i, j)}")
        record("exponent identity", exp)

        # level sets
        cls = compute_level_sets(qp.ys)
        qp_p = quantum_predecessors(qp)
        qls = level_sets_from_p(qp_p)
        record("level sets", [] if cls == qls else [f"commutative {cls.to_json()} != quantum {qls.to_json()}"],
               cls.to_json())

        # degree patterns
        cols = LeadingTransform(qp.ys.p).columns
        deg = []
        for j in range(1, n + 1):
            dq, dc = qp.qys.degree(j), qp.ys.degree(j)
            if not dq == dc == cols[j - 1]:
                deg.append(f"Y_{j} degree {dq}, y_{j} degree {dc}, f_{j} = {cols[j - 1]}")
            c = qp.qys.Y[j - 1].leading()[1]
            if c != QLaurent(1):
                deg.append(f"Y_{j} has leading coefficient {c}")
        record("degree patterns", deg)

        # l = kappa
        lk = [] if [list(r) for r in qp.qys.l_matrix] == [list(r) for r in qp.kappa.kappa] else \
            [f"l = {qp.qys.l_matrix} != kappa = {qp.kappa.kappa}"]
        record("l equals kappa", lk)

        # normality of Y_j below p^{-1}(j)
        nor = []
        for j in range(1, n + 1):
            ok, s = check_normality(qp.qys, j)
            if not ok:
                nor.append(f"Y_{j} is not normal: {s}")
        record("normality", nor)

        # L-form of Y and of Y D^(i) at each step
        lf = [f"{nm}: {det}" for nm, ok, det in check_L_form(qp.qys, None) if not ok]
        for st in qp.nontrivial_steps():
            lf += [f"step k={st.k}: {nm}: {det}" for nm, ok, det in check_L_form(st.tail.qys, st.qdchain)
                   if not ok]
        record("L-form", lf)

        # incremental Y update agrees with the recomputed one
        cc = [f"step k={st.k}" for st in qp.steps if st.commute_consistent is False]
        record("incremental Y update", cc)

        failed = [(k, v) for k, v in parts.items() if v["status"] == "fail"]
        if failed:
            k, v = failed[0]
            return CheckResult(name, False, f"{k}: {v['witness']}", parts)
        return CheckResult(name, True, details=parts)

    return _guard(name, run)


# ---------------------------------------------------------------------------
# engine soundness
# ---------------------------------------------------------------------------

def associativity_check(qp: QuantumPresentation, seed: int = DEFAULT_SEED,
                        samples: int = ASSOCIATIVITY_SAMPLES,
                        max_degree: int = DEFAULT_MAX_DEGREE) -> CheckResult:
    name = "associativity"

    def run():
        pres = qp.pres
        n = pres.n
        for h in range(1, n + 1):
            for i in range(h + 1, n + 1):
                for j in range(i + 1, n + 1):
                    a, b, c = pres.gen(j), pres.gen(i), pres.gen(h)
                    if a * (b * c) != (a * b) * c:
                        return CheckResult(name, False, f"overlap X{j}*X{i}*X{h}")
        rng = random.Random(seed)
        for s in range(samples):
            a, b, c = (random_element(rng, pres, max_degree) for _ in range(3))
            if (a * b) * c != a * (b * c):
                return CheckResult(name, False, f"Ore sample {s}: ({a}, {b}, {c})")
        tp = qp.qys.tpres
        for s in range(samples):
            a, b, c = (random_torus_element(rng, tp, max_degree) for _ in range(3))
            if (a * b) * c != a * (b * c):
                return CheckResult(name, False, f"torus sample {s}: ({a}, {b}, {c})")
        return CheckResult(name, True, details={"seed": seed, "samples": samples})

    return _guard(name, run)


def round_trip_check(qp: QuantumPresentation, seed: int = DEFAULT_SEED,
                     samples: int = ROUND_TRIP_SAMPLES, max_degree: int = DEFAULT_MAX_DEGREE,
                     max_peel: int = DEFAULT_MAX_PEEL) -> CheckResult:
    name = "round-trip"

    def run():
        emb = qp.qys.embedding
        pres = qp.pres
        rng = random.Random(seed + 1)
        for s in range(samples):
            a = random_element(rng, pres, max_degree)
            g = emb.embed(a)
            if not g:
                return CheckResult(name, False, f"sample {s}: embed({a}) = 0")
            back = emb.to_ore(g, max_peel)
            if back != a:
                return CheckResult(name, False, f"sample {s}: {a} -> {g} -> {back}")
            u = a.leading()[0]
            lead = emb.embed_monomial(u).leading()[0]
            if lead != emb.transform.inverse(u):
                return CheckResult(name, False, f"sample {s}: leading exponent of embed(X^{u}) is {lead}")
            if s % 5 == 0:
                b = random_element(rng, pres, max_degree)
                if emb.embed(a * b) != g * emb.embed(b):
                    return CheckResult(name, False, f"sample {s}: embed is not multiplicative on ({a}, {b})")
        return CheckResult(name, True, details={"seed": seed + 1, "samples": samples})

    return _guard(name, run)


def epsilon_check(original: QuantumPresentation, scaled: QuantumPresentation) -> CheckResult:
    """Δ' = ε Δ on the final step with ε(1) = 1, recovered by exact division."""
    from .quantizer import recover_epsilon

    name = "epsilon"
    eps = recover_epsilon(original.pres, scaled.pres)
    if eps is None:
        return CheckResult(name, False, "scaled Δ table is not a single L-multiple of the original")
    if eval_at_one(eps) != 1:
        return CheckResult(name, False, f"recovered ε = {eps} has ε(1) = {eval_at_one(eps)}")
    return CheckResult(name, True, details={"epsilon": str(eps)})


def run_verification(spec: ExtensionSpec, qp: QuantumPresentation, seed: int = DEFAULT_SEED,
                     samples: int = DEFAULT_SAMPLES, max_peel: int = DEFAULT_MAX_PEEL) -> VerificationReport:
    results = [
        semiclassical_check(spec, qp, seed, samples),
        y_congruence_check(spec, qp),
        nilpotency_check(qp.pres),
        distinguished_checks(spec, qp),
        structure_checks(spec, qp),
        associativity_check(qp, seed),
        round_trip_check(qp, seed, max_peel=max_peel),
    ]
    return VerificationReport(seed, results)
