"""The ten acceptance criteria, one test each.

Every test records its outcome in RESULTS; conftest prints one PASS/FAIL line
per criterion at the end of the session.  Run this file directly to get the
same lines without pytest.
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from cgl_quantizer import load_fixture, quantize  # noqa: E402
from cgl_quantizer.commutative import compute_level_sets, distinguished_identity  # noqa: E402
from cgl_quantizer.cli_io import fixture_names  # noqa: E402
from cgl_quantizer.ore import parse_ore  # noqa: E402
from cgl_quantizer.quantizer import recover_epsilon, scaled_variant  # noqa: E402
from cgl_quantizer.quantum import distinguished_quantum  # noqa: E402
from cgl_quantizer.scalars import ONE, Q, divide_by_q_minus_one, eval_at_one, q_power  # noqa: E402
from cgl_quantizer.verifier import (  # noqa: E402
    associativity_check,
    quantum_predecessors,
    round_trip_check,
    run_verification,
    semiclassical_check,
)

RESULTS = {}
FIXTURES = fixture_names()
_CACHE = {}


def _qp(name):
    if name not in _CACHE:
        _CACHE[name] = quantize(load_fixture(name).spec)
    return _CACHE[name]


def _evaluate(fn):
    try:
        return fn()
    except Exception as exc:  # an exception is a failed criterion, not a missing one
        return [f"{type(exc).__name__}: {exc}"]


def _run(k):
    _, title, fn = CRITERIA[k - 1]
    failures = _evaluate(fn)
    RESULTS[k] = (not failures, title)
    assert not failures, failures


def check_1():
    bad = []
    for name in FIXTURES:
        qp = _qp(name)
        r = semiclassical_check(qp.spec, qp, samples=20, max_degree=3)
        if not r.passed:
            bad.append(f"{name}: {r.witness}")
    return bad


def check_2():
    qp = _qp("weyl3")
    want = [
        "X1*X2 = q^-1*X2*X1",
        "X1*X3 = X3*X1 + (1 - q^2)/2*X2^2",
        "X2*X3 = q^-1*X3*X2",
    ]
    bad = []
    if qp.relations() != want:
        bad.append(f"relations {qp.relations()}")
    if qp.qys.Y[2] != parse_ore("X1*X3 - 1/2*X2^2", qp.pres):
        bad.append(f"Y3 = {qp.qys.Y[2]}")
    fx = load_fixture("weyl3").expected
    if fx["relations"] != want or fx["Y_sequence"][2] != "X1*X3 - 1/2*X2^2":
        bad.append("fixture golden output disagrees with the hand computation")
    return bad


def check_3():
    bad = []
    for name in FIXTURES:
        qp = _qp(name)
        for j, (Y, y) in enumerate(zip(qp.qys.Y, qp.ys.y), start=1):
            if Y.eval_at_one() != y:
                bad.append(f"{name}: Y{j}(1) = {Y.eval_at_one()} != y{j} = {y}")
    return bad


def check_4():
    bad = []
    count = 0
    for name in FIXTURES:
        for step in _qp(name).nontrivial_steps():
            count += 1
            tail = step.tail
            if not distinguished_identity(tail.ys, step.data, step.dchain.d[0]):
                bad.append(f"{name} k={step.k}: δ(d) != -η d^2")
            if not distinguished_quantum(tail.qys, step.data, step.D):
                bad.append(f"{name} k={step.k}: Δ(D) != (1-ω) D^2")
    if not count:
        bad.append("no nontrivial steps were exercised")
    return bad


def check_5():
    bad = []
    for name in FIXTURES:
        qp = _qp(name)
        l = qp.qys.l_matrix
        if [list(r) for r in l] != [list(r) for r in qp.kappa.kappa]:
            bad.append(f"{name}: l != kappa")
        for i in range(qp.n):
            for j in range(qp.n):
                a, b = qp.qys.Y[i], qp.qys.Y[j]
                if a * b != (b * a).shift(l[i][j]):
                    bad.append(f"{name}: Y{i + 1} Y{j + 1} != q^{l[i][j]} Y{j + 1} Y{i + 1}")
    return bad


def check_6():
    bad = []
    for name in FIXTURES:
        qp = _qp(name)
        qpred = quantum_predecessors(qp)
        if list(qpred) != list(qp.ys.p):
            bad.append(f"{name}: quantum p {qpred} != Poisson p {qp.ys.p}")
        ls = compute_level_sets(qp.ys).to_json()
        qls = {}
        for j in range(qp.n, 0, -1):
            if j not in qpred:
                chain, k = [], j
                while k:
                    chain.append(k)
                    k = qpred[k - 1]
                qls[min(chain)] = sorted(chain)
        if sorted(qls.values()) != sorted(ls):
            bad.append(f"{name}: level sets {sorted(qls.values())} != {ls}")
        for j in range(1, qp.n + 1):
            if qp.qys.degree(j) != qp.ys.y[j - 1].leading()[0]:
                bad.append(f"{name}: degree pattern of Y{j} differs")
    return bad


def check_7():
    bad = []
    for name in ("weyl3", "chain3", "m2x2"):
        qp = _qp(name)
        for eps in (ONE, Q, q_power(-1), 2 - Q):
            sc = scaled_variant(qp, eps)
            r = semiclassical_check(qp.spec, sc)
            if not r.passed:
                bad.append(f"{name} ε={eps}: {r.witness}")
            if recover_epsilon(qp.pres, sc.pres) != eps:
                bad.append(f"{name} ε={eps}: recovered {recover_epsilon(qp.pres, sc.pres)}")
    return bad


def check_8():
    qp = _qp("chain3")
    step = next(s for s in qp.steps if s.k == 1)
    bad = []
    qd, dc = step.qdchain, step.dchain
    if qd.m != 1:
        bad.append(f"m = {qd.m}")
        return bad
    tail = step.tail.qys
    k = qd.chain[0]
    rhs = qd.D[1] + (tail.tpres.gen(k, -1) * qd.B[0] * qd.D[1]).shift(tail.omega_exp(k))
    keys = set(qd.D[0].terms) | set(rhs.terms)
    for v in sorted(keys):
        if qd.D[0].coeff(v) != rhs.coeff(v):
            bad.append(f"term Y^{v}: {qd.D[0].coeff(v)} != {rhs.coeff(v)}")
    for name, ok, detail in dc.checks:
        if not ok:
            bad.append(f"{name}: {detail}")
    for i, mm in enumerate(dc.big_m):
        if len(mm) != 1 or any(e < 0 for e in mm.leading()[0]):
            bad.append(f"M^({i}) = {mm} is not a monomial")
    return bad


def check_9():
    t0 = time.perf_counter()
    qp = quantize(load_fixture("m2x2").spec)
    bad = []
    pairs = qp.pres.nonzero_delta_pairs()
    if pairs != [(1, 4)]:
        bad.append(f"nonzero Δ pairs {pairs}")
    d = qp.pres.relation_delta(1, 4)
    if set(d.terms) != {(0, 1, 1, 0)}:
        bad.append(f"Δ_(1,4) = {d}")
    else:
        c = d.coeff((0, 1, 1, 0))
        if eval_at_one(divide_by_q_minus_one(c)) != 2:
            bad.append(f"c(q) = {c}")
    rep = run_verification(qp.spec, qp)
    if not rep.ok:
        bad.append(f"verifier: {[r.name for r in rep.results if not r.passed]}")
    elapsed = time.perf_counter() - t0
    if elapsed >= 60:
        bad.append(f"took {elapsed:.1f} s")
    return bad


def check_10():
    bad = []
    for name in FIXTURES:
        qp = _qp(name)
        a = associativity_check(qp, samples=200)
        if not a.passed:
            bad.append(f"{name} associativity: {a.witness}")
        r = round_trip_check(qp, samples=100)
        if not r.passed:
            bad.append(f"{name} round trip: {r.witness}")
    return bad


CRITERIA = [
    (1, "semiclassical round trip", check_1),
    (2, "weyl3 golden output", check_2),
    (3, "prime-element congruence", check_3),
    (4, "distinguished identities", check_4),
    (5, "q-commutation and l = kappa", check_5),
    (6, "level sets and degree patterns", check_6),
    (7, "uniqueness up to epsilon", check_7),
    (8, "chain3 D recursion with m = 1", check_8),
    (9, "m2x2 quantum matrices", check_9),
    (10, "engine soundness", check_10),
]


def test_criterion_1():
    _run(1)


def test_criterion_2():
    _run(2)


def test_criterion_3():
    _run(3)


def test_criterion_4():
    _run(4)


def test_criterion_5():
    _run(5)


def test_criterion_6():
    _run(6)


def test_criterion_7():
    _run(7)


def test_criterion_8():
    _run(8)


def test_criterion_9():
    _run(9)


def test_criterion_10():
    _run(10)


if __name__ == "__main__":
    failed = 0
    for k, title, fn in CRITERIA:
        bad = _evaluate(fn)
        failed += bool(bad)
        print(f"criterion {k:>2}: {'FAIL' if bad else 'PASS'}  {title}")
        for b in bad:
            print(f"    {b}")
    sys.exit(1 if failed else 0)
