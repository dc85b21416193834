import dataclasses
import json

import pytest

from cgl_quantizer.ore import OrePresentation
from cgl_quantizer.poisson import parse_comm
from cgl_quantizer.quantizer import from_presentation, scaled_variant
from cgl_quantizer.scalars import ONE, Q, QLaurent
from cgl_quantizer.verifier import (
    CheckResult,
    associativity_check,
    distinguished_checks,
    epsilon_check,
    nilpotency_check,
    run_verification,
    semiclassical_check,
    semiclassical_limit,
)
from conftest import FIXTURES, fixture_spec, quantized

CHECK_NAMES = ["semiclassical", "y-congruence", "nilpotency", "distinguished",
               "structure", "associativity", "round-trip"]


def _mutate(pres, scale=None, lam=None):
    n = pres.n
    lams = {(i, j): pres.lam(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)}
    lams.update(lam or {})
    delta = {k: {e: c * (scale or ONE) for e, c in pres.delta_terms(*k).items()}
             for k in pres.nonzero_delta_pairs()}
    return OrePresentation(n, lams, delta)


@pytest.mark.parametrize("name", FIXTURES)
def test_all_checks_pass_on_fixtures(name):
    rep = run_verification(fixture_spec(name), quantized(name))
    assert [r.name for r in rep.results] == CHECK_NAMES
    assert rep.ok, [r.to_json() for r in rep.results if not r.passed]
    assert not rep.cap_exceeded


def test_semiclassical_limit_weyl3():
    pres = quantized("weyl3").pres
    # {x1, x3} = -x2^2
    assert semiclassical_limit(pres.gen(1), pres.gen(3)) == parse_comm("-x2^2", 3)
    assert semiclassical_limit(pres.gen(1), pres.gen(2)) == parse_comm("-x1*x2", 3)


def test_doubled_delta_fails_semiclassical():
    qp = quantized("weyl3")
    bad = dataclasses.replace(qp, pres=_mutate(qp.pres, scale=QLaurent(2)))
    r = semiclassical_check(qp.spec, bad)
    assert not r.passed
    assert "X1, X3" in r.witness


def test_doubled_delta_fails_full_verification():
    qp = quantized("weyl3")
    bad = from_presentation(qp.spec, _mutate(qp.pres, scale=QLaurent(2)))
    rep = run_verification(qp.spec, bad)
    assert not rep.ok
    failed = {r.name for r in rep.results if not r.passed}
    assert {"semiclassical", "y-congruence"} <= failed
    assert all(r.witness for r in rep.results if not r.passed)


def test_wrong_lambda_fails():
    qp = quantized("m2x2")
    bad = dataclasses.replace(qp, pres=_mutate(qp.pres, lam={(1, 2): 2}))
    r = semiclassical_check(qp.spec, bad)
    assert not r.passed and "X1, X2" in r.witness


def test_non_nilpotent_delta_fails():
    # Δ_2(X1) = X1 breaks the support rule, so build it with the check off
    pres = OrePresentation(2, {}, {(1, 2): {(1, 0): Q - 1}}, check_support=False)
    r = nilpotency_check(pres)
    assert not r.passed
    assert r.witness


def test_nilpotency_passes_on_fixtures():
    for name in FIXTURES:
        assert nilpotency_check(quantized(name).pres).passed


def test_distinguished_vacuous_without_nontrivial_steps():
    qp = quantized("quantum-plane")
    r = distinguished_checks(qp.spec, qp)
    assert r.passed
    assert r.details.get("vacuous") is True


def test_associativity_detects_inconsistent_relations():
    # Δ_3(X1) = X2 with X2 q-commuting against X1 and X3 in incompatible ways
    pres = OrePresentation(3, {(1, 2): 1, (1, 3): 0, (2, 3): 0}, {(1, 3): {(0, 1, 0): ONE}})
    qp = quantized("weyl3")
    r = associativity_check(dataclasses.replace(qp, pres=pres), samples=50)
    assert not r.passed


def test_epsilon_check():
    qp = quantized("weyl3")
    assert epsilon_check(qp, scaled_variant(qp, Q)).passed
    assert epsilon_check(qp, qp).passed
    doubled = dataclasses.replace(qp, pres=_mutate(qp.pres, scale=QLaurent(2)))
    assert not epsilon_check(qp, doubled).passed


def test_scaled_variants_verify():
    qp = quantized("weyl3")
    for eps in (Q, Q ** -1, 2 - Q):
        sc = scaled_variant(qp, eps)
        assert run_verification(qp.spec, sc).ok


def test_report_json_shape():
    rep = run_verification(fixture_spec("chain3"), quantized("chain3"), seed=7)
    js = rep.to_json()
    assert js["seed"] == 7 and js["ok"] is True
    assert [c["name"] for c in js["checks"]] == CHECK_NAMES
    assert all(c["status"] == "pass" for c in js["checks"])
    json.dumps(js)


def test_report_is_deterministic():
    a = run_verification(fixture_spec("m2x2"), quantized("m2x2"), seed=11).to_json()
    b = run_verification(fixture_spec("m2x2"), quantized("m2x2"), seed=11).to_json()
    assert a == b


def test_failed_check_always_has_witness():
    r = CheckResult("x", False)
    assert r.witness and r.status == "fail"


def test_cap_exceeded_is_reported():
    rep = run_verification(fixture_spec("weyl3"), quantized("weyl3"), max_peel=1)
    assert not rep.ok and rep.cap_exceeded
