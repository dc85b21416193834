from fractions import Fraction

import pytest
import sympy as sp

from cgl_quantizer.commutative import (
    PrependData,
    compute_b,
    compute_d_chain,
    compute_level_sets,
    compute_y_sequence,
    d_j_identities,
    distinguished_bracket_identity,
    distinguished_identity,
    embed_in_torus,
    find_pivot,
    poisson_matrix,
    prepend_data,
)
from cgl_quantizer.errors import NoPivot
from cgl_quantizer.poisson import CommLaurent, make_spec, parse_comm
from conftest import FIXTURES, fixture_spec
from oracles import PoissonOracle, sym_poly

Y_SEQUENCES = {
    "quantum-plane": ["x1", "x2"],
    "weyl3": ["x1", "x2", "x1*x3 - 1/2*x2^2"],
    "chain3": ["x1", "x1*x2 + 1", "x1*x2*x3 + x3 + x1"],
    "m2x2": ["x1", "x2", "x3", "x1*x4 - x2*x3"],
}
PREDECESSORS = {
    "quantum-plane": [0, 0],
    "weyl3": [0, 0, 1],
    "chain3": [0, 1, 2],
    "m2x2": [0, 0, 0, 1],
}
LEVEL_SETS = {
    "quantum-plane": [[1], [2]],
    "weyl3": [[1, 3], [2]],
    "chain3": [[1, 2, 3]],
    "m2x2": [[1, 4], [2], [3]],
}


@pytest.mark.parametrize("name", FIXTURES)
def test_y_sequence_hand_values(name):
    spec = fixture_spec(name)
    ys = compute_y_sequence(spec)
    assert ys.y == [parse_comm(t, spec.n) for t in Y_SEQUENCES[name]]
    assert list(ys.p) == PREDECESSORS[name]


@pytest.mark.parametrize("name", FIXTURES)
def test_y_are_poisson_normal(name):
    """{y_j, x_i} lies in y_j A for all i <= j, checked by sympy division."""
    spec = fixture_spec(name)
    orc = PoissonOracle(spec)
    ys = compute_y_sequence(spec)
    for j, y in enumerate(ys.y, start=1):
        yj = sym_poly(y, spec.n, orc.x)
        for i in range(1, j + 1):
            br = orc.bracket(yj, orc.x[i - 1])
            _, rem = sp.div(br, yj, *orc.x)
            assert rem == 0, (j, i)


@pytest.mark.parametrize("name", FIXTURES)
def test_y_leading_coefficient_and_degree(name):
    spec = fixture_spec(name)
    ys = compute_y_sequence(spec)
    for j in range(1, spec.n + 1):
        e, c = ys.y[j - 1].leading()
        assert c == 1
        assert e == tuple(1 if i in ys.chain_from(j) else 0 for i in range(1, spec.n + 1))


@pytest.mark.parametrize("name", FIXTURES)
def test_level_sets(name):
    ls = compute_level_sets(compute_y_sequence(fixture_spec(name)))
    assert ls.to_json() == LEVEL_SETS[name]
    assert ls.rank == len(LEVEL_SETS[name])


@pytest.mark.parametrize("name", FIXTURES)
def test_kappa_matches_sympy(name):
    """{y_i, y_j} = kappa_ij y_i y_j with integer kappa."""
    spec = fixture_spec(name)
    orc = PoissonOracle(spec)
    ys = compute_y_sequence(spec)
    kappa = poisson_matrix(spec, ys).kappa
    sy = [sym_poly(y, spec.n, orc.x) for y in ys.y]
    for i in range(spec.n):
        for j in range(spec.n):
            ratio = sp.cancel(orc.bracket(sy[i], sy[j]) / (sy[i] * sy[j]))
            assert ratio == kappa[i][j]


def test_kappa_values():
    assert poisson_matrix(fixture_spec("weyl3"), compute_y_sequence(fixture_spec("weyl3"))).kappa == \
        ((0, -1, 0), (1, 0, 0), (0, 0, 0))
    m = fixture_spec("m2x2")
    assert poisson_matrix(m, compute_y_sequence(m)).kappa == \
        ((0, 1, 1, 0), (-1, 0, 0, 0), (-1, 0, 0, 0), (0, 0, 0, 0))


def test_b_monomials():
    def b(name, k):
        ys = compute_y_sequence(fixture_spec(name))
        return compute_b(ys, k, poisson_matrix(ys.spec, ys))

    n3 = lambda t: parse_comm(t, 3)  # noqa: E731
    assert b("weyl3", 3) == n3("1/2*x2^2")
    assert b("chain3", 2) == n3("-1")
    assert b("chain3", 3) == n3("-x1")
    assert b("m2x2", 4) == parse_comm("x2*x3", 4)


@pytest.mark.parametrize("name", FIXTURES)
def test_embedding_is_a_ring_map_on_generators(name):
    """x_j -> y_{p(j)}^{-1}(y_j + c_j) sends y_j to the torus variable y_j."""
    spec = fixture_spec(name)
    ys = compute_y_sequence(spec)
    for j in range(1, spec.n + 1):
        assert embed_in_torus(ys, ys.y[j - 1]) == CommLaurent.var(spec.n, j)


def test_prepend_data_weyl3():
    spec = fixture_spec("weyl3")
    data = prepend_data(spec, 1)
    assert data.eta == -2
    nonzero = {j: v for j, v in data.delta.items() if v}
    assert nonzero == {2: parse_comm("-x1^2", 2)}  # tail-local: δ(x_3) = -δ_3(x_1) = -x_2^2
    assert not data.is_trivial()
    assert prepend_data(spec.sub_spec(2), 1).is_trivial()


def test_d_chain_weyl3():
    spec = fixture_spec("weyl3")
    tail = spec.sub_spec(2)
    ys = compute_y_sequence(tail)
    kappa = poisson_matrix(tail, ys)
    data = prepend_data(spec, 1)
    dc = compute_d_chain(tail, ys, data, kappa)
    assert (dc.k, dc.m, dc.chain) == (2, 0, [2])
    assert dc.d[0] == CommLaurent(2, {(2, -1): Fraction(1, 2)})
    assert distinguished_identity(ys, data, dc.d[0])
    assert not distinguished_bracket_identity(tail, ys, data, kappa, dc.d[0])


def test_d_chain_chain3_m1():
    spec = fixture_spec("chain3")
    tail = spec.sub_spec(2)
    ys = compute_y_sequence(tail)
    kappa = poisson_matrix(tail, ys)
    data = prepend_data(spec, 1)
    dc = compute_d_chain(tail, ys, data, kappa)
    assert (dc.k, dc.m, dc.chain) == (2, 1, [2, 1])
    assert dc.d[0] == CommLaurent(2, {(-1, 0): -1, (-1, -1): 1})
    assert dc.d[1] == CommLaurent(2, {(-1, 0): -1})
    assert dc.big_m == [CommLaurent.constant(2, 1), CommLaurent.constant(2, -1)]
    assert all(ok for _, ok, _ in dc.checks)
    assert distinguished_identity(ys, data, dc.d[0])


@pytest.mark.parametrize("name", ["weyl3", "chain3", "m2x2"])
def test_distinguished_element_bracket_by_sympy(name):
    """{d, x_j} = l_j x_j d - δ_j(x_k) on the tail, with d as a sympy rational function."""
    spec = fixture_spec(name)
    orc = PoissonOracle(spec)
    tail = spec.sub_spec(2)
    ys = compute_y_sequence(tail)
    dc = compute_d_chain(tail, ys, prepend_data(spec, 1), poisson_matrix(tail, ys))
    tail_y = [sym_poly(y, tail.n, orc.x[1:]) for y in ys.y]
    d = 0
    for v, c in dc.d[0].items():
        term = sp.Rational(c.numerator, c.denominator)
        for yj, k in zip(tail_y, v):
            term *= yj ** k
        d += term
    for j in range(2, spec.n + 1):
        lj = sum(a * b for a, b in zip(spec.lambdas[j - 1], spec.h_prime[0]))
        dj = spec.delta.get((1, j))
        dj = sym_poly(dj, spec.n, orc.x) if dj is not None else 0
        lhs = orc.bracket(d, orc.x[j - 1])
        assert sp.simplify(lhs - (lj * orc.x[j - 1] * d - dj)) == 0, j


@pytest.mark.parametrize("name", FIXTURES)
def test_d_j_identities(name):
    spec = fixture_spec(name)
    ys = compute_y_sequence(spec)
    assert d_j_identities(spec, ys, poisson_matrix(spec, ys)) == []


def test_find_pivot_requires_nonzero_delta():
    spec = fixture_spec("weyl3").sub_spec(2)
    ys = compute_y_sequence(spec)
    with pytest.raises(NoPivot):
        find_pivot(ys, PrependData(eta=1, lambda0=(0, 0), h_prime0=(0, 0), delta={}))


def test_commutative_spec_has_trivial_sequence():
    spec = make_spec([(1, 0), (0, 1), (1, 1)], [(0, 0)] * 3, [(0, 0)] * 3)
    ys = compute_y_sequence(spec)
    assert ys.p == [0, 0, 0]
    assert poisson_matrix(spec, ys).kappa == ((0, 0, 0),) * 3
