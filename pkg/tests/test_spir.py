import itertools
import random
from fractions import Fraction

import pytest

from spirkit import access as acc
from spirkit import gf, mmsp, nss, spir
from spirkit.errors import CannotReconstruct, InvalidShares, ProtocolError
from spirkit.gf import FieldMatrix
from spirkit.spir import LinearSpir, ProjectedLinearSpir

import oracles
from helpers import random_verified_mmsps


@pytest.fixture
def example_spir(example_mmsp):
    return spir.mmsp_to_spir(example_mmsp, 2)


def test_shape(example_spir):
    p = example_spir
    assert (p.q, p.x, p.y, p.z, p.n, p.f) == (3, 1, 2, 4, 3, 2)
    assert p.rate == Fraction(1, 4)
    assert p.randomness_shape == (2, 2)


def test_needs_two_files(example_mmsp):
    with pytest.raises(ProtocolError):
        spir.mmsp_to_spir(example_mmsp, 1)


def test_vandermonde_protocol():
    m = mmsp.vandermonde_mmsp(5, 3, 2, 1)
    p = spir.mmsp_to_spir(m, 3)
    assert mmsp.verify(spir.spir_to_mmsp(p), acc.threshold(3, 2, 1)).valid
    assert p.rate == Fraction(1, 3)


def test_query_matrix_hand(example_spir):
    r = FieldMatrix(3, [[1, 0], [0, 1]])
    q = example_spir.query_matrix(1, r)
    h, j = example_spir.h.tolist(), example_spir.j.tolist()
    e1 = [[1, 0]]
    want = [[(a + b) % 3 for a, b in zip(ra, rb)]
            for ra, rb in zip(oracles.matmul(3, j, e1), oracles.matmul(3, h, r.tolist()))]
    assert q.tolist() == want


def test_answers_hand(example_spir):
    queries = spir.make_query(example_spir, 1, FieldMatrix.zeros(3, 2, 2))
    d = {j: spir.answer(example_spir, j, queries[j], (2, 1), (1, 2)) for j in (1, 2, 3)}
    assert d == {1: (2,), 2: (2,), 3: (0, 0)}


def test_reconstruct_hand(example_spir):
    assert spir.reconstruct_file(example_spir, {2, 3}, {2: (2,), 3: (0, 0)}, k=1) == (2,)
    with pytest.raises(CannotReconstruct):
        spir.reconstruct_file(example_spir, {1, 2}, {1: (2,), 2: (2,)})
    with pytest.raises(InvalidShares):
        spir.reconstruct_file(example_spir, {2, 3}, {2: (2,)})


def test_answer_rejects_bad_server(example_spir):
    q = spir.make_query(example_spir, 1, FieldMatrix.zeros(3, 2, 2))
    with pytest.raises(ProtocolError):
        spir.answer(example_spir, 4, q[1], (0, 0), (0, 0))


def test_execute_all_targets(example_spir):
    rng = random.Random(2)
    for _ in range(30):
        r = FieldMatrix(3, oracles.random_matrix(rng, 3, 2, 2))
        files = (rng.randrange(3), rng.randrange(3))
        seed = (rng.randrange(3), rng.randrange(3))
        for k in (1, 2):
            t = spir.execute(example_spir, k, r, files, seed, responding={2, 3})
            assert t.result == (files[k - 1],)
            assert spir.execute(example_spir, k, r, files, seed, responding={1, 2}).result is None


def test_random_protocols_decode():
    rng = random.Random(9)
    for m, structure in random_verified_mmsps(30, seed=12):
        p = spir.mmsp_to_spir(m, 2)
        for _ in range(3):
            r = FieldMatrix(m.q, oracles.random_matrix(rng, m.q, *p.randomness_shape), cols=p.randomness_shape[1])
            files = tuple(rng.randrange(m.q) for _ in range(2 * m.x))
            seed = tuple(rng.randrange(m.q) for _ in range(m.y))
            k = rng.randint(1, 2)
            for a in structure.min_authorized:
                t = spir.execute(p, k, r, files, seed, responding=a)
                assert t.result == files[(k - 1) * m.x:k * m.x]


def test_conversions_compose_to_identity(example_mmsp, example_spir):
    assert spir.spir_to_mmsp(example_spir) == example_mmsp
    assert nss.nss_to_mmsp(spir.spir_to_nss(example_spir)).g == example_mmsp.g
    assert spir.project(example_spir) == example_spir


def test_spir_to_nss_rates():
    p = spir.mmsp_to_spir(mmsp.vandermonde_mmsp(5, 3, 2, 1), 2)
    assert nss.nss_rates(spir.spir_to_nss(p)) == (Fraction(1, 3), Fraction(1))


def test_project_general_linear(example_spir):
    h, j = example_spir.h, example_spir.j
    extra = FieldMatrix(3, [[1, 1], [0, 2], [2, 0], [1, 0]])

    def query(k, r):
        # adds a k-independent offset to every file block except the first
        base = example_spir.query_matrix(k, r).array.copy()
        base[:, 1:] += extra.array[:, :1]
        return FieldMatrix.reduce(3, base)

    p = LinearSpir(h, 1, example_spir.tau, 3, 2, query, (2, 2))
    pp = spir.project(p)
    assert isinstance(pp, ProjectedLinearSpir)
    assert pp.j == j and pp.h == h
    assert spir.project(pp) == pp


def test_dict_round_trip(example_spir):
    d = example_spir.to_dict()
    assert d["kind"] == "spir"
    assert ProjectedLinearSpir.from_dict(d) == example_spir


def test_generic_route_matches_linear_shares(example_spir, example_access):
    g = spir.as_generic(example_spir)
    r_star, m_star = spir.choose_r_star_m_star(example_spir, example_access)
    assert r_star == FieldMatrix.zeros(3, 2, 2)
    assert m_star == ((0,),)
    p_nss = spir.spir_to_nss(example_spir)
    for secret, w0, w1 in itertools.product(range(3), repeat=3):
        dealt = spir.dealer_shares(g, (secret,), (w0, w1), r_star, m_star)
        s = nss.share(p_nss, (secret,), (w0, w1))
        assert dealt == tuple(s[j] for j in (1, 2, 3))


def test_generic_answers_match_linear(example_spir):
    g = spir.as_generic(example_spir)
    r = g.user_randomness[17]
    files = ((1,), (2,))
    got = g.answers(2, r, files, (2, 1))
    queries = spir.make_query(example_spir, 2, r)
    assert got == tuple(spir.answer(example_spir, j, queries[j], (1, 2), (2, 1)) for j in (1, 2, 3))
