import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from colormodels.errors import ModelError
from colormodels.graph_core import Multigraph, graph_corpus
from colormodels.linalg import random_complex_orthogonal
from colormodels.models import (
    EdgeModelEval,
    VertexModel,
    eval_edge,
    eval_vertex,
    independent_set_model,
)
from colormodels.szegedy import (
    apply_group,
    evaluation_to_vertex,
    exponents,
    is_real_edge_model,
    materialize,
    pad,
    snap_to_real,
    vertex_to_edge,
)

CORPUS = graph_corpus(3, 4)
S = 1 / np.sqrt(2)


def test_k2_transform(k2):
    res = vertex_to_edge(k2)
    h = res.edge_model
    assert h.k == 2 and res.uu_star_real
    assert np.allclose(h.weights, [1, 1])
    assert np.allclose(h.U, [[S, S], [1j * S, -1j * S]])


def test_rank_zero_model():
    m = VertexModel([2.5], [[0]])
    h = vertex_to_edge(m).edge_model
    assert h.k == 0
    assert eval_edge(h, Multigraph(1)) == pytest.approx(2.5)


def test_independent_set_transform():
    res = vertex_to_edge(independent_set_model())
    assert res.edge_model.k == 2 and res.uu_star_real


def test_factorization_mismatch(k2):
    with pytest.raises(ModelError) as e:
        vertex_to_edge(k2, U=np.eye(2))
    assert e.value.code == "FACTORIZATION_MISMATCH"


@pytest.mark.parametrize("seed", range(6))
def test_transform_preserves_partition_function(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 3
    a = rng.uniform(0.2, 1, n) + 1j * rng.uniform(0, 1, n)
    X = rng.uniform(0, 1, (n, n)) + 1j * rng.uniform(0, 1, (n, n))
    m = VertexModel(a, X + X.T)
    h = vertex_to_edge(m).edge_model
    for g in CORPUS:
        pv = eval_vertex(m, g)
        assert abs(eval_edge(h, g) - pv) <= 1e-9 * (1 + abs(pv))


def test_materialize_k2(k2):
    t = materialize(vertex_to_edge(k2).edge_model, 2)
    expect = {(0, 0): 2, (1, 0): np.sqrt(2), (0, 1): 0, (2, 0): 1, (1, 1): 0, (0, 2): -1}
    for alpha, v in expect.items():
        assert t.coeff(alpha) == pytest.approx(v, abs=1e-12)


def test_materialize_zero_point():
    t = materialize(EdgeModelEval([1], np.zeros((2, 1))), 3)
    assert t.coeff((0, 0)) == 1
    assert all(v == 0 for a, v in t.coeffs.items() if sum(a) > 0)


def test_exponents_graded():
    ex = exponents(2, 2)
    assert ex[0] == (0, 0) and len(ex) == 6
    assert [sum(e) for e in ex] == sorted(sum(e) for e in ex)


def _closed_model(rng, k):
    u = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    w = 1 + 0.5j
    v = rng.standard_normal(k)
    return EdgeModelEval([w, np.conj(w), 2.0], np.array([u, u.conj(), v]).T)


def test_closed_terms_have_real_coefficients(rng):
    t = materialize(_closed_model(rng, 3), 4)
    assert max(abs(complex(c).imag) for c in t.coeffs.values()) <= 1e-9


def test_realness_examples(k2):
    chk = is_real_edge_model(vertex_to_edge(k2).edge_model)
    assert chk and chk.pairing == (1, 0)
    chk = is_real_edge_model(EdgeModelEval([1], [[1j]]))
    assert not chk and chk.unmatched == 0
    chk = is_real_edge_model(EdgeModelEval([2.5], [[1.0]]))
    assert chk and chk.pairing == (0,)


def test_snap_to_real(rng):
    h = _closed_model(rng, 2)
    noisy = EdgeModelEval(h.weights + 1e-12, h.U + 1e-12j)
    chk = is_real_edge_model(noisy, 1e-9)
    snapped = snap_to_real(noisy, chk.pairing)
    t = materialize(snapped, 3)
    assert is_real_edge_model(snapped, 0).is_real
    assert max(abs(complex(c).imag) for c in t.coeffs.values()) < 1e-15


def test_apply_group_identity_and_padding(k2):
    h = vertex_to_edge(k2).edge_model
    same = apply_group(h, np.eye(2))
    assert np.array_equal(same.U, h.U)
    padded = apply_group(h, np.eye(3), 3)
    assert np.allclose(padded.U[2], 0)
    for g in CORPUS:
        assert eval_edge(padded, g) == pytest.approx(eval_edge(h, g), abs=1e-12)
    with pytest.raises(ModelError) as e:
        pad(h, 1)
    assert e.value.code == "DIMENSION_TOO_SMALL"
    with pytest.raises(ModelError) as e:
        apply_group(h, np.array([[1, 1], [0, 1]]))
    assert e.value.code == "NOT_ORTHOGONAL"


def test_permutation_group_invariance(k2):
    h = vertex_to_edge(k2).edge_model
    hg = apply_group(h, np.array([[0, 1], [1, 0]]))
    for g in CORPUS:
        assert eval_edge(hg, g) == pytest.approx(eval_edge(h, g), abs=1e-8)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31), st.integers(2, 4))
def test_complex_orthogonal_invariance(seed, l):
    rng = np.random.default_rng(seed)
    h = EdgeModelEval(rng.uniform(0.5, 1, 2), rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
    hg = apply_group(h, random_complex_orthogonal(l, 0.3, seed), l)
    for g in graph_corpus(3, 3):
        p = eval_edge(h, g)
        assert abs(eval_edge(hg, g) - p) <= 1e-8 * (1 + abs(p))


def test_evaluation_to_vertex(k2, rng):
    back = evaluation_to_vertex(vertex_to_edge(k2).edge_model)
    assert np.allclose(back.a, [1, 1]) and np.allclose(back.B, [[0, 1], [1, 0]], atol=1e-9)
    back = evaluation_to_vertex(EdgeModelEval([1], [[2], [1]]))
    assert back.n == 1 and np.allclose(back.B, [[5]])
    c = 1 + 2j
    u = np.array([1 + 1j, 0.5 - 1j])
    back = evaluation_to_vertex(EdgeModelEval([c, np.conj(c)], np.array([u, u.conj()]).T))
    # conjugate points give B = conj(B) after swapping the two colours
    assert np.allclose(back.B[0, 1].imag, 0, atol=1e-9)
    assert np.allclose(back.B[0, 0], np.conj(back.B[1, 1]))
