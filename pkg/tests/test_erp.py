import numpy as np
import pytest

from colormodels.acceptance import conjugation_closed_model, planted_erp_real, random_mixed_real
from colormodels.erp import (
    ERP,
    NOT_ERP,
    UNKNOWN,
    erp_decide_complex,
    erp_decide_real,
    find_partners,
    necessary_condition,
    verdict_to_json,
    verify_witness,
)
from colormodels.errors import ModelError
from colormodels.graph_core import graph_corpus
from colormodels.models import (
    VertexModel,
    eval_edge,
    eval_vertex,
    independent_set_model,
    proper_coloring_model,
)
from colormodels.linalg import factor_symmetric
from colormodels.szegedy import evaluation_to_vertex, is_real_edge_model, materialize, vertex_to_edge
from colormodels.tolerance import is_real_matrix

CORPUS = graph_corpus(3, 4)


def test_k2_is_erp_with_real_certificate(k2):
    v = erp_decide_real(k2)
    assert v.status == ERP
    t = materialize(v.certificate, 4)
    assert max(abs(complex(c).imag) for c in t.coeffs.values()) <= 1e-9
    for g in CORPUS:
        assert eval_edge(v.certificate, g) == pytest.approx(eval_vertex(k2, g), abs=1e-9)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_proper_colouring_not_erp(n):
    v = erp_decide_real(proper_coloring_model(n))
    assert v.status == NOT_ERP
    assert verify_witness(proper_coloring_model(n), v.witness)


def test_independent_set_not_erp():
    m = independent_set_model()
    v = erp_decide_real(m)
    assert v.status == NOT_ERP and verify_witness(m, v.witness)


def test_antiferromagnet_not_erp(antiferro):
    v = erp_decide_real(antiferro)
    assert v.status == NOT_ERP
    # colour 0 against itself and against colour 1: the +1 eigenvector (1,-1) separates them
    ev = v.witness.evidence
    assert set(ev) == {0, 1}
    assert any(x.kind == "projector" and x.eigenvalue == pytest.approx(1) for x in ev[1])


def test_positive_definite_constant_weights(rng):
    X = rng.standard_normal((4, 4))
    m = VertexModel(np.full(4, 0.7), X @ X.T + np.eye(4))
    assert erp_decide_real(m).status == ERP
    assert find_partners(m) == [0, 1, 2, 3]


def test_real_decision_input_checks():
    with pytest.raises(ModelError) as e:
        erp_decide_real(VertexModel([1, 1], [[1j, 0], [0, 1]]))
    assert e.value.code == "NOT_REAL_MODEL"
    with pytest.raises(ModelError) as e:
        erp_decide_real(VertexModel([1, 1], np.ones((2, 2))))
    assert e.value.code == "NOT_TWIN_FREE"


def test_witness_tampering_detected(antiferro, k2):
    v = erp_decide_real(antiferro)
    assert not verify_witness(k2, v.witness)


@pytest.mark.parametrize("seed", range(20))
def test_decision_matches_conjugation_closure(seed):
    rng = np.random.default_rng(seed)
    n = 2 + seed % 3
    m = planted_erp_real(rng, n) if seed % 2 else random_mixed_real(rng, n)
    closed = is_real_edge_model(vertex_to_edge(m).edge_model, 1e-7).is_real
    assert (erp_decide_real(m).status == ERP) == closed
    if seed % 2:
        assert closed


def test_necessary_condition():
    assert necessary_condition(proper_coloring_model(3))
    assert necessary_condition(VertexModel([1], [[1j]]))
    m = VertexModel([1, 1], [[1, 1j], [1j, 0]])
    U = factor_symmetric(m.B).U
    assert necessary_condition(m) == is_real_matrix(U @ U.conj().T)


def test_complex_delegates_for_real(antiferro):
    assert erp_decide_complex(antiferro).status == NOT_ERP
    v = erp_decide_complex(proper_coloring_model(2))
    assert v.status == ERP and "real input" in v.notes[0]


@pytest.mark.parametrize("seed", range(3))
def test_complex_round_trip(seed):
    rng = np.random.default_rng(seed)
    h = conjugation_closed_model(rng, 2, 1, 1)
    m = evaluation_to_vertex(h)
    assert not m.is_real()
    v = erp_decide_complex(m, seed=seed)
    assert v.status == ERP
    assert is_real_edge_model(v.certificate, 1e-12).is_real
    for g in CORPUS:
        p = eval_vertex(m, g)
        assert abs(eval_edge(v.certificate, g) - p) <= 1e-6 * (1 + abs(p))


def test_complex_unknown_when_nothing_found():
    # the group acts on points only, so weight i can never meet its conjugate
    m = VertexModel([1, 1j], [[2, 1], [1, 3]])
    v = erp_decide_complex(m, budget=80, restarts=2)
    assert v.status == UNKNOWN and v.certificate is None


def test_verdict_json(antiferro):
    d = verdict_to_json(erp_decide_real(antiferro))
    assert d["status"] == NOT_ERP and d["certificate"] is None
    assert d["witness"]["index"] == 0
