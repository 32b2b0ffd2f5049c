import numpy as np
import pytest

from colormodels.connection import (
    Invariant,
    connection_matrix,
    edge_invariant,
    multiplicativity_check,
    psd_check,
    quadratic_form,
    vertex_invariant,
    verify_negativity,
    witness_search,
)
from colormodels.errors import ModelError
from colormodels.graph_core import (
    Fragment,
    Multigraph,
    bare_edge_fragment,
    canonical_key,
    enumerate_fragments,
    glue,
    graph_corpus,
    star_fragment,
)
from colormodels.models import EdgeModelEval, VertexModel, proper_coloring_model
from colormodels.szegedy import vertex_to_edge

from conftest import brute_vertex


def path_fragment(i):
    """Open end, i internal vertices in a path, open end."""
    edges = [(i, 0)] + [(t, t + 1) for t in range(i - 1)] + [(i - 1, i + 1)]
    return Fragment(Multigraph(i + 2, edges), (i, i + 1))


def test_k3_fixture():
    p = vertex_invariant(proper_coloring_model(3))
    cm = connection_matrix(p, 2, [star_fragment(2), path_fragment(2)])
    assert np.allclose(cm.M, [[6, 6], [6, 18]])
    res = psd_check(cm)
    assert res.psd and res.min_eigenvalue > 0


def test_path_family_identity():
    p = vertex_invariant(proper_coloring_model(3))
    frags = [path_fragment(i) for i in range(1, 5)]
    cm = connection_matrix(p, 2, frags)
    for i in range(1, 5):
        for j in range(1, 5):
            assert cm.M[i - 1, j - 1] == pytest.approx(2 ** (i + j) + 2 * (-1) ** (i + j))


def test_small_fixtures(k2):
    cm = connection_matrix(vertex_invariant(k2), 1, [star_fragment(1)])
    assert np.allclose(cm.M, [[2]])
    h = EdgeModelEval([1, 2], np.ones((3, 2)))
    cm = connection_matrix(edge_invariant(h), 2, [bare_edge_fragment()])
    assert np.allclose(cm.M, [[3]])


def test_vertex_invariant_rejects_circles(k2):
    with pytest.raises(ModelError) as e:
        connection_matrix(vertex_invariant(k2), 2, [bare_edge_fragment()])
    assert e.value.code == "CIRCLES_UNDEFINED"
    cm = connection_matrix(vertex_invariant(k2), 2, [bare_edge_fragment()], circle_value=2)
    assert np.allclose(cm.M, [[2]])


def test_label_count_checked(k2):
    with pytest.raises(ModelError) as e:
        connection_matrix(vertex_invariant(k2), 2, [star_fragment(1)])
    assert e.value.code == "LABEL_COUNT_MISMATCH"


def test_psd_examples():
    assert psd_check([[6, 6], [6, 18]]).psd
    res = psd_check([[-2]])
    assert not res.psd and res.witness == (1.0,)
    assert psd_check(np.zeros((2, 2))).psd
    with pytest.raises(ModelError):
        psd_check([[1, 2], [0, 1]])


def test_antiferromagnet_star_matrix(antiferro):
    cm = connection_matrix(vertex_invariant(antiferro), 3, [star_fragment(3)])
    assert np.allclose(cm.M, [[-2]])


def test_witness_antiferromagnet(antiferro):
    w = witness_search(antiferro, 3, 1, 4)
    assert w is not None and w.value == pytest.approx(-2, abs=1e-9)
    assert verify_negativity(antiferro, w)
    oracle = sum(
        ci * cj * brute_vertex(antiferro.a.real, antiferro.B.real, glue(F, H))
        for ci, F in zip(w.coefficients, w.fragments)
        for cj, H in zip(w.coefficients, w.fragments)
    )
    assert oracle == pytest.approx(-2, abs=1e-9)


def test_witness_none_for_erp_and_small_bounds(k2):
    assert witness_search(k2, 3, 1, 4) is None
    assert witness_search(proper_coloring_model(3), 3, 1, 4) is None


def test_witness_with_circle_values(antiferro):
    w = witness_search(antiferro, 2, 1, 3, circle_values=[2])
    assert w is not None and w.value < 0


def test_matrix_invariant_under_relabeling():
    p = vertex_invariant(VertexModel([1, 2], [[0.5, -1], [-1, 2]]))
    frags = enumerate_fragments(2, 2, 3)
    rng = np.random.default_rng(0)
    relabeled = []
    for F in frags:
        m = F.internal_count
        perm = list(rng.permutation(m)) + list(range(m, F.graph.vertex_count))
        g = Multigraph(F.graph.vertex_count, [(perm[u], perm[v]) for u, v in F.graph.edges])
        G = Fragment(g, F.open_ends)
        assert canonical_key(G) == canonical_key(F)
        relabeled.append(G)
    assert np.allclose(connection_matrix(p, 2, frags).M, connection_matrix(p, 2, relabeled).M)


def test_gram_direction_for_erp_model(k2):
    h = vertex_to_edge(k2).edge_model
    for l in range(3):
        frags = enumerate_fragments(l, 2, 4)
        cm = connection_matrix(vertex_invariant(k2), l, frags)
        assert psd_check(cm).psd
        assert np.allclose(cm.M, connection_matrix(edge_invariant(h), l, frags).M)


def test_quadratic_form_matches_matrix(antiferro):
    frags = enumerate_fragments(1, 1, 3)
    p = vertex_invariant(antiferro)
    cm = connection_matrix(p, 1, frags)
    c = np.arange(1, len(frags) + 1, dtype=float)
    assert quadratic_form(p, frags, c) == pytest.approx(c @ cm.M @ c)


def test_multiplicativity(k2):
    corpus = graph_corpus(3, 3)
    assert multiplicativity_check(vertex_invariant(k2), corpus)
    assert multiplicativity_check(edge_invariant(vertex_to_edge(k2).edge_model), corpus)
    assert not multiplicativity_check(Invariant(lambda g: 2), corpus)
