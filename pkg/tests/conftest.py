from itertools import product

import numpy as np
import pytest

from colormodels.models import VertexModel, proper_coloring_model


def brute_vertex(a, B, g):
    total = 0
    for psi in product(range(len(a)), repeat=g.vertex_count):
        term = np.prod([a[v] for v in psi]) if psi else 1
        for u, v in g.edges:
            term *= B[psi[u]][psi[v]]
        total += term
    return total


def brute_edge_eval(weights, U, g):
    """Sum over edge colourings of prod_v sum_i w_i prod_{e at v} U[c(e), i]."""
    U = np.asarray(U)
    k = U.shape[0]
    total = 0
    for col in product(range(k), repeat=g.edge_count):
        term = 1
        for v in range(g.vertex_count):
            s = 0
            for i, w in enumerate(weights):
                t = w
                for idx, (x, y) in enumerate(g.edges):
                    t *= U[col[idx], i] ** ((x == v) + (y == v))
                s += t
            term *= s
        total += term
    return total * k**g.circles


@pytest.fixture
def k2():
    return proper_coloring_model(2)


@pytest.fixture
def antiferro():
    return VertexModel([1, 1], [[0, -1], [-1, 0]])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
