"""Edge connection matrices, PSD tests and negativity witnesses.

A graph invariant ``p`` is wrapped as a plain callable on
:class:`~colormodels.graph_core.Multigraph`.  Gluings can produce circles;
:class:`Invariant` records what value a circle should take (``None`` for
vertex models, ``k`` for ``k``-colour edge models).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ModelError
from .graph_core import (
    canonical_key,
    disjoint_union,
    empty_graph,
    enumerate_fragments,
    glue,
)
from .models import eval_edge, eval_vertex
from .tolerance import DEFAULT


class Invariant:
    """Callable graph invariant with an optional value for circles."""

    def __init__(self, fn, circle_value=None, name=""):
        self.fn = fn
        self.circle_value = circle_value
        self.name = name

    def __call__(self, g):
        return self.fn(g)

    def value(self, g, circle_value=None):
        cv = self.circle_value if circle_value is None else circle_value
        if g.circles:
            if cv is None:
                raise ModelError("CIRCLES_UNDEFINED", f"{g.circles} circle(s) and no circle value")
            return self.fn(g.without_circles()) * complex(cv) ** g.circles
        return self.fn(g)


def vertex_invariant(m, backend="fast"):
    return Invariant(lambda g: eval_vertex(m, g, backend=backend), None, "vertex model")


def edge_invariant(h, backend="fast"):
    return Invariant(lambda g: eval_edge(h, g, backend=backend), h.k, "edge model")


@dataclass(frozen=True, eq=False)
class ConnectionMatrix:
    l: int
    fragments: tuple
    keys: tuple
    M: np.ndarray
    circle_value: complex = None


@dataclass(frozen=True)
class PsdResult:
    psd: bool
    min_eigenvalue: float
    witness: tuple = None


@dataclass(frozen=True, eq=False)
class NegativityWitness:
    l: int
    fragments: tuple
    coefficients: np.ndarray
    value: float  # lambda^T M lambda
    min_eigenvalue: float
    matrix: ConnectionMatrix = None


def _as_invariant(p):
    return p if isinstance(p, Invariant) else Invariant(p)


def connection_matrix(p, l, fragments, circle_value=None):
    """``M[i, j] = p(glue(F_i, F_j))`` over the given ``l``-fragments."""
    p = _as_invariant(p)
    for F in fragments:
        if F.l != l:
            raise ModelError("LABEL_COUNT_MISMATCH", f"fragment with {F.l} open ends, expected {l}")
    t = len(fragments)
    M = np.zeros((t, t), dtype=complex)
    cache = {}
    for i in range(t):
        for j in range(i, t):
            g = glue(fragments[i], fragments[j])
            # products of the same shape recur a lot; cache on the exact edge list
            key = (g.vertex_count, g.edges, g.circles)
            if key not in cache:
                cache[key] = p.value(g, circle_value)
            M[i, j] = M[j, i] = cache[key]
    cv = p.circle_value if circle_value is None else circle_value
    return ConnectionMatrix(
        l, tuple(fragments), tuple(canonical_key(F) for F in fragments), M, cv
    )


def psd_check(M, tol=DEFAULT.psd):
    """PSD test by the minimum eigenvalue, with a negative direction as witness."""
    M = np.asarray(M.M if isinstance(M, ConnectionMatrix) else M, dtype=complex)
    if M.size == 0:
        return PsdResult(True, 0.0, None)
    scale = 1 + np.linalg.norm(M)
    if np.max(np.abs(M - M.T)) > DEFAULT.eq * scale:
        raise ModelError("NOT_SYMMETRIC", "connection matrix is not symmetric")
    if np.max(np.abs(M.imag)) > DEFAULT.eq * scale:
        raise ModelError("NOT_REAL", "connection matrix has complex entries")
    w, Q = np.linalg.eigh(M.real)
    lam = float(w[0])
    if lam >= -tol * scale:
        return PsdResult(True, lam, None)
    v = Q[:, 0]
    lead = np.flatnonzero(np.abs(v) > 1e-12)
    if lead.size and v[lead[0]] < 0:
        v = -v
    return PsdResult(False, lam, tuple(float(x) for x in v))


def quadratic_form(p, fragments, coefficients, circle_value=None):
    """``sum_ij c_i c_j p(F_i * F_j)`` evaluated from scratch."""
    p = _as_invariant(p)
    c = np.asarray(coefficients, dtype=float)
    total = 0j
    for i, F in enumerate(fragments):
        for j, H in enumerate(fragments):
            if c[i] and c[j]:
                total += c[i] * c[j] * p.value(glue(F, H), circle_value)
    return total


def witness_search(
    m,
    max_l,
    max_internal_vertices=1,
    max_edges=4,
    circle_values=(),
    tol=DEFAULT.psd,
):
    """First negative direction of some connection matrix of the vertex model ``m``.

    Tries ``l = 1 .. max_l`` on circle-free fragment corpora, then for each
    value in ``circle_values`` on corpora that admit bare edges.  Best
    effort: ``None`` does not mean the invariant is reflection positive.
    """
    p = vertex_invariant(m)
    runs = [(l, False, None) for l in range(1, max_l + 1)]
    runs += [(l, True, cv) for cv in circle_values for l in range(1, max_l + 1)]
    for l, bare, cv in runs:
        frags = enumerate_fragments(l, max_internal_vertices, max_edges, allow_bare_edges=bare)
        if not frags:
            continue
        cm = connection_matrix(p, l, frags, cv)
        res = psd_check(cm.M, tol)
        if res.psd:
            continue
        coef = np.array(res.witness)
        support = np.flatnonzero(np.abs(coef) > 1e-12)
        used = tuple(frags[i] for i in support)
        coef = coef[support]
        q = quadratic_form(vertex_invariant(m, "reference"), used, coef, cv)
        return NegativityWitness(l, used, coef, float(q.real), res.min_eigenvalue, cm)
    return None


def verify_negativity(m, w, circle_value=None, tol=DEFAULT.psd):
    """Recompute the witness's quadratic form with the reference evaluator."""
    q = quadratic_form(vertex_invariant(m, "reference"), w.fragments, w.coefficients, circle_value)
    return q.real < -tol


def multiplicativity_check(p, corpus, tol=DEFAULT.pf):
    """``p(F + G) == p(F) p(G)`` for all pairs in ``corpus`` and ``p(empty) == 1``."""
    p = _as_invariant(p)
    if abs(p.value(empty_graph()) - 1) > tol:
        return False
    vals = [p.value(F) for F in corpus]
    for i, F in enumerate(corpus):
        for j, G in enumerate(corpus):
            prod = vals[i] * vals[j]
            if abs(p.value(disjoint_union(F, G)) - prod) > tol * (1 + abs(prod)):
                return False
    return True
