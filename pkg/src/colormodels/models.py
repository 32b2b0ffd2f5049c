"""Vertex and edge coloring models and their partition functions.

Two evaluator backends are provided for both model kinds:

* ``"reference"`` sums every assignment (``n**|V|`` vertex colorings or
  ``k**|E|`` edge colorings) in lexicographic order.
* ``"fast"`` contracts the same sum as a tensor network, eliminating one
  variable at a time in a greedy order that keeps intermediate factors
  small.

The fast backend is the default; tests hold it to the reference.
"""

import weakref
from collections import Counter
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import ModelError
from .tolerance import DEFAULT, close


def _as_complex_vector(x):
    return np.array(x, dtype=complex).reshape(-1)


def _check_finite(*arrays):
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise ModelError("NOT_FINITE", "NaN or Inf in model data")


@dataclass(frozen=True, eq=False)
class VertexModel:
    """Node weights ``a`` (all nonzero) and a symmetric interaction matrix ``B``."""

    a: np.ndarray
    B: np.ndarray
    tol: float = DEFAULT.eq

    def __post_init__(self):
        a = _as_complex_vector(self.a)
        B = np.array(self.B, dtype=complex)
        if B.size == 0:
            B = np.zeros((len(a), len(a)), dtype=complex)
        if B.shape != (len(a), len(a)):
            raise ModelError("SHAPE_MISMATCH", f"a has {len(a)} entries, B is {B.shape}")
        _check_finite(a, B)
        if np.any(np.abs(a) <= self.tol):
            raise ModelError("ZERO_WEIGHT", "node weights must be nonzero")
        if not close(B, B.T, self.tol):
            raise ModelError("NOT_SYMMETRIC", "B must be symmetric")
        a.setflags(write=False)
        B.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "B", B)

    @property
    def n(self):
        return len(self.a)

    def is_real(self, tol=None):
        tol = self.tol if tol is None else tol
        return close(self.a.imag, 0, tol) and close(self.B.imag, 0, tol)

    def is_real_model(self, tol=None):
        """Positive real ``a`` and real ``B``."""
        return self.is_real(tol) and bool(np.all(self.a.real > 0))

    def permuted(self, perm):
        perm = np.asarray(perm)
        return VertexModel(self.a[perm], self.B[np.ix_(perm, perm)], self.tol)


@dataclass(frozen=True, eq=False)
class EdgeModelEval:
    """``h = sum_i weights[i] * ev_{U[:, i]}``: an edge model in evaluation form.

    ``U`` is ``k x n``; its columns are the evaluation points.
    """

    weights: np.ndarray
    U: np.ndarray

    def __post_init__(self):
        w = _as_complex_vector(self.weights)
        U = np.array(self.U, dtype=complex)
        if U.size == 0:
            U = U.reshape(U.shape[0] if U.ndim == 2 else 0, len(w))
        if U.ndim != 2 or U.shape[1] != len(w):
            raise ModelError("SHAPE_MISMATCH", f"{len(w)} weights but U has shape {U.shape}")
        _check_finite(w, U)
        if np.any(w == 0):
            raise ModelError("ZERO_WEIGHT", "term weights must be nonzero")
        w.setflags(write=False)
        U.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "U", U)

    @property
    def k(self):
        return self.U.shape[0]

    @property
    def terms(self):
        return [(self.weights[i], self.U[:, i]) for i in range(len(self.weights))]

    def coeff(self, alpha):
        alpha = np.asarray(alpha, dtype=int)
        if alpha.shape != (self.k,):
            raise ModelError("SHAPE_MISMATCH", f"exponent of length {alpha.shape} for k={self.k}")
        return complex(np.sum(self.weights * np.prod(self.U ** alpha[:, None], axis=0)))


@dataclass(frozen=True, eq=False)
class EdgeModelTable:
    """Coefficient table ``alpha -> h(x**alpha)`` for ``|alpha| <= d``; missing keys are 0."""

    k: int
    d: int
    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for alpha, value in self.coeffs.items():
            alpha = tuple(int(x) for x in alpha)
            if len(alpha) != self.k or min(alpha, default=0) < 0:
                raise ModelError("SHAPE_MISMATCH", f"bad exponent {alpha} for k={self.k}")
            if sum(alpha) > self.d:
                raise ModelError("DEGREE_EXCEEDS_TABLE", f"{alpha} exceeds d={self.d}")
            value = complex(value)
            if not np.isfinite(value):
                raise ModelError("NOT_FINITE", f"coefficient at {alpha}")
            clean[alpha] = value
        object.__setattr__(self, "coeffs", clean)

    def coeff(self, alpha):
        alpha = tuple(int(x) for x in alpha)
        if len(alpha) != self.k:
            raise ModelError("SHAPE_MISMATCH", f"exponent {alpha} for k={self.k}")
        if sum(alpha) > self.d:
            raise ModelError("DEGREE_EXCEEDS_TABLE", f"|{alpha}| > d={self.d}")
        return self.coeffs.get(alpha, 0j)


@dataclass(frozen=True)
class DegreeProfile:
    """Aggregated edge-colouring signatures of one graph.

    ``counts`` maps a sorted tuple of per-vertex exponent vectors to the
    number of edge colourings producing exactly that multiset.
    """

    k: int
    d: int
    counts: dict

    @property
    def total(self):
        return sum(self.counts.values())


# --------------------------------------------------------------------------
# tensor-network contraction shared by the fast backends

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _contract(factors, variables, dim):
    """Sum over all ``variables`` (each ranging over ``dim``) of the product of factors.

    ``factors`` is a list of ``(vars, array)`` with no variable repeated
    inside a single factor.
    """
    factors = list(factors)
    remaining = set(variables)
    while remaining:
        # greedy: the variable whose elimination yields the smallest factor
        best = None
        for x in sorted(remaining):
            scope = set()
            for vs, _ in factors:
                if x in vs:
                    scope.update(vs)
            cost = len(scope)
            if best is None or cost < best[0]:
                best = (cost, x)
        x = best[1]
        touching = [f for f in factors if x in f[0]]
        factors = [f for f in factors if x not in f[0]]
        remaining.discard(x)
        if not touching:
            factors.append(((), np.array(dim, dtype=complex)))
            continue
        scope = sorted({v for vs, _ in touching for v in vs} - {x})
        letter = {v: _LETTERS[i] for i, v in enumerate(scope + [x])}
        subscripts = ",".join("".join(letter[v] for v in vs) for vs, _ in touching)
        subscripts += "->" + "".join(letter[v] for v in scope)
        factors.append((tuple(scope), np.einsum(subscripts, *(arr for _, arr in touching))))
    value = 1 + 0j
    for _, arr in factors:
        value *= complex(arr)
    return value


# --------------------------------------------------------------------------
# vertex models

def _circle_factor(g, circle_value):
    if g.circles == 0:
        return 1
    if circle_value is None:
        raise ModelError(
            "CIRCLES_UNDEFINED", "vertex-model partition functions need an explicit circle value"
        )
    return complex(circle_value) ** g.circles


def eval_vertex(m, g, circle_value=None, backend="fast"):
    """Partition function of the vertex model ``m`` on ``g``.

    Sums over colourings ``psi: V -> [n]`` of the product of node weights
    ``a[psi(v)]`` and edge weights ``B[psi(u), psi(v)]``.
    """
    scale = _circle_factor(g, circle_value)
    if backend == "reference":
        return scale * _eval_vertex_reference(m, g)
    if backend != "fast":
        raise ModelError("BAD_BACKEND", backend)
    factors = [((v,), m.a) for v in range(g.vertex_count)]
    diag = np.diagonal(m.B)
    for u, v in g.edges:
        factors.append(((u,), diag) if u == v else ((u, v), m.B))
    return scale * _contract(factors, range(g.vertex_count), m.n)


def _eval_vertex_reference(m, g):
    a, B = m.a, m.B
    total = 0j
    for psi in product(range(m.n), repeat=g.vertex_count):
        term = 1 + 0j
        for v in psi:
            term *= a[v]
        for u, v in g.edges:
            term *= B[psi[u], psi[v]]
        total += term
    return total


def oracle_cycle(m, length):
    """``trace((diag(a) B) ** length)``; equals the partition function on a cycle."""
    if length < 1:
        raise ModelError("BAD_LENGTH", "cycle length must be positive")
    T = np.diag(m.a) @ m.B
    return complex(np.trace(np.linalg.matrix_power(T, length)))


def is_twin_free(m, tol=None):
    tol = m.tol if tol is None else tol
    return _find_twins(m.B, tol) is None


def _find_twins(B, tol):
    n = B.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if close(B[i], B[j], tol):
                return i, j
    return None


def twin_reduce(m, tol=None):
    """Merge or delete twin colours until the model is twin free.

    Twins ``i < j`` with ``a_i + a_j != 0`` collapse into colour ``j`` with
    weight ``a_i + a_j``; twins whose weights cancel are both removed.  The
    partition function is unchanged on graphs without circles.
    """
    tol = m.tol if tol is None else tol
    a = list(m.a)
    B = np.array(m.B)
    while True:
        pair = _find_twins(B, tol)
        if pair is None:
            return VertexModel(np.array(a, dtype=complex), B, m.tol)
        i, j = pair
        s = a[i] + a[j]
        if abs(s) <= tol * (1 + max(abs(a[i]), abs(a[j]))):
            drop = [i, j]
        else:
            a[j] = s
            drop = [i]
        keep = [x for x in range(len(a)) if x not in drop]
        a = [a[x] for x in keep]
        B = B[np.ix_(keep, keep)]


# --------------------------------------------------------------------------
# edge models

def _incidence(g):
    """Per vertex: list of (edge index, multiplicity) with loops counted twice."""
    inc = [dict() for _ in range(g.vertex_count)]
    for idx, (u, v) in enumerate(g.edges):
        inc[u][idx] = inc[u].get(idx, 0) + 1
        inc[v][idx] = inc[v].get(idx, 0) + 1
    return [sorted(d.items()) for d in inc]


def _check_table_degree(h, g):
    if isinstance(h, EdgeModelTable) and g.max_degree() > h.d:
        raise ModelError("DEGREE_EXCEEDS_TABLE", f"max degree {g.max_degree()} > d={h.d}")


def _vertex_tensor(h, mults):
    """Tensor over the colours of the distinct incident edges of one vertex."""
    k = h.k
    r = len(mults)
    if isinstance(h, EdgeModelEval):
        # sum_i w_i * outer_e (U[:, i] ** mult_e)
        T = h.weights.copy()  # shape (n,)
        for mult in mults:
            T = T[..., None] * (h.U.T ** mult).reshape((h.U.shape[1],) + (1,) * (T.ndim - 1) + (k,))
        return T.sum(axis=0) if r else np.array(T.sum())
    T = np.zeros((k,) * r, dtype=complex)
    for colors in product(range(k), repeat=r):
        alpha = [0] * k
        for c, mult in zip(colors, mults):
            alpha[c] += mult
        T[colors] = h.coeff(alpha)
    return T


# per-model memo of vertex tensors, keyed by the multiplicity pattern
_TENSORS = weakref.WeakKeyDictionary()


def eval_edge(h, g, backend="fast"):
    """Partition function of the edge model ``h`` on ``g``.

    Sums over colourings ``phi: E -> [k]`` of the product over vertices of
    ``h`` at the monomial of incident edge colours (a loop contributes 2 to
    the exponent of its colour).  Each circle contributes a factor ``k``.
    """
    _check_table_degree(h, g)
    scale = h.k ** g.circles
    if backend == "reference":
        return scale * _eval_edge_reference(h, g)
    if backend != "fast":
        raise ModelError("BAD_BACKEND", backend)
    cache = _TENSORS.setdefault(h, {})
    factors = []
    for inc in _incidence(g):
        mults = tuple(m for _, m in inc)
        if mults not in cache:
            cache[mults] = _vertex_tensor(h, mults)
        factors.append((tuple(e for e, _ in inc), cache[mults]))
    return scale * _contract(factors, range(g.edge_count), h.k)


def _eval_edge_reference(h, g):
    k = h.k
    total = 0j
    cache = {}
    for phi in product(range(k), repeat=g.edge_count):
        alphas = [[0] * k for _ in range(g.vertex_count)]
        for (u, v), c in zip(g.edges, phi):
            alphas[u][c] += 1
            alphas[v][c] += 1
        term = 1 + 0j
        for alpha in alphas:
            key = tuple(alpha)
            if key not in cache:
                cache[key] = h.coeff(key)
            term *= cache[key]
        total += term
    return total


def degree_profile(g, k, d):
    """Group the ``k**|E|`` edge colourings of ``g`` by their multiset of vertex signatures."""
    if g.circles:
        raise ModelError("CIRCLES_UNDEFINED", "degree profiles are defined for graphs without circles")
    if g.max_degree() > d:
        raise ModelError("DEGREE_EXCEEDS_TABLE", f"max degree {g.max_degree()} > d={d}")
    counts = Counter()
    for phi in product(range(k), repeat=g.edge_count):
        alphas = [[0] * k for _ in range(g.vertex_count)]
        for (u, v), c in zip(g.edges, phi):
            alphas[u][c] += 1
            alphas[v][c] += 1
        counts[tuple(sorted(tuple(x) for x in alphas))] += 1
    return DegreeProfile(k, d, dict(sorted(counts.items())))


def eval_via_profile(p, h):
    if h.k != p.k:
        raise ModelError("SHAPE_MISMATCH", f"profile has k={p.k}, table has k={h.k}")
    if isinstance(h, EdgeModelTable) and h.d < p.d:
        raise ModelError("SHAPE_MISMATCH", f"profile has d={p.d}, table has d={h.d}")
    total = 0j
    for sigs, mult in p.counts.items():
        term = complex(mult)
        for alpha in sigs:
            term *= h.coeff(alpha)
        total += term
    return total


# --------------------------------------------------------------------------
# common models

def proper_coloring_model(n):
    """``(1, J - I)``: counts proper ``n``-colourings."""
    return VertexModel(np.ones(n), np.ones((n, n)) - np.eye(n))


def independent_set_model():
    return VertexModel([1, 1], [[1, 1], [1, 0]])


# --------------------------------------------------------------------------
# JSON wire format: complex numbers are [re, im]

def _c(z):
    z = complex(z)
    return [z.real, z.imag]


def _z(pair):
    if isinstance(pair, (int, float)):
        return complex(pair)
    re, im = pair
    return complex(re, im)


def complex_matrix_to_json(M):
    return [[_c(z) for z in row] for row in np.asarray(M)]


def complex_matrix_from_json(rows):
    return np.array([[_z(z) for z in row] for row in rows], dtype=complex)


def vertex_model_to_json(m):
    return {"a": [_c(z) for z in m.a], "B": complex_matrix_to_json(m.B)}


def vertex_model_from_json(d):
    a = np.array([_z(z) for z in d["a"]], dtype=complex)
    B = complex_matrix_from_json(d["B"]) if len(d["B"]) else np.zeros((len(a), len(a)))
    return VertexModel(a, B)


def edge_eval_to_json(h):
    return {
        "k": h.k,
        "terms": [{"a": _c(w), "u": [_c(z) for z in u]} for w, u in h.terms],
    }


def edge_eval_from_json(d):
    k = int(d["k"])
    terms = d["terms"]
    w = [_z(t["a"]) for t in terms]
    U = np.array([[_z(z) for z in t["u"]] for t in terms], dtype=complex).reshape(len(terms), k).T
    return EdgeModelEval(w, U)


def edge_table_to_json(h):
    return {
        "k": h.k,
        "d": h.d,
        "coeffs": {",".join(map(str, a)): _c(v) for a, v in sorted(h.coeffs.items())},
    }


def edge_table_from_json(d):
    k = int(d["k"])
    coeffs = {}
    for key, value in d.get("coeffs", {}).items():
        alpha = tuple(int(x) for x in key.split(",")) if key else ()
        coeffs[alpha] = _z(value)
    return EdgeModelTable(k, int(d["d"]), coeffs)


def edge_model_from_json(d):
    return edge_table_from_json(d) if "coeffs" in d else edge_eval_from_json(d)


def edge_model_to_json(h):
    return edge_table_to_json(h) if isinstance(h, EdgeModelTable) else edge_eval_to_json(h)
