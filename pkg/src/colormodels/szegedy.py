"""Vertex model -> edge model transform and edge-model realness.

For a vertex model ``(a, B)`` with ``B = U.T @ U`` the edge model
``h = sum_i a_i ev_{u_i}`` over the columns ``u_i`` of ``U`` has the same
partition function.  Such an ``h`` is real valued exactly when the stacked
vectors ``(u_i; a_i)`` are permuted onto their complex conjugates.
"""

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import ModelError
from .linalg import SymmetricFactorization, factor_symmetric, orthogonality_residual
from .models import (
    EdgeModelEval,
    EdgeModelTable,
    VertexModel,
    complex_matrix_to_json,
    edge_eval_to_json,
)
from .tolerance import DEFAULT, is_real_matrix


@dataclass(frozen=True, eq=False)
class TransformResult:
    edge_model: EdgeModelEval
    U: np.ndarray
    uu_star_real: bool


@dataclass(frozen=True)
class RealnessCheck:
    is_real: bool
    pairing: tuple = None  # pairing[i] = index of the conjugate term
    unmatched: int = None

    def __bool__(self):
        return self.is_real


def vertex_to_edge(m, U=None, tol=DEFAULT.eq):
    """Edge model with the same partition function as the vertex model ``m``.

    ``U`` defaults to :func:`factor_symmetric` of ``m.B`` (the spectral
    recipe when ``B`` is real).
    """
    if U is None:
        U = factor_symmetric(m.B, tol).U
    elif isinstance(U, SymmetricFactorization):
        U = U.U
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[1] != m.n:
        raise ModelError("FACTORIZATION_MISMATCH", f"U has shape {U.shape}, model has n={m.n}")
    if np.linalg.norm(U.T @ U - m.B) > tol * (1 + np.linalg.norm(m.B)):
        raise ModelError("FACTORIZATION_MISMATCH", "U.T @ U differs from B")
    return TransformResult(
        EdgeModelEval(m.a, U), U, is_real_matrix(U @ U.conj().T, tol)
    )


def exponents(k, d):
    """All exponent vectors of length ``k`` with total degree ``<= d`` in graded-lex order."""
    out = []
    for total in range(d + 1):
        for alpha in product(range(total + 1), repeat=k):
            if sum(alpha) == total:
                out.append(alpha)
    return out


def materialize(h, d):
    """Coefficient table ``alpha -> sum_i a_i prod_c u_i[c] ** alpha[c]`` up to degree ``d``."""
    if d < 0:
        raise ModelError("BAD_DEGREE", "d must be >= 0")
    alphas = exponents(h.k, d)
    if not alphas:
        return EdgeModelTable(h.k, d, {})
    A = np.array(alphas, dtype=int).reshape(len(alphas), h.k)
    # (num_alpha, n) matrix of monomial values at each point
    mono = np.prod(h.U.T[None, :, :] ** A[:, None, :], axis=2)
    vals = mono @ h.weights
    return EdgeModelTable(h.k, d, dict(zip(alphas, vals)))


def _stacked(h):
    return np.vstack([h.U, h.weights[None, :]])


def is_real_edge_model(h, tol=DEFAULT.eq):
    """Check whether the terms of ``h`` are closed under complex conjugation.

    Returns a :class:`RealnessCheck`; on success ``pairing[i]`` is the term
    whose stacked vector equals the conjugate of term ``i``, otherwise
    ``unmatched`` is the first term without a conjugate partner.
    Raises ``TERMS_TOO_CLOSE`` if some conjugate has two candidates.
    """
    Z = _stacked(h)
    n = Z.shape[1]
    pairing = []
    for i in range(n):
        target = Z[:, i].conj()
        scale = 1 + np.max(np.abs(target), initial=0)
        dist = np.max(np.abs(Z - target[:, None]), axis=0, initial=0) if n else np.zeros(0)
        hits = np.flatnonzero(dist <= tol * scale)
        if len(hits) > 1:
            raise ModelError("TERMS_TOO_CLOSE", f"term {i} has conjugate candidates {hits.tolist()}")
        if len(hits) == 0:
            return RealnessCheck(False, None, i)
        pairing.append(int(hits[0]))
    for i, j in enumerate(pairing):
        if pairing[j] != i:
            return RealnessCheck(False, None, i)
    return RealnessCheck(True, tuple(pairing), None)


def snap_to_real(h, pairing):
    """Make a numerically conjugation-closed ``h`` exactly closed.

    Each pair ``(i, pairing[i])`` is replaced by the average of term ``i``
    and the conjugate of its partner; self-paired terms become real.
    """
    Z = _stacked(h)
    out = Z.copy()
    for i, j in enumerate(pairing):
        if i == j:
            out[:, i] = Z[:, i].real
        elif i < j:
            z = (Z[:, i] + Z[:, j].conj()) / 2
            out[:, i] = z
            out[:, j] = z.conj()
    return EdgeModelEval(out[-1], out[:-1])


def pad(h, l):
    if l < h.k:
        raise ModelError("DIMENSION_TOO_SMALL", f"l={l} < k={h.k}")
    U = np.vstack([h.U, np.zeros((l - h.k, h.U.shape[1]), dtype=complex)])
    return EdgeModelEval(h.weights, U)


def apply_group(h, g, l=None, tol=1e-8):
    """Map every point ``u`` of ``h`` to ``g @ pad(u)``; weights are unchanged."""
    g = np.asarray(g, dtype=complex)
    l = g.shape[0] if l is None else l
    if g.shape != (l, l):
        raise ModelError("SHAPE_MISMATCH", f"g has shape {g.shape}, expected {(l, l)}")
    if orthogonality_residual(g) > tol * (1 + np.linalg.norm(g) ** 2):
        raise ModelError("NOT_ORTHOGONAL", f"residual {orthogonality_residual(g):.3e}")
    padded = pad(h, l)
    return EdgeModelEval(h.weights, g @ padded.U)


def evaluation_to_vertex(h):
    """Vertex model ``(weights, U.T @ U)`` with the same partition function as ``h``."""
    B = h.U.T @ h.U
    return VertexModel(h.weights, (B + B.T) / 2)


def transform_to_json(res):
    return {
        "edge_model": edge_eval_to_json(res.edge_model),
        "U": complex_matrix_to_json(res.U),
        "uu_star_real": bool(res.uu_star_real),
    }


def realness_to_json(chk):
    return {
        "is_real": chk.is_real,
        "pairing": list(chk.pairing) if chk.pairing is not None else None,
        "unmatched": chk.unmatched,
    }

