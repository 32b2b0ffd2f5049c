"""Norm minimisation over the complex orthogonal group.

For ``W`` of shape ``l x n`` the function ``f(g) = ||g W||_F**2`` on
``O_l(C)`` is invariant under left multiplication by real orthogonal
matrices.  Its infimum is attained at the identity exactly when ``W W*``
is real, which is the condition that makes a conjugation-closed point set
reachable.  The routines here evaluate ``f``, its gradient in the tangent
coordinates ``Z = X + iY`` (``X``, ``Y`` real skew-symmetric), and run a
monotone descent with exponential retraction ``g <- expm(-s grad) g``.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError, NumericalError
from .linalg import expm, orthogonality_residual, random_complex_orthogonal
from .models import complex_matrix_to_json
from .szegedy import apply_group, is_real_edge_model, pad

log = logging.getLogger(__name__)

MAX_RESIDUAL = 1e-8


@dataclass(frozen=True, eq=False)
class KNPoint:
    g: np.ndarray
    orthogonality_residual: float

    @classmethod
    def of(cls, g):
        g = np.asarray(g, dtype=complex)
        res = orthogonality_residual(g)
        if res > MAX_RESIDUAL * (1 + np.linalg.norm(g) ** 2):
            raise NumericalError("ORTHOGONALITY", f"residual {res:.3e}")
        return cls(g, res)


@dataclass(frozen=True, eq=False)
class KNProblem:
    W: np.ndarray

    def __post_init__(self):
        W = np.array(self.W, dtype=complex)
        if W.ndim != 2:
            raise ModelError("SHAPE_MISMATCH", f"W has shape {W.shape}")
        object.__setattr__(self, "W", W)

    @property
    def l(self):
        return self.W.shape[0]

    @property
    def V(self):
        return self.W.real

    @property
    def T(self):
        return self.W.imag


@dataclass
class DescentResult:
    point: KNPoint
    f_history: list = field(default_factory=list)


@dataclass
class SearchResult:
    point: KNPoint = None  # None when nothing was found
    f_history: list = field(default_factory=list)
    restart: int = None

    @property
    def found(self):
        return self.point is not None


def _W(W):
    return W.W if isinstance(W, KNProblem) else np.asarray(W, dtype=complex)


def _g(g):
    return g.g if isinstance(g, KNPoint) else np.asarray(g, dtype=complex)


def f(W, g):
    """``tr((gW)^* gW)``, the squared Frobenius norm of ``g @ W``."""
    W, g = _W(W), _g(g)
    if g.shape != (W.shape[0], W.shape[0]):
        raise ModelError("SHAPE_MISMATCH", f"g {g.shape} vs W {W.shape}")
    M = g @ W
    return float(np.real(np.vdot(M, M)))


def critical_residual(W):
    """``||T V^T - V T^T||_F`` for ``W = V + iT``; zero iff ``W W^*`` is real."""
    W = _W(W)
    V, T = W.real, W.imag
    return float(np.linalg.norm(T @ V.T - V @ T.T))


def tangent_gradient(W, g):
    """Gradient of ``Z -> f(expm(Z) g)`` at ``Z = 0`` in the coordinates ``(X, Y)``.

    Returns real skew-symmetric ``(GX, GY)`` with
    ``d f = <GX, X>_F + <GY, Y>_F``.  ``GX`` vanishes identically by
    left invariance under the real orthogonal group.
    """
    M = _g(g) @ _W(W)
    P_imag = (M @ M.conj().T).imag
    return np.zeros_like(P_imag), 2 * P_imag


def _repair(g):
    # one Newton step towards g.T g = I; keeps long descents on the group
    E = g.T @ g - np.eye(g.shape[0])
    return g @ (np.eye(g.shape[0]) - E / 2)


def descend(W, iterations, step=0.1, seed=None, start=None, on_accept=None):
    """Monotone gradient descent of ``f`` on ``O_l(C)``.

    Parameters
    ----------
    W : KNProblem or array
    iterations : int
        Number of gradient steps attempted.
    step : float
        Initial step; halved (at most 30 times) until ``f`` does not
        increase, doubled after each accepted step.
    seed : int, optional
        When ``start`` is omitted and a seed is given, start from a random
        complex orthogonal matrix drawn with that seed; otherwise from the
        identity.
    on_accept : callable, optional
        Called with each accepted ``g``; a truthy return stops the descent.

    Returns
    -------
    DescentResult
        Final point and the ``f`` value of every accepted iterate (starting
        with the initial value).
    """
    W = _W(W)
    l = W.shape[0]
    if start is not None:
        g = _g(start).astype(complex)
    elif seed is not None:
        g = random_complex_orthogonal(l, 0.5, seed)
    else:
        g = np.eye(l, dtype=complex)
    fval = f(W, g)
    history = [fval]
    if on_accept is not None and on_accept(g):
        return DescentResult(KNPoint.of(g), history)
    s = step
    for _ in range(iterations):
        _, GY = tangent_gradient(W, g)
        gnorm = np.linalg.norm(GY)
        if gnorm <= 1e-15 * (1 + fval):
            break
        accepted = False
        for _ in range(31):
            g_new = expm(-s * 1j * GY) @ g
            f_new = f(W, g_new)
            if f_new <= fval:
                accepted = True
                break
            s /= 2
        if not accepted:
            break
        if orthogonality_residual(g_new) > 1e-13:
            g_new = _repair(g_new)
            f_new = f(W, g_new)
        g, fval = g_new, f_new
        history.append(fval)
        s *= 2
        if on_accept is not None and on_accept(g):
            break
    return DescentResult(KNPoint.of(g), history)


def find_conjugating_g(h, l, budget=4000, seed=0, restarts=8, step=0.1, tol=1e-7):
    """Search for ``g`` in ``O_l(C)`` making the terms of ``g h`` conjugation-closed.

    ``budget`` descent iterations are split evenly over ``restarts`` runs;
    run 0 starts at the identity, run ``r`` at a random point seeded by
    ``seed + r``.  Every accepted iterate is tested for closure with
    tolerance ``tol``.  Returns a :class:`SearchResult` whose ``point`` is
    ``None`` if no run succeeded.
    """
    if l < h.k:
        raise ModelError("DIMENSION_TOO_SMALL", f"l={l} < k={h.k}")
    hp = pad(h, l)
    W = hp.U
    per_run = budget // max(restarts, 1)

    def closed(g):
        try:
            return is_real_edge_model(apply_group(hp, g, l, tol=1e-6), tol).is_real
        except ModelError:
            return False

    history = []
    for r in range(max(restarts, 1)):
        start = np.eye(l, dtype=complex) if r == 0 else random_complex_orthogonal(l, 0.5, seed + r)
        hit = []

        def stop(g):
            if closed(g):
                hit.append(g.copy())
                return True
            return False

        res = descend(W, per_run, step=step, start=start, on_accept=stop)
        history.extend(res.f_history)
        if hit:
            log.debug("closure found in restart %d", r)
            return SearchResult(KNPoint.of(hit[0]), history, r)
    return SearchResult(None, history, None)


def point_to_json(p):
    return None if p is None else complex_matrix_to_json(p.g)
