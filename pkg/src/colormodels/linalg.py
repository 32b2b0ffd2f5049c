"""Small dense linear algebra used by the model transforms.

Everything here targets matrices of a few dozen rows at most: cyclic Jacobi
for real symmetric eigenproblems, symmetric (not Hermitian) factorization
``B = U.T @ U`` of complex matrices, full-pivot rank, and a Taylor
scaling-and-squaring matrix exponential for sampling complex orthogonal
matrices.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ModelError, NumericalError
from .tolerance import DEFAULT, close, is_real_matrix

MAX_EIG_SIZE = 64


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray  # descending
    Q: np.ndarray  # columns are eigenvectors


@dataclass(frozen=True, eq=False)
class SpectralProjectors:
    eigenvalues: tuple
    projectors: tuple

    def __iter__(self):
        return iter(zip(self.eigenvalues, self.projectors))

    def __len__(self):
        return len(self.eigenvalues)


@dataclass(frozen=True, eq=False)
class SymmetricFactorization:
    U: np.ndarray  # k x n with k = rank(B)

    @property
    def k(self):
        return self.U.shape[0]


def eig_real_symmetric(B, tol=1e-12, max_sweeps=50):
    """Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    B : array_like, shape (n, n)
        Real symmetric matrix, ``n <= 64``.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm is below
        ``tol * (1 + ||B||_F)``.

    Returns
    -------
    SpectralDecomposition
        Eigenvalues in descending order; eigenvector signs are fixed so the
        first entry of significant magnitude is positive.
    """
    A = np.array(B, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ModelError("NOT_SYMMETRIC", f"shape {A.shape}")
    if not is_real_matrix(A):
        raise ModelError("NOT_SYMMETRIC", "matrix is not real")
    A = A.real.copy()
    n = A.shape[0]
    if n > MAX_EIG_SIZE:
        raise ModelError("TOO_LARGE", f"n={n} > {MAX_EIG_SIZE}")
    if not close(A, A.T):
        raise ModelError("NOT_SYMMETRIC", "matrix is not symmetric")
    A = (A + A.T) / 2
    V = np.eye(n)
    threshold = tol * (1 + np.linalg.norm(A))
    for _ in range(max_sweeps):
        off = _off_norm(A)
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                theta = (A[q, q] - A[p, p]) / (2 * apq)
                if abs(theta) > 1e150:
                    t = 1 / (2 * theta)
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1)) if theta else 1.0
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                # A <- J^T A J on rows/cols p, q
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap = A[p, :].copy()
                aq = A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        off = _off_norm(A)
        if off > threshold:
            raise NumericalError("EIG_NO_CONVERGENCE", f"off-diagonal norm {off:.3e}")
    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    for j in range(n):
        col = V[:, j]
        lead = np.flatnonzero(np.abs(col) > 1e-8)
        if lead.size and col[lead[0]] < 0:
            V[:, j] = -col
    return SpectralDecomposition(w, V)


def _off_norm(A):
    return float(np.linalg.norm(A - np.diag(np.diag(A))))


def spectral_projectors(dec, cluster_tol=DEFAULT.eq):
    """Group (nearly) equal eigenvalues and return the orthogonal projector of each group."""
    w, Q = dec.eigenvalues, dec.Q
    if len(w) == 0:
        return SpectralProjectors((), ())
    radius = np.max(np.abs(w))
    gap = cluster_tol * (1 + radius)
    groups = [[0]]
    for j in range(1, len(w)):
        if w[groups[-1][-1]] - w[j] <= gap:
            groups[-1].append(j)
        else:
            groups.append([j])
    values, projs = [], []
    for grp in groups:
        Qg = Q[:, grp]
        values.append(float(np.mean(w[grp])))
        projs.append(Qg @ Qg.T)
    return SpectralProjectors(tuple(values), tuple(projs))


def rank(M, tol=DEFAULT.eq):
    """Number of pivots above ``tol * (1 + ||M||_F)`` under full-pivot elimination."""
    A = np.array(M, dtype=complex)
    if A.size == 0:
        return 0
    threshold = tol * (1 + np.linalg.norm(A))
    r = 0
    rows, cols = A.shape
    for step in range(min(rows, cols)):
        sub = np.abs(A[step:, step:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] <= threshold:
            break
        i += step
        j += step
        A[[step, i]] = A[[i, step]]
        A[:, [step, j]] = A[:, [j, step]]
        piv = A[step, step]
        A[step + 1:, step:] -= np.outer(A[step + 1:, step] / piv, A[step, step:])
        r += 1
    return r


def _sqrt_signed(lam):
    return np.sqrt(lam) if lam >= 0 else 1j * np.sqrt(-lam)


def factor_symmetric(B, tol=DEFAULT.eq):
    """Return ``U`` (``rank(B) x n``) with ``U.T @ U == B``.

    Real ``B`` uses the spectral recipe ``U = sqrt(Lambda) Q.T`` over the
    nonzero eigenvalues (negative ones get imaginary square roots), which
    makes ``U @ U.conj().T`` real diagonal.  Complex ``B`` goes through
    symmetric Gaussian elimination with Bunch-Kaufman style 1x1 / 2x2
    pivots.
    """
    B = np.array(B, dtype=complex)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ModelError("NOT_SYMMETRIC", f"shape {B.shape}")
    if not close(B, B.T, tol):
        raise ModelError("NOT_SYMMETRIC", "matrix is not symmetric")
    n = B.shape[0]
    if n == 0:
        return SymmetricFactorization(np.zeros((0, 0), dtype=complex))
    threshold = tol * (1 + np.linalg.norm(B))
    if is_real_matrix(B, tol):
        dec = eig_real_symmetric(B.real)
        rows = [
            _sqrt_signed(lam) * dec.Q[:, j]
            for j, lam in enumerate(dec.eigenvalues)
            if abs(lam) > threshold
        ]
        U = np.array(rows, dtype=complex).reshape(len(rows), n)
        return SymmetricFactorization(U)
    return SymmetricFactorization(_lagrange_reduce(B, threshold))


_ALPHA = (1 + np.sqrt(17)) / 8


def _factor_2x2(S):
    """Rows R (2 x 2) with R.T @ R == S for an invertible complex symmetric S."""
    s11, s12, s22 = S[0, 0], S[0, 1], S[1, 1]
    if abs(s22) > abs(s11):
        R = _factor_2x2(np.array([[s22, s12], [s12, s11]]))
        return R[:, ::-1]
    if s11 != 0:
        r1 = np.array([s11, s12]) / np.sqrt(s11)
        rem = s22 - s12 * s12 / s11
        return np.array([r1, [0, np.sqrt(rem)]], dtype=complex)
    c = np.sqrt(s12 / 2)
    return np.array([[c, c], [1j * c, -1j * c]], dtype=complex)


def _lagrange_reduce(B, threshold):
    A = B.copy()
    n = A.shape[0]
    rows = []
    active = list(range(n))
    while active:
        sub = A[np.ix_(active, active)]
        if np.max(np.abs(sub)) <= threshold:
            break
        d = np.abs(np.diag(sub))
        p = int(np.argmax(d))
        off = np.abs(sub - np.diag(np.diag(sub)))
        r, c = np.unravel_index(np.argmax(off), off.shape)
        if d[p] >= _ALPHA * off[r, c]:
            ip = active[p]
            piv = A[ip, ip]
            row = A[ip, :] / np.sqrt(piv)
            row[[i for i in range(n) if i not in active]] = 0
            rows.append(row)
            A = A - np.outer(row, row)
            active.remove(ip)
        else:
            ip, iq = active[r], active[c]
            D = A[np.ix_([ip, iq], [ip, iq])]
            C = A[[ip, iq], :].copy()
            C[:, [i for i in range(n) if i not in active]] = 0
            R = _factor_2x2(np.linalg.inv(D))
            new = R @ C
            rows.extend(new)
            A = A - new.T @ new
            active.remove(ip)
            active.remove(iq)
    return np.array(rows, dtype=complex).reshape(len(rows), n)


def expm(Z):
    """Matrix exponential by scaling and squaring on a 12-term Taylor series."""
    Z = np.asarray(Z, dtype=complex)
    n = Z.shape[0]
    norm = np.linalg.norm(Z, 1)
    s = max(0, int(np.ceil(np.log2(norm / 0.5))) if norm > 0.5 else 0)
    X = Z / 2 ** s
    E = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for j in range(1, 13):
        term = term @ X / j
        E = E + term
    for _ in range(s):
        E = E @ E
    return E


def random_skew(l, scale, rng):
    X = rng.uniform(-scale, scale, (l, l))
    return np.triu(X, 1) - np.triu(X, 1).T


def random_complex_orthogonal(l, scale, seed, real=False):
    """``expm(X + iY)`` for random real skew-symmetric ``X``, ``Y`` with entries in ``[-scale, scale]``.

    With ``real=True`` the imaginary part is omitted and the result is real
    orthogonal.
    """
    if l > 32:
        raise ModelError("TOO_LARGE", f"l={l} > 32")
    rng = np.random.default_rng(seed)
    X = random_skew(l, scale, rng)
    Y = np.zeros((l, l)) if real else random_skew(l, scale, rng)
    g = expm(X + 1j * Y)
    if orthogonality_residual(g) > 1e-9:
        raise NumericalError("ORTHOGONALITY", "sampled matrix drifted off the group")
    return g


def orthogonality_residual(g):
    g = np.asarray(g, dtype=complex)
    return float(np.linalg.norm(g.T @ g - np.eye(g.shape[0])))
