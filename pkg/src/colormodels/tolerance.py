"""Global tolerance bundle and the complex "equality" predicate."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ToleranceConfig:
    eq: float = 1e-9
    psd: float = 1e-8
    pf: float = 1e-8


DEFAULT = ToleranceConfig()


def close(x, y, tol=DEFAULT.eq):
    """``|x - y| <= tol * (1 + max(|x|, |y|))``, elementwise then all()."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    scale = 1.0 + np.maximum(np.abs(x), np.abs(y))
    return bool(np.all(np.abs(x - y) <= tol * scale))


def is_real_matrix(M, tol=DEFAULT.eq):
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return True
    return bool(np.max(np.abs(M.imag)) <= tol * (1.0 + np.max(np.abs(M))))
