"""Deciding whether a vertex model's partition function is edge reflection positive.

For real models the decision is exact: after checking twin-freeness, a
model is realizable by a real edge model iff every colour ``i`` has a
partner ``j`` (possibly ``i`` itself) with equal weight such that on each
eigenspace of ``B`` the coordinates of ``i`` and ``j`` agree (positive
eigenvalue) or are opposite (negative eigenvalue).  Eigenspaces are
handled through spectral projectors so degenerate eigenvalues need no
basis choice.

Complex models are handled heuristically through the orthogonal-group
search in :mod:`colormodels.kempf_ness`; failure to find a conjugating
group element yields ``UNKNOWN``, never ``NOT_ERP``.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError
from .kempf_ness import find_conjugating_g
from .linalg import eig_real_symmetric, factor_symmetric, spectral_projectors
from .models import EdgeModelEval, VertexModel, edge_eval_to_json, is_twin_free
from .szegedy import apply_group, is_real_edge_model, snap_to_real, vertex_to_edge
from .tolerance import DEFAULT, is_real_matrix

log = logging.getLogger(__name__)

ERP = "ERP"
NOT_ERP = "NOT_ERP"
UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class Violation:
    kind: str  # "weight" or "projector"
    value: float  # |a_i - a_j| or the residual norm
    eigenvalue: float = None
    sign: int = None  # +1: P(e_i - e_j), -1: P(e_i + e_j)
    residual: tuple = None


@dataclass(frozen=True)
class FailureWitness:
    """Colour ``i`` together with, for every candidate ``j``, what goes wrong."""

    index: int
    evidence: dict  # j -> list of Violation


@dataclass
class ErpVerdict:
    status: str
    certificate: EdgeModelEval = None
    witness: FailureWitness = None
    notes: list = field(default_factory=list)


def _spectrum(B, tol):
    dec = eig_real_symmetric(np.real(B))
    proj = spectral_projectors(dec, tol)
    radius = float(np.max(np.abs(dec.eigenvalues), initial=0))
    threshold = tol * (1 + radius)
    signed = []
    for lam, P in proj:
        if lam > threshold:
            signed.append((lam, 1, P))
        elif lam < -threshold:
            signed.append((lam, -1, P))
    return signed


def _pair_violations(a, spectrum, i, j, tol):
    out = []
    wdiff = abs(a[i] - a[j])
    if wdiff > tol * (1 + max(abs(a[i]), abs(a[j]))):
        out.append(Violation("weight", float(wdiff)))
    for lam, sign, P in spectrum:
        # lam > 0 requires P e_i = P e_j, lam < 0 requires P e_i = -P e_j
        r = P[:, i] - sign * P[:, j]
        norm = float(np.linalg.norm(r))
        if norm > tol:
            out.append(Violation("projector", norm, float(lam), sign, tuple(float(x) for x in r)))
    return out


def _check_real_input(m, tol):
    if not m.is_real(tol):
        raise ModelError("NOT_REAL_MODEL", "a and B must be real")
    if not is_twin_free(m, tol):
        raise ModelError("NOT_TWIN_FREE", "run twin_reduce first")
    if np.any(m.a.real <= 0):
        log.warning("node weights are not all positive; proceeding with real weights")


def find_partners(m, tol=DEFAULT.eq):
    """``partner[i]`` = first admissible ``j`` for colour ``i``, or ``None``."""
    a = m.a.real
    spectrum = _spectrum(m.B, tol)
    partners = []
    for i in range(m.n):
        partners.append(
            next((j for j in range(m.n) if not _pair_violations(a, spectrum, i, j, tol)), None)
        )
    return partners


def erp_decide_real(m, tol=DEFAULT.eq):
    """Exact decision for a twin-free real vertex model.

    On ``ERP`` the certificate is the edge model built from the spectral
    factorization of ``B``, which is conjugation-closed as it stands.
    On ``NOT_ERP`` the witness lists, for the first colour without a
    partner, the violated conditions for every candidate partner.
    """
    _check_real_input(m, tol)
    a = m.a.real
    spectrum = _spectrum(m.B, tol)
    notes = [f"twin-free real model with n={m.n}", f"{len(spectrum)} nonzero eigenvalue clusters"]
    for i in range(m.n):
        evidence = {}
        for j in range(m.n):
            v = _pair_violations(a, spectrum, i, j, tol)
            if not v:
                break
            evidence[j] = v
        else:
            notes.append(f"colour {i} has no admissible partner")
            return ErpVerdict(NOT_ERP, None, FailureWitness(i, evidence), notes)
    real_model = VertexModel(a + 0j, m.B.real + 0j, m.tol)
    cert = vertex_to_edge(real_model).edge_model
    notes.append("certificate: spectral factorization with identity group element")
    return ErpVerdict(ERP, cert, None, notes)


def verify_witness(m, witness, tol=DEFAULT.eq):
    """Recompute every recorded violation; True iff all candidates still fail."""
    a = m.a.real
    spectrum = _spectrum(m.B, tol)
    if set(witness.evidence) != set(range(m.n)):
        return False
    for j in range(m.n):
        if not _pair_violations(a, spectrum, witness.index, j, tol):
            return False
    return True


def necessary_condition(m, tol=DEFAULT.eq):
    """Whether the default factorization ``U`` of ``B`` has ``U U*`` real."""
    U = factor_symmetric(m.B, tol).U
    return is_real_matrix(U @ U.conj().T, tol)


def erp_decide_complex(m, tol=DEFAULT.eq, budget=4000, seed=0, extra_dims=2, restarts=8):
    """Heuristic decision for a possibly complex twin-free model.

    Real input is delegated to :func:`erp_decide_real`.  Otherwise the
    transform is tried as is, then searched over ``O_l(C)`` for
    ``l = k, ..., k + extra_dims``.  A found group element is returned as
    an exactly conjugation-closed certificate; otherwise ``UNKNOWN``.
    """
    if not is_twin_free(m, tol):
        raise ModelError("NOT_TWIN_FREE", "run twin_reduce first")
    if m.is_real(tol):
        verdict = erp_decide_real(m, tol)
        verdict.notes.insert(0, "real input: exact decision")
        return verdict
    h = vertex_to_edge(m, tol=tol).edge_model
    notes = [f"complex model with n={m.n}, k={h.k}"]
    search_tol = max(1e-7, tol)
    chk = is_real_edge_model(h, search_tol)
    if chk.is_real:
        notes.append("transform already conjugation-closed")
        return ErpVerdict(ERP, snap_to_real(h, chk.pairing), None, notes)
    for l in range(h.k, h.k + extra_dims + 1):
        res = find_conjugating_g(h, l, budget=budget, seed=seed, restarts=restarts, tol=search_tol)
        if res.found:
            hg = apply_group(h, res.point.g, l, tol=1e-6)
            chk = is_real_edge_model(hg, search_tol)
            notes.append(f"conjugating element found at l={l} (restart {res.restart})")
            return ErpVerdict(ERP, snap_to_real(hg, chk.pairing), None, notes)
        notes.append(f"no conjugating element at l={l} within budget {budget}")
    return ErpVerdict(UNKNOWN, None, None, notes)


def verdict_to_json(v):
    witness = None
    if v.witness is not None:
        witness = {
            "index": v.witness.index,
            "evidence": {
                str(j): [
                    {
                        "kind": x.kind,
                        "value": x.value,
                        "eigenvalue": x.eigenvalue,
                        "sign": x.sign,
                        "residual": list(x.residual) if x.residual is not None else None,
                    }
                    for x in vs
                ]
                for j, vs in v.witness.evidence.items()
            },
        }
    return {
        "status": v.status,
        "certificate": edge_eval_to_json(v.certificate) if v.certificate is not None else None,
        "witness": witness,
        "notes": list(v.notes),
    }
