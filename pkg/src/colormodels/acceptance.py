"""Acceptance suite: eleven end-to-end checks with fixed seeds.

Each check returns a :class:`Result`; :func:`run_all` runs them in order.
Brute-force oracles here are deliberately naive and share no code with
the evaluators they check.
"""

import io
import json
import time
from dataclasses import dataclass
from itertools import product

import numpy as np

from .cli import run
from .connection import connection_matrix, psd_check, vertex_invariant, witness_search
from .erp import ERP, NOT_ERP, erp_decide_real
from .graph_core import (
    complete_graph,
    cycle_graph,
    enumerate_fragments,
    glue,
    graph_corpus,
)
from .kempf_ness import critical_residual, descend, f, find_conjugating_g, tangent_gradient
from .linalg import expm, factor_symmetric, random_complex_orthogonal, random_skew, rank
from .models import (
    EdgeModelEval,
    VertexModel,
    eval_edge,
    eval_vertex,
    independent_set_model,
    is_twin_free,
    proper_coloring_model,
    twin_reduce,
)
from .szegedy import apply_group, is_real_edge_model, materialize, vertex_to_edge
from .tolerance import is_real_matrix


@dataclass
class Result:
    id: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


# --------------------------------------------------------------------------
# oracles


def brute_hom(a, B, g):
    """Weighted homomorphism count by listing every colouring."""
    n = len(a)
    total = 0
    for psi in product(range(n), repeat=g.vertex_count):
        term = 1
        for v in psi:
            term *= a[v]
        for u, v in g.edges:
            term *= B[psi[u]][psi[v]]
        total += term
    return total


def brute_independent_sets(g):
    """Independent vertex subsets; a loop makes its vertex unusable."""
    count = 0
    for mask in range(1 << g.vertex_count):
        if all(not (mask >> u & 1 and mask >> v & 1) for u, v in g.edges):
            count += 1
    return count


def _rel_err(x, y):
    return abs(x - y) / (1 + abs(y))


# --------------------------------------------------------------------------
# random instances


def random_twin_free_complex(rng, n):
    while True:
        a = rng.uniform(0, 1, n) + 1j * rng.uniform(0, 1, n)
        if np.min(np.abs(a)) < 0.1:
            continue
        X = rng.uniform(0, 1, (n, n)) + 1j * rng.uniform(0, 1, (n, n))
        m = VertexModel(a, np.triu(X) + np.triu(X, 1).T)
        if is_twin_free(m, 1e-6):
            return m


def random_mixed_real(rng, n):
    """Twin-free real model with eigenvalues of both signs."""
    while True:
        Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        lam = rng.uniform(0.3, 2, n) * rng.choice([-1, 1], n)
        lam[0], lam[-1] = abs(lam[0]), -abs(lam[-1])
        m = VertexModel(rng.uniform(0.5, 2, n), Q @ np.diag(lam) @ Q.T)
        if is_twin_free(m, 1e-6):
            return m


def planted_erp_real(rng, n):
    """Real model satisfying the partner condition for a random involution.

    Positive eigenvectors are taken symmetric and negative ones
    antisymmetric under the involution, and weights are constant on its
    orbits.
    """
    while True:
        perm = np.arange(n)
        idx = rng.permutation(n)
        for t in range(int(rng.integers(1, n // 2 + 1))):
            i, j = idx[2 * t], idx[2 * t + 1]
            perm[i], perm[j] = j, i
        P = np.eye(n)[perm]
        Pp, Pm = (np.eye(n) + P) / 2, (np.eye(n) - P) / 2
        X = rng.standard_normal((n, n))
        Y = rng.standard_normal((n, n))
        B = Pp @ X @ X.T @ Pp - Pm @ Y @ Y.T @ Pm
        a = rng.uniform(0.5, 2, n)
        a = (a + a[perm]) / 2
        m = VertexModel(a, B)
        if is_twin_free(m, 1e-6):
            return m


def conjugation_closed_model(rng, k, pairs, singles):
    """Edge model whose terms are closed under complex conjugation."""
    cols, weights = [], []
    for _ in range(pairs):
        u = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        w = rng.uniform(0.5, 2) + 1j * rng.uniform(-1, 1)
        cols += [u, u.conj()]
        weights += [w, np.conj(w)]
    for _ in range(singles):
        cols.append(rng.standard_normal(k) + 0j)
        weights.append(rng.uniform(0.5, 2))
    return EdgeModelEval(np.array(weights), np.array(cols).T)


def _random_orthogonal(rng, l, scale, real=False):
    return random_complex_orthogonal(l, scale, int(rng.integers(2**31)), real=real)


# --------------------------------------------------------------------------
# criteria


def check_edge_vertex_equivalence():
    rng = np.random.default_rng(1)
    corpus = graph_corpus(4, 6)
    worst = 0.0
    for t in range(200):
        m = random_twin_free_complex(rng, 1 + t % 3)
        h = vertex_to_edge(m).edge_model
        for g in corpus:
            pv = eval_vertex(m, g)
            worst = max(worst, _rel_err(eval_edge(h, g), pv))
    return worst <= 1e-8, f"200 models x {len(corpus)} graphs, worst rel err {worst:.2e}"


def _cli(argv):
    buf = io.StringIO()
    code = run(argv, stdout=buf)
    return code, json.loads(buf.getvalue()) if buf.getvalue() else None


def check_proper_coloring_fixtures():
    got = {}
    for n in range(2, 6):
        code, out = _cli(["erp-check", "--model", f"builtin:proper-{n}"])
        got[n] = out["status"] if code == 0 else f"exit {code}"
    ok = got == {2: ERP, 3: NOT_ERP, 4: NOT_ERP, 5: NOT_ERP}
    return ok, ", ".join(f"n={n}: {s}" for n, s in got.items())


def check_independent_set_fixture():
    m = independent_set_model()
    code, out = _cli(["erp-check", "--model", "builtin:indepset"])
    c4 = eval_vertex(m, cycle_graph(4))
    k2 = eval_vertex(m, complete_graph(2))
    oracle = (brute_independent_sets(cycle_graph(4)), brute_independent_sets(complete_graph(2)))
    ok = (
        code == 0
        and out["status"] == NOT_ERP
        and oracle == (7, 3)
        and abs(c4 - 7) <= 1e-9
        and abs(k2 - 3) <= 1e-9
    )
    return ok, f"status {out['status']}, C4 {c4.real:g}, K2 {k2.real:g}, oracle {oracle}"


def check_certificate_soundness():
    m = proper_coloring_model(2)
    v = erp_decide_real(m)
    if v.status != ERP:
        return False, f"status {v.status}"
    table = materialize(v.certificate, 6)
    max_imag = max(abs(complex(c).imag) for c in table.coeffs.values())
    a = [1, 1]
    B = [[0, 1], [1, 0]]
    vals, oracle = [], []
    for length in range(3, 9):
        g = cycle_graph(length)
        vals.append(eval_edge(table, g))
        oracle.append(brute_hom(a, B, g))
    ok = (
        max_imag <= 1e-9
        and oracle == [0, 2, 0, 2, 0, 2]
        and all(abs(x - y) <= 1e-9 for x, y in zip(vals, oracle))
    )
    return ok, f"max imag {max_imag:.1e}, cycles {[round(x.real, 9) for x in vals]}"


def check_decision_coherence():
    rng = np.random.default_rng(5)
    agree = planted = erp = 0
    for t in range(100):
        n = 2 + t % 3
        if t % 2:
            m = planted_erp_real(rng, n)
            planted += 1
        else:
            m = random_mixed_real(rng, n)
        decided = erp_decide_real(m).status == ERP
        closed = is_real_edge_model(vertex_to_edge(m).edge_model, 1e-7).is_real
        agree += decided == closed
        erp += decided
    return agree == 100, f"{agree}/100 agree ({planted} planted, {erp} ERP)"


def check_witness_fixture():
    m = VertexModel([1, 1], [[0, -1], [-1, 0]])
    w = witness_search(m, 3, 1, 4)
    if w is None:
        return False, "no witness found"
    a, B = [1, 1], [[0, -1], [-1, 0]]
    oracle = 0.0
    for ci, F in zip(w.coefficients, w.fragments):
        for cj, H in zip(w.coefficients, w.fragments):
            oracle += ci * cj * brute_hom(a, B, glue(F, H))
    none3 = witness_search(proper_coloring_model(3), 3, 1, 4)
    ok = abs(w.value + 2) <= 1e-9 and abs(oracle + 2) <= 1e-9 and none3 is None
    return ok, f"l={w.l}, value {w.value:.12g}, oracle {oracle:.12g}, n=3 -> {none3}"


def check_gram_direction():
    p = vertex_invariant(proper_coloring_model(2))
    worst = np.inf
    sizes = []
    for l in range(3):
        frags = enumerate_fragments(l, 3, 4)
        cm = connection_matrix(p, l, frags)
        res = psd_check(cm.M)
        bound = -1e-8 * (1 + np.linalg.norm(cm.M))
        worst = min(worst, res.min_eigenvalue - bound)
        sizes.append(len(frags))
    return worst >= 0, f"matrix sizes {sizes}, min eigenvalue margin {worst:.2e}"


def check_group_invariance():
    rng = np.random.default_rng(8)
    corpus = graph_corpus(4, 6)
    worst = 0.0
    for t in range(20):
        m = random_twin_free_complex(rng, 1 + t % 3)
        h = vertex_to_edge(m).edge_model
        base = [eval_edge(h, g) for g in corpus]
        for _ in range(20):
            l = int(rng.integers(max(h.k, 1), 5))
            hg = apply_group(h, _random_orthogonal(rng, l, 0.3), l)
            for g, p in zip(corpus, base):
                worst = max(worst, _rel_err(eval_edge(hg, g), p))
    return worst <= 1e-7, f"400 group elements x {len(corpus)} graphs, worst rel err {worst:.2e}"


def _closed_W(rng, l):
    cols = []
    for _ in range(int(rng.integers(1, 3))):
        u = rng.standard_normal(l) + 1j * rng.standard_normal(l)
        cols += [u, u.conj()]
    for _ in range(int(rng.integers(0, 2))):
        cols.append(rng.standard_normal(l) + 0j)
    return np.array(cols).T


def check_kempf_ness():
    rng = np.random.default_rng(9)
    parts = []

    # (a) finite differences of Z -> f(expm(Z) g)
    worst = 0.0
    for _ in range(50):
        l, n = int(rng.integers(2, 5)), int(rng.integers(1, 5))
        W = rng.standard_normal((l, n)) + 1j * rng.standard_normal((l, n))
        g = _random_orthogonal(rng, l, 0.4)
        X, Y = random_skew(l, 1, rng), random_skew(l, 1, rng)
        GX, GY = tangent_gradient(W, g)
        exact = np.sum(GX * X) + np.sum(GY * Y)
        eps = 1e-6
        fd = (f(W, expm(eps * (X + 1j * Y)) @ g) - f(W, expm(-eps * (X + 1j * Y)) @ g)) / (2 * eps)
        worst = max(worst, abs(fd - exact) / max(1.0, abs(exact)))
    ok_a = worst <= 1e-5
    parts.append(f"(a) fd rel err {worst:.1e}")

    # (b) W W* real: the identity is a global minimum
    lowest = np.inf
    for _ in range(100):
        l = int(rng.integers(2, 5))
        W = _closed_W(rng, l)
        fe = f(W, np.eye(l))
        for _ in range(1000):
            g = _random_orthogonal(rng, l, float(rng.uniform(0.05, 1)))
            lowest = min(lowest, f(W, g) - fe + 1e-9)
    ok_b = lowest >= 0
    parts.append(f"(b) 1000 samples per W, min f(g)-f(e)+1e-9 = {lowest:.2e}")

    # (c) away from criticality descent makes progress
    progress = 0
    tried = 0
    while tried < 100:
        l, n = int(rng.integers(2, 5)), int(rng.integers(1, 5))
        W = rng.standard_normal((l, n)) + 1j * rng.standard_normal((l, n))
        if critical_residual(W) <= 0.1:
            continue
        tried += 1
        res = descend(W, 20)
        progress += res.f_history[-1] < res.f_history[0] - 1e-6
    ok_c = progress == 100
    parts.append(f"(c) {progress}/100 descended")

    # (d) planted instances: real orthogonal as stated, complex orthogonal as a harder variant
    hits = {}
    for label, real in (("real", True), ("complex", False)):
        found = 0
        for _ in range(20):
            l = int(rng.integers(2, 4))
            h = conjugation_closed_model(rng, l, int(rng.integers(1, 3)), int(rng.integers(0, 2)))
            hg = apply_group(h, _random_orthogonal(rng, l, 0.5, real=real), l)
            res = find_conjugating_g(hg, l, budget=8 * 500, seed=int(rng.integers(1000)))
            found += res.found
        hits[label] = found
    ok_d = all(v >= 18 for v in hits.values())
    parts.append(f"(d) recovered real {hits['real']}/20, complex {hits['complex']}/20")
    return ok_a and ok_b and ok_c and ok_d, "; ".join(parts)


def planted_twins(rng, n_base):
    """Random complex model with one merging and one cancelling twin pair added."""
    base = random_twin_free_complex(rng, n_base)
    a, B = list(base.a), base.B
    src = [0, 0, n_base - 1]
    w = a[0] * rng.uniform(0.2, 0.8)
    z = rng.uniform(0.2, 1) + 1j * rng.uniform(0.2, 1)
    a = [a[0] - w] + a[1:] + [w, z, -z]
    idx = list(range(n_base)) + src
    Bfull = B[np.ix_(idx, idx)]
    perm = rng.permutation(len(a))
    m = VertexModel(np.array(a)[perm], Bfull[np.ix_(perm, perm)])
    return base, m


def check_twin_reduction():
    rng = np.random.default_rng(10)
    corpus = graph_corpus(4, 5)
    worst = 0.0
    all_free = True
    for t in range(100):
        base, m = planted_twins(rng, 2 + t % 2)
        r = twin_reduce(m)
        all_free &= is_twin_free(r) and r.n == base.n
        for g in corpus:
            pv = eval_vertex(m, g)
            worst = max(worst, _rel_err(eval_vertex(r, g), pv))
    ok = all_free and worst <= 1e-8
    return ok, f"twin free {all_free}, worst rel err {worst:.2e} over {len(corpus)} graphs"


def check_linear_algebra():
    rng = np.random.default_rng(11)
    worst = 0.0
    rank_ok = real_ok = True
    for t in range(500):
        n = 1 + t % 6
        r = int(rng.integers(0, n + 1))
        real = t % 2 == 0
        if real:
            V = rng.standard_normal((r, n))
            S = np.diag(rng.choice([-1.0, 1.0], r))
            B = V.T @ S @ V
        else:
            V = rng.standard_normal((r, n)) + 1j * rng.standard_normal((r, n))
            B = V.T @ V
        if t % 7 == 0 and n >= 2 and not real:
            # isotropic direction: v.T v = 0 gives a rank-one B = v v.T with B v = 0
            v = np.zeros(n, dtype=complex)
            v[0], v[1] = 1, 1j
            B = B + np.outer(v, v)
        B = (B + B.T) / 2
        U = factor_symmetric(B).U
        worst = max(worst, np.linalg.norm(U.T @ U - B) / (1 + np.linalg.norm(B)))
        rank_ok &= rank(U, 1e-9) == rank(B, 1e-9)
        if real:
            real_ok &= is_real_matrix(U @ U.conj().T, 1e-9)
    ok = worst <= 1e-9 and rank_ok and real_ok
    return ok, f"500 matrices, worst residual {worst:.1e}, ranks {rank_ok}, real UU* {real_ok}"


CRITERIA = [
    (1, "edge and vertex partition functions agree", check_edge_vertex_equivalence),
    (2, "proper colouring models: ERP iff n=2", check_proper_coloring_fixtures),
    (3, "independent-set model", check_independent_set_fixture),
    (4, "n=2 certificate soundness", check_certificate_soundness),
    (5, "exact decision vs conjugation closure", check_decision_coherence),
    (6, "negativity witness", check_witness_fixture),
    (7, "connection matrices of an ERP model are PSD", check_gram_direction),
    (8, "orthogonal group invariance", check_group_invariance),
    (9, "Kempf-Ness suite", check_kempf_ness),
    (10, "twin reduction", check_twin_reduction),
    (11, "symmetric factorization and rank", check_linear_algebra),
]


def run_one(cid):
    for i, name, fn in CRITERIA:
        if i == cid:
            t0 = time.perf_counter()
            try:
                passed, detail = fn()
            except Exception as exc:  # a crash is a failure with a reason
                passed, detail = False, f"{type(exc).__name__}: {exc}"
            return Result(i, name, bool(passed), detail, time.perf_counter() - t0)
    raise KeyError(cid)


def run_all(verbose=False):
    results = []
    for cid, _, _ in CRITERIA:
        r = run_one(cid)
        if verbose:
            print(f"[{'PASS' if r.passed else 'FAIL'}] {r.id:2d} {r.name}: {r.detail} ({r.seconds:.1f}s)")
        results.append(r)
    return results
