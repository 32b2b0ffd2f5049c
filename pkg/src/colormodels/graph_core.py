"""Multigraphs, fragments, gluing, canonical forms and bounded enumeration.

A :class:`Multigraph` allows loops and parallel edges and additionally
carries a count of *circles*: edge components without any vertex, which
appear when two half edges whose far ends are both open ends get glued.

A :class:`Fragment` is a multigraph with ``l`` distinguished vertices (the
open ends, labelled by their position in ``open_ends``), each of degree
exactly one.  Gluing two fragments with the same number of open ends joins
the neighbours of equally labelled open ends and deletes the open ends.
"""

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, permutations, product

from .errors import ModelError

MAX_CANONICAL_VERTICES = 8


def _normalize_edges(edges):
    return tuple(sorted((min(u, v), max(u, v)) for u, v in edges))


@dataclass(frozen=True)
class Multigraph:
    vertex_count: int
    edges: tuple = ()
    circles: int = 0

    def __post_init__(self):
        edges = tuple(tuple(int(x) for x in e) for e in self.edges)
        for e in edges:
            if len(e) != 2:
                raise ModelError("BAD_EDGE", f"edge {e!r} is not a pair")
        object.__setattr__(self, "vertex_count", int(self.vertex_count))
        object.__setattr__(self, "circles", int(self.circles))
        object.__setattr__(self, "edges", _normalize_edges(edges))
        validate(self)

    @property
    def edge_count(self):
        return len(self.edges)

    def degrees(self):
        deg = [0] * self.vertex_count
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1  # a loop counts twice
        return deg

    def max_degree(self):
        return max(self.degrees(), default=0)

    def without_circles(self):
        return Multigraph(self.vertex_count, self.edges, 0)


@dataclass(frozen=True)
class Fragment:
    graph: Multigraph
    open_ends: tuple = field(default=())

    def __post_init__(self):
        ends = tuple(int(v) for v in self.open_ends)
        object.__setattr__(self, "open_ends", ends)
        g = self.graph
        if g.circles:
            raise ModelError("BAD_FRAGMENT", "fragments carry no circles")
        if len(set(ends)) != len(ends):
            raise ModelError("BAD_FRAGMENT", "open ends must be distinct")
        deg = g.degrees()
        for v in ends:
            if not 0 <= v < g.vertex_count:
                raise ModelError("OUT_OF_RANGE_ENDPOINT", f"open end {v}")
            if deg[v] != 1:
                raise ModelError("BAD_FRAGMENT", f"open end {v} has degree {deg[v]}")

    @property
    def l(self):
        return len(self.open_ends)

    @property
    def internal_count(self):
        return self.graph.vertex_count - len(self.open_ends)


def validate(g):
    """Raise :class:`ModelError` unless ``g`` satisfies the Multigraph invariants."""
    if g.vertex_count < 0 or g.circles < 0:
        raise ModelError("NEGATIVE_COUNT", "vertex and circle counts must be >= 0")
    for u, v in g.edges:
        if not (0 <= u < g.vertex_count and 0 <= v < g.vertex_count):
            raise ModelError(
                "OUT_OF_RANGE_ENDPOINT",
                f"edge ({u}, {v}) with {g.vertex_count} vertices",
            )
    return True


def disjoint_union(g1, g2):
    shift = g1.vertex_count
    edges = list(g1.edges) + [(u + shift, v + shift) for u, v in g2.edges]
    return Multigraph(g1.vertex_count + g2.vertex_count, edges, g1.circles + g2.circles)


def relabel(g, perm):
    """Apply the vertex map ``v -> perm[v]`` to ``g``."""
    return Multigraph(g.vertex_count, [(perm[u], perm[v]) for u, v in g.edges], g.circles)


def glue(f, h):
    """Glue two fragments along equally labelled open ends.

    Each open end of ``f`` is identified with the equally labelled open end
    of ``h``; the resulting degree-2 nodes are then smoothed away.  A chain
    of half edges that closes up without touching a surviving vertex turns
    into a circle.
    """
    if f.l != h.l:
        raise ModelError("LABEL_COUNT_MISMATCH", f"{f.l} vs {h.l} open ends")
    l = f.l
    nf = f.graph.vertex_count
    nh = h.graph.vertex_count

    # Combined numbering: f vertices, then h vertices shifted by nf.
    # Open ends with label i collapse to the junction node ("j", i).
    node = {}
    for i, v in enumerate(f.open_ends):
        node[v] = ("j", i)
    for i, v in enumerate(h.open_ends):
        node[v + nf] = ("j", i)
    keep_f = [v for v in range(nf) if v not in set(f.open_ends)]
    keep_h = [v + nf for v in range(nh) if v not in set(h.open_ends)]
    for new, old in enumerate(keep_f + keep_h):
        node[old] = new

    edges = [(node[u], node[v]) for u, v in f.graph.edges]
    edges += [(node[u + nf], node[v + nf]) for u, v in h.graph.edges]

    incident = {}
    for idx, (u, v) in enumerate(edges):
        for x in (u, v):
            if isinstance(x, tuple):
                incident.setdefault(x, []).append(idx)

    def other(idx, x):
        u, v = edges[idx]
        return v if u == x else u

    def walk(start_edge, start_node):
        # follow the chain from start_node through junctions; returns end node
        idx, cur = start_edge, other(start_edge, start_node)
        used.add(idx)
        while isinstance(cur, tuple):
            a, b = incident[cur]
            nxt = b if a == idx else a
            if nxt in used:
                return cur
            used.add(nxt)
            idx, cur = nxt, other(nxt, cur)
        return cur

    used = set()
    out_edges = []
    for idx, (u, v) in enumerate(edges):
        if idx in used:
            continue
        if not isinstance(u, tuple):
            out_edges.append((u, walk(idx, u)))
        elif not isinstance(v, tuple):
            out_edges.append((v, walk(idx, v)))
    circles = 0
    for idx, (u, _) in enumerate(edges):
        if idx not in used:
            walk(idx, u)
            circles += 1
    return Multigraph(len(keep_f) + len(keep_h), out_edges, circles)


def _vertex_classes(g, movable):
    # isomorphism-invariant refinement: (degree, loops, sorted neighbour degrees)
    deg = g.degrees()
    loops = Counter(u for u, v in g.edges if u == v)
    nbrs = {v: [] for v in range(g.vertex_count)}
    for u, v in g.edges:
        if u != v:
            nbrs[u].append(deg[v])
            nbrs[v].append(deg[u])
    inv = {v: (deg[v], loops[v], tuple(sorted(nbrs[v]))) for v in movable}
    groups = {}
    for v in movable:
        groups.setdefault(inv[v], []).append(v)
    return [groups[key] for key in sorted(groups)]


def canonical_key(obj, max_vertices=MAX_CANONICAL_VERTICES):
    """Byte string identifying a multigraph or fragment up to isomorphism.

    Fragment isomorphisms must fix every open-end label.  The key is the
    lexicographically least edge serialization over all relabelings of the
    non-open-end vertices that respect a degree-based vertex partition.
    """
    if isinstance(obj, Fragment):
        g, ends = obj.graph, obj.open_ends
    else:
        g, ends = obj, ()
    ends_set = set(ends)
    movable = [v for v in range(g.vertex_count) if v not in ends_set]
    if len(movable) > max_vertices:
        raise ModelError("TOO_LARGE", f"{len(movable)} > {max_vertices} vertices")
    m = len(movable)
    base = {v: m + i for i, v in enumerate(ends)}
    classes = _vertex_classes(g, movable)
    best = None
    for choice in product(*(permutations(c) for c in classes)):
        perm = dict(base)
        nxt = 0
        for block in choice:
            for v in block:
                perm[v] = nxt
                nxt += 1
        ser = sorted(
            (min(perm[u], perm[v]), max(perm[u], perm[v])) for u, v in g.edges
        )
        if best is None or ser < best:
            best = ser
    body = ",".join(f"{u}-{v}" for u, v in best or ())
    return f"{m}|{len(ends)}|{g.circles}|{body}".encode()


def enumerate_fragments(l, max_internal_vertices, max_edges, allow_bare_edges=False):
    """One representative per isomorphism class of bounded ``l``-fragments.

    Edge counts include half edges.  Without ``allow_bare_edges`` no edge
    joins two open ends, so every gluing of the output is circle free.
    Output is sorted by canonical key.
    """
    if max_internal_vertices > MAX_CANONICAL_VERTICES:
        raise ModelError("TOO_LARGE", f"{max_internal_vertices} internal vertices")
    found = {}
    for m in range(max_internal_vertices + 1):
        for attach in _attachments(l, m, allow_bare_edges):
            half = [(m + i, t) for i, t in enumerate(attach) if t is not None and t < m + i]
            half += [(t, m + i) for i, t in enumerate(attach) if t is not None and t >= m + i]
            half = sorted(set(half))
            budget = max_edges - len(half)
            if budget < 0:
                continue
            pairs = [(u, v) for u in range(m) for v in range(u, m)]
            for e in range(budget + 1):
                if e and not pairs:
                    break
                for inner in combinations_with_replacement(pairs, e):
                    g = Multigraph(m + l, list(inner) + half)
                    frag = Fragment(g, tuple(range(m, m + l)))
                    found.setdefault(canonical_key(frag), frag)
    return [found[k] for k in sorted(found)]


def _attachments(l, m, allow_bare):
    """Targets per open end: an internal vertex index, or another open end's vertex."""
    out = []

    def rec(i, acc):
        if i == l:
            out.append(tuple(acc))
            return
        if acc[i] is not None:
            rec(i + 1, acc)
            return
        for t in range(m):
            acc[i] = t
            rec(i + 1, acc)
        acc[i] = None
        if allow_bare:
            for j in range(i + 1, l):
                if acc[j] is None:
                    acc[i], acc[j] = m + j, m + i
                    rec(i + 1, acc)
                    acc[i] = acc[j] = None

    rec(0, [None] * l)
    # every open end is attached exactly once; internal targets recorded on one side
    return [a for a in out if all(t is not None for t in a)]


def graph_corpus(max_vertices, max_edges):
    """All multigraphs (loops, parallel edges) within the bounds, up to isomorphism."""
    return [f.graph for f in enumerate_fragments(0, max_vertices, max_edges)]


# small named graphs -----------------------------------------------------

def empty_graph():
    return Multigraph(0)


def circle():
    return Multigraph(0, (), 1)


def path_graph(n):
    return Multigraph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    if n == 1:
        return Multigraph(1, [(0, 0)])
    if n == 2:
        return Multigraph(2, [(0, 1), (0, 1)])
    return Multigraph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n):
    return Multigraph(n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def star_fragment(l, loops=0):
    """One internal vertex carrying ``l`` half edges (and ``loops`` loops)."""
    edges = [(0, i + 1) for i in range(l)] + [(0, 0)] * loops
    return Fragment(Multigraph(l + 1, edges), tuple(range(1, l + 1)))


def bare_edge_fragment():
    return Fragment(Multigraph(2, [(0, 1)]), (0, 1))


# JSON wire format --------------------------------------------------------

def graph_to_json(g):
    return {"vertices": g.vertex_count, "edges": [list(e) for e in g.edges], "circles": g.circles}


def graph_from_json(d):
    return Multigraph(d["vertices"], [tuple(e) for e in d.get("edges", [])], d.get("circles", 0))


def fragment_to_json(f):
    d = graph_to_json(f.graph)
    d["open_ends"] = list(f.open_ends)
    return d


def fragment_from_json(d):
    return Fragment(graph_from_json(d), tuple(d.get("open_ends", [])))
