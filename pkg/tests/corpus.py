"""Finite structures shared by the test suite."""

from itertools import combinations

from clonelab.structures import FiniteStructure, Relation


def _sym(edges):
    return frozenset(t for (u, v) in edges for t in ((u, v), (v, u)))


def digraph(n, arcs, name="E"):
    return FiniteStructure(n, (Relation(name, 2, frozenset(arcs)),))


def graph(n, edges, name="E"):
    return FiniteStructure(n, (Relation(name, 2, _sym(edges)),))


def directed_cycle(n):
    return digraph(n, [(i, (i + 1) % n) for i in range(n)])


def linear_order(n):
    return digraph(n, [(i, j) for i in range(n) for j in range(n) if i < j], name="lt")


def path(n):
    return graph(n, [(i, i + 1) for i in range(n - 1)])


def complete(n):
    return graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def complete_bipartite(a, b):
    return graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def disjoint_edges(pairs):
    return graph(2 * pairs, [(2 * i, 2 * i + 1) for i in range(pairs)])


def empty_structure(n):
    return FiniteStructure(n, ())


def marked_point(n):
    return FiniteStructure(n, (Relation("P", 1, frozenset({(0,)})),))


def petersen():
    verts = list(combinations(range(5), 2))
    idx = {v: i for i, v in enumerate(verts)}
    edges = [
        (idx[u], idx[v])
        for u, v in combinations(verts, 2)
        if not set(u) & set(v)
    ]
    return graph(10, edges)


def corpus10():
    """Ten structures of assorted shapes for orbit cross-checks."""
    return [
        directed_cycle(3),
        directed_cycle(4),
        linear_order(3),
        path(4),
        complete(4),
        complete_bipartite(2, 3),
        disjoint_edges(2),
        empty_structure(3),
        marked_point(3),
        petersen(),
    ]
