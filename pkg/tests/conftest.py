"""Shared builders for randomized differential tests.

Every randomized test seeds its own random.Random so failures replay
exactly.  Instances come in two flavors: approval ballots (each vertex backs
one candidate, which produces plenty of ties and zero totals) and dense
weights (every candidate gets something everywhere).
"""

from __future__ import annotations

import random
from itertools import combinations

from gerrysolve.auxgraph import SINK, SOURCE
from gerrysolve.model import Instance, classify_graph


def path_edges(n):
    return tuple((i, i + 1) for i in range(n - 1))


def random_tree_edges(n, rng):
    """Uniform random labeled tree via a Pruefer sequence."""
    if n == 1:
        return ()
    if n == 2:
        return ((0, 1),)
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    import heapq

    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((min(u, v), max(u, v)))
    return tuple(edges)


def random_connected_edges(n, rng, extra_prob=0.35):
    """Random connected graph: random tree plus a sprinkle of extra edges."""
    base = set(random_tree_edges(n, rng))
    for u, v in combinations(range(n), 2):
        if (u, v) not in base and rng.random() < extra_prob:
            base.add((u, v))
    return tuple(sorted(base))


def random_weights(n, m, rng, wmax=4, dense=None):
    if dense is None:
        dense = rng.random() < 0.5
    weights = []
    for _ in range(n):
        if dense:
            weights.append({c: rng.randint(1, wmax) for c in range(m)})
        else:
            weights.append({rng.randrange(m): rng.randint(1, wmax)})
    return tuple(weights)


def find_st_paths(aux, length_vertices):
    """Independent DFS over the materialized arc list (multigraph).

    Yields (vertex_sequence, labels) for every s-t path on exactly
    `length_vertices` vertices, where labels is the tuple of arc labels in
    order (None for unlabeled).
    """
    out = {}
    for tail, head, lab in aux.arcs:
        out.setdefault(tail, []).append((head, lab))

    def rec(v, seq, labels):
        if v == SINK:
            if len(seq) == length_vertices:
                yield list(seq), list(labels)
            return
        if len(seq) >= length_vertices:
            return
        for head, lab in out.get(v, []):
            seq.append(head)
            labels.append(lab)
            yield from rec(head, seq, labels)
            seq.pop()
            labels.pop()

    yield from rec(SOURCE, [SOURCE], [])


def has_qualifying_path(aux):
    """The winning condition restated independently of any solver: an s-t
    path on k+2 vertices with k_star+1 unlabeled arcs and all-distinct labels
    on the remaining k-k_star arcs."""
    k, k_star = aux.k, aux.k_star
    for _, labels in find_st_paths(aux, k + 2):
        unlabeled = sum(1 for lab in labels if lab is None)
        tagged = [lab for lab in labels if lab is not None]
        if unlabeled != k_star + 1 or len(tagged) != k - k_star:
            continue
        if len(set(tagged)) == len(tagged):
            return True
    return False


def random_instance(rng, graph_class="path", n=None, m=None, k=None, wmax=4, dense=None):
    if n is None:
        n = rng.randint(1, 8)
    if m is None:
        m = rng.randint(1, 4)
    if k is None:
        k = rng.randint(1, n)
    if graph_class == "path":
        edges = path_edges(n)
    elif graph_class == "tree":
        edges = random_tree_edges(n, rng)
        graph_class = classify_graph(n, edges)
    else:
        edges = random_connected_edges(n, rng)
        graph_class = classify_graph(n, edges)
    inst = Instance(
        n=n,
        edges=edges,
        graph_class=graph_class,
        candidates=tuple(f"c{i}" for i in range(m)),
        p=rng.randrange(m),
        k=k,
        weights=random_weights(n, m, rng, wmax=wmax, dense=dense),
    )
    inst.validate()
    return inst
