"""Combinatorial Perron-Frobenius helpers on the digraph of a nonnegative matrix.

Edge convention: ``A[u, v] > 0`` is an edge ``u -> v``.
"""
from __future__ import annotations

from collections import deque
from math import gcd

import numpy as np

from .errors import ConvergenceError

POWER_ITER_CAP = 10_000
POWER_RTOL = 1e-12


def adjacency(A) -> list[list[int]]:
    A = np.asarray(A)
    return [list(np.flatnonzero(A[u] != 0)) for u in range(A.shape[0])]


def strongly_connected_components(adj: list[list[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative.  Components come out in reverse topological order."""
    n = len(adj)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for j in range(i, len(adj[v])):
                w = adj[v][j]
                if index[w] == -1:
                    work.append((v, j + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
    return comps


def period(adj: list[list[int]], comp: list[int]) -> int:
    """gcd of the cycle lengths inside a strongly connected component.

    BFS levels from one vertex; the period is the gcd of
    ``level[u] + 1 - level[v]`` over the edges u -> v of the component.
    Returns 0 for a single vertex without a self-loop (no cycles at all).
    """
    members = set(comp)
    level = {comp[0]: 0}
    queue = deque([comp[0]])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v in members and v not in level:
                level[v] = level[u] + 1
                queue.append(v)
    g = 0
    for u in comp:
        for v in adj[u]:
            if v in members:
                g = gcd(g, abs(level[u] + 1 - level[v]))
    return g


def perron_radius(A, rtol: float = POWER_RTOL, max_iter: int = POWER_ITER_CAP) -> float:
    """Spectral radius of an irreducible nonnegative matrix by power iteration.

    Iterates on ``A + I`` (primitive whenever A is irreducible) and stops when
    the Collatz-Wielandt bracket ``min (Bx)_i/x_i <= r(B) <= max (Bx)_i/x_i``
    is narrower than ``rtol`` relative to its upper end.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if not np.any(A):
        return 0.0
    B = A + np.eye(n)
    x = np.ones(n) / n
    for _ in range(max_iter):
        y = B @ x
        ratios = y / x
        lo, hi = ratios.min(), ratios.max()
        if hi - lo <= rtol * hi:
            return float(0.5 * (lo + hi) - 1.0)
        x = y / y.sum()
    raise ConvergenceError(f"power iteration did not reach rtol {rtol} in {max_iter} steps")


def component_radii(A) -> list[tuple[list[int], float, int]]:
    """(members, spectral radius, period) for every strongly connected component."""
    A = np.asarray(A, dtype=float)
    adj = adjacency(A)
    out = []
    for comp in strongly_connected_components(adj):
        h = period(adj, comp)
        sub = A[np.ix_(comp, comp)]
        r = perron_radius(sub) if h else 0.0
        out.append((comp, r, h))
    return out


def nonnegative_radius(A) -> float:
    """r(A) as the largest component radius (exact for the block-triangular form)."""
    radii = [r for _, r, _ in component_radii(A)]
    return max(radii) if radii else 0.0
