"""Damping graphs: validation, incidence/Laplacian assembly, spanning trees,
and Kron reduction.

A damping graph is a simple connected undirected graph together with a
nonempty set of damped nodes.  All certificate-bearing linear algebra on these
graphs is exact (:mod:`fractions`); floats only appear downstream in the
eigensolvers and the simulator.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .exactlin import Matrix, as_fraction, solve, submatrix


class GraphError(ValueError):
    """Base class for graph construction and parameter errors."""


class SelfLoopError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class NoDampedNodeError(GraphError):
    pass


class DisconnectedError(GraphError):
    pass


class NonpositiveWeightError(GraphError):
    pass


class SingularBlockError(GraphError):
    pass


class InvalidParamsError(GraphError):
    pass


@dataclass(frozen=True)
class DampingGraph:
    """Simple connected graph with a distinguished damped-node subset.

    Nodes are the dense ids ``0..n-1``.  Edges are stored as ``(min, max)``
    pairs; that fixed orientation also fixes the incidence-matrix signs so
    serialized artifacts round-trip bit-stably.
    """

    n: int
    damped: frozenset[int]
    edges: tuple[tuple[int, int], ...]

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def undamped(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if i not in self.damped)

    @cached_property
    def damped_sorted(self) -> tuple[int, ...]:
        return tuple(sorted(self.damped))

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return tuple(tuple(sorted(a)) for a in adj)

    def is_damped(self, i: int) -> bool:
        return i in self.damped


def _check_connected(n: int, neighbors: Sequence[Sequence[int]]) -> bool:
    if n == 0:
        return False
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        u = queue.popleft()
        for v in neighbors[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                queue.append(v)
    return count == n


def build_graph(n: int, damped: Iterable[int], edges: Iterable[Sequence[int]]) -> DampingGraph:
    """Validate and build a damping graph.

    Raises SelfLoopError, DuplicateEdgeError, NoDampedNodeError or
    DisconnectedError naming the violated invariant.
    """
    if n < 1:
        raise GraphError(f"node count must be positive, got {n}")
    damped_set = frozenset(damped)
    for i in damped_set:
        if not 0 <= i < n:
            raise GraphError(f"damped node id {i} out of range 0..{n - 1}")
    norm: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for pair in edges:
        i, j = int(pair[0]), int(pair[1])
        if not (0 <= i < n and 0 <= j < n):
            raise GraphError(f"edge ({i},{j}) has an endpoint out of range 0..{n - 1}")
        if i == j:
            raise SelfLoopError(f"self-loop at node {i}")
        e = (min(i, j), max(i, j))
        if e in seen:
            raise DuplicateEdgeError(f"duplicate edge {e}")
        seen.add(e)
        norm.append(e)
    if not damped_set:
        raise NoDampedNodeError("damped set is empty; at least one damped node is required")
    g = DampingGraph(n=n, damped=damped_set, edges=tuple(norm))
    if not _check_connected(n, g.neighbors):
        raise DisconnectedError("graph is not connected")
    return g


def incidence(g: DampingGraph) -> list[list[int]]:
    """Dense n-by-m incidence matrix: +1 at the min endpoint, -1 at the max."""
    b = [[0] * g.m for _ in range(g.n)]
    for k, (i, j) in enumerate(g.edges):
        b[i][k] = 1
        b[j][k] = -1
    return b


def laplacian(g: DampingGraph, weights: Sequence) -> Matrix:
    """Exact weighted Laplacian B diag(w) B^T.

    Weights must be positive rationals, one per edge in edge order.
    """
    if len(weights) != g.m:
        raise GraphError(f"expected {g.m} edge weights, got {len(weights)}")
    w = [as_fraction(x) for x in weights]
    for k, wk in enumerate(w):
        if wk <= 0:
            raise NonpositiveWeightError(f"edge weight w[{k}] = {wk} is not positive")
    lap = [[Fraction(0)] * g.n for _ in range(g.n)]
    for k, (i, j) in enumerate(g.edges):
        lap[i][i] += w[k]
        lap[j][j] += w[k]
        lap[i][j] -= w[k]
        lap[j][i] -= w[k]
    return lap


def spanning_tree_and_chords(
    g: DampingGraph,
) -> tuple[tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]:
    """Deterministic BFS spanning tree (root 0, neighbors ascending) and chords."""
    tree: set[tuple[int, int]] = set()
    seen = [False] * g.n
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in g.neighbors[u]:
            if not seen[v]:
                seen[v] = True
                tree.add((min(u, v), max(u, v)))
                queue.append(v)
    tree_edges = tuple(e for e in g.edges if e in tree)
    chord_edges = tuple(e for e in g.edges if e not in tree)
    return tree_edges, chord_edges


def kron_reduce(lap: Matrix, damped: Iterable[int]) -> Matrix:
    """Schur complement of a Laplacian with respect to the damped rows/columns.

    Returns the reduced matrix over the undamped ids in ascending order.
    Raises SingularBlockError when the damped block is singular, which signals
    a damped component with no interconnecting edge.
    """
    n = len(lap)
    damped_set = set(damped)
    d = sorted(i for i in damped_set if 0 <= i < n)
    u = [i for i in range(n) if i not in damped_set]
    if not d:
        return [row[:] for row in lap]
    if not u:
        return []
    l_dd = submatrix(lap, d, d)
    l_du = submatrix(lap, d, u)
    l_ud = submatrix(lap, u, d)
    l_uu = submatrix(lap, u, u)
    try:
        x = solve(l_dd, l_du)
    except ValueError as exc:
        raise SingularBlockError("damped block is singular (isolated damped component)") from exc
    out = [row[:] for row in l_uu]
    for a in range(len(u)):
        for b in range(len(u)):
            out[a][b] -= sum(
                (l_ud[a][k] * x[k][b] for k in range(len(d))), start=Fraction(0)
            )
    return out


@dataclass(frozen=True)
class SystemParams:
    """Per-node mass and damping, per-edge stiffness, per-node constant force.

    Exact rationals throughout; the simulator converts to float at its
    boundary.  For the nominal realization the damping is positive exactly on
    the damped nodes.
    """

    mass: tuple[Fraction, ...]
    damping: tuple[Fraction, ...]
    stiffness: tuple[Fraction, ...]
    force: tuple[Fraction, ...]


def make_params(
    g: DampingGraph,
    mass: Sequence | None = None,
    damping: Sequence | None = None,
    stiffness: Sequence | None = None,
    force: Sequence | None = None,
) -> SystemParams:
    """Build validated SystemParams; omitted fields fall back to the nominal
    realization (unit masses and stiffness, damping 1 on damped nodes, no
    external force)."""
    if mass is None:
        mass = [1] * g.n
    if damping is None:
        damping = [1 if i in g.damped else 0 for i in range(g.n)]
    if stiffness is None:
        stiffness = [1] * g.m
    if force is None:
        force = [0] * g.n
    p = SystemParams(
        mass=tuple(as_fraction(x) for x in mass),
        damping=tuple(as_fraction(x) for x in damping),
        stiffness=tuple(as_fraction(x) for x in stiffness),
        force=tuple(as_fraction(x) for x in force),
    )
    validate_params(g, p)
    return p


def validate_params(g: DampingGraph, p: SystemParams) -> None:
    if len(p.mass) != g.n or len(p.damping) != g.n or len(p.force) != g.n:
        raise InvalidParamsError("per-node parameter length does not match node count")
    if len(p.stiffness) != g.m:
        raise InvalidParamsError("per-edge stiffness length does not match edge count")
    for i, mi in enumerate(p.mass):
        if mi <= 0:
            raise InvalidParamsError(f"mass m[{i}] = {mi} is not positive")
    for k, wk in enumerate(p.stiffness):
        if wk <= 0:
            raise NonpositiveWeightError(f"stiffness w[{k}] = {wk} is not positive")
    for i, ri in enumerate(p.damping):
        if ri < 0:
            raise InvalidParamsError(f"damping r[{i}] = {ri} is negative")
        if (ri > 0) != (i in g.damped):
            raise InvalidParamsError(
                f"damping r[{i}] = {ri} inconsistent with damped set (node "
                f"{'damped' if i in g.damped else 'undamped'})"
            )


def connected_components(n: int, edges: Iterable[tuple[int, int]]) -> list[tuple[int, ...]]:
    """Connected components of an arbitrary node/edge set, each sorted, listed
    by smallest member."""
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = [False] * n
    comps: list[tuple[int, ...]] = []
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        comp = [start]
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        comps.append(tuple(sorted(comp)))
    return comps


def bfs_distances(g: DampingGraph, sources: Iterable[int]) -> list[int]:
    """Hop distance from every node to the nearest source (-1 if unreachable)."""
    dist = [-1] * g.n
    queue: deque[int] = deque()
    for s in sources:
        dist[s] = 0
        queue.append(s)
    while queue:
        u = queue.popleft()
        for v in g.neighbors[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist
