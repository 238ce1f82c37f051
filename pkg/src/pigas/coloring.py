"""Richly balanced colorings: balance classification, the brute-force oracle,
the uncolorable set, sign-vector tests, and the coloring-to-kernel-vector
bridge.

A coloring assigns each node one of black/red/blue; white marks "not decided
yet" and only appears inside the chord-node-coloring propagation.  A complete
coloring is richly balanced when no black node sees exactly one of the two
colors among its neighbors and at least one node is not black.  Existence of
such a coloring is exactly what rules out parameter-independent stability.
"""

from __future__ import annotations

import enum
from typing import Iterable, Sequence

import numpy as np

from .graphs import DampingGraph


class Color(enum.Enum):
    BLACK = "black"
    RED = "red"
    BLUE = "blue"
    WHITE = "white"


BLACK, RED, BLUE, WHITE = Color.BLACK, Color.RED, Color.BLUE, Color.WHITE

Coloring = tuple[Color, ...]


class BalanceClass(enum.Enum):
    POORLY_BALANCED = "poorly balanced"
    RICHLY_BALANCED = "richly balanced"
    UNBALANCED = "unbalanced"
    POORLY_INDEFINITE = "poorly indefinite"
    RICHLY_INDEFINITE = "richly indefinite"
    BLACK_FORCING = "black-forcing"
    COLOR_FORCING = "color-forcing"


class NotBlackError(ValueError):
    pass


class IncompleteColoringError(ValueError):
    pass


class NotRichlyBalancedError(ValueError):
    pass


class SearchTooLargeError(ValueError):
    pass


def classify_black(g: DampingGraph, c: Sequence[Color], i: int) -> BalanceClass:
    """Classify a black node by its neighbor color counts.

    The white-aware classes subsume the complete-coloring ones: on colorings
    without white nodes only POORLY_BALANCED / RICHLY_BALANCED / UNBALANCED
    can come back.
    """
    if c[i] is not BLACK:
        raise NotBlackError(f"node {i} is {c[i].value}, not black")
    n_white = n_blue = n_red = 0
    for j in g.neighbors[i]:
        col = c[j]
        if col is WHITE:
            n_white += 1
        elif col is BLUE:
            n_blue += 1
        elif col is RED:
            n_red += 1
    if n_blue >= 1 and n_red >= 1:
        return BalanceClass.RICHLY_BALANCED
    one_sided = (n_blue >= 1) != (n_red >= 1)
    if n_white == 0:
        return BalanceClass.UNBALANCED if one_sided else BalanceClass.POORLY_BALANCED
    if n_white == 1:
        return BalanceClass.COLOR_FORCING if one_sided else BalanceClass.BLACK_FORCING
    return BalanceClass.RICHLY_INDEFINITE if one_sided else BalanceClass.POORLY_INDEFINITE


def is_balanced_complete(g: DampingGraph, c: Sequence[Color]) -> bool:
    """A complete coloring is balanced when it has no unbalanced black node."""
    _require_complete(g, c)
    return all(
        classify_black(g, c, i) is not BalanceClass.UNBALANCED
        for i in range(g.n)
        if c[i] is BLACK
    )


def is_richly_balanced(g: DampingGraph, c: Sequence[Color]) -> bool:
    """True when the complete coloring is balanced and not entirely black.

    Two equivalent formulations are evaluated and cross-checked: "no
    unbalanced black node and at least one richly balanced black node" and
    "no unbalanced black node and at least one non-black node".
    """
    _require_complete(g, c)
    classes = [classify_black(g, c, i) if c[i] is BLACK else None for i in range(g.n)]
    balanced = all(cl is not BalanceClass.UNBALANCED for cl in classes if cl is not None)
    has_rich = any(cl is BalanceClass.RICHLY_BALANCED for cl in classes)
    has_colored = any(col is not BLACK for col in c)
    a = balanced and has_rich
    b = balanced and has_colored
    assert a == b, "rich-balance formulations disagree (connected-graph invariant broken)"
    return a


def _require_complete(g: DampingGraph, c: Sequence[Color]) -> None:
    if len(c) != g.n:
        raise ValueError(f"coloring has {len(c)} entries for {g.n} nodes")
    if any(col is WHITE for col in c):
        raise IncompleteColoringError("coloring contains white nodes")
    for i in g.damped:
        if c[i] is not BLACK:
            raise ValueError(f"damped node {i} is {c[i].value}, must be black")


# Digit encoding for the enumeration: 0=black, 1=blue, 2=red, most significant
# digit = lowest undamped node id, so ascending index is ascending
# lexicographic order with Black < Blue < Red.
_DIGIT_COLOR = (BLACK, BLUE, RED)

_CHUNK = 3**10


def _adjacency(g: DampingGraph) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=np.int8)
    for i, j in g.edges:
        a[i, j] = 1
        a[j, i] = 1
    return a


def _digit_block(offset: int, count: int, k: int) -> np.ndarray:
    """Rows offset..offset+count-1 of the base-3 digit table with k digits."""
    idx = np.arange(offset, offset + count, dtype=np.int64)
    digits = np.empty((count, k), dtype=np.int8)
    for pos in range(k):
        digits[:, pos] = (idx // 3 ** (k - 1 - pos)) % 3
    return digits


def _sign_block(g: DampingGraph, digits: np.ndarray) -> np.ndarray:
    """Expand undamped digit rows to full per-node sign rows (+1 red, -1 blue)."""
    signs = np.zeros((digits.shape[0], g.n), dtype=np.int8)
    cols = np.fromiter(g.undamped, dtype=np.int64, count=len(g.undamped))
    if cols.size:
        signs[:, cols] = np.where(digits == 2, 1, np.where(digits == 1, -1, 0))
    return signs


def _balanced_mask(adj: np.ndarray, signs: np.ndarray) -> np.ndarray:
    pos = ((signs > 0).astype(np.int16) @ adj) > 0
    neg = ((signs < 0).astype(np.int16) @ adj) > 0
    bad = (signs == 0) & (pos != neg)
    return ~bad.any(axis=1)


def _guard(g: DampingGraph, limit: int) -> int:
    k = len(g.undamped)
    if k > limit:
        raise SearchTooLargeError(
            f"{k} undamped nodes means 3^{k} colorings; refusing above limit={limit}"
        )
    return k


def brute_force_rbc(g: DampingGraph, limit: int = 20) -> Coloring | None:
    """Search all 3^(n_u) complete colorings for a richly balanced one.

    Returns the first hit in lexicographic order over the undamped-node colors
    (Black < Blue < Red, node ids ascending), or None.  This is the oracle the
    chord node coloring decider is checked against.
    """
    k = _guard(g, limit)
    adj = _adjacency(g)
    total = 3**k
    for offset in range(0, total, _CHUNK):
        count = min(_CHUNK, total - offset)
        digits = _digit_block(offset, count, k)
        signs = _sign_block(g, digits)
        ok = _balanced_mask(adj, signs) & (digits != 0).any(axis=1)
        hits = np.flatnonzero(ok)
        if hits.size:
            return _coloring_from_index(g, offset + int(hits[0]))
    return None


def _coloring_from_index(g: DampingGraph, index: int) -> Coloring:
    colors = [BLACK] * g.n
    for pos, node in enumerate(reversed(g.undamped)):
        colors[node] = _DIGIT_COLOR[index % 3]
        index //= 3
    return tuple(colors)


def uncolorable_set(g: DampingGraph, limit: int = 20) -> frozenset[int]:
    """Nodes that are black in every balanced complete coloring, by enumeration."""
    k = _guard(g, limit)
    adj = _adjacency(g)
    colorable = np.zeros(g.n, dtype=bool)
    total = 3**k
    for offset in range(0, total, _CHUNK):
        count = min(_CHUNK, total - offset)
        signs = _sign_block(g, _digit_block(offset, count, k))
        balanced = _balanced_mask(adj, signs)
        if balanced.any():
            colorable |= (signs[balanced] != 0).any(axis=0)
    return frozenset(np.flatnonzero(~colorable).tolist())


def sign_vector_check(g: DampingGraph, s: Sequence[int]) -> bool:
    """Two-condition oscillation test on a sign vector in {-1, 0, +1}^n.

    True when s is nonzero, zero on every damped node, and each zero node has
    a negative neighbor exactly when it has a positive neighbor.
    """
    if len(s) != g.n:
        raise ValueError(f"sign vector has {len(s)} entries for {g.n} nodes")
    if all(x == 0 for x in s):
        return False
    if any(s[i] != 0 for i in g.damped):
        return False
    for i in range(g.n):
        if s[i] == 0:
            has_pos = any(s[j] > 0 for j in g.neighbors[i])
            has_neg = any(s[j] < 0 for j in g.neighbors[i])
            if has_pos != has_neg:
                return False
    return True


def satisfies_kernel_conditions(g: DampingGraph, v: Sequence[int]) -> bool:
    """Full four-condition membership test for the parameter-free kernel class.

    Beyond the sign test, positive entries need a strictly smaller neighbor
    and negative entries a strictly larger one.
    """
    if len(v) != g.n:
        raise ValueError(f"vector has {len(v)} entries for {g.n} nodes")
    if any(v[i] != 0 for i in g.damped):
        return False
    for i in range(g.n):
        vi = v[i]
        nb = g.neighbors[i]
        if vi == 0:
            if any(v[j] > 0 for j in nb) != any(v[j] < 0 for j in nb):
                return False
        elif vi > 0:
            if not any(v[j] < vi for j in nb):
                return False
        else:
            if not any(v[j] > vi for j in nb):
                return False
    return True


def coloring_to_vector(g: DampingGraph, c: Sequence[Color]) -> tuple[int, ...]:
    """Integer kernel vector from a richly balanced coloring.

    Black nodes map to 0 and colored nodes to +/- their hop distance to the
    nearest black node (red positive, blue negative).  The result always
    satisfies all four kernel-class conditions, which is asserted.
    """
    if not is_richly_balanced(g, c):
        raise NotRichlyBalancedError("coloring is not richly balanced")
    from .graphs import bfs_distances

    black_nodes = [i for i in range(g.n) if c[i] is BLACK]
    dist = bfs_distances(g, black_nodes)
    v = []
    for i in range(g.n):
        if c[i] is BLACK:
            v.append(0)
        elif c[i] is RED:
            v.append(dist[i])
        else:
            v.append(-dist[i])
    out = tuple(v)
    assert satisfies_kernel_conditions(g, out)
    return out


def vector_to_coloring(g: DampingGraph, v: Sequence[int]) -> Coloring:
    """Sign pattern of a vector as a coloring (0 black, >0 red, <0 blue)."""
    return tuple(BLACK if x == 0 else RED if x > 0 else BLUE for x in v)


def swap_red_blue(c: Iterable[Color]) -> Coloring:
    return tuple(BLUE if col is RED else RED if col is BLUE else col for col in c)
