"""Zero forcing: the sufficient-condition fast path for PI-GAS.

Starting from the damped nodes colored black, a black node with exactly one
white neighbor forces that neighbor black.  If the fixpoint blackens every
node, the damped set is a zero forcing set and the graph is PI-GAS; on trees
this is also necessary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .graphs import DampingGraph


@dataclass(frozen=True)
class ForcingLog:
    """Ordered (forcer, forced) pairs and the final black set."""

    forces: tuple[tuple[int, int], ...]
    black: frozenset[int]

    def is_zero_forcing(self, g: DampingGraph) -> bool:
        return len(self.black) == g.n


def zero_forcing_run(g: DampingGraph, scan_order: Sequence[int] | None = None) -> ForcingLog:
    """Run the black forcing rule to its fixpoint.

    The default scan order is ascending node id, restarted after every force,
    which makes the log deterministic.  The final black set is independent of
    the order; tests assert that against shuffled orders.
    """
    order = list(range(g.n)) if scan_order is None else list(scan_order)
    black = set(g.damped)
    white_deg = [0] * g.n
    for i in range(g.n):
        white_deg[i] = sum(1 for j in g.neighbors[i] if j not in black)
    forces: list[tuple[int, int]] = []
    progress = True
    while progress:
        progress = False
        for b in order:
            if b in black and white_deg[b] == 1:
                w = next(j for j in g.neighbors[b] if j not in black)
                black.add(w)
                for j in g.neighbors[w]:
                    white_deg[j] -= 1
                forces.append((b, w))
                progress = True
                break
    return ForcingLog(forces=tuple(forces), black=frozenset(black))


def derived_set(g: DampingGraph) -> frozenset[int]:
    """The black set after the zero forcing algorithm terminates."""
    return zero_forcing_run(g).black


def is_zero_forcing_set(g: DampingGraph) -> bool:
    """True iff the damped set forces the whole graph black."""
    return zero_forcing_run(g).is_zero_forcing(g)
