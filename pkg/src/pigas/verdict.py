"""The top-level decision object shared by the deciders and the CLI."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .coloring import Coloring
from .zero_forcing import ForcingLog

if TYPE_CHECKING:
    from .spectral import KernelWitness


class Decision(enum.Enum):
    PIGAS = "PIGAS"
    NOT_PIGAS = "NotPIGAS"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Verdict:
    """PI-GAS decision plus its certificate.

    NotPIGAS always carries a richly balanced coloring of the original graph;
    the kernel witness and mode frequency are attached when the parameter
    synthesis has been run.  PIGAS decided by the zero-forcing fast path
    carries the full forcing chain.
    """

    decision: Decision
    method: str
    coloring: Coloring | None = None
    witness: "KernelWitness | None" = None
    frequency: float | None = None
    forcing_log: ForcingLog | None = None
    elapsed_ms: float = 0.0

    @property
    def is_pigas(self) -> bool:
        return self.decision is Decision.PIGAS
