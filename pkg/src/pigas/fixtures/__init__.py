"""Shipped example graphs, reconstructed from published figure data.

These are test inputs; coordinates were never part of the data, only
topology and the damped sets.
"""

from __future__ import annotations

from importlib import resources

from ..graphs import DampingGraph, SystemParams
from ..serialize import loads_graph

FIXTURE_NAMES = ("fig1_sat", "fig2_6cycle", "fig2_8cycle", "fig3", "fig6")


def load_fixture(name: str) -> tuple[DampingGraph, SystemParams | None]:
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; available: {FIXTURE_NAMES}")
    text = resources.files(__package__).joinpath(f"{name}.json").read_text("utf-8")
    return loads_graph(text)


def load_fixture_text(filename: str) -> str:
    return resources.files(__package__).joinpath(filename).read_text("utf-8")
