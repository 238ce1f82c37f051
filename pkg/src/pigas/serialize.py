"""Canonical JSON and DOT serialization for graphs, parameters and colorings.

Rationals serialize as integers when possible and as "p/q" strings otherwise;
edge pairs are stored (min, max) so a load/dump cycle is byte-stable.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any, Sequence

from .coloring import Color, Coloring
from .exactlin import as_fraction
from .graphs import DampingGraph, SystemParams, build_graph, make_params


class FormatError(ValueError):
    pass


def fraction_to_json(x: Fraction) -> int | str:
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fraction_from_json(x: Any) -> Fraction:
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad rational literal {x!r}") from exc
    if isinstance(x, (int, float)):
        return as_fraction(x)
    raise FormatError(f"cannot read a rational from {x!r}")


def params_to_dict(p: SystemParams) -> dict:
    return {
        "mass": [fraction_to_json(x) for x in p.mass],
        "damping": [fraction_to_json(x) for x in p.damping],
        "stiffness": [fraction_to_json(x) for x in p.stiffness],
        "force": [fraction_to_json(x) for x in p.force],
    }


def params_from_dict(g: DampingGraph, d: dict) -> SystemParams:
    def read(key):
        if key not in d or d[key] is None:
            return None
        return [fraction_from_json(x) for x in d[key]]

    return make_params(
        g,
        mass=read("mass"),
        damping=read("damping"),
        stiffness=read("stiffness"),
        force=read("force"),
    )


def graph_to_dict(g: DampingGraph, params: SystemParams | None = None) -> dict:
    out: dict[str, Any] = {
        "n": g.n,
        "damped": sorted(g.damped),
        "edges": [list(e) for e in g.edges],
    }
    if params is not None:
        out["params"] = params_to_dict(params)
    return out


def graph_from_dict(d: dict) -> tuple[DampingGraph, SystemParams | None]:
    try:
        n = int(d["n"])
        damped = d["damped"]
        edges = d["edges"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"graph object needs n, damped, edges: {exc}") from exc
    g = build_graph(n, damped, edges)
    params = params_from_dict(g, d["params"]) if d.get("params") else None
    return g, params


def dumps_graph(g: DampingGraph, params: SystemParams | None = None) -> str:
    return json.dumps(graph_to_dict(g, params), indent=2) + "\n"


def loads_graph(text: str) -> tuple[DampingGraph, SystemParams | None]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise FormatError("top-level JSON value must be an object")
    return graph_from_dict(data)


def load_graph_file(path: str) -> tuple[DampingGraph, SystemParams | None]:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_graph(fh.read())


def load_params_file(g: DampingGraph, path: str) -> SystemParams:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise FormatError("params file must hold a JSON object")
    return params_from_dict(g, data)


def coloring_to_dict(c: Coloring) -> dict:
    return {"colors": [col.value for col in c]}


def coloring_from_dict(d: dict) -> Coloring:
    try:
        return tuple(Color(name) for name in d["colors"])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad coloring object: {exc}") from exc


# -- DOT round trip ----------------------------------------------------------

_NODE_RE = re.compile(r"^(\d+)\s*(?:\[(.*)\])?;$")
_EDGE_RE = re.compile(r"^(\d+)\s*--\s*(\d+)\s*(?:\[(.*)\])?;$")
_ATTR_RE = re.compile(r'(\w+)="([^"]*)"')


def graph_to_dot(g: DampingGraph, params: SystemParams | None = None) -> str:
    lines = ["graph pigas {"]
    for i in range(g.n):
        attrs = [f'damped="{"true" if i in g.damped else "false"}"']
        if params is not None:
            attrs.append(f'mass="{fraction_to_json(params.mass[i])}"')
            attrs.append(f'damping="{fraction_to_json(params.damping[i])}"')
            attrs.append(f'force="{fraction_to_json(params.force[i])}"')
        lines.append(f"  {i} [{' '.join(attrs)}];")
    for k, (i, j) in enumerate(g.edges):
        if params is not None:
            lines.append(f'  {i} -- {j} [weight="{fraction_to_json(params.stiffness[k])}"];')
        else:
            lines.append(f"  {i} -- {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_from_dot(text: str) -> tuple[DampingGraph, SystemParams | None]:
    nodes: dict[int, dict[str, str]] = {}
    edges: list[tuple[int, int]] = []
    edge_attrs: list[dict[str, str]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(("graph", "}", "//", "#")):
            continue
        em = _EDGE_RE.match(line)
        if em:
            i, j = int(em.group(1)), int(em.group(2))
            edges.append((i, j))
            edge_attrs.append(dict(_ATTR_RE.findall(em.group(3) or "")))
            continue
        nm = _NODE_RE.match(line)
        if nm:
            nodes[int(nm.group(1))] = dict(_ATTR_RE.findall(nm.group(2) or ""))
            continue
        raise FormatError(f"unrecognized DOT line: {line!r}")
    if not nodes:
        raise FormatError("DOT graph declares no nodes")
    n = max(nodes) + 1
    if sorted(nodes) != list(range(n)):
        raise FormatError("DOT node ids must be the contiguous range 0..n-1")
    damped = [i for i, a in nodes.items() if a.get("damped") == "true"]
    g = build_graph(n, damped, edges)
    has_params = any("mass" in a for a in nodes.values())
    params = None
    if has_params:
        params = make_params(
            g,
            mass=[fraction_from_json(nodes[i]["mass"]) for i in range(n)],
            damping=[fraction_from_json(nodes[i]["damping"]) for i in range(n)],
            stiffness=[fraction_from_json(a.get("weight", 1)) for a in edge_attrs],
            force=[fraction_from_json(nodes[i]["force"]) for i in range(n)],
        )
    return g, params


def traj_to_csv(traj, path: str) -> None:
    """CSV columns: t, y_0..y_{n-1}."""
    n = traj.y.shape[1]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t," + ",".join(f"y_{i}" for i in range(n)) + "\n")
        for row in range(len(traj.t)):
            fh.write(
                f"{traj.t[row]:.10g},"
                + ",".join(f"{traj.y[row, i]:.10g}" for i in range(n))
                + "\n"
            )


def modes_to_csv(modes, undamped: Sequence[int], path: str) -> None:
    """CSV columns: frequency, node_id, amplitude (one row per undamped node
    per mode)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("frequency,node_id,amplitude\n")
        for freq, vec in modes:
            for pos, node in enumerate(undamped):
                fh.write(f"{freq:.12g},{node},{vec[pos]:.12g}\n")
