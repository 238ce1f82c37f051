"""Time-domain integration of the mass-spring network, consensus detection,
witness-orbit seeding, and the physical invariants (energy, momentum).

Fixed-step classical RK4 on the linear state space z = (p, q).  The step
guard ties dt to the fastest spring mode so energy drift stays a visible,
testable quantity instead of an integrator artifact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graphs import DampingGraph, SystemParams, incidence, laplacian, validate_params
from .spectral import KernelWitness, equilibrium_beta


class StepTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class Trajectory:
    """Sampled state/output history on a fixed time grid."""

    t: np.ndarray
    p: np.ndarray
    q: np.ndarray
    y: np.ndarray
    dt: float
    horizon: float


def _float_params(g: DampingGraph, params: SystemParams):
    m = np.array([float(x) for x in params.mass])
    r = np.array([float(x) for x in params.damping])
    w = np.array([float(x) for x in params.stiffness])
    v = np.array([float(x) for x in params.force])
    b = np.array(incidence(g), dtype=float)
    return m, r, w, v, b


def _max_frequency(g: DampingGraph, params: SystemParams) -> float:
    lap = laplacian(g, params.stiffness)
    lap_f = np.array([[float(x) for x in row] for row in lap])
    m_inv_sqrt = np.diag([1.0 / np.sqrt(float(x)) for x in params.mass])
    sym = m_inv_sqrt @ lap_f @ m_inv_sqrt
    lam = float(np.max(np.linalg.eigvalsh((sym + sym.T) / 2.0))) if g.n else 0.0
    return float(np.sqrt(max(lam, 0.0)))


def simulate(
    g: DampingGraph,
    params: SystemParams,
    init: tuple[Sequence[float], Sequence[float]],
    dt: float,
    horizon: float,
) -> Trajectory:
    """Integrate z' = A z + G v from (p0, q0) with classical RK4.

    Raises StepTooLargeError when dt would under-resolve the fastest mode
    (dt > 0.1 / sqrt(lambda_max(M^-1 L))).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if horizon < dt:
        raise ValueError("horizon must be at least one step")
    validate_params(g, params)
    omega = _max_frequency(g, params)
    if omega > 0 and dt > 0.1 / omega:
        raise StepTooLargeError(
            f"dt={dt} too large for fastest mode {omega:.4g} rad/s (max {0.1 / omega:.4g})"
        )
    m, r, w, v, b = _float_params(g, params)
    n, msize = g.n, g.m
    a = np.zeros((n + msize, n + msize))
    a[:n, :n] = -np.diag(r / m)
    a[:n, n:] = -(b * w)
    a[n:, :n] = b.T / m
    gv = np.concatenate([v, np.zeros(msize)])

    p0, q0 = init
    z = np.concatenate([np.asarray(p0, dtype=float), np.asarray(q0, dtype=float)])
    if z.shape != (n + msize,):
        raise ValueError("initial state dimensions do not match the graph")
    steps = int(np.floor(horizon / dt + 1e-12))
    out = np.empty((steps + 1, n + msize))
    out[0] = z
    for s in range(steps):
        k1 = a @ z + gv
        k2 = a @ (z + 0.5 * dt * k1) + gv
        k3 = a @ (z + 0.5 * dt * k2) + gv
        k4 = a @ (z + dt * k3) + gv
        z = z + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out[s + 1] = z
    t = np.arange(steps + 1) * dt
    p = out[:, :n]
    q = out[:, n:]
    y = p / m
    return Trajectory(t=t, p=p, q=q, y=y, dt=dt, horizon=horizon)


def equilibrium_state(g: DampingGraph, params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """Unique equilibrium (p_bar, q_bar) with q restricted to im(B^T)."""
    m, r, w, v, b = _float_params(g, params)
    beta = float(equilibrium_beta(params))
    p_bar = m * beta
    rhs = v - r * beta
    lap = (b * w) @ b.T
    s, *_ = np.linalg.lstsq(lap, rhs, rcond=None)
    q_bar = b.T @ s
    return p_bar, q_bar


def shifted_energy(
    g: DampingGraph,
    params: SystemParams,
    state: tuple[Sequence[float], Sequence[float]],
    equilibrium: tuple[Sequence[float], Sequence[float]],
) -> float:
    """Lyapunov energy of the shifted state: kinetic plus spring potential."""
    m = np.array([float(x) for x in params.mass])
    w = np.array([float(x) for x in params.stiffness])
    dp = np.asarray(state[0], dtype=float) - np.asarray(equilibrium[0], dtype=float)
    dq = np.asarray(state[1], dtype=float) - np.asarray(equilibrium[1], dtype=float)
    return float(0.5 * dp @ (dp / m) + 0.5 * dq @ (w * dq))


def energy_series(g: DampingGraph, params: SystemParams, traj: Trajectory) -> np.ndarray:
    eq = equilibrium_state(g, params)
    m = np.array([float(x) for x in params.mass])
    w = np.array([float(x) for x in params.stiffness])
    dp = traj.p - eq[0]
    dq = traj.q - eq[1]
    return 0.5 * np.einsum("ij,ij->i", dp, dp / m) + 0.5 * np.einsum(
        "ij,ij->i", dq, dq * w
    )


def detect_consensus(traj: Trajectory, tol: float) -> tuple[bool, float]:
    """Decide whether the outputs reached consensus by the end of the run.

    True when the final spread around the mean output is below tol and the
    envelope over the last tenth of the run is either already below tol or
    clearly decaying; a flat oscillation envelope fails.  Returns the mean
    final output as the limit.
    """
    y = traj.y
    mean = y.mean(axis=1, keepdims=True)
    spread = np.max(np.abs(y - mean), axis=1)
    limit = float(y[-1].mean())
    window = max(2, len(spread) // 10)
    tail = spread[-window:]
    if spread[-1] >= tol:
        return False, limit
    if np.max(tail) < tol:
        return True, limit
    blocks = np.array_split(tail, min(5, len(tail)))
    maxima = [float(np.max(b)) for b in blocks]
    decaying = maxima[-1] <= 0.99 * maxima[0]
    return bool(decaying), limit


def steady_state_init(
    g: DampingGraph, witness: KernelWitness, amplitude: float
) -> tuple[np.ndarray, np.ndarray]:
    """Initial state on the witness steady-state orbit: momenta follow the
    kernel vector scaled by the masses, elongations sit at equilibrium."""
    m = np.array([float(x) for x in witness.params.mass])
    v = np.array(witness.vector, dtype=float)
    p0 = amplitude * m * v
    _, q_bar = equilibrium_state(g, witness.params)
    return p0, q_bar


def momentum_series(g: DampingGraph, params: SystemParams, traj: Trajectory) -> np.ndarray:
    """Sum over undamped nodes of the shifted momentum at each sample."""
    beta = float(equilibrium_beta(params))
    m = np.array([float(x) for x in params.mass])
    undamped = list(g.undamped)
    shifted = traj.p - m * beta
    return shifted[:, undamped].sum(axis=1)


def zero_crossing_period(t: np.ndarray, series: np.ndarray) -> float:
    """Oscillation period from linearly interpolated zero crossings of the
    mean-centered series (two crossings per period)."""
    x = series - series.mean()
    sign = np.sign(x)
    crossings = []
    for i in range(1, len(x)):
        if sign[i - 1] != 0 and sign[i] != 0 and sign[i] != sign[i - 1]:
            frac = x[i - 1] / (x[i - 1] - x[i])
            crossings.append(t[i - 1] + frac * (t[i] - t[i - 1]))
    if len(crossings) < 3:
        raise ValueError("not enough zero crossings to estimate a period")
    gaps = np.diff(crossings)
    return float(2.0 * gaps.mean())


def write_traces_svg(
    path: str,
    traj: Trajectory,
    colors: Sequence[str] | None = None,
    width: int = 900,
    height: int = 420,
) -> None:
    """Velocity traces as a standalone SVG (one polyline per node)."""
    y = traj.y
    t = traj.t
    pad = 40
    y_min, y_max = float(y.min()), float(y.max())
    if y_max - y_min < 1e-12:
        y_max = y_min + 1.0
    sx = (width - 2 * pad) / (t[-1] - t[0] if t[-1] > t[0] else 1.0)
    sy = (height - 2 * pad) / (y_max - y_min)
    if colors is None:
        palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"]
        colors = [palette[i % len(palette)] for i in range(y.shape[1])]
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
    ]
    step = max(1, len(t) // 2000)
    for node in range(y.shape[1]):
        pts = " ".join(
            f"{pad + (t[i] - t[0]) * sx:.2f},{height - pad - (y[i, node] - y_min) * sy:.2f}"
            for i in range(0, len(t), step)
        )
        lines.append(
            f'<polyline points="{pts}" fill="none" stroke="{colors[node]}" stroke-width="1"/>'
        )
    lines.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
