"""Spectral machinery: per-parameter stability verdicts, kernel-class
membership, exact witness parameter synthesis, the reduced observability
pair, and oscillation-mode extraction.

Witness construction is exact rational arithmetic with a zero-residual check;
the float eigensolvers only handle generic spectra and use a relative rank
tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exactlin
from .coloring import satisfies_kernel_conditions
from .graphs import (
    DampingGraph,
    SingularBlockError,
    SystemParams,
    kron_reduce,
    laplacian,
    validate_params,
)

RANK_RTOL = 1e-9


class AllUndampedError(ValueError):
    pass


class NotInKernelClassError(ValueError):
    pass


@dataclass(frozen=True)
class KernelWitness:
    """Exact parameter realization that oscillates at angular frequency 1.

    The vector is zero on damped nodes and satisfies
    (B diag(w) B^T - diag(m)) v = 0 exactly for the stored rational masses
    and stiffnesses; damping is the nominal one (1 on damped, 0 elsewhere).
    """

    vector: tuple[int, ...]
    params: SystemParams
    frequency: float = 1.0


@dataclass(frozen=True)
class ObservabilityPair:
    """Reduced dynamics and augmented output whose unobservable subspace is
    the steady-state invariant set; dimension 0 means consensus."""

    a_hat: np.ndarray
    c_hat: np.ndarray
    unobservable_dim: int


def equilibrium_beta(params: SystemParams) -> Fraction:
    """Consensus velocity: total constant force over total damping."""
    total_r = sum(params.damping, start=Fraction(0))
    if total_r == 0:
        raise AllUndampedError("no damped node: equilibrium velocity undefined")
    return sum(params.force, start=Fraction(0)) / total_r

def kernel_membership(g: DampingGraph, v: Sequence[int]) -> bool:
    """Membership in the parameter-free kernel class (four conditions):
    zero on damped nodes, zero nodes have positive neighbors iff negative
    ones, positive entries have a strictly smaller neighbor, negative entries
    a strictly larger one."""
    return satisfies_kernel_conditions(g, v)


def witness_params(g: DampingGraph, v: Sequence[int]) -> KernelWitness:
    """Exact (m, w) with (B diag(w) B^T - diag(m)) v = 0 for a kernel-class
    vector.

    Nodes are processed by ascending |v_i| (ties by id).  Each node assigns
    weights to its not-yet-assigned incident edges: for v_i = 0 the positive
    and negative sides each get total weight share 1; otherwise, with
    eps_i the already-fixed part of the row sum, the side moving toward zero
    gets share 2 (or |eps_i|/2) and the side moving away gets 1 (or
    |eps_i|/2).  Masses then solve each row exactly; positivity and the zero
    residual are verified before returning.
    """
    v = [int(x) for x in v]
    if all(x == 0 for x in v):
        raise NotInKernelClassError("zero vector is not a witness")
    if not satisfies_kernel_conditions(g, v):
        raise NotInKernelClassError("vector fails the kernel-class conditions")

    edge_index = {e: k for k, e in enumerate(g.edges)}
    weights: dict[int, Fraction] = {}
    order = sorted(range(g.n), key=lambda i: (abs(v[i]), i))

    for i in order:
        vi = v[i]
        # Fixed contribution of already-assigned edges to row i.
        eps = Fraction(0)
        plus: list[int] = []
        minus: list[int] = []
        for j in g.neighbors[i]:
            k = edge_index[(min(i, j), max(i, j))]
            if v[j] == vi:
                if k not in weights:
                    weights[k] = Fraction(1)
                continue
            if k in weights:
                eps += (vi - v[j]) * weights[k]
            elif v[j] > vi:
                plus.append(k)
            else:
                minus.append(k)
        if vi == 0:
            plus_share = Fraction(1)
            minus_share = Fraction(1)
        elif eps == 0:
            # Toward zero weighs double so the row lands on sign(v_i)*{1,2}.
            plus_share = Fraction(1) if vi > 0 else Fraction(2)
            minus_share = Fraction(2) if vi > 0 else Fraction(1)
        else:
            plus_share = abs(eps) / 2
            minus_share = abs(eps) / 2
        for k in plus:
            i0, j0 = g.edges[k]
            other = j0 if i0 == i else i0
            weights[k] = plus_share / (abs(vi - v[other]) * len(plus))
        for k in minus:
            i0, j0 = g.edges[k]
            other = j0 if i0 == i else i0
            weights[k] = minus_share / (abs(vi - v[other]) * len(minus))

    w = [weights.get(k, Fraction(1)) for k in range(g.m)]
    lap = laplacian(g, w)
    lv = exactlin.matvec(lap, [Fraction(x) for x in v])
    masses: list[Fraction] = []
    for i in range(g.n):
        if v[i] == 0:
            if lv[i] != 0:
                raise NotInKernelClassError(
                    f"row {i} does not balance: construction failed for this vector"
                )
            masses.append(Fraction(1))
        else:
            mi = lv[i] / v[i]
            if mi <= 0:
                raise NotInKernelClassError(
                    f"row {i} yields nonpositive mass {mi}: construction failed"
                )
            masses.append(mi)
    params = SystemParams(
        mass=tuple(masses),
        damping=tuple(Fraction(1) if i in g.damped else Fraction(0) for i in range(g.n)),
        stiffness=tuple(w),
        force=tuple(Fraction(0) for _ in range(g.n)),
    )
    # Zero-residual check of (L - M) v = 0.
    for i in range(g.n):
        assert lv[i] == masses[i] * v[i], "witness kernel identity violated"
    return KernelWitness(vector=tuple(v), params=params, frequency=1.0)


def _mass_scaled_spectrum(g: DampingGraph, params: SystemParams):
    """Eigen-decomposition of M^(-1/2) L M^(-1/2); returns (values, vectors)."""
    lap = laplacian(g, params.stiffness)
    lap_f = np.array([[float(x) for x in row] for row in lap], dtype=float)
    m_inv_sqrt = np.diag([1.0 / np.sqrt(float(mi)) for mi in params.mass])
    sym = m_inv_sqrt @ lap_f @ m_inv_sqrt
    sym = (sym + sym.T) / 2.0
    vals, vecs = np.linalg.eigh(sym)
    return vals, vecs


def _eigen_groups(vals: np.ndarray, rtol: float = 1e-8) -> list[tuple[int, int]]:
    """Index ranges of (numerically) repeated eigenvalues in the sorted list."""
    if vals.size == 0:
        return []
    scale = max(1.0, float(np.max(np.abs(vals))))
    groups = []
    start = 0
    for i in range(1, len(vals)):
        if vals[i] - vals[i - 1] > rtol * scale:
            groups.append((start, i))
            start = i
    groups.append((start, len(vals)))
    return groups


def _rank(mat: np.ndarray, rtol: float = RANK_RTOL) -> int:
    if mat.size == 0:
        return 0
    sv = np.linalg.svd(mat, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def stability_given_params(g: DampingGraph, params: SystemParams) -> bool:
    """Per-parameter consensus test.

    True iff no eigenvector of M^-1 L is simultaneously damping-free and
    supported on the undamped nodes, checked per eigenvalue group by a rank
    test on the damped rows of an orthonormal eigenspace basis.
    """
    validate_params(g, params)
    if not g.undamped:
        return True
    vals, vecs = _mass_scaled_spectrum(g, params)
    damped_rows = sorted(g.damped)
    for lo, hi in _eigen_groups(vals):
        basis = vecs[:, lo:hi]
        sub = basis[damped_rows, :]
        if _rank(sub) < hi - lo:
            return False
    return True


def oscillation_modes(
    g: DampingGraph, params: SystemParams
) -> list[tuple[float, np.ndarray]]:
    """Persistent modes: (angular frequency, mode vector over undamped nodes).

    One entry per independent eigenvector of M^-1 L that lies in the kernel of
    R and is supported on the undamped nodes; empty exactly when
    stability_given_params is true.
    """
    validate_params(g, params)
    if not g.undamped:
        return []
    vals, vecs = _mass_scaled_spectrum(g, params)
    damped_rows = sorted(g.damped)
    undamped_rows = list(g.undamped)
    m_inv_sqrt = np.array([1.0 / np.sqrt(float(mi)) for mi in params.mass])
    modes: list[tuple[float, np.ndarray]] = []
    scale = max(1.0, float(np.max(np.abs(vals)))) if vals.size else 1.0
    for lo, hi in _eigen_groups(vals):
        mu = float(np.mean(vals[lo:hi]))
        if mu <= RANK_RTOL * scale:
            continue
        basis = vecs[:, lo:hi]
        sub = basis[damped_rows, :]
        if sub.size == 0:
            null = np.eye(hi - lo)
        else:
            u, sv, vt = np.linalg.svd(sub)
            tol = RANK_RTOL * (sv[0] if sv.size and sv[0] > 0 else 1.0)
            null_mask = np.ones(hi - lo, dtype=bool)
            null_mask[: sv.size] = sv <= tol
            null = vt.T[:, null_mask]
        for col in range(null.shape[1]):
            x = m_inv_sqrt * (basis @ null[:, col])
            x[damped_rows] = 0.0
            mode = x[undamped_rows]
            norm = np.linalg.norm(mode)
            if norm > 0:
                mode = mode / norm
                if mode[np.argmax(np.abs(mode))] < 0:
                    mode = -mode
            modes.append((float(np.sqrt(mu)), mode))
    return modes


def _laplacian_blocks(g: DampingGraph, params: SystemParams):
    lap = laplacian(g, params.stiffness)
    d = sorted(g.damped)
    u = list(g.undamped)
    l_du = exactlin.submatrix(lap, d, u)
    reduced = kron_reduce(lap, g.damped)
    return lap, d, u, l_du, reduced


def build_observability(g: DampingGraph, params: SystemParams) -> ObservabilityPair:
    """Assemble the Kron-reduced pair and its unobservable dimension.

    State order is (velocities, positions) of the undamped nodes; outputs
    stack the damped-interconnection block, the undamped damping block, and
    the momentum row.
    """
    validate_params(g, params)
    n_u = len(g.undamped)
    if n_u == 0:
        return ObservabilityPair(
            a_hat=np.zeros((0, 0)), c_hat=np.zeros((0, 0)), unobservable_dim=0
        )
    try:
        lap, d, u, l_du, reduced = _laplacian_blocks(g, params)
    except ValueError as exc:
        raise SingularBlockError(str(exc)) from exc
    red_f = np.array([[float(x) for x in row] for row in reduced], dtype=float)
    m_u = np.array([float(params.mass[i]) for i in u])
    a_hat = np.zeros((2 * n_u, 2 * n_u))
    a_hat[:n_u, n_u:] = -(red_f / m_u[:, None])
    a_hat[n_u:, :n_u] = np.eye(n_u)
    n_d = len(d)
    c_hat = np.zeros((n_d + n_u + 1, 2 * n_u))
    c_hat[:n_d, :n_u] = np.array([[float(x) for x in row] for row in l_du])
    c_hat[n_d : n_d + n_u, :n_u] = np.diag([float(params.damping[i]) for i in u])
    c_hat[n_d + n_u, n_u:] = m_u
    obs_blocks = []
    block = c_hat
    for _ in range(2 * n_u):
        obs_blocks.append(block)
        block = block @ a_hat
    obs = np.vstack(obs_blocks)
    dim = 2 * n_u - _rank(obs)
    return ObservabilityPair(a_hat=a_hat, c_hat=c_hat, unobservable_dim=dim)
