"""Wong's equations: vector field, RK4 trajectories, invariant monitoring, CSV IO.

The equations of motion for a particle with internal charge I in a Yang-Mills
potential A (curvature F, stored half-coefficients) are

    dq_j = p_j,
    dp_k = 2 sum_ij I_i F^i_kj(q) p_j,
    dI_k = - sum_ijs I_i c^i_ks A^s_j(q) p_j,

the Hamiltonian vector field of H = 1/2 sum p^2 under the gauged bracket.
The energy H and the quadratic Casimir of I are conserved along the exact
flow; the integrator logs both so drift diagnoses integration error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import LieAlgebra, quadratic_casimir
from .errors import (
    EmptyTrajectory,
    NonFiniteValue,
    NotAbelian,
    SingularKillingForm,
)
from .gauge import CurvatureField, VectorPotential, curvature
from .reduction import WongState, wong_state


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled flow: times, states, and per-sample invariant values."""

    times: np.ndarray
    states: tuple[WongState, ...]
    energies: np.ndarray
    casimirs: np.ndarray          # NaN when the Casimir is undefined (singular B)
    aborted: bool = False         # True when integration hit non-finite values

    def __len__(self):
        return len(self.times)


def wong_vector_field(L: LieAlgebra, A: VectorPotential, s: WongState):
    """Right-hand side (dq, dp, dI) of Wong's equations at the state s."""
    F = curvature(L, A, s.q)
    dq = np.array(s.p)
    dp = 2.0 * np.einsum("i,ikj,j->k", s.I, F, s.p)
    W = A(s.q).T @ s.p                         # W_s = sum_j A^s_j p_j
    dI = -np.einsum("i,iks,s->k", s.I, L.c, W)
    if not (np.all(np.isfinite(dp)) and np.all(np.isfinite(dI))):
        raise NonFiniteValue("Wong vector field is not finite")
    return dq, dp, dI


def lorentz_field(e: float, F: CurvatureField, s: WongState):
    """Abelian specialization: dq = p, dp_k = 2 e sum_j F_kj p_j, dI = 0."""
    L = F.algebra
    if np.any(L.c):
        raise NotAbelian("lorentz_field requires an abelian algebra")
    Ft = F(s.q)
    dq = np.array(s.p)
    dp = 2.0 * float(e) * np.einsum("kj,j->k", Ft[0], s.p)
    if not np.all(np.isfinite(dp)):
        raise NonFiniteValue("Lorentz force is not finite")
    return dq, dp


def _casimir_or_nan(L: LieAlgebra, I) -> float:
    try:
        return quadratic_casimir(L, I)
    except SingularKillingForm:
        return float("nan")


def integrate_wong(
    L: LieAlgebra,
    A: VectorPotential,
    s0: WongState,
    dt: float,
    steps: int,
    method: str = "rk4",
) -> Trajectory:
    """Classical fixed-step RK4 sampling of the Wong flow.

    On numerical blow-up (any non-finite component) the partial trajectory is
    returned with ``aborted=True`` so diagnostics stay inspectable.
    """
    if method != "rk4":
        raise ValueError(f"unsupported integrator {method!r}")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if dt == 0.0:
        raise ValueError("dt must be nonzero")
    n = len(s0.q)
    dim = L.dim

    def rhs(y):
        s = WongState(y[:n], y[n : 2 * n], y[2 * n :])
        F = curvature(L, A, s.q)
        dp = 2.0 * np.einsum("i,ikj,j->k", s.I, F, s.p)
        W = A(s.q).T @ s.p
        dI = -np.einsum("i,iks,s->k", s.I, L.c, W)
        return np.concatenate([s.p, dp, dI])

    y = np.concatenate([s0.q, s0.p, s0.I]).astype(float)
    times = [0.0]
    states = [s0]
    aborted = False
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, steps + 1):
            try:
                k1 = rhs(y)
                k2 = rhs(y + 0.5 * dt * k1)
                k3 = rhs(y + 0.5 * dt * k2)
                k4 = rhs(y + dt * k3)
            except NonFiniteValue:
                aborted = True
                break
            y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(y)):
                aborted = True
                break
            times.append(k * dt)
            states.append(WongState(y[:n].copy(), y[n : 2 * n].copy(), y[2 * n :].copy()))
    energies = np.array([0.5 * float(s.p @ s.p) for s in states])
    casimirs = np.array([_casimir_or_nan(L, s.I) for s in states])
    return Trajectory(
        times=np.array(times),
        states=tuple(states),
        energies=energies,
        casimirs=casimirs,
        aborted=aborted,
    )


@dataclass(frozen=True)
class InvariantReport:
    h_max_drift: float
    h_mean_drift: float
    casimir_max_drift: float
    casimir_mean_drift: float
    h_tolerance: float
    casimir_tolerance: float
    passed: bool


def _relative_drift(values: np.ndarray) -> np.ndarray:
    v0 = values[0]
    if np.isnan(v0):
        return np.zeros(len(values))
    denom = abs(v0) if abs(v0) > 0 else 1.0
    return np.abs(values - v0) / denom


def invariant_report(
    traj: Trajectory, h_tol: float = 1e-8, casimir_tol: float = 1e-7
) -> InvariantReport:
    """Max and mean relative drift of H and the Casimir against thresholds."""
    if len(traj) == 0:
        raise EmptyTrajectory("trajectory has no samples")
    hd = _relative_drift(traj.energies)
    cd = _relative_drift(traj.casimirs)
    report = InvariantReport(
        h_max_drift=float(np.max(hd)),
        h_mean_drift=float(np.mean(hd)),
        casimir_max_drift=float(np.max(cd)),
        casimir_mean_drift=float(np.mean(cd)),
        h_tolerance=h_tol,
        casimir_tolerance=casimir_tol,
        passed=bool(np.max(hd) <= h_tol and np.max(cd) <= casimir_tol and not traj.aborted),
    )
    return report


# ---------------------------------------------------------------------------
# trajectory CSV

def trajectory_header(n: int, dim: int) -> list[str]:
    return (
        ["t"]
        + [f"q{i + 1}" for i in range(n)]
        + [f"p{i + 1}" for i in range(n)]
        + [f"I{i + 1}" for i in range(dim)]
        + ["H", "Casimir"]
    )


def write_trajectory_csv(traj: Trajectory, path):
    """One row per sample; floats use shortest round-trip decimal formatting."""
    if len(traj) == 0:
        raise EmptyTrajectory("nothing to write")
    n = len(traj.states[0].q)
    dim = len(traj.states[0].I)
    with open(path, "w") as fh:
        fh.write(",".join(trajectory_header(n, dim)) + "\n")
        for t, s, h, c in zip(traj.times, traj.states, traj.energies, traj.casimirs):
            row = [t, *s.q, *s.p, *s.I, h, c]
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_trajectory_csv(path):
    """Parse a trajectory CSV back into (header, rows of floats)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [[float(tok) for tok in line.strip().split(",")] for line in fh if line.strip()]
    return header, np.array(rows)
