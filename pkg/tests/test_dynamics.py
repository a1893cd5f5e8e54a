import os
from functools import partial

import numpy as np
import pytest

from liepoisson.dynamics import (
    integrate_wong,
    invariant_report,
    lorentz_field,
    read_trajectory_csv,
    wong_vector_field,
    write_trajectory_csv,
)
from liepoisson.errors import EmptyTrajectory
from liepoisson.gauge import (
    constant_potential,
    curvature,
    curvature_field,
    expression_potential,
    hedgehog_potential,
    shifted_by_gradient,
    uniform_b_potential,
    zero_potential,
)
from liepoisson.poisson import hamiltonian_vector_field
from liepoisson.reduction import gauged_bracket, wong_state


# --- wong_vector_field ---------------------------------------------------------

def test_free_motion(so3, rng):
    A = zero_potential(so3, 3)
    s = wong_state(so3, rng.normal(size=3), rng.normal(size=3), rng.normal(size=3))
    dq, dp, dI = wong_vector_field(so3, A, s)
    assert np.array_equal(dq, s.p)
    assert np.all(dp == 0.0) and np.all(dI == 0.0)


def test_u1_uniform_field_force(u1):
    B, e = 2.0, 1.0
    A = uniform_b_potential(u1, B)
    s = wong_state(u1, [0.0, 0.0], [1.0, 0.0], [e])
    dq, dp, dI = wong_vector_field(u1, A, s)
    assert np.allclose(dq, [1.0, 0.0])
    assert np.allclose(dp, [0.0, -e * B], atol=1e-9)
    assert np.allclose(dI, 0.0)


def test_so3_charge_rotation(so3):
    # A = a dq1 (x) e1, I = xi3, p = e1: dI = a xi2 and no force
    a = 0.6
    A = constant_potential(so3, [[a, 0, 0], [0, 0, 0], [0, 0, 0]])
    s = wong_state(so3, [0.1, 0.2, 0.3], [1.0, 0, 0], [0.0, 0.0, 1.0])
    dq, dp, dI = wong_vector_field(so3, A, s)
    assert np.allclose(dp, 0.0, atol=1e-9)
    assert np.allclose(dI, [0.0, a, 0.0], atol=1e-12)


def test_wong_equals_hamiltonian_field(so3, rng):
    A = hedgehog_potential(so3, 0.3)
    eng = partial(gauged_bracket, so3, A)
    coords = (
        [lambda s, a=a: s.q[a] for a in range(3)]
        + [lambda s, a=a: s.p[a] for a in range(3)]
        + [lambda s, a=a: s.I[a] for a in range(3)]
    )
    H = lambda s: 0.5 * float(s.p @ s.p)
    for _ in range(5):
        s = wong_state(so3, rng.normal(size=3), rng.normal(size=3), rng.normal(size=3))
        gamma = np.concatenate(wong_vector_field(so3, A, s))
        assert np.max(np.abs(gamma - hamiltonian_vector_field(eng, H, s, coords))) < 5e-5


# --- lorentz_field ---------------------------------------------------------------

def test_lorentz_matches_wong_exactly(u1, rng):
    A = uniform_b_potential(u1, 1.4)
    F = curvature_field(u1, A)
    for _ in range(4):
        s = wong_state(u1, rng.normal(size=2), rng.normal(size=2), [rng.normal()])
        dq1, dp1 = lorentz_field(float(s.I[0]), F, s)
        dq2, dp2, dI2 = wong_vector_field(u1, A, s)
        assert np.array_equal(dq1, dq2) and np.array_equal(dp1, dp2)
        assert np.all(dI2 == 0.0)


def test_lorentz_zero_charge(u1, rng):
    F = curvature_field(u1, uniform_b_potential(u1, 1.4))
    s = wong_state(u1, rng.normal(size=2), rng.normal(size=2), [0.0])
    dq, dp = lorentz_field(0.0, F, s)
    assert np.all(dp == 0.0)


def test_lorentz_force_perpendicular(u1, rng):
    # d|p|^2/dt = 2 p . dp = 0 by antisymmetry of F
    F = curvature_field(u1, uniform_b_potential(u1, 0.9))
    for _ in range(4):
        s = wong_state(u1, rng.normal(size=2), rng.normal(size=2), [1.0])
        _, dp = lorentz_field(1.0, F, s)
        assert abs(s.p @ dp) < 1e-12


# --- integrate_wong ---------------------------------------------------------------

def test_free_trajectory_exact(so3, rng):
    s0 = wong_state(so3, rng.normal(size=3), rng.normal(size=3), rng.normal(size=3))
    traj = integrate_wong(so3, zero_potential(so3, 3), s0, 1e-2, 200)
    t_end = traj.times[-1]
    assert np.max(np.abs(traj.states[-1].q - (s0.q + t_end * s0.p))) < 1e-12
    rep = invariant_report(traj)
    assert rep.h_max_drift <= 1e-14
    assert rep.passed


def test_uniform_b_energy_conservation(u1):
    A = uniform_b_potential(u1, 1.0)
    s0 = wong_state(u1, [0, 0], [1.0, 0.0], [1.0])
    traj = integrate_wong(u1, A, s0, 1e-3, 2000)
    rep = invariant_report(traj)
    assert rep.h_max_drift <= 1e-9


def test_hedgehog_casimir_conservation(so3):
    A = hedgehog_potential(so3, 0.2)
    s0 = wong_state(so3, [0.3, -0.1, 0.2], [0.4, 0.3, -0.2], [0.5, 0.1, 0.7])
    traj = integrate_wong(so3, A, s0, 1e-3, 2000)
    rep = invariant_report(traj)
    assert rep.casimir_max_drift <= 1e-9
    assert rep.h_max_drift <= 1e-9


def test_gauge_shift_leaves_trajectory(u1):
    A = uniform_b_potential(u1, 1.0)
    shifted = shifted_by_gradient(A, "0.3*q1**2 - 0.2*q1*q2")
    s0 = wong_state(u1, [0, 0], [1.0, 0.0], [1.0])
    t1 = integrate_wong(u1, A, s0, 1e-3, 1500)
    t2 = integrate_wong(u1, shifted, s0, 1e-3, 1500)
    for a, b in zip(t1.states, t2.states):
        assert np.max(np.abs(a.q - b.q)) < 1e-9
        assert np.max(np.abs(a.p - b.p)) < 1e-9


def test_time_reversal(so3):
    A = hedgehog_potential(so3, 0.2)
    s0 = wong_state(so3, [0.3, -0.1, 0.2], [0.4, 0.3, -0.2], [0.5, 0.1, 0.7])
    fwd = integrate_wong(so3, A, s0, 1e-3, 1500)
    back = integrate_wong(so3, A, fwd.states[-1], -1e-3, 1500)
    end = back.states[-1]
    assert np.max(np.abs(end.q - s0.q)) < 1e-7
    assert np.max(np.abs(end.p - s0.p)) < 1e-7
    assert np.max(np.abs(end.I - s0.I)) < 1e-7


def test_blowup_flags_partial_trajectory(u1):
    A = expression_potential(u1, 2, [[1, 2, "q1**5"]])
    s0 = wong_state(u1, [3.0, 0.0], [3.0, 0.5], [1.0])
    traj = integrate_wong(u1, A, s0, 5.0, 100)
    assert traj.aborted
    assert 1 <= len(traj) < 101
    assert all(np.all(np.isfinite(s.q)) for s in traj.states)


# --- invariant_report ----------------------------------------------------------------

def test_report_constant_state(so3):
    s0 = wong_state(so3, [0.1, 0.2, 0.3], [0, 0, 0], [0.5, 0.1, 0.7])
    traj = integrate_wong(so3, zero_potential(so3, 3), s0, 1e-2, 50)
    rep = invariant_report(traj)
    assert rep.h_max_drift == 0.0 and rep.casimir_max_drift == 0.0


def test_report_flags_large_dt(u1):
    A = uniform_b_potential(u1, 1.0)
    s0 = wong_state(u1, [0, 0], [1.0, 0.0], [1.0])
    traj = integrate_wong(u1, A, s0, 0.5, 200)
    rep = invariant_report(traj, 1e-8, 1e-7)
    assert rep.h_max_drift > 1e-8
    assert not rep.passed


def test_report_empty():
    from liepoisson.dynamics import Trajectory

    empty = Trajectory(times=np.array([]), states=(), energies=np.array([]),
                       casimirs=np.array([]))
    with pytest.raises(EmptyTrajectory):
        invariant_report(empty)


# --- CSV -------------------------------------------------------------------------------

def test_csv_roundtrip_bit_exact(so3, tmp_path):
    A = hedgehog_potential(so3, 0.2)
    s0 = wong_state(so3, [0.3, -0.1, 0.2], [0.4, 0.3, -0.2], [0.5, 0.1, 0.7])
    traj = integrate_wong(so3, A, s0, 1e-3, 50)
    path = os.path.join(tmp_path, "traj.csv")
    write_trajectory_csv(traj, path)
    header, rows = read_trajectory_csv(path)
    assert header == ["t", "q1", "q2", "q3", "p1", "p2", "p3", "I1", "I2", "I3", "H", "Casimir"]
    orig = np.array(
        [[t, *s.q, *s.p, *s.I, h, c]
         for t, s, h, c in zip(traj.times, traj.states, traj.energies, traj.casimirs)]
    )
    assert np.array_equal(rows, orig)


def test_csv_u1_casimir_nan(u1, tmp_path):
    A = uniform_b_potential(u1, 1.0)
    s0 = wong_state(u1, [0, 0], [1.0, 0.0], [1.0])
    traj = integrate_wong(u1, A, s0, 1e-3, 10)
    path = os.path.join(tmp_path, "traj.csv")
    write_trajectory_csv(traj, path)
    header, rows = read_trajectory_csv(path)
    assert np.all(np.isnan(rows[:, -1]))
    assert np.array_equal(rows[:, :-1],
                          np.array([[t, *s.q, *s.p, *s.I, h]
                                    for t, s, h in zip(traj.times, traj.states, traj.energies)]))
