"""Unit tests for the IMEX time stepper and the run driver."""

import numpy as np
import pytest

from allspeed.diagnostics import divergence_l1
from allspeed.integrator import Controls, kinetic_energy, run, step
from allspeed.scenarios import init_gresho, init_isothermal_equilibrium
from allspeed.state import Grid, Scaling, conserved, fill_conserved_ghosts


# ---------------------------------------------------------------------------
# well-balancing
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("order", [1, 2])
def test_hydrostatic_equilibrium_is_bitwise_stationary(order):
    st = init_isothermal_equilibrium(n=8, mach=1e-2, order=order)
    w, info = step(st.w0, st.eq, st.grid, st.bcs, st.scaling,
                   ctl=st.controls)
    assert info.dt > 0.0
    itr = (slice(None),) + st.grid.interior
    assert np.array_equal(w[itr], st.w0[itr])


def test_hydrostatic_low_mach_is_bitwise_stationary():
    # the stiff 1/M^2 terms must not wake the equilibrium up either
    st = init_isothermal_equilibrium(n=8, mach=1e-4, order=2)
    w = st.w0
    for k in range(3):
        w, info = step(w, st.eq, st.grid, st.bcs, st.scaling,
                       ctl=st.controls, step_index=k)
    itr = (slice(None),) + st.grid.interior
    assert np.array_equal(w[itr], st.w0[itr])


# ---------------------------------------------------------------------------
# stepping mechanics
# ---------------------------------------------------------------------------

def test_zero_cap_returns_state_unchanged():
    st = init_isothermal_equilibrium(n=6)
    w, info = step(st.w0, st.eq, st.grid, st.bcs, st.scaling,
                   ctl=st.controls, dt_cap=0.0)
    assert info.dt == 0.0
    assert np.array_equal(w, st.w0)


def test_dt_and_speed_are_mach_independent():
    # identical non-dimensional vortex fields at M = 1e-2 and 1e-4 produce
    # bitwise-equal time step and relaxation speed
    infos = {}
    for mach in (1e-2, 1e-4):
        st = init_gresho(n=12, mach=mach)
        _, infos[mach] = step(st.w0, st.eq, st.grid, st.bcs, st.scaling,
                              ctl=st.controls)
    assert infos[1e-2].dt == infos[1e-4].dt
    assert infos[1e-2].a == infos[1e-4].a


def test_divergence_production_is_mach_independent():
    # the velocity divergence created per unit time from the (discretely not
    # divergence-free) vortex must not degrade as M drops
    rate = {}
    for mach in (1e-3, 1e-4):
        st = init_gresho(n=12, mach=mach)
        w, info = step(st.w0, st.eq, st.grid, st.bcs, st.scaling,
                       ctl=st.controls)
        fill_conserved_ghosts(w, st.grid, st.bcs, st.eq, st.scaling)
        fill_conserved_ghosts(st.w0, st.grid, st.bcs, st.eq, st.scaling)
        d1 = divergence_l1(w, st.grid)
        d0 = divergence_l1(st.w0, st.grid)
        rate[mach] = abs(d1 - d0) / info.dt
    assert rate[1e-3] == pytest.approx(rate[1e-4], rel=0.1)


# ---------------------------------------------------------------------------
# run driver
# ---------------------------------------------------------------------------

def test_run_to_zero_time():
    st = init_isothermal_equilibrium(n=6)
    res = run(st.w0, st.eq, st.grid, st.bcs, st.scaling, t_final=0.0,
              ctl=st.controls)
    assert res.history == []
    assert len(res.snapshots) == 1
    assert res.snapshots[0][0] == 0.0
    assert np.array_equal(res.snapshots[0][1], st.w0)


def test_run_clips_steps_to_snapshot_times():
    st = init_isothermal_equilibrium(n=6)
    res = run(st.w0, st.eq, st.grid, st.bcs, st.scaling, t_final=0.05,
              ctl=st.controls, snapshot_times=(0.02,))
    times = [t for t, _ in res.snapshots]
    assert times == [0.02, 0.05]
    assert res.t_final == 0.05
    # one step must have landed exactly on the interior snapshot time
    cum = np.cumsum([h.dt for h in res.history])
    assert np.any(np.abs(cum - 0.02) < 1e-14)


def test_run_records_initial_snapshot_when_requested():
    st = init_isothermal_equilibrium(n=6)
    res = run(st.w0, st.eq, st.grid, st.bcs, st.scaling, t_final=0.01,
              ctl=st.controls, snapshot_times=(0.0,))
    assert res.snapshots[0][0] == 0.0


def test_run_tracks_kinetic_energy_from_start():
    st = init_isothermal_equilibrium(n=6)
    res = run(st.w0, st.eq, st.grid, st.bcs, st.scaling, t_final=0.02,
              ctl=st.controls)
    assert res.kinetic_energy[0] == (0.0, 0.0)   # starts at rest
    assert len(res.kinetic_energy) == len(res.history) + 1


# ---------------------------------------------------------------------------
# kinetic energy
# ---------------------------------------------------------------------------

def test_kinetic_energy_at_rest_is_zero():
    s = Scaling(mach=0.5, froude=0.5, gamma=1.4)
    grid = Grid(n=(4, 4), ghost=2)
    w = conserved(np.ones(grid.shape), np.zeros((2,) + grid.shape),
                  np.ones(grid.shape), s)
    assert kinetic_energy(w, grid, s) == 0.0


def test_kinetic_energy_uniform_flow():
    # rho = 1, |u| = 1 on the unit square: E_kin = 0.5 M^2
    grid = Grid(n=(5, 5), ghost=2)
    for mach in (1.0, 0.5):
        s = Scaling(mach=mach, froude=mach, gamma=1.4)
        u = np.zeros((2,) + grid.shape)
        u[0] = 1.0
        w = conserved(np.ones(grid.shape), u, np.ones(grid.shape), s)
        assert kinetic_energy(w, grid, s) == pytest.approx(0.5 * mach ** 2)
