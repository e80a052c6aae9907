"""Unit tests for the minmod limiter and second-order face reconstruction."""

import numpy as np
import pytest

from allspeed.equilibrium import EquilibriumField, isothermal_profile
from allspeed.reconstruct import face_states, minmod
from allspeed.relaxation import Layout, embed, fill_relaxed_ghosts
from allspeed.state import Grid, Scaling, conserved, hydrostatic


def make_scaling(mach=1.0, froude=None, gamma=1.4):
    return Scaling(mach=mach, froude=mach if froude is None else froude,
                   gamma=gamma)


class FlatBackground:
    def __init__(self, shape, beta=1.0, alpha=1.0):
        self.beta = np.full(shape, float(beta))
        self.alpha = np.full(shape, float(alpha))


def build_relaxed(rho, u, pi, psi, Z, s, uhat=None):
    """Assemble a 1D relaxed array directly from pointwise values."""
    rho = np.asarray(rho, float)
    u = np.asarray(u, float)
    pi = np.asarray(pi, float)
    psi = np.asarray(psi, float)
    Z = np.asarray(Z, float)
    uhat = u if uhat is None else np.asarray(uhat, float)
    lay = Layout(1)
    W = np.empty((lay.nvar,) + rho.shape)
    p_mix = s.mach ** 2 * pi + (1.0 - s.mach ** 2) * psi
    e = p_mix / ((s.gamma - 1.0) * rho)
    W[lay.rho] = rho
    W[lay.mom] = rho * u
    W[lay.energy] = rho * (e + 0.5 * s.mach ** 2 * u * u)
    W[lay.rpi] = rho * pi
    W[lay.ruhat] = rho * uhat
    W[lay.rpsi] = rho * psi
    W[lay.rz] = rho * Z
    return W


# ---------------------------------------------------------------------------
# minmod
# ---------------------------------------------------------------------------

def test_minmod_values():
    assert minmod(np.array(1.0), np.array(2.0)) == 1.0
    assert minmod(np.array(-1.0), np.array(2.0)) == 0.0
    assert minmod(np.array(-3.0), np.array(-2.0)) == -2.0
    assert minmod(np.array(0.0), np.array(5.0)) == 0.0


def test_minmod_symmetry():
    rng = np.random.default_rng(2)
    a = rng.normal(size=50)
    b = rng.normal(size=50)
    assert np.array_equal(minmod(a, b), minmod(b, a))
    assert np.array_equal(minmod(-a, -b), -minmod(a, b))


# ---------------------------------------------------------------------------
# face states
# ---------------------------------------------------------------------------

def test_first_order_faces_copy_cells():
    s = make_scaling()
    grid = Grid(n=(4,), ghost=2)
    rho = np.arange(1.0, 9.0)
    W = build_relaxed(rho, 0.0 * rho, rho, rho, np.ones(8), s)
    eq = FlatBackground(grid.shape)
    L, R, kappa = face_states(W, eq, grid, s, axis=0, order=1)
    g, n = grid.ghost, grid.n[0]
    assert np.array_equal(L["rho"], rho[g - 1:g + n])
    assert np.array_equal(R["rho"], rho[g:g + n + 1])
    assert np.array_equal(kappa, 0.5 * (rho[g - 1:g + n] + rho[g:g + n + 1]))


def test_constant_field_second_order_matches_first():
    s = make_scaling(mach=0.5)
    grid = Grid(n=(4,), ghost=2)
    ones = np.ones(8)
    W = build_relaxed(2.0 * ones, 0.3 * ones, 1.5 * ones, 1.5 * ones, ones, s)
    eq = FlatBackground(grid.shape)
    L1, R1, _ = face_states(W, eq, grid, s, axis=0, order=1)
    L2, R2, _ = face_states(W, eq, grid, s, axis=0, order=2)
    for key in ("rho", "u", "pi", "psi", "e"):
        assert np.array_equal(L1[key], L2[key])
        assert np.array_equal(R1[key], R2[key])


def test_linear_pressure_slope_with_flat_background():
    # pi = 1 + x/dx on a flat background: the hydrostatic shift vanishes and
    # the minmod slope is exact, so faces take the midpoint values.
    s = make_scaling()
    grid = Grid(n=(4,), ghost=2)
    dx = grid.dx[0]
    x = grid.centers(0)
    pi = 1.0 + x / dx
    rho = np.ones(8)
    W = build_relaxed(rho, 0.0 * rho, pi, pi, np.ones(8), s)
    eq = FlatBackground(grid.shape)
    L, R, _ = face_states(W, eq, grid, s, axis=0, order=2, limiter=False)
    g, n = grid.ghost, grid.n[0]
    faces = 1.0 + (np.arange(n + 1) + g - 0.5 * (2 * g - 1)) - 0.5
    # left state of face i+1/2 is cell i extrapolated up, right state is
    # cell i+1 extrapolated down; both hit the interface value exactly
    assert np.allclose(L["pi"], R["pi"], atol=1e-14)
    assert np.allclose(np.diff(L["pi"]), 1.0, atol=1e-14)


def test_hydrostatic_pressure_slopes_vanish():
    # on an exact discrete equilibrium the shifted pressure differences are
    # zero, so both faces of every cell carry the cell pi/psi value bitwise
    # (density keeps its plain slope; only the pressures are shifted)
    s = make_scaling(mach=1e-2)
    grid = Grid(n=(6, 6), ghost=2)

    def profile(X, Y):
        phi = X + Y
        rho, p = isothermal_profile(phi, s, RT=1.0)
        return rho, p, phi

    eq = EquilibriumField.from_profile(grid, profile, gamma=s.gamma)
    w = conserved(eq.alpha, np.zeros((2,) + grid.shape), eq.beta, s)
    W = embed(w, eq, s)
    fill_relaxed_ghosts(W, grid, hydrostatic(2), eq, s)
    for axis in range(2):
        L2, R2, _ = face_states(W, eq, grid, s, axis=axis, order=2)
        L1, R1, _ = face_states(W, eq, grid, s, axis=axis, order=1)
        for key in ("pi", "psi"):
            assert np.array_equal(L2[key], L1[key])
            assert np.array_equal(R2[key], R1[key])


def test_limiter_keeps_faces_admissible_near_vacuum():
    # a steep density/pressure drop: unlimited slopes would push the upper
    # face of the small cell negative, the staged limiter must not
    s = make_scaling()
    grid = Grid(n=(4,), ghost=2)
    rho = np.array([4.0, 2.0, 1.0, 1e-3, 1.0, 2.0, 4.0, 8.0])
    W = build_relaxed(rho, 0.0 * rho, rho.copy(), rho.copy(), np.ones(8), s)
    eq = FlatBackground(grid.shape)
    L, R, _ = face_states(W, eq, grid, s, axis=0, order=2, limiter=True)
    for side in (L, R):
        assert np.all(side["rho"] > 0.0)
        assert np.all(side["pi"] > 0.0)
        assert np.all(side["psi"] > 0.0)
        assert np.all(side["e"] > 0.0)


def test_nonequilibrium_slopes_match_hand_evaluation():
    # three interior values with a non-trivial background: check the shifted
    # minmod slope of pi for the middle cell against a direct evaluation
    s = make_scaling()
    grid = Grid(n=(3,), ghost=2)
    dx = grid.dx[0]
    rho = np.ones(7)
    pi = np.array([1.0, 1.0, 1.0, 1.3, 1.8, 1.8, 1.8])
    Z = np.array([0.0, 0.0, 0.0, 0.1, 0.3, 0.3, 0.3])
    W = build_relaxed(rho, 0.0 * rho, pi, pi.copy(), Z, s)
    eq = FlatBackground(grid.shape)
    L, R, _ = face_states(W, eq, grid, s, axis=0, order=2, limiter=False)
    # middle interior cell is index 3; kappa = 1 everywhere (rho = alpha = 1)
    s_m = 1.0 * (Z[3] - Z[2])            # s_{i-1/2}
    s_p = 1.0 * (Z[4] - Z[3])            # s_{i+1/2}
    q_m = pi[2] + s_m
    q_p = pi[4] - s_p
    fwd = (q_p - pi[3]) / dx
    bwd = (pi[3] - q_m) / dx
    slope = min(fwd, bwd) if fwd > 0 and bwd > 0 else 0.0
    # face i+1/2 left value and face i-1/2 right value of the middle cell
    assert L["pi"][2] == pytest.approx(pi[3] + 0.5 * dx * slope, rel=1e-14)
    assert R["pi"][1] == pytest.approx(pi[3] - 0.5 * dx * slope, rel=1e-14)
