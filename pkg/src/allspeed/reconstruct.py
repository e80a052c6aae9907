"""Face-value reconstruction for the explicit stage.

Density and velocity use plain minmod slopes.  The surrogate pressures pi and
psi use slopes of the hydrostatic differences: neighbour values are first
shifted by the interface source s_{i+1/2} = kappa_{i+1/2} (Z_{i+1} - Z_i)

    q_{i-1} = pi_{i-1} + s_{i-1/2},   q_{i+1} = pi_{i+1} - s_{i+1/2},

so a hydrostatic state reconstructs to its own cell value on both faces.  A
staged scaling factor theta in {1, 0.9, ..., 0} shrinks all slopes of a cell
together until both face states are admissible.  Z and uhat stay piecewise
constant; face internal energy comes from the recovered pressure
``M^2 pi + (1 - M^2) psi``.
"""

import numpy as np

from .relaxation import primitives


def minmod(a, b):
    """Componentwise minmod limiter."""
    return np.where((a > 0) & (b > 0), np.minimum(a, b),
                    np.where((a < 0) & (b < 0), np.maximum(a, b), 0.0))


def _mv(arr, axis):
    """Move the sweep axis of a cell field to the last position."""
    return np.moveaxis(arr, axis, -1)


def face_states(Wg, eq, grid, s, axis, order=1, limiter=True):
    """Left/right face states at the n+1 interfaces along ``axis``.

    Returns ``(L, R, kappa)`` where L/R are dicts of arrays in a layout with
    the sweep axis last, and kappa is the frozen interface weight
    0.5 (rho_i/alpha_i + rho_{i+1}/alpha_{i+1}).
    """
    d, g = grid.dim, grid.ghost
    n = grid.n[axis]
    dx = grid.dx[axis]
    pr = primitives(Wg, s)

    rho = _mv(pr["rho"], axis)
    u = np.stack([_mv(pr["u"][k], axis) for k in range(d)])
    pi = _mv(pr["pi"], axis)
    psi = _mv(pr["psi"], axis)
    uhat = np.stack([_mv(pr["uhat"][k], axis) for k in range(d)])
    Z = _mv(pr["Z"], axis)
    kapc = _mv(pr["rho"] / eq.alpha, axis)

    cells = slice(g - 1, g + n + 1)          # the n+2 cells feeding the faces
    lo = slice(g - 1, g + n)                 # cells left of each interface
    hi = slice(g, g + n + 1)                 # cells right of each interface
    kappa = 0.5 * (kapc[..., lo] + kapc[..., hi])

    if order == 1:
        zero = np.zeros_like(rho[..., cells])
        srho = zero
        su = np.zeros_like(u[..., cells])
        spi = zero
        spsi = zero
    else:
        if g < 2:
            raise ValueError("second-order reconstruction needs two ghost layers")
        c = slice(g - 1, g + n + 1)
        cm = slice(g - 2, g + n)
        cp = slice(g, g + n + 2)
        srho = minmod((rho[..., c] - rho[..., cm]) / dx,
                      (rho[..., cp] - rho[..., c]) / dx)
        su = minmod((u[..., c] - u[..., cm]) / dx, (u[..., cp] - u[..., c]) / dx)
        # interface sources for the hydrostatic pressure shift
        kh = 0.5 * (kapc[..., :-1] + kapc[..., 1:])
        sh = kh * (Z[..., 1:] - Z[..., :-1])
        sh_m = sh[..., g - 2:g + n]          # s_{i-1/2} for the cells in c
        sh_p = sh[..., g - 1:g + n + 1]      # s_{i+1/2}
        q_m = pi[..., cm] + sh_m
        q_p = pi[..., cp] - sh_p
        spi = minmod((q_p - pi[..., c]) / dx, (pi[..., c] - q_m) / dx)
        q_m = psi[..., cm] + sh_m
        q_p = psi[..., cp] - sh_p
        spsi = minmod((q_p - psi[..., c]) / dx, (psi[..., c] - q_m) / dx)

        if limiter:
            theta = np.zeros_like(rho[..., cells])
            for cand in np.linspace(0.0, 1.0, 11):
                ok = np.ones_like(theta, dtype=bool)
                for v, sl in ((rho[..., cells], srho), (pi[..., cells], spi),
                              (psi[..., cells], spsi)):
                    for sign in (-1.0, 1.0):
                        ok &= v + sign * cand * sl * (0.5 * dx) > 0.0
                theta = np.where(ok, cand, theta)
            srho = theta * srho
            su = theta[None] * su
            spi = theta * spi
            spsi = theta * spsi

    half = 0.5 * dx

    def build(v, sl, take, sign):
        return v[..., cells][..., take] + sign * half * sl[..., take]

    take_L = slice(0, n + 1)
    take_R = slice(1, n + 2)
    msq = s.mach ** 2
    gm1 = s.gamma - 1.0

    def side(take, sign, cell_sl):
        rho_f = build(rho, srho, take, sign)
        u_f = build(u, su, take, sign)
        pi_f = build(pi, spi, take, sign)
        psi_f = build(psi, spsi, take, sign)
        p_mix = msq * pi_f + (1.0 - msq) * psi_f
        return {
            "rho": rho_f,
            "u": u_f,
            "pi": pi_f,
            "psi": psi_f,
            "e": p_mix / (gm1 * rho_f),
            "uhat": uhat[..., cell_sl],
            "Z": Z[..., cell_sl],
        }

    L = side(take_L, +1.0, lo)
    R = side(take_R, -1.0, hi)
    return L, R, kappa
