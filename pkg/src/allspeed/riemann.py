"""Explicit stage: approximate Riemann solver, interface fluxes and sweeps.

The explicit subsystem is solved exactly for piecewise-constant data: the
solution consists of two acoustic waves ``u -+ a/rho`` around a contact moving
at ``u*``.  The gravity contribution enters as an interface source

    s_{i+1/2} = kappa_{i+1/2} (Z_{i+1} - Z_i)

attached to the downwind side of the contact, with weight 1/M^2 on the
momentum component and ``u* s`` on the energy component.  The two one-sided
fluxes of an interface always satisfy ``F^- - F^+ = -S``.

Stiff handling: the momentum flux contains ``psi/M^2``.  Its coefficient is
carried separately and combined per cell as a difference *before* dividing by
M^2, which keeps exact hydrostata fixed to machine precision even at M = 1e-4.
For the same reason the star-state formulas group the stiff jumps as
``H = dpsi - kappa dZ`` (exactly zero at equilibrium) before scaling by 1/M^2.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PositivityError
from .reconstruct import face_states
from .relaxation import Layout, fill_relaxed_ghosts, primitives


@dataclass
class StarStates:
    ustar: np.ndarray
    pi_L: np.ndarray
    pi_R: np.ndarray
    rho_L: np.ndarray
    rho_R: np.ndarray
    e_L: np.ndarray
    e_R: np.ndarray
    lam_minus: np.ndarray
    lam_plus: np.ndarray


def star_states(L, R, a, kappa, s, axis=0, check_positivity=True):
    """Intermediate states of the interface Riemann problem.

    ``L``/``R`` are face-state dicts (see :func:`reconstruct.face_states`);
    ``axis`` selects the normal velocity component.
    """
    msq = s.mach ** 2
    unL = L["u"][axis]
    unR = R["u"][axis]
    dpi = R["pi"] - L["pi"]
    dpsi = R["psi"] - L["psi"]
    dz = R["Z"] - L["Z"]
    du = unR - unL
    H = dpsi - kappa * dz
    corr = 0.5 * (H / msq - dpsi)
    ustar = 0.5 * (unL + unR) - (dpi - dpsi + H / msq) / (2.0 * a)
    pm = 0.5 * (L["pi"] + R["pi"]) - 0.5 * a * du
    pi_L = pm + corr
    pi_R = pm - corr
    a2 = a * a
    inv_L = 1.0 / L["rho"] + (L["pi"] - pi_L) / a2
    inv_R = 1.0 / R["rho"] + (R["pi"] - pi_R) / a2
    # Internal energy from continuity of the Riemann invariant
    # e - M^2 pi^2/(2 a^2) - (1 - M^2) pi psi / a^2 across the outer waves
    # (psi is itself invariant there).
    e_L = L["e"] + (msq * (pi_L ** 2 - L["pi"] ** 2) / 2.0
                    + (1.0 - msq) * (pi_L - L["pi"]) * L["psi"]) / a2
    e_R = R["e"] + (msq * (pi_R ** 2 - R["pi"] ** 2) / 2.0
                    + (1.0 - msq) * (pi_R - R["pi"]) * R["psi"]) / a2
    if check_positivity:
        bad = (inv_L <= 0.0) | (inv_R <= 0.0) | (e_L <= 0.0) | (e_R <= 0.0)
        if np.any(bad):
            where = tuple(np.argwhere(bad)[0])
            raise PositivityError(
                f"intermediate state lost positivity at interface {where} "
                f"(relaxation speed a={a:.6g} too small)", where=where)
    return StarStates(
        ustar=ustar, pi_L=pi_L, pi_R=pi_R,
        rho_L=1.0 / inv_L, rho_R=1.0 / inv_R, e_L=e_L, e_R=e_R,
        lam_minus=unL - a / L["rho"], lam_plus=unR + a / R["rho"],
    )


def flux_state(st, a, s, axis, lay):
    """Physical flux of the explicit subsystem for one (face or star) state.

    Returns ``(F, psi)`` where the momentum row of ``F`` excludes the stiff
    part ``psi/M^2`` whose coefficient is returned separately.
    """
    msq = s.mach ** 2
    rho = st["rho"]
    u = st["u"]
    un = u[axis]
    F = np.empty((lay.nvar,) + un.shape)
    F[lay.rho] = rho * un
    for k in range(lay.dim):
        F[lay.mom_comp(k)] = rho * un * u[k]
    F[lay.mom_comp(axis)] += st["pi"] - st["psi"]
    E = rho * (st["e"] + 0.5 * msq * np.sum(u * u, axis=0))
    F[lay.energy] = (E + msq * st["pi"] + (1.0 - msq) * st["psi"]) * un
    F[lay.rpi] = (rho * st["pi"] + a * a) * un
    for k in range(lay.dim):
        F[lay.ruhat_comp(k)] = rho * un * st["uhat"][k]
    F[lay.rpsi] = rho * st["psi"] * un
    F[lay.rz] = rho * st["Z"] * un
    return F, st["psi"]


def _with_normal(st, axis, un, rho=None, e=None, pi=None):
    out = dict(st)
    u = st["u"].copy()
    u[axis] = un
    out["u"] = u
    if rho is not None:
        out["rho"] = rho
    if e is not None:
        out["e"] = e
    if pi is not None:
        out["pi"] = pi
    return out


def interface_fluxes(L, R, a, kappa, s, axis, check_positivity=True):
    """One-sided interface fluxes ``(F-, F+, Psi-, Psi+)``.

    ``F-`` feeds the cell left of the interface, ``F+`` the right cell.  The
    ``Psi`` arrays are the stiff momentum coefficients (selected psi plus the
    interface source where applicable); the caller divides their per-cell
    difference by M^2.
    """
    lay = Layout(L["u"].shape[0])
    st = star_states(L, R, a, kappa, s, axis, check_positivity)
    Ls = _with_normal(L, axis, st.ustar, rho=st.rho_L, e=st.e_L, pi=st.pi_L)
    Rs = _with_normal(R, axis, st.ustar, rho=st.rho_R, e=st.e_R, pi=st.pi_R)

    cand = [flux_state(s_, a, s, axis, lay) for s_ in (L, Ls, Rs, R)]
    F_stack = np.stack([c[0] for c in cand])          # (4, nvar, m)
    psi_stack = np.stack([c[1] for c in cand])        # (4, m)

    lamu = st.ustar
    sel_m = np.where(st.lam_minus > 0, 0,
                     np.where(lamu >= 0, 1, np.where(st.lam_plus > 0, 2, 3)))
    sel_p = np.where(st.lam_minus > 0, 0,
                     np.where(lamu > 0, 1, np.where(st.lam_plus > 0, 2, 3)))
    sel_p = np.where((lamu == 0) & (st.lam_minus <= 0), 2, sel_p)

    def pick(stack, sel):
        return np.take_along_axis(stack, sel[None], axis=0)[0]

    Fm = np.take_along_axis(F_stack, sel_m[None, None], axis=0)[0]
    Fp = np.take_along_axis(F_stack, sel_p[None, None], axis=0)[0]
    Psim = pick(psi_stack, sel_m)
    Psip = pick(psi_stack, sel_p)

    src = kappa * (R["Z"] - L["Z"])
    mask_m = (sel_m >= 2).astype(float)               # source folded into F-
    mask_p = (sel_p <= 1).astype(float)               # source folded into F+
    Fm[lay.energy] -= mask_m * st.ustar * src
    Psim = Psim - mask_m * src
    Fp[lay.energy] += mask_p * st.ustar * src
    Psip = Psip + mask_p * src
    return Fm, Fp, Psim, Psip, st, src


def flux_divergence(Wg, eq, grid, s, a, axis, order=1, limiter=True,
                    check_positivity=True):
    """Per-cell flux difference (F^-_{i+1/2} - F^+_{i-1/2}) / dx along ``axis``.

    ``Wg`` must be ghost-filled.  Returns an array over the interior cells;
    subtracting ``dt`` times it advances the explicit stage.
    """
    lay = Layout(grid.dim)
    L, R, kappa = face_states(Wg, eq, grid, s, axis, order=order, limiter=limiter)
    # faces in transverse ghost rows never feed the interior update along
    # this axis; crop them before any flux (or positivity check) is
    # evaluated on discarded corner faces.  Face arrays carry the sweep
    # axis last, so the transverse crop applies to the leading dimensions.
    tcrop = tuple(slice(grid.ghost, grid.ghost + grid.n[k])
                  for k in range(grid.dim) if k != axis) + (slice(None),)

    def _crop(v):
        if isinstance(v, dict):
            return {key: _crop(val) for key, val in v.items()}
        lead = (slice(None),) * (v.ndim - len(tcrop))
        return v[lead + tcrop]

    L, R, kappa = _crop(L), _crop(R), _crop(kappa)
    Fm, Fp, Psim, Psip, _, _ = interface_fluxes(
        L, R, a, kappa, s, axis, check_positivity)
    dx = grid.dx[axis]
    msq = s.mach ** 2
    D = (Fm[..., 1:] - Fp[..., :-1]) / dx
    D[lay.mom_comp(axis)] += (Psim[..., 1:] - Psip[..., :-1]) / (msq * dx)
    return np.moveaxis(D, -1, 1 + axis)


def explicit_operator(Wg, eq, grid, s, a, order=1, limiter=True,
                      check_positivity=True):
    """Unsplit explicit increment dW/dt = -sum_axes flux_divergence."""
    out = None
    for axis in range(grid.dim):
        D = flux_divergence(Wg, eq, grid, s, a, axis, order, limiter,
                            check_positivity)
        out = -D if out is None else out - D
    return out


def explicit_stage(W, eq, grid, bcs, s, a, dt, t=0.0, order=1, limiter=True,
                   check_positivity=True):
    """Forward-Euler update with all directional fluxes evaluated on the same
    (input) state.  The interface problems are one-dimensional per direction,
    but the state is not advanced in between: updating sweep by sweep would
    feed the O(dt) advective change of psi into the next direction's stiff
    1/M^2 momentum term and break the scheme's low-Mach uniformity.
    Returns the updated (ghost-stale) array.
    """
    fill_relaxed_ghosts(W, grid, bcs, eq, s, t)
    sl = (slice(None),) + grid.interior
    W[sl] = W[sl] + dt * explicit_operator(
        W, eq, grid, s, a, order, limiter, check_positivity)
    return W


def compute_dt(Wg, grid, s, a, cfl, dt_max=np.inf):
    """CFL time step from the explicit wave fan, dt = cfl * min_k dx_k/S_k
    with S_k = max_i (|u_k,i| + a/rho_i); independent of the Mach number."""
    pr = primitives(Wg, s)
    itr = grid.interior
    rho = pr["rho"][itr]
    dt = float(dt_max)
    for k in range(grid.dim):
        speed = float(np.max(np.abs(pr["u"][k][itr]) + a / rho))
        if speed > 0.0:
            dt = min(dt, cfl * grid.dx[k] / speed)
    return dt
