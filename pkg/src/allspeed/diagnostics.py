"""Error norms and flow diagnostics shared by the test scenarios and the CLI."""

import numpy as np

from .equilibrium import _central
from .state import split


def l1_error(w, w_ref, grid):
    """Cell-volume-weighted L1 distance per conserved variable (interior)."""
    itr = (slice(None),) + grid.interior
    diff = np.abs(w[itr] - w_ref[itr])
    return grid.cell_volume * diff.reshape(diff.shape[0], -1).sum(axis=1)


def linf_error(w, w_ref, grid):
    itr = (slice(None),) + grid.interior
    diff = np.abs(w[itr] - w_ref[itr])
    return diff.reshape(diff.shape[0], -1).max(axis=1)


def discrete_divergence(w, grid):
    """Central-difference divergence of the velocity field (interior array).

    The state must be ghost-filled.
    """
    rho, mom, _ = split(w)
    u = mom / rho
    div = np.zeros(grid.n)
    for k in range(grid.dim):
        div += _central(u[k], grid, k)
    return div


def divergence_l1(w, grid):
    return grid.cell_volume * float(np.sum(np.abs(discrete_divergence(w, grid))))


def orthogonality_functional(w, eq, grid):
    """L1 functional sum |u . grad(beta) / alpha| probing alignment of the flow
    with the background isobars (zero for exactly stratified flows)."""
    rho, mom, _ = split(w)
    u = mom / rho
    itr = grid.interior
    acc = np.zeros(grid.n)
    for k in range(grid.dim):
        acc += u[k][itr] * _central(eq.beta, grid, k)
    return grid.cell_volume * float(np.sum(np.abs(acc / eq.alpha[itr])))


def convergence_orders(ns, errors):
    """Observed orders between successive resolutions.

    ``errors`` has shape (len(ns), nvar); returns (len(ns)-1, nvar).
    """
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = errors[:-1] / errors[1:]
        return np.log(ratio) / np.log(ns[1:] / ns[:-1])[:, None]
