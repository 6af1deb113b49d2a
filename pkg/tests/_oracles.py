"""Brute-force reference optimizers, independent of the library's solvers.

The distortionless constraint w^H a0 = 1 defines an affine set
w = a0/||a0||^2 + B z with B an orthonormal null-space basis of a0^H and
z a free complex vector. Minimizing any objective over that set by a
coarse-to-fine grid search over the real and imaginary parts of z gives
an oracle that shares no code with the closed-form or IRLS solvers.
"""

import numpy as np
from scipy.linalg import null_space


def constraint_parameterization(a0):
    """Return (w_particular, basis) describing {w : w^H a0 = 1}."""
    a0 = np.asarray(a0, dtype=complex)
    w0 = a0 / np.linalg.norm(a0) ** 2
    basis = null_space(a0.conj()[None, :])
    return w0, basis


def zoom_minimize(objective, w0, basis, radius=4.0, levels=12, points=7):
    """Coarse-to-fine grid search over w = w0 + basis @ z.

    ``objective`` must map an M x P matrix of candidate weight columns
    to a length-P array of values. Each level evaluates a full grid of
    ``points`` per real dimension centered on the incumbent, then halves
    the radius. Returns (w_best, value_best).
    """
    free = basis.shape[1]
    dim = 2 * free
    center = np.zeros(dim)
    best_val = np.inf
    best_w = w0
    for _ in range(levels):
        axes = [np.linspace(c - radius, c + radius, points) for c in center]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh])
        z = pts[:free] + 1j * pts[free:]
        candidates = w0[:, None] + basis @ z
        values = np.asarray(objective(candidates))
        k = int(np.argmin(values))
        if values[k] < best_val:
            best_val = float(values[k])
            best_w = candidates[:, k]
            center = pts[:, k]
        radius *= 0.5
    return best_w, best_val


def quadratic_objective(r):
    """w^H R w for each column."""
    return lambda w: np.einsum("im,ij,jm->m", w.conj(), r, w).real


def penalized_objective(r, a, gamma, p):
    """w^H R w + gamma * ||w^H A||_p^p for each column."""
    quad = quadratic_objective(r)

    def value(w):
        u = np.abs(a.conj().T @ w)
        return quad(w) + gamma * np.sum(u**p, axis=0)

    return value
