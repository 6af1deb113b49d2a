"""Data-derived weights that shape the sparse penalty by direction.

The cross-correlation A^H X of the candidate-direction steering matrix
with the snapshot matrix carries a coarse image of where interference
power arrives. Squaring the per-row mean and normalizing to unit maximum
turns that image into nonnegative penalty weights in [0, 1]: directions
that dominate the received data get full weight, quiet directions get
little.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

__all__ = ["snm", "build_q"]


def snm(rows) -> np.ndarray:
    """Squared row means of a complex matrix, normalized to unit maximum.

    Entry i is |mean_k C(i, k)|^2, with the whole vector divided by its
    maximum so the largest entry is exactly 1. An all-zero input maps to
    the all-zero vector. The mean is over complex entries, so a global
    unit-modulus phase on the data leaves the output unchanged, as does
    any positive rescaling.
    """
    c = np.asarray(rows, dtype=complex)
    if c.ndim != 2 or c.shape[1] < 1:
        raise DomainError("input must be an N x K matrix with K >= 1")
    m = np.abs(c.mean(axis=1)) ** 2
    peak = m.max()
    return m / peak if peak > 0 else m


def build_q(steering_mat, snapshots) -> np.ndarray:
    """Return diag(Q) = snm(A^H X) as an N-vector.

    The conceptual Q is the N x N diagonal matrix holding these weights.
    An all-zero result (no data energy) falls back to all-ones so the
    weighted penalty degrades to the unweighted one.
    """
    a = np.asarray(steering_mat, dtype=complex)
    x = np.asarray(snapshots, dtype=complex)
    if a.ndim != 2 or x.ndim != 2 or a.shape[0] != x.shape[0]:
        raise DomainError(
            f"steering matrix and snapshots disagree on element count: "
            f"{a.shape} vs {x.shape}"
        )
    q = snm(a.conj().T @ x)
    if q.max() == 0:
        return np.ones(a.shape[1])
    return q
