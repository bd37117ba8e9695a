"""Seeded random generators for states, measurements, and Kraus sets."""

from __future__ import annotations

import numpy as np

from steercert import linalg


def random_state(rng, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ linalg.dag(g)
    return rho / rho.trace().real


def random_hermitian(rng, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + linalg.dag(g)) / 2.0


def random_unitary(rng, dim: int) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_unit_vector(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_povm_pair(rng, dim: int = 2):
    """Two-outcome POVM: sandwich two random PSD operators by their sum."""
    mats = []
    for _ in range(2):
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        mats.append(g @ linalg.dag(g) + 1e-6 * np.eye(dim))
    total = mats[0] + mats[1]
    eigs, vecs = np.linalg.eigh(total)
    inv_sqrt = vecs @ np.diag(eigs**-0.5) @ linalg.dag(vecs)
    return tuple(inv_sqrt @ m @ inv_sqrt for m in mats)


def random_kraus_split(rng, effect: np.ndarray, pieces: int):
    """Kraus operators K_mu = W_mu sqrt(M) with sum W^dag W = identity:
    the W_mu are the stacked 2x2 blocks of the first two columns of a
    random (2*pieces)-dimensional unitary."""
    root = linalg.psd_sqrt_2x2(effect)
    u = random_unitary(rng, 2 * pieces)
    cols = u[:, :2]
    return tuple(cols[2 * i : 2 * i + 2, :] @ root for i in range(pieces))
