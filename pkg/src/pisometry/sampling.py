"""Seeded random generators for tests, demos and the CLI."""
from __future__ import annotations

import numpy as np

from .model_space import AtomicMeasure, FiniteBlaschke, compressed_shift
from .numerics import DEFAULT_TOL, random_unitary
from .partial_isometry import is_completely_non_unitary, validate

__all__ = [
    "random_disk_point",
    "random_blaschke",
    "random_cnu",
    "random_defect_one",
    "random_measure",
    "random_contraction",
]


def random_disk_point(rng, radius=0.9, size=None):
    r = radius * np.sqrt(rng.random(size))
    return r * np.exp(2j * np.pi * rng.random(size))


def random_blaschke(rng, degree, radius=0.9, vanish_at_zero=False, repeat=0.0):
    """Random finite Blaschke product.

    Parameters
    ----------
    degree : int
    radius : float
        Zeros are drawn uniformly from the disk of this radius.
    vanish_at_zero : bool
        Make the first zero ``0``.
    repeat : float
        Probability that a zero repeats the previous one.
    """
    zeros = []
    for k in range(degree):
        if k == 0 and vanish_at_zero:
            zeros.append(0j)
        elif zeros and rng.random() < repeat:
            zeros.append(zeros[-1])
        else:
            zeros.append(complex(random_disk_point(rng, radius)))
    constant = np.exp(2j * np.pi * rng.random())
    return FiniteBlaschke(tuple(zeros), constant)


def random_cnu(rng, dim, defect, margin=1e-3, tol=DEFAULT_TOL, max_tries=100):
    """Random CNU partial isometry of size ``dim`` with indices ``(defect, defect)``.

    ``U1 diag(1, ..., 1, 0, ..., 0) U2`` for Haar unitaries, redrawn until
    the spectral radius is below ``1 - margin``.
    """
    if not 0 <= defect <= dim:
        raise ValueError("defect must lie between 0 and dim")
    D = np.diag([1.0] * (dim - defect) + [0.0] * defect)
    for _ in range(max_tries):
        V = random_unitary(dim, rng) @ D @ random_unitary(dim, rng)
        if np.max(np.abs(np.linalg.eigvals(V))) < 1 - margin:
            PI = validate(V, tol)
            if is_completely_non_unitary(PI).kind == "cnu":
                return PI
    raise RuntimeError("could not draw a CNU partial isometry")


def random_defect_one(rng, zeros, tol=DEFAULT_TOL):
    """Defect-(1, 1) CNU partial isometry with the given spectrum.

    ``zeros`` must contain ``0``.  The result is ``Q S_B Q^*`` for a Haar
    unitary ``Q`` and ``B`` the Blaschke product with those zeros.
    """
    S = compressed_shift(FiniteBlaschke(tuple(zeros)), tol)
    return S.conjugate_by(random_unitary(S.dim, rng))


def random_measure(rng, atoms, min_gap=0.2):
    """Atomic measure with ``atoms`` well separated points and weights in ``[0.1, 1]``."""
    while True:
        angles = np.sort(2 * np.pi * rng.random(atoms))
        gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * np.pi]]))
        if atoms == 1 or gaps.min() > min_gap:
            break
    weights = 0.1 + 0.9 * rng.random(atoms)
    return AtomicMeasure(tuple(zip(np.exp(1j * angles), weights)))


def random_contraction(rng, n, norm=0.95):
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return norm * M / np.linalg.norm(M, 2)
