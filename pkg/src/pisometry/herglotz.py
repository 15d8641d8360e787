"""Anchored model frames, reproducing kernels and Herglotz transforms.

A :class:`ModelFrame` fixes, for a CNU partial isometry ``V`` with indices
``(n, n)``, orthonormal bases ``j_0`` of ``(ran V)^perp``, ``j_inf`` of
``ker V`` and, for each ``z`` off the circle, ``j_z`` of the orthogonal
complement of ``(V - z)`` applied to the initial space.  From these

    A(z) = j_z^* j_0,   B(z) = j_z^* j_inf,   b(z) = z A(z)^{-1} B(z),

and the model kernel ``j_z^* j_w`` has the closed form returned by
:func:`abstract_kernel`.  The Herglotz transform ``G = (I + b)(I - b)^{-1}``
has kernel ``(G(z) + G(w)^*) / (1 - z conj(w))``, and
:func:`canonical_multiplier` gives the function ``W`` that carries one
kernel onto the other.

All identities here are pointwise and use one ``j_z`` per point, so the
per-point unitary freedom in ``j_z`` cancels.
"""
from __future__ import annotations

import numpy as np

from .exceptions import (
    DegenerateDenominatorError,
    InputError,
    NotCNUError,
    SingularPencilError,
    WrongDefectError,
)
from .numerics import DEFAULT_TOL, onb_nullspace
from .partial_isometry import is_completely_non_unitary

__all__ = [
    "ModelFrame",
    "ab_functions",
    "abstract_kernel",
    "gamma_kernel",
    "herglotz_transform",
    "inverse_herglotz_transform",
    "herglotz_extension",
    "herglotz_kernel",
    "canonical_multiplier",
    "kernel_gram",
]


def _off_circle(z, tol):
    z = complex(z)
    if abs(abs(z) - 1) <= tol.rank_eps:
        raise InputError(f"z = {z} lies on the unit circle")
    return z


def _invertible(M, tol, what):
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] <= tol.rank_eps * max(s[0], 1.0):
        raise SingularPencilError(f"{what} is singular")


class ModelFrame:
    """Anchored frame ``(j_0, j_inf, z -> j_z)`` of a CNU partial isometry.

    Parameters
    ----------
    V : PartialIsometry
        Completely non-unitary with deficiency indices ``(n, n)``, ``n >= 1``.

    Raises
    ------
    WrongDefectError
    NotCNUError
    """

    def __init__(self, V):
        n_plus, n_minus = V.indices
        if n_plus != n_minus or n_plus == 0:
            raise WrongDefectError(f"need equal nonzero deficiency indices, got {V.indices}")
        if is_completely_non_unitary(V).kind != "cnu":
            raise NotCNUError("frame needs a completely non-unitary partial isometry")
        self.source = V
        self.size = n_plus
        self.tol = V.tol
        self.j0 = V.defect_minus
        self.j_inf = V.defect_plus

    def jz(self, z):
        """Orthonormal columns spanning ``((V - z) initial space)^perp``.

        At ``z = 0`` this returns ``j_0`` itself.
        """
        z = _off_circle(z, self.tol)
        if z == 0:
            return self.j0
        V = self.source
        M = V.initial_space.conj().T @ (V.matrix - z * np.eye(V.dim)).conj().T
        J = onb_nullspace(M, self.tol)
        if J.shape[1] != self.size:
            raise SingularPencilError(f"defect space at z = {z} has dimension {J.shape[1]}")
        return J

    def ab(self, z):
        J = self.jz(z)
        return J.conj().T @ self.j0, J.conj().T @ self.j_inf

    def b(self, z):
        """``z A(z)^{-1} B(z)``; the characteristic function inside the disk."""
        A, B = self.ab(z)
        _invertible(A, self.tol, "A(z)")
        return z * np.linalg.solve(A, B)

    def G(self, z):
        """``(A - z B)^{-1} (A + z B)``, the Herglotz transform of ``b``.

        The same expression is used outside the disk, where it agrees with
        the reflection ``G(1/lam) = -G(conj(lam))^*``.
        """
        A, B = self.ab(z)
        _invertible(A - z * B, self.tol, "A(z) - z B(z)")
        return np.linalg.solve(A - z * B, A + z * B)


def ab_functions(frame, z):
    """``(A(z), B(z)) = (j_z^* j_0, j_z^* j_inf)`` for ``|z| != 1``."""
    return frame.ab(z)


def _denominator(z, w, tol):
    d = 1 - z * np.conj(w)
    if abs(d) <= tol.rank_eps:
        raise DegenerateDenominatorError(f"1 - z conj(w) vanishes at z = {z}, w = {w}")
    return d


def abstract_kernel(frame, z, w):
    """``(A(z) A(w)^* - z B(z) B(w)^* conj(w)) / (1 - z conj(w))``."""
    tol = frame.tol
    z, w = _off_circle(z, tol), _off_circle(w, tol)
    d = _denominator(z, w, tol)
    Az, Bz = frame.ab(z)
    Aw, Bw = frame.ab(w)
    return (Az @ Aw.conj().T - z * np.conj(w) * (Bz @ Bw.conj().T)) / d


def gamma_kernel(frame, z, w):
    """``j_z^* j_w``."""
    return frame.jz(z).conj().T @ frame.jz(w)


def herglotz_transform(b, tol=DEFAULT_TOL):
    """``(I + b)(I - b)^{-1}``.

    Raises
    ------
    SingularPencilError
        If ``I - b`` is singular.
    """
    b = np.atleast_2d(np.asarray(b, dtype=np.complex128))
    eye = np.eye(b.shape[0])
    _invertible(eye - b, tol, "I - b")
    return np.linalg.solve((eye - b).T, (eye + b).T).T


def inverse_herglotz_transform(G, tol=DEFAULT_TOL):
    """``(G - I)(G + I)^{-1}``, the inverse of :func:`herglotz_transform`."""
    G = np.atleast_2d(np.asarray(G, dtype=np.complex128))
    eye = np.eye(G.shape[0])
    _invertible(G + eye, tol, "G + I")
    return np.linalg.solve((G + eye).T, (G - eye).T).T


def herglotz_extension(G, lam):
    """Value at ``|lam| > 1`` of the reflection ``G(lam) = -G(1 / conj(lam))^*``.

    ``G`` is any evaluator on the disk.
    """
    lam = complex(lam)
    if not abs(lam) > 1:
        raise InputError("extension point must lie outside the closed disk")
    return -np.atleast_2d(G(1 / np.conj(lam))).conj().T


def herglotz_kernel(G, z, w, tol=DEFAULT_TOL):
    """``(G(z) + G(w)^*) / (1 - z conj(w))`` for an evaluator ``G``."""
    d = _denominator(z, w, tol)
    return (np.atleast_2d(G(z)) + np.atleast_2d(G(w)).conj().T) / d


def canonical_multiplier(frame, z):
    """``W(z) = sqrt(2) (A(z) - z B(z))^{-1}``.

    It satisfies ``K_w(z) = W(z) k_w(z) W(w)^*`` with ``k`` the model
    kernel and ``K`` the Herglotz kernel of ``frame.G``.
    """
    z = _off_circle(z, frame.tol)
    A, B = frame.ab(z)
    _invertible(A - z * B, frame.tol, "A(z) - z B(z)")
    return np.sqrt(2) * np.linalg.inv(A - z * B)


def kernel_gram(kernel, points):
    """Block Gram matrix ``[kernel(z_i, z_j)]`` (rows indexed by ``z_i``)."""
    blocks = [[np.atleast_2d(kernel(zi, zj)) for zj in points] for zi in points]
    return np.block(blocks)
