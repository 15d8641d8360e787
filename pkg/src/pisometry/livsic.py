"""Livsic characteristic functions of partial isometries.

For a completely non-unitary partial isometry ``V`` with deficiency
indices ``(n, n)`` the characteristic function ``w_V`` is a contractive
``n x n`` analytic function on the disk with ``w_V(0) = 0``; two such
operators are unitarily equivalent iff their characteristic functions
coincide, i.e. ``w_1 = Q_1 w_2 Q_2`` for constant unitaries.

Two evaluation routes are provided.  :func:`charfn_extension` works
through the resolvent of a unitary extension, :func:`charfn_defect`
through the defect spaces of ``V - z``.  They agree up to coincidence.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    InputError,
    NotCNUError,
    SingularGramError,
    SingularResolventError,
    SingularSecondFactorError,
    WrongDefectError,
)
from .numerics import DEFAULT_TOL, charpoly, onb_nullspace, polar_unitary, random_unitary
from .partial_isometry import is_completely_non_unitary, unitary_extension

__all__ = [
    "CharFn",
    "charfn_extension",
    "charfn_defect",
    "CoincidenceResult",
    "default_samples",
    "coincide",
    "hml_equivalent",
]


def _check_defect(V):
    n_plus, n_minus = V.indices
    if n_plus != n_minus or n_plus == 0:
        raise WrongDefectError(f"need equal nonzero deficiency indices, got {V.indices}")
    return n_plus


def _check_disk(z):
    z = complex(z)
    if not abs(z) < 1:
        raise InputError(f"z = {z} is not in the open unit disk")
    return z


def charfn_extension(V, U, z):
    """``w_V(z)`` from a unitary extension ``U`` of ``V``.

    With ``v_j`` the cached orthonormal basis of ``ker V``::

        w_V(z) = z [<(U - z)^{-1} v_j, v_k>] [<(U - z)^{-1} U v_j, v_k>]^{-1}

    Raises
    ------
    SingularResolventError
        If ``U - z`` is numerically singular, which means ``U`` is not unitary.
    SingularSecondFactorError
        If the second Gram factor is numerically singular.
    """
    _check_defect(V)
    z = _check_disk(z)
    tol = V.tol
    U = np.asarray(U, dtype=np.complex128)
    N = V.dim
    if U.shape != (N, N):
        raise DimensionMismatchError(f"U has shape {U.shape}, expected {(N, N)}")
    K = V.defect_plus
    shifted = U - z * np.eye(N)
    s = np.linalg.svd(shifted, compute_uv=False)
    if s[-1] <= tol.rank_eps * max(s[0], 1.0):
        raise SingularResolventError(f"U - z is singular at z = {z}")
    R = np.linalg.solve(shifted, np.hstack([K, U @ K]))
    n = K.shape[1]
    M1 = K.conj().T @ R[:, :n]
    M2 = K.conj().T @ R[:, n:]
    s2 = np.linalg.svd(M2, compute_uv=False)
    if s2[-1] <= tol.rank_eps * max(s2[0], 1.0):
        raise SingularSecondFactorError(f"second factor is singular at z = {z}")
    return z * np.linalg.solve(M2.T, M1.T).T


def _defect_frame(V, z):
    """Orthonormal columns spanning the orthogonal complement of ``(V - z) P_init``."""
    n = V.indices[0]
    if z == 0:
        return V.defect_minus
    M = V.initial_space.conj().T @ (V.matrix - z * np.eye(V.dim)).conj().T
    J = onb_nullspace(M, V.tol)
    if J.shape[1] != n:
        raise SingularGramError(f"defect space at z = {z} has dimension {J.shape[1]}, expected {n}")
    return J


def charfn_defect(V, z):
    """``w_V(z) = z A(z)^{-1} B(z)`` from defect-space Gram matrices.

    ``A(z) = j_z^* j_0`` and ``B(z) = j_z^* j_inf`` where ``j_0``, ``j_inf``
    span ``(ran V)^perp`` and ``ker V`` and ``j_z`` spans the orthogonal
    complement of ``(V - z)`` applied to the initial space.

    Raises
    ------
    SingularGramError
    """
    _check_defect(V)
    z = _check_disk(z)
    J = _defect_frame(V, z)
    A = J.conj().T @ V.defect_minus
    B = J.conj().T @ V.defect_plus
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] <= V.tol.rank_eps * max(s[0], 1.0):
        raise SingularGramError(f"A(z) is singular at z = {z}")
    return z * np.linalg.solve(A, B)


@dataclass(frozen=True, eq=False)
class CharFn:
    """An ``n x n`` matrix function on the disk, usually some ``w_V``.

    Parameters
    ----------
    evaluate : callable
        ``z -> (n, n) ndarray``.
    size : int
    source : PartialIsometry or None
    route : str
        ``"extension"``, ``"defect"`` or ``"function"``.
    """

    evaluate: object
    size: int
    source: object = None
    route: str = "function"
    extension: np.ndarray = field(default=None, repr=False)

    def __call__(self, z):
        return np.asarray(self.evaluate(z), dtype=np.complex128).reshape(self.size, self.size)

    @classmethod
    def from_extension(cls, V, U=None):
        """Extension route; ``U`` defaults to :func:`unitary_extension`."""
        n = _require_cnu(V)
        U = unitary_extension(V) if U is None else np.asarray(U, dtype=np.complex128)
        return cls(lambda z: charfn_extension(V, U, z), n, V, "extension", U)

    @classmethod
    def from_defect(cls, V):
        n = _require_cnu(V)
        return cls(lambda z: charfn_defect(V, z), n, V, "defect")

    @classmethod
    def from_function(cls, f, size=1):
        """Wrap any evaluable function, e.g. a scalar Blaschke product."""
        return cls(f, size)


def _require_cnu(V):
    n = _check_defect(V)
    status = is_completely_non_unitary(V)
    if status.kind != "cnu":
        raise NotCNUError(f"partial isometry is not completely non-unitary ({status.kind})")
    return n


def default_samples(n=1):
    """``0`` plus 12 points on each of the circles ``|z| = 0.35, 0.7``.

    Points on ``|z| = 0.5`` are appended until there are at least
    ``2 n^2 + 1`` samples.
    """
    angles = 2 * np.pi * (np.arange(12) + 0.25) / 12
    pts = [0j]
    pts += list(0.35 * np.exp(1j * angles))
    pts += list(0.7 * np.exp(1j * (angles + np.pi / 12)))
    extra = 2 * n * n + 1 - len(pts)
    if extra > 0:
        pts += list(0.5 * np.exp(2j * np.pi * (np.arange(extra) + 0.1) / extra))
    return np.array(pts)


@dataclass(frozen=True, eq=False)
class CoincidenceResult:
    """Outcome of :func:`coincide`.

    ``outcome`` is ``"coincident"``, ``"not_coincident"`` or
    ``"undetermined"``.  ``Q1``, ``Q2`` satisfy ``Q1 w2 Q2 = w1`` on the
    samples when coincident; ``witness`` is a sample where singular values
    differ when not.
    """

    outcome: str
    Q1: np.ndarray = None
    Q2: np.ndarray = None
    witness: complex = None
    residual: float = None
    singular_values: tuple = None

    def to_json(self):
        out = {"outcome": self.outcome, "residual": self.residual}
        if self.witness is not None:
            out["witness"] = [self.witness.real, self.witness.imag]
            out["singular_values"] = [list(map(float, s)) for s in self.singular_values]
        return out


def _fit_residual(Q1, Q2, X, Y):
    return float(max(np.linalg.norm(Q1 @ x @ Q2 - y) for x, y in zip(X, Y)))


def _procrustes(Q1, Q2, X, Y, iters=300, tol=1e-14):
    last = np.inf
    for _ in range(iters):
        Q1 = polar_unitary(sum(y @ (x @ Q2).conj().T for x, y in zip(X, Y)))
        Q2 = polar_unitary(sum((Q1 @ x).conj().T @ y for x, y in zip(X, Y)))
        r = _fit_residual(Q1, Q2, X, Y)
        if last - r < tol:
            break
        last = r
    return Q1, Q2


def _linear_start(X, Y, tol, rng):
    """``Q1`` intertwines ``w1(z) w1(z')^*`` with ``w2(z) w2(z')^*``.

    Those relations are linear in ``Q1``; a generic element of the solution
    space, made unitary, is a good starting point.
    """
    n = X[0].shape[0]
    eye = np.eye(n)
    ref = int(np.argmax([np.linalg.norm(x) for x in X]))
    blocks = []
    for s in range(len(X)):
        for t in {s, ref}:
            L = Y[s] @ Y[t].conj().T
            R = X[s] @ X[t].conj().T
            # L Q1 - Q1 R = 0 in column-major vec form
            blocks.append(np.kron(eye, L) - np.kron(R.T, eye))
    N = onb_nullspace(np.vstack(blocks), tol)
    if N.shape[1] == 0:
        return None
    coeffs = rng.standard_normal(N.shape[1]) + 1j * rng.standard_normal(N.shape[1])
    return polar_unitary((N @ coeffs).reshape(n, n, order="F"))


def coincide(w1, w2, samples=None, tol=DEFAULT_TOL, starts=8, seed=0):
    """Decide whether ``w1(z) = Q1 w2(z) Q2`` for constant unitaries.

    The singular values of ``w1(z)`` and ``w2(z)`` must agree at every
    sample; a mismatch is a proof of non-coincidence.  Otherwise ``Q1``,
    ``Q2`` are searched for (exactly for ``n = 1``, by alternating
    Procrustes steps from several starts for ``n > 1``) and
    ``"coincident"`` is reported only if the fit residual is at most
    ``tol.residual_eps`` at every sample.

    Parameters
    ----------
    w1, w2 : CharFn or callable
    samples : array_like, optional
        Points in the disk, at least ``2 n^2``; see :func:`default_samples`.
    tol : Tolerance
    starts : int
        Number of starting points for the ``n > 1`` search.
    seed : int

    Returns
    -------
    CoincidenceResult
    """
    n1 = w1.size if isinstance(w1, CharFn) else np.atleast_2d(w1(0.0)).shape[0]
    n2 = w2.size if isinstance(w2, CharFn) else np.atleast_2d(w2(0.0)).shape[0]
    if n1 != n2:
        raise DimensionMismatchError(f"sizes differ: {n1} vs {n2}")
    n = n1
    samples = default_samples(n) if samples is None else np.asarray(samples, dtype=np.complex128).ravel()
    if samples.size < 2 * n * n:
        raise InputError(f"need at least {2 * n * n} samples, got {samples.size}")
    Y = [np.atleast_2d(np.asarray(w1(z), dtype=np.complex128)) for z in samples]
    X = [np.atleast_2d(np.asarray(w2(z), dtype=np.complex128)) for z in samples]
    for z, y, x in zip(samples, Y, X):
        sy = np.linalg.svd(y, compute_uv=False)
        sx = np.linalg.svd(x, compute_uv=False)
        if np.max(np.abs(sy - sx)) > tol.residual_eps:
            return CoincidenceResult(
                "not_coincident",
                witness=complex(z),
                residual=float(np.max(np.abs(sy - sx))),
                singular_values=(sy, sx),
            )
    if n == 1:
        k = int(np.argmax([abs(x[0, 0]) for x in X]))
        if abs(X[k][0, 0]) <= tol.residual_eps:
            c = 1.0 + 0j
        else:
            c = Y[k][0, 0] / X[k][0, 0]
            c = c / abs(c)
        Q1, Q2 = np.array([[c]]), np.eye(1, dtype=np.complex128)
        r = _fit_residual(Q1, Q2, X, Y)
        outcome = "coincident" if r <= tol.residual_eps else "undetermined"
        return CoincidenceResult(outcome, Q1, Q2, residual=r)
    rng = np.random.default_rng(seed)
    starts_q1 = []
    lin = _linear_start(X, Y, tol, rng)
    if lin is not None:
        starts_q1.append(lin)
    k = int(np.argmax([np.linalg.norm(x) for x in X]))
    Uy, _, Vyh = np.linalg.svd(Y[k])
    Ux, _, Vxh = np.linalg.svd(X[k])
    starts_q1.append(Uy @ Ux.conj().T)
    while len(starts_q1) < starts:
        starts_q1.append(random_unitary(n, rng))
    best = (np.inf, None, None)
    for Q1 in starts_q1:
        Q2 = polar_unitary(sum((Q1 @ x).conj().T @ y for x, y in zip(X, Y)))
        Q1, Q2 = _procrustes(Q1, Q2, X, Y)
        r = _fit_residual(Q1, Q2, X, Y)
        if r < best[0]:
            best = (r, Q1, Q2)
        if r <= tol.residual_eps:
            break
    r, Q1, Q2 = best
    if r <= tol.residual_eps:
        return CoincidenceResult("coincident", Q1, Q2, residual=r)
    return CoincidenceResult("undetermined", residual=r)


def hml_equivalent(A, B):
    """Unitary equivalence test for defect-one CNU partial isometries.

    Two such matrices are unitarily equivalent iff their characteristic
    polynomials agree; coefficients are compared within ``residual_eps``.

    Raises
    ------
    WrongDefectError
    DimensionMismatchError
    NotCNUError
    """
    for V in (A, B):
        if V.indices != (1, 1):
            raise WrongDefectError(f"need deficiency indices (1, 1), got {V.indices}")
    if A.dim != B.dim:
        raise DimensionMismatchError(f"dimensions differ: {A.dim} vs {B.dim}")
    for V in (A, B):
        if is_completely_non_unitary(V).kind != "cnu":
            raise NotCNUError("operand is not completely non-unitary")
    gap = np.max(np.abs(charpoly(A.matrix) - charpoly(B.matrix)))
    return bool(gap <= A.tol.residual_eps)
