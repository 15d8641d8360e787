"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; the
helpers here validate them, decide numerical rank, and build orthonormal
bases for the subspaces the rest of the package works with.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    InputError,
    NonConvergenceError,
    NotOrthonormalError,
    NotSquareError,
    SchemaError,
)

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "check_cmatrix",
    "svd",
    "numerical_rank",
    "eig",
    "onb_nullspace",
    "onb_range",
    "complete_to_unitary",
    "polar_unitary",
    "charpoly",
    "unitary_intertwiner",
    "random_unitary",
    "cmatrix_to_json",
    "cmatrix_from_json",
    "complex_to_json",
    "complex_from_json",
]


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds.

    Parameters
    ----------
    rank_eps : float
        A singular value ``s`` counts as nonzero iff ``s > rank_eps * s_max``.
        Also used as the distance from the unit circle below which an
        eigenvalue is treated as unimodular.
    residual_eps : float
        Absolute bound on identity residuals (Frobenius norm unless stated).
    """

    rank_eps: float = 1e-9
    residual_eps: float = 1e-8

    def __post_init__(self):
        for name in ("rank_eps", "residual_eps"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise InputError(f"{name} must be a positive finite number, got {value!r}")

    def to_json(self):
        return {"rank_eps": self.rank_eps, "residual_eps": self.residual_eps}


DEFAULT_TOL = Tolerance()


def check_cmatrix(M, *, square=False, name="matrix"):
    """Validate ``M`` and return it as a 2-d complex128 array.

    Raises
    ------
    InputError
        If ``M`` is not 2-d, is empty, or holds NaN/Inf.
    NotSquareError
        If ``square`` is set and ``M`` is rectangular.
    """
    M = np.asarray(M)
    if M.ndim != 2:
        raise InputError(f"{name} must be 2-d, got ndim={M.ndim}")
    if M.shape[0] < 1 or M.shape[1] < 1:
        raise InputError(f"{name} must have at least one row and column, got {M.shape}")
    M = M.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(M)):
        raise InputError(f"{name} contains NaN or Inf")
    if square and M.shape[0] != M.shape[1]:
        raise NotSquareError(f"{name} must be square, got {M.shape}")
    return M


def svd(M):
    """Thin SVD ``M = U @ diag(s) @ W.conj().T`` with ``s`` descending."""
    M = np.asarray(M, dtype=np.complex128)
    U, s, Wh = np.linalg.svd(M, full_matrices=False)
    return U, s, Wh.conj().T


def numerical_rank(s, tol=DEFAULT_TOL):
    """Number of singular values above ``tol.rank_eps * max(s)``."""
    s = np.asarray(s)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > tol.rank_eps * s.max()))


def eig(M, tol=DEFAULT_TOL):
    """Eigenvalues and unit eigenvectors of a square matrix.

    Returns
    -------
    values : (n,) complex ndarray
    vectors : (n, n) complex ndarray
        Column ``k`` is a unit eigenvector for ``values[k]``.

    Raises
    ------
    NonConvergenceError
        If LAPACK fails, or a returned pair violates
        ``||Mx - lx|| <= residual_eps * max(||M||, 1)``.
    """
    M = check_cmatrix(M, square=True)
    try:
        values, vectors = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise NonConvergenceError(f"eigensolver failed: {exc}") from exc
    vectors = vectors / np.linalg.norm(vectors, axis=0, keepdims=True)
    scale = max(np.linalg.norm(M, 2), 1.0)
    residual = np.linalg.norm(M @ vectors - vectors * values, axis=0)
    # LAPACK balances first, which can cost accuracy on defective matrices;
    # inverse iteration brings such vectors back to a small residual
    eye = np.eye(M.shape[0])
    for k in np.flatnonzero(residual > 1e-3 * tol.residual_eps * scale):
        x, shift = vectors[:, k], values[k] + 1e-14 * scale
        for _ in range(3):
            try:
                x = np.linalg.solve(M - shift * eye, x)
            except np.linalg.LinAlgError:
                break
            x = x / np.linalg.norm(x)
        r = np.linalg.norm(M @ x - values[k] * x)
        if r < residual[k]:
            vectors[:, k], residual[k] = x, r
    if residual.size and residual.max() > tol.residual_eps * scale:
        raise NonConvergenceError(
            f"eigenpair residual {residual.max():.3e} exceeds {tol.residual_eps * scale:.3e}"
        )
    return values, vectors


def onb_nullspace(M, tol=DEFAULT_TOL):
    """Orthonormal columns spanning ``ker M``.

    The column count is ``cols - rank``; column order follows the SVD so the
    result is deterministic for a given input.
    """
    M = np.asarray(M, dtype=np.complex128)
    _, s, Wh = np.linalg.svd(M, full_matrices=True)
    r = numerical_rank(s, tol)
    return np.ascontiguousarray(Wh[r:].conj().T)


def onb_range(M, tol=DEFAULT_TOL):
    """Orthonormal columns spanning ``ran M``."""
    M = np.asarray(M, dtype=np.complex128)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    r = numerical_rank(s, tol)
    return np.ascontiguousarray(U[:, :r])


def complete_to_unitary(C, tol=DEFAULT_TOL, n=None):
    """Extend orthonormal columns ``C`` to a unitary matrix ``[C | N]``.

    ``n`` gives the ambient dimension when ``C`` has no columns.

    Raises
    ------
    NotOrthonormalError
        If ``C* C`` differs from the identity by more than ``residual_eps``.
    """
    C = np.asarray(C, dtype=np.complex128)
    if C.ndim != 2:
        raise InputError("C must be 2-d")
    if C.shape[1] == 0:
        if n is None:
            n = C.shape[0]
        return np.eye(n, dtype=np.complex128)
    k = C.shape[1]
    if np.linalg.norm(C.conj().T @ C - np.eye(k)) > tol.residual_eps:
        raise NotOrthonormalError("columns are not orthonormal")
    if k == C.shape[0]:
        return C.copy()
    # complement = ker C*, which has exactly n - k dimensions
    _, _, Wh = np.linalg.svd(C.conj().T, full_matrices=True)
    N = Wh[k:].conj().T
    return np.hstack([C, N])


def polar_unitary(M):
    """Unitary (or isometric) factor of the polar decomposition of ``M``.

    For ``M`` of shape (m, n) with ``m >= n`` this is the matrix with
    orthonormal columns nearest to ``M`` in Frobenius norm.
    """
    U, _, Wh = np.linalg.svd(np.asarray(M, dtype=np.complex128), full_matrices=False)
    return U @ Wh


def charpoly(M):
    """Monic characteristic polynomial coefficients, highest power first.

    Computed from the power sums ``tr(M^k)`` through Newton's identities
    rather than from eigenvalues, which are ill-conditioned at nontrivial
    Jordan blocks (a nilpotent 4x4 block gives eigenvalues of size 1e-4).
    """
    M = check_cmatrix(M, square=True)
    n = M.shape[0]
    power = np.eye(n, dtype=np.complex128)
    p = np.empty(n + 1, dtype=np.complex128)
    for k in range(1, n + 1):
        power = power @ M
        p[k] = np.trace(power)
    e = np.zeros(n + 1, dtype=np.complex128)
    e[0] = 1.0
    for k in range(1, n + 1):
        e[k] = sum((-1) ** (i - 1) * e[k - i] * p[i] for i in range(1, k + 1)) / k
    return np.array([(-1) ** k * e[k] for k in range(n + 1)])


def unitary_intertwiner(A, B, tol=DEFAULT_TOL):
    """A unitary ``Q`` with ``Q A Q* = B``, or ``None``.

    Solves the linear system ``X A = B X``, ``X A* = B* X``; a generic
    element of its solution space is invertible when ``A`` and ``B`` are
    unitarily equivalent, and its polar factor is then the required unitary.
    The answer is verified before it is returned.
    """
    A = check_cmatrix(A, square=True)
    B = check_cmatrix(B, square=True)
    if A.shape != B.shape:
        return None
    n = A.shape[0]
    eye = np.eye(n)
    # column-major vec: vec(X A) = (A^T kron I) vec X, vec(B X) = (I kron B) vec X
    rows = [
        np.kron(A.T, eye) - np.kron(eye, B),
        np.kron(A.conj(), eye) - np.kron(eye, B.conj().T),
    ]
    N = onb_nullspace(np.vstack(rows), tol)
    if N.shape[1] == 0:
        return None
    rng = np.random.default_rng(7)
    scale = max(np.linalg.norm(A), np.linalg.norm(B), 1.0)
    for _ in range(4):
        coeffs = rng.standard_normal(N.shape[1]) + 1j * rng.standard_normal(N.shape[1])
        X = (N @ coeffs).reshape(n, n, order="F")
        s = np.linalg.svd(X, compute_uv=False)
        if s[-1] <= tol.rank_eps * s[0]:
            continue
        Q = polar_unitary(X)
        if np.linalg.norm(Q @ A @ Q.conj().T - B) <= tol.residual_eps * scale:
            return Q
    return None


def random_unitary(n, rng):
    """Haar-distributed ``n x n`` unitary drawn from ``rng``."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(pair, field="value"):
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise SchemaError("expected a [re, im] pair", field)
    try:
        value = complex(float(pair[0]), float(pair[1]))
    except (TypeError, ValueError) as exc:
        raise SchemaError("entries must be numbers", field) from exc
    if not np.isfinite(value):
        raise SchemaError("entries must be finite", field)
    return value


def cmatrix_to_json(M):
    """Row-major ``{"rows", "cols", "data": [[re, im], ...]}`` encoding."""
    M = np.asarray(M, dtype=np.complex128)
    flat = M.reshape(-1)
    return {
        "rows": int(M.shape[0]),
        "cols": int(M.shape[1]),
        "data": [[float(v.real), float(v.imag)] for v in flat],
    }


def cmatrix_from_json(obj, field="matrix"):
    """Inverse of :func:`cmatrix_to_json`; rejects wrong-length data."""
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", field)
    for key in ("rows", "cols", "data"):
        if key not in obj:
            raise SchemaError(f"missing key {key!r}", field)
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not (isinstance(rows, int) and isinstance(cols, int)) or rows < 1 or cols < 1:
        raise SchemaError("rows and cols must be positive integers", field)
    if not isinstance(data, list) or len(data) != rows * cols:
        raise SchemaError(
            f"data must hold rows*cols = {rows * cols} entries, got "
            f"{len(data) if isinstance(data, list) else type(data).__name__}",
            field,
        )
    values = [complex_from_json(v, f"{field}.data[{i}]") for i, v in enumerate(data)]
    return np.array(values, dtype=np.complex128).reshape(rows, cols)
