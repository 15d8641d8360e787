"""Validated partial-isometry matrices and their defect structure.

A square matrix ``V`` is a partial isometry when ``V V* V = V``; then
``V* V`` projects onto the initial space ``(ker V)^perp`` and ``V V*`` onto
the final space ``ran V``.  Everything downstream (characteristic
functions, model frames, order relations) takes a :class:`PartialIsometry`
so these checks and bases are computed once.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    DimensionMismatchError,
    SchemaError,
    NotPartialIsometryError,
    SpectrumObstructionError,
    UnequalIndicesError,
)
from .numerics import DEFAULT_TOL, Tolerance, check_cmatrix, cmatrix_from_json, cmatrix_to_json, eig, svd

__all__ = [
    "PartialIsometry",
    "CNUStatus",
    "validate",
    "deficiency_indices",
    "is_completely_non_unitary",
    "unitary_extension",
    "hm_leq",
    "cayley",
    "inverse_cayley",
    "to_json",
    "from_json",
]


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PartialIsometry:
    """A square partial isometry with cached subspace bases.

    Build instances with :func:`validate`; the constructor does not check
    anything.

    Attributes
    ----------
    matrix : ndarray (N, N)
    tol : Tolerance
    initial_space, final_space : ndarray
        Orthonormal columns spanning ``(ker V)^perp`` and ``ran V``.
    defect_plus, defect_minus : ndarray
        Orthonormal columns spanning ``ker V`` and ``(ran V)^perp``.
    """

    matrix: np.ndarray
    tol: Tolerance = field(default=DEFAULT_TOL)
    initial_space: np.ndarray = None
    final_space: np.ndarray = None
    defect_plus: np.ndarray = None
    defect_minus: np.ndarray = None

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def indices(self):
        return (self.defect_plus.shape[1], self.defect_minus.shape[1])

    @property
    def initial_projection(self):
        return self.initial_space @ self.initial_space.conj().T

    @property
    def kernel_projection(self):
        return self.defect_plus @ self.defect_plus.conj().T

    def adjoint(self):
        return validate(self.matrix.conj().T, self.tol)

    def conjugate_by(self, Q):
        """``Q V Q*`` for a unitary ``Q``."""
        return validate(Q @ self.matrix @ Q.conj().T, self.tol)

    def __repr__(self):
        return f"PartialIsometry(dim={self.dim}, indices={self.indices})"


def validate(M, tol=DEFAULT_TOL):
    """Check that ``M`` is a square partial isometry and cache its bases.

    Raises
    ------
    NotSquareError
    NotPartialIsometryError
        If ``||M M* M - M||_F > tol.residual_eps`` or the singular values
        are not all 0 or 1.
    """
    V = check_cmatrix(M, square=True, name="partial isometry")
    residual = np.linalg.norm(V @ V.conj().T @ V - V)
    if residual > tol.residual_eps:
        raise NotPartialIsometryError(
            f"||V V* V - V||_F = {residual:.3e} exceeds {tol.residual_eps:.1e}"
        )
    U, s, Wh = np.linalg.svd(V, full_matrices=True)
    # singular values of a partial isometry are 0 or 1
    if np.any(np.minimum(np.abs(s - 1), np.abs(s)) > tol.residual_eps):
        raise NotPartialIsometryError("singular values are not all 0 or 1")
    rank = int(np.count_nonzero(s > 0.5))
    W = Wh.conj().T
    return PartialIsometry(
        matrix=_frozen(V),
        tol=tol,
        initial_space=_frozen(W[:, :rank]),
        final_space=_frozen(U[:, :rank]),
        defect_plus=_frozen(W[:, rank:]),
        defect_minus=_frozen(U[:, rank:]),
    )


def deficiency_indices(V):
    """``(dim ker V, dim (ran V)^perp)``."""
    return V.indices


@dataclass(frozen=True, eq=False)
class CNUStatus:
    """Outcome of :func:`is_completely_non_unitary`.

    ``kind`` is ``"cnu"``, ``"not_cnu"`` or ``"ambiguous"``; for
    ``"not_cnu"`` the orthonormal columns of ``unitary_part`` span the
    reducing subspace on which ``V`` is unitary.
    """

    kind: str
    eigenvalues: np.ndarray
    unitary_part: np.ndarray = None

    def __bool__(self):
        return self.kind == "cnu"


def is_completely_non_unitary(V):
    """Decide whether ``V`` has no reducing subspace on which it is unitary.

    For matrices this holds iff every eigenvalue lies in the open disk.
    Eigenvalues within ``rank_eps`` of the circle are collected; their
    eigenvectors must span a reducing subspace on which ``V`` is unitary,
    otherwise the answer is ``"ambiguous"``.
    """
    tol = V.tol
    values, vectors = eig(V.matrix, tol)
    boundary = np.abs(values) >= 1 - tol.rank_eps
    if not np.any(boundary):
        return CNUStatus("cnu", values)
    U, s, _ = svd(vectors[:, boundary])
    r = int(np.count_nonzero(s > tol.rank_eps * s[0]))
    P_basis = U[:, :r]
    P = P_basis @ P_basis.conj().T
    M = V.matrix
    eye = np.eye(V.dim)
    leak = max(
        np.linalg.norm((eye - P) @ M @ P),
        np.linalg.norm((eye - P) @ M.conj().T @ P),
    )
    restricted = P_basis.conj().T @ M @ P_basis
    unitarity = np.linalg.norm(restricted.conj().T @ restricted - np.eye(r))
    if leak <= tol.residual_eps and unitarity <= tol.residual_eps:
        return CNUStatus("not_cnu", values, P_basis)
    return CNUStatus("ambiguous", values)


def unitary_extension(V):
    """A unitary ``U`` with ``U = V`` on the initial space.

    The defect spaces are paired by matching the cached orthonormal bases
    of ``ker V`` and ``(ran V)^perp`` column by column.
    """
    n_plus, n_minus = V.indices
    if n_plus != n_minus:
        raise UnequalIndicesError(f"deficiency indices {V.indices} are unequal")
    return V.matrix + V.defect_minus @ V.defect_plus.conj().T


def hm_leq(A, B):
    """Halmos-McLaughlin order: ``B`` agrees with ``A`` on ``A``'s initial space."""
    if A.dim != B.dim:
        raise DimensionMismatchError(f"dimensions differ: {A.dim} vs {B.dim}")
    residual = np.linalg.norm(A.matrix - B.matrix @ A.matrix.conj().T @ A.matrix)
    return bool(residual <= A.tol.residual_eps)


def cayley(V, tol=None):
    """Inverse Cayley transform ``i (I + V)(I - V)^{-1}`` of a partial isometry.

    ``V`` may be a :class:`PartialIsometry` or a plain square matrix.

    Raises
    ------
    SpectrumObstructionError
        If ``1`` is (numerically) an eigenvalue of ``V``.
    """
    M, tol = _matrix_and_tol(V, tol)
    eye = np.eye(M.shape[0])
    smin = np.linalg.svd(eye - M, compute_uv=False)[-1]
    if smin <= tol.rank_eps:
        raise SpectrumObstructionError("1 lies in the spectrum of V")
    return 1j * np.linalg.solve((eye - M).T, (eye + M).T).T


def inverse_cayley(S, tol=None):
    """Cayley transform ``(S - iI)(S + iI)^{-1}``.

    Raises
    ------
    SpectrumObstructionError
        If ``-i`` is (numerically) an eigenvalue of ``S``.
    """
    M, tol = _matrix_and_tol(S, tol)
    eye = np.eye(M.shape[0])
    smin = np.linalg.svd(M + 1j * eye, compute_uv=False)[-1]
    if smin <= tol.rank_eps * max(1.0, np.linalg.norm(M, 2)):
        raise SpectrumObstructionError("-i lies in the spectrum of S")
    return np.linalg.solve((M + 1j * eye).T, (M - 1j * eye).T).T


def _matrix_and_tol(X, tol):
    if isinstance(X, PartialIsometry):
        return X.matrix, tol or X.tol
    return check_cmatrix(X, square=True), tol or DEFAULT_TOL


def to_json(V):
    """CMatrix JSON of ``V`` plus its tolerance."""
    out = cmatrix_to_json(V.matrix)
    out["tol"] = V.tol.to_json()
    return out


def from_json(obj, tol=None, field="matrix"):
    """Parse CMatrix JSON with an optional ``"tol"`` object and validate it.

    An explicit ``tol`` argument overrides the document's tolerance.
    """
    M = cmatrix_from_json(obj, field)
    if tol is None:
        spec = obj.get("tol", {})
        if not isinstance(spec, dict):
            raise SchemaError("'tol' must be an object", field)
        try:
            tol = Tolerance(
                rank_eps=float(spec.get("rank_eps", DEFAULT_TOL.rank_eps)),
                residual_eps=float(spec.get("residual_eps", DEFAULT_TOL.residual_eps)),
            )
        except (TypeError, ValueError) as exc:
            raise SchemaError(f"bad tolerance: {exc}", field) from exc
    return validate(M, tol)
