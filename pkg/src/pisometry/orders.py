"""Pre-orders on partial isometries.

For partial isometries ``A`` on ``H_A`` and ``B`` on ``H_B``:

* ``A <=_q B`` when some injective ``X: H_A -> H_B`` maps the initial space
  of ``A`` into that of ``B`` and satisfies ``X A = B X`` there;
* ``A <= B`` when such an ``X`` can be chosen isometric;
* the Halmos-McLaughlin order ``A <~ B`` (same space) when ``B`` agrees with
  ``A`` on ``A``'s initial space.

The intertwining constraints are linear in ``X``, so :func:`leq_q` reduces
to a rank question over a solution space.  :func:`leq` adds the nonconvex
isometry constraint and is a semi-decision: it proves ``Fails`` only from
an obstruction and otherwise reports ``Undetermined``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DimensionMismatchError, NotCNUError, PisometryError, WrongDefectError
from .livsic import hml_equivalent
from .model_space import FiniteBlaschke, compressed_shift, isometric_multiplier, tm_basis
from .numerics import onb_nullspace, polar_unitary, unitary_intertwiner
from .partial_isometry import hm_leq, is_completely_non_unitary
from .rational import h2_inner

__all__ = [
    "OrderVerdict",
    "constraint_residual",
    "leq_q",
    "leq",
    "sim_check",
    "simq_check",
    "blaschke_symbol",
]

HOLDS, FAILS, UNDETERMINED = "holds", "fails", "undetermined"

_SAMPLES = 16


@dataclass(frozen=True, eq=False)
class OrderVerdict:
    """Result of an order test.

    Attributes
    ----------
    relation : str
        ``"hm"``, ``"iso"``, ``"quasi"`` or ``"sim_q"``.
    outcome : str
        ``"holds"``, ``"fails"`` or ``"undetermined"``.
    witness : ndarray or None
        The intertwiner ``X`` when the relation holds.
    obstruction : str or None
        Why the relation fails.
    residuals : dict
        Diagnostics such as constraint residuals and singular-value ratios.
    """

    relation: str
    outcome: str
    witness: np.ndarray = None
    obstruction: str = None
    residuals: dict = field(default_factory=dict)

    @property
    def holds(self):
        return self.outcome == HOLDS

    def to_json(self):
        out = {"relation": self.relation, "outcome": self.outcome, "residuals": dict(self.residuals)}
        if self.obstruction is not None:
            out["obstruction"] = self.obstruction
        return out


def _check_pair(A, B):
    for V in (A, B):
        if is_completely_non_unitary(V).kind != "cnu":
            raise NotCNUError("order tests need completely non-unitary operands")
    if A.indices != B.indices:
        raise WrongDefectError(f"deficiency indices differ: {A.indices} vs {B.indices}")


def constraint_residual(X, A, B):
    """``max(||(X A - B X) P_A||, ||P_{ker B} X P_A||)`` in Frobenius norm."""
    P = A.initial_projection
    return float(
        max(
            np.linalg.norm((X @ A.matrix - B.matrix @ X) @ P),
            np.linalg.norm(B.kernel_projection @ X @ P),
        )
    )


def _solution_space(A, B):
    """Orthonormal basis (columns are column-major ``vec X``) of the constraint space."""
    m = B.dim
    P = A.initial_projection
    AP = A.matrix @ P
    rows = [
        np.kron(AP.T, np.eye(m)) - np.kron(P.T, B.matrix),
        np.kron(P.T, B.kernel_projection),
    ]
    return onb_nullspace(np.vstack(rows), A.tol)


def _generic_element(N, shape, rng):
    coeffs = rng.standard_normal(N.shape[1]) + 1j * rng.standard_normal(N.shape[1])
    X = (N @ coeffs).reshape(shape, order="F")
    return X / np.linalg.norm(X)


def _best_rank(N, shape, rng):
    """Sampled element with the largest ``s_min / s_max`` (generic-rank probe)."""
    best, best_X = -1.0, None
    for _ in range(_SAMPLES):
        X = _generic_element(N, shape, rng)
        s = np.linalg.svd(X, compute_uv=False)
        ratio = s[min(shape) - 1] / s[0] if s[0] > 0 else 0.0
        if ratio > best:
            best, best_X = ratio, X
    return best, best_X


def leq_q(A, B, seed=0):
    """Decide ``A <=_q B``.

    Holds iff the linear constraint space contains an injective element;
    a witness with ``s_min / s_max > rank_eps`` is exhibited and checked.
    Fails when the space is ``{0}`` or every one of 16 random elements is
    rank deficient (generic rank is attained almost surely).

    Raises
    ------
    NotCNUError, WrongDefectError
    """
    _check_pair(A, B)
    tol = A.tol
    rng = np.random.default_rng(seed)
    shape = (B.dim, A.dim)
    if B.dim < A.dim:
        return OrderVerdict("quasi", FAILS, obstruction="target space is smaller; no injective map")
    N = _solution_space(A, B)
    if N.shape[1] == 0:
        return OrderVerdict("quasi", FAILS, obstruction="only X = 0 satisfies the constraints")
    ratio, X = _best_rank(N, shape, rng)
    resid = constraint_residual(X, A, B)
    info = {"solution_dim": int(N.shape[1]), "smin_ratio": float(ratio), "constraint": resid}
    if ratio > tol.rank_eps and resid <= tol.residual_eps:
        return OrderVerdict("quasi", HOLDS, witness=X, residuals=info)
    return OrderVerdict(
        "quasi", FAILS, obstruction="every solution is rank deficient (generic rank test)", residuals=info
    )


def blaschke_symbol(V):
    """Finite Blaschke product ``B`` with ``S_B`` unitarily equivalent to ``V``.

    ``V`` must be CNU with indices ``(1, 1)``.  Eigenvalues that agree to
    within ``1e-3`` are merged to their mean (multiple eigenvalues split
    by roughly ``eps^(1/k)`` in floating point).  Returns ``(B, S_B, U)``
    with ``U V U^* = S_B``, or ``None`` when the equivalence cannot be
    verified.
    """
    values = np.linalg.eigvals(V.matrix)
    clusters = []
    for v in values:
        for c in clusters:
            if abs(np.mean(c) - v) < 1e-3:
                c.append(v)
                break
        else:
            clusters.append([v])
    zeros = []
    for c in clusters:
        zeros += [complex(np.mean(c))] * len(c)
    zeros.sort(key=lambda a: (abs(a) > 1e-12, abs(a), np.angle(a)))
    zeros = [0j if abs(a) <= 1e-12 else a for a in zeros]
    try:
        B = FiniteBlaschke(tuple(zeros))
        S = compressed_shift(B, V.tol)
    except PisometryError:
        return None
    U = unitary_intertwiner(V.matrix, S.matrix, V.tol)
    if U is None:
        return None
    return B, S, U


def _multiplier_witness(A, B, phi, symA, symB):
    """``X = U_B^* Phi U_A`` with ``Phi[k, j] = <phi e_j, f_k>``."""
    B1, _, UA = symA
    B2, _, UB = symB
    src, dst = tm_basis(B1), tm_basis(B2)
    Phi = np.array(
        [[h2_inner(phi * e, f) for e in src.functions] for f in dst.functions],
        dtype=np.complex128,
    )
    return UB.conj().T @ Phi @ UA


def _isometry_residual(X):
    return float(np.linalg.norm(X.conj().T @ X - np.eye(X.shape[1])))


def _alternating(N, shape, A, B, budget, rng, iters=500):
    """Alternate between the constraint space and the isometries."""
    best = (np.inf, None)
    for _ in range(max(1, budget)):
        X = polar_unitary(_generic_element(N, shape, rng))
        for _ in range(iters):
            Y = (N @ (N.conj().T @ X.reshape(-1, order="F"))).reshape(shape, order="F")
            X_new = polar_unitary(Y)
            gap = np.linalg.norm(X_new - Y)
            X = X_new
            if gap < 1e-13:
                break
        Y = (N @ (N.conj().T @ X.reshape(-1, order="F"))).reshape(shape, order="F")
        r = max(_isometry_residual(Y), constraint_residual(Y, A, B))
        if r < best[0]:
            best = (r, Y)
    return best


def leq(A, B, budget=8, seed=0):
    """Decide ``A <= B`` (isometric intertwiner), as a semi-decision.

    Order of attempts: the Halmos-McLaughlin shortcut (witness ``I``); a
    unitary ``Q`` with ``Q A Q^* = B`` for equal dimensions; a failed :func:`leq_q` (obstruction); for indices ``(1, 1)`` delegation to
    :func:`~pisometry.model_space.isometric_multiplier` on the Blaschke
    symbols; alternating projections from ``budget`` starts.  Anything
    else is ``"undetermined"``.

    Raises
    ------
    NotCNUError, WrongDefectError
    """
    _check_pair(A, B)
    tol = A.tol
    iso_tol = 1e-9
    if A.dim == B.dim and hm_leq(A, B):
        X = np.eye(A.dim, dtype=np.complex128)
        return OrderVerdict(
            "iso", HOLDS, witness=X, residuals={"constraint": constraint_residual(X, A, B), "method": "hm"}
        )
    if A.dim == B.dim:
        Q = unitary_intertwiner(A.matrix, B.matrix, tol)
        if Q is not None:
            return OrderVerdict(
                "iso",
                HOLDS,
                witness=Q,
                residuals={"constraint": constraint_residual(Q, A, B), "method": "unitary_equivalence"},
            )
    q = leq_q(A, B, seed=seed)
    if q.outcome == FAILS:
        return OrderVerdict("iso", FAILS, obstruction="quasi order fails: " + q.obstruction, residuals=q.residuals)
    rng = np.random.default_rng(seed)
    info = {}
    if A.indices == (1, 1):
        symA, symB = blaschke_symbol(A), blaschke_symbol(B)
        if symA is not None and symB is not None:
            result = isometric_multiplier(symA[0], symB[0], budget=budget, rng=rng)
            info["multiplier"] = result.method
            if result.outcome == "not_found":
                return OrderVerdict(
                    "iso", FAILS, obstruction="no isometric multiplier between model spaces", residuals=info
                )
            if result.outcome == "found":
                X = _multiplier_witness(A, B, result.multiplier, symA, symB)
                r_iso, r_con = _isometry_residual(X), constraint_residual(X, A, B)
                if r_iso <= iso_tol and r_con <= tol.residual_eps:
                    info.update(isometry=r_iso, constraint=r_con, method="multiplier")
                    return OrderVerdict("iso", HOLDS, witness=X, residuals=info)
    N = _solution_space(A, B)
    r, Y = _alternating(N, (B.dim, A.dim), A, B, budget, rng)
    info["alternating_residual"] = r
    if Y is not None and r <= iso_tol:
        info.update(isometry=_isometry_residual(Y), constraint=constraint_residual(Y, A, B), method="alternating")
        return OrderVerdict("iso", HOLDS, witness=Y, residuals=info)
    return OrderVerdict("iso", UNDETERMINED, residuals=info)


def sim_check(A, B):
    """Unitary equivalence for indices ``(1, 1)``, via characteristic polynomials."""
    return hml_equivalent(A, B)


def simq_check(A, B, seed=0):
    """Decide whether ``L A = B L`` on ``ker A^perp`` for an invertible ``L``
    with ``L ker A^perp = ker B^perp``.

    A generic element of the :func:`leq_q` constraint space is tested for
    invertibility.  The verdict is cross-checked against ``leq_q`` in both
    directions; disagreement, or a smallest singular-value ratio between
    ``rank_eps`` and ``1e-6``, gives ``"undetermined"``.

    Raises
    ------
    DimensionMismatchError
    """
    if A.dim != B.dim:
        raise DimensionMismatchError(f"dimensions differ: {A.dim} vs {B.dim}")
    _check_pair(A, B)
    tol = A.tol
    rng = np.random.default_rng(seed)
    N = _solution_space(A, B)
    forward = leq_q(A, B, seed=seed).outcome
    backward = leq_q(B, A, seed=seed).outcome
    info = {"leq_q_forward": forward, "leq_q_backward": backward}
    if N.shape[1] == 0:
        ratio, L = 0.0, None
    else:
        ratio, L = _best_rank(N, (B.dim, A.dim), rng)
    info["smin_ratio"] = float(ratio)
    if L is not None and ratio > 1e-6:
        info["constraint"] = constraint_residual(L, A, B)
        if info["constraint"] <= tol.residual_eps and forward == HOLDS and backward == HOLDS:
            return OrderVerdict("sim_q", HOLDS, witness=L, residuals=info)
        return OrderVerdict("sim_q", UNDETERMINED, residuals=info)
    if ratio <= tol.rank_eps:
        if forward == HOLDS and backward == HOLDS:
            return OrderVerdict("sim_q", UNDETERMINED, residuals=info)
        return OrderVerdict("sim_q", FAILS, obstruction="no invertible intertwiner", residuals=info)
    return OrderVerdict("sim_q", UNDETERMINED, residuals=info)
