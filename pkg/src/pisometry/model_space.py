"""Finite Blaschke products and their model spaces.

For a finite Blaschke product ``B`` of degree ``n`` the model space
``K_B = H^2 ominus B H^2`` is ``n``-dimensional and consists of rational
functions ``r(z) / prod (1 - conj(a_i) z)`` with ``deg r < n``.  This module
builds an orthonormal Takenaka-Malmquist basis for it and expresses the
compressed shift, the conjugation, Crofoot transforms and Clark measures in
that basis.  It also decides when one model space multiplies into another.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    InputError,
    NonUnimodularRootError,
    NotVanishingAtZeroError,
    QuadratureNonConvergenceError,
    RootFindingError,
    SchemaError,
)
from .numerics import DEFAULT_TOL, complex_from_json, complex_to_json
from .partial_isometry import validate
from .rational import Rational, h2_inner, h2_norm, poly_from_factors

__all__ = [
    "FiniteBlaschke",
    "ModelSpaceBasis",
    "AtomicMeasure",
    "divides",
    "tm_basis",
    "kernel",
    "kernel_function",
    "conjugation",
    "conjugation_matrix",
    "compressed_shift",
    "mult_partial_isometry",
    "crofoot",
    "clark_measure",
    "inner_from_measure",
    "poisson_integral",
    "measure_distance",
    "multiplier_space",
    "multiplier_exists",
    "multiplier_membership_residual",
    "IsometricMultiplierResult",
    "isometric_multiplier",
    "atomic_singular_inner",
    "singular_carrier",
    "quadrature_isometry_check",
]

_MATCH = 1e-9


@dataclass(frozen=True, eq=False)
class FiniteBlaschke:
    """``c * prod (z - a_i) / (1 - conj(a_i) z)``.

    Parameters
    ----------
    zeros : sequence of complex
        Zeros in the open disk, repeated according to multiplicity.
    constant : complex
        Unimodular front constant.
    """

    zeros: tuple = ()
    constant: complex = 1.0

    def __post_init__(self):
        zeros = tuple(complex(a) for a in self.zeros)
        if any(not np.isfinite(a) for a in zeros):
            raise InputError("zeros must be finite")
        if any(abs(a) > 1 - DEFAULT_TOL.rank_eps for a in zeros):
            raise InputError("zeros must lie in the open unit disk")
        c = complex(self.constant)
        if not np.isfinite(c) or abs(abs(c) - 1) > 1e-12:
            raise InputError(f"front constant must be unimodular, got {c!r}")
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "constant", c)

    @property
    def degree(self):
        return len(self.zeros)

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        value = np.full(z.shape, self.constant, dtype=np.complex128)
        for a in self.zeros:
            value = value * (z - a) / (1 - np.conj(a) * z)
        return value if value.ndim else complex(value)

    def numerator(self):
        """Ascending coefficients of ``c * prod (z - a_i)``."""
        p = np.array([self.constant], dtype=np.complex128)
        for a in self.zeros:
            p = np.convolve(p, [-a, 1.0])
        return p

    def denominator(self):
        """Ascending coefficients of ``prod (1 - conj(a_i) z)``."""
        return poly_from_factors(self.zeros)

    def as_rational(self):
        return Rational(self.numerator(), self.zeros)

    def derivative_modulus(self, zeta):
        """``|B'(zeta)|`` for unimodular ``zeta``."""
        zeta = np.asarray(zeta, dtype=np.complex128)
        total = np.zeros(zeta.shape)
        for a in self.zeros:
            total = total + (1 - abs(a) ** 2) / np.abs(zeta - a) ** 2
        return total

    def to_json(self):
        return {
            "zeros": [complex_to_json(a) for a in self.zeros],
            "constant": complex_to_json(self.constant),
        }

    @classmethod
    def from_json(cls, obj, field="blaschke"):
        if not isinstance(obj, dict) or "zeros" not in obj:
            raise SchemaError("expected an object with 'zeros'", field)
        if not isinstance(obj["zeros"], list):
            raise SchemaError("'zeros' must be a list", field)
        zeros = [complex_from_json(v, f"{field}.zeros[{i}]") for i, v in enumerate(obj["zeros"])]
        constant = complex_from_json(obj.get("constant", [1.0, 0.0]), f"{field}.constant")
        try:
            return cls(tuple(zeros), constant)
        except InputError as exc:
            raise SchemaError(str(exc), field) from exc

    def __repr__(self):
        return f"FiniteBlaschke(zeros={list(self.zeros)}, constant={self.constant})"


def _match_multiset(small, large, tol=_MATCH):
    remaining = list(large)
    for a in small:
        for i, b in enumerate(remaining):
            if abs(a - b) <= tol:
                del remaining[i]
                break
        else:
            return None
    return remaining


def divides(B1, B2):
    """True iff the zeros of ``B1`` are contained in those of ``B2`` with multiplicity."""
    return _match_multiset(B1.zeros, B2.zeros) is not None


@dataclass(frozen=True, eq=False)
class ModelSpaceBasis:
    """Orthonormal Takenaka-Malmquist basis of ``K_B``."""

    blaschke: FiniteBlaschke
    functions: tuple

    def __len__(self):
        return len(self.functions)

    def evaluate(self, z):
        """Array of shape ``(n,) + shape(z)`` with ``e_k(z)``."""
        return np.array([e(z) for e in self.functions])

    def gram(self):
        n = len(self)
        G = np.empty((n, n), dtype=np.complex128)
        for j in range(n):
            for k in range(n):
                G[k, j] = h2_inner(self.functions[j], self.functions[k])
        return G

    def coefficients(self, f):
        """``<f, e_k>`` for each basis element."""
        return np.array([h2_inner(f, e) for e in self.functions])

    def combine(self, coeffs):
        """The rational function ``sum_k coeffs[k] e_k``."""
        out = Rational.constant(0)
        for c, e in zip(coeffs, self.functions):
            out = out + e * c
        return out

    def residual(self, f):
        """``||f - P f||`` with ``P`` the orthogonal projection onto ``K_B``."""
        return h2_norm(f - self.combine(self.coefficients(f)))


def tm_basis(B):
    """Takenaka-Malmquist basis generated by the zeros of ``B`` in order.

    ``e_k(z) = sqrt(1 - |a_k|^2) / (1 - conj(a_k) z) * prod_{j<k} (z - a_j) / (1 - conj(a_j) z)``
    """
    if B.degree < 1:
        raise InputError("model space of a constant is trivial")
    functions = []
    prefix = np.ones(1, dtype=np.complex128)
    for k, a in enumerate(B.zeros):
        functions.append(Rational(np.sqrt(1 - abs(a) ** 2) * prefix, B.zeros[: k + 1]))
        prefix = np.convolve(prefix, [-a, 1.0])
    return ModelSpaceBasis(B, tuple(functions))


def kernel(B, lam, z):
    """Reproducing kernel ``(1 - conj(B(lam)) B(z)) / (1 - conj(lam) z)`` of ``K_B``."""
    return (1 - np.conj(B(lam)) * B(z)) / (1 - np.conj(lam) * z)


def kernel_function(B, lam):
    """``k_lam`` as a :class:`Rational`."""
    Bl = B(lam)
    num = _padd(B.denominator(), -np.conj(Bl) * B.numerator())
    return Rational(num, tuple(B.zeros) + (lam,))


def _padd(p, q):
    out = np.zeros(max(len(p), len(q)), dtype=np.complex128)
    out[: len(p)] += p
    out[: len(q)] += q
    return out


def conjugation_matrix(basis):
    """Matrix ``C`` with ``coeffs(C_B f) = C @ conj(coeffs(f))``.

    ``C_B f = B conj(z f)`` on the circle, so ``C[j, k] = <B, z e_j e_k>``.
    """
    B = basis.blaschke.as_rational()
    z = Rational.monomial(1)
    n = len(basis)
    C = np.empty((n, n), dtype=np.complex128)
    for j in range(n):
        for k in range(j, n):
            C[j, k] = C[k, j] = h2_inner(B, z * basis.functions[j] * basis.functions[k])
    return C


def conjugation(B, coeffs, basis=None):
    """Apply the conjugation ``C_B`` to a function given by TM coefficients."""
    basis = basis or tm_basis(B)
    return conjugation_matrix(basis) @ np.conj(np.asarray(coeffs, dtype=np.complex128))


def _shift_matrix(basis):
    """``T[k, j] = <z e_j, e_k>``, the compression of multiplication by ``z``."""
    z = Rational.monomial(1)
    n = len(basis)
    T = np.empty((n, n), dtype=np.complex128)
    for j in range(n):
        zf = z * basis.functions[j]
        for k in range(n):
            T[k, j] = h2_inner(zf, basis.functions[k])
    return T


def compressed_shift(B, tol=DEFAULT_TOL):
    """Compressed shift ``S_B`` in the TM basis, as a partial isometry.

    Raises
    ------
    NotVanishingAtZeroError
        If ``B(0) != 0``; then ``S_B`` is not a partial isometry.
    """
    if B.degree < 1 or abs(B(0)) > tol.residual_eps:
        raise NotVanishingAtZeroError("compressed shift needs B(0) = 0")
    return validate(_shift_matrix(tm_basis(B)), tol)


def mult_partial_isometry(B, tol=DEFAULT_TOL):
    """Multiplication by ``z`` on ``{f in K_B : z f in K_B}``, zero elsewhere.

    The excluded direction is ``C_B k_0``, so the matrix is
    ``T (I - c c^*)`` with ``c`` the normalized coefficients of ``C_B k_0``.
    """
    basis = tm_basis(B)
    k0 = basis.coefficients(kernel_function(B, 0.0))
    c = conjugation_matrix(basis) @ np.conj(k0)
    c = c / np.linalg.norm(c)
    M = _shift_matrix(basis) @ (np.eye(len(basis)) - np.outer(c, c.conj()))
    return validate(M, tol)


def _polish_roots(coeffs_desc, roots, steps=3):
    d = np.polyder(coeffs_desc)
    out = np.array(roots, dtype=np.complex128)
    for _ in range(steps):
        dv = np.polyval(d, out)
        ok = np.abs(dv) > 1e-300
        step = np.zeros_like(out)
        step[ok] = np.polyval(coeffs_desc, out[ok]) / dv[ok]
        out = out - step
    return out


def _blaschke_from_rational(num, den, verify_points, tol=1e-8):
    """Write ``num / den`` as a finite Blaschke product.

    Zeros are the roots of ``num``; the front constant is fitted at the
    candidate point where the Blaschke factor is largest and then checked
    against ``verify_points``.

    Raises
    ------
    RootFindingError
    """
    desc = np.asarray(num, dtype=np.complex128)[::-1]
    nz = np.flatnonzero(np.abs(desc) > 0)
    desc = desc[nz[0] :] if nz.size else desc
    if desc.size <= 1:
        roots = np.zeros(0, dtype=np.complex128)
    else:
        roots = _polish_roots(desc, np.roots(desc))
    if np.any(np.abs(roots) >= 1 - DEFAULT_TOL.rank_eps):
        raise RootFindingError("a computed zero is not inside the open disk")
    bare = FiniteBlaschke(tuple(roots), 1.0)

    def target(z):
        return np.polynomial.polynomial.polyval(z, num) / np.polynomial.polynomial.polyval(z, den)

    candidates = np.array([0.0, 0.5, -0.5, 0.5j, -0.5j, 0.9, -0.9j])
    scale = np.abs(bare(candidates))
    z0 = candidates[int(np.argmax(scale))]
    c = target(z0) / bare(z0)
    if abs(abs(c) - 1) > tol:
        raise RootFindingError(f"fitted front constant has modulus {abs(c):.3e}")
    B = FiniteBlaschke(tuple(roots), c / abs(c))
    gap = np.max(np.abs(B(verify_points) - target(verify_points)))
    if gap > tol:
        raise RootFindingError(f"fitted Blaschke product misses by {gap:.3e}")
    return B


def _test_points(k=20, seed=12345):
    rng = np.random.default_rng(seed)
    return 0.9 * np.sqrt(rng.random(k)) * np.exp(2j * np.pi * rng.random(k))


def crofoot(B, a):
    """Crofoot transform ``B_a = (B - a) / (1 - conj(a) B)`` and its multiplier.

    Returns
    -------
    B_a : FiniteBlaschke
    multiplier : Rational
        ``sqrt(1 - |a|^2) / (1 - conj(a) B)``, which maps ``K_B`` unitarily
        onto ``K_{B_a}``.
    """
    a = complex(a)
    if not abs(a) < 1:
        raise InputError("Crofoot parameter must lie in the open disk")
    if a == 0:
        return B, Rational.constant(1.0)
    p, q = B.numerator(), B.denominator()
    Ba = _blaschke_from_rational(_padd(p, -a * q), _padd(q, -np.conj(a) * p), _test_points())
    multiplier = Rational.from_polynomials(
        np.sqrt(1 - abs(a) ** 2) * q, _padd(q, -np.conj(a) * p)
    )
    return Ba, multiplier


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Finite positive measure on the circle given by atoms ``(zeta, weight)``."""

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((complex(z), float(w)) for z, w in self.atoms)
        for z, w in atoms:
            if not np.isfinite(z) or abs(abs(z) - 1) > 1e-10:
                raise InputError(f"atom {z!r} is not on the unit circle")
            if not np.isfinite(w) or w <= 0:
                raise InputError(f"atom weight {w!r} must be positive")
        for i in range(len(atoms)):
            for j in range(i):
                if abs(atoms[i][0] - atoms[j][0]) <= 1e-12:
                    raise InputError("atoms must be pairwise distinct")
        object.__setattr__(self, "atoms", atoms)

    @property
    def points(self):
        return np.array([z for z, _ in self.atoms], dtype=np.complex128)

    @property
    def weights(self):
        return np.array([w for _, w in self.atoms])

    @property
    def mass(self):
        return float(self.weights.sum())

    def to_json(self):
        return {"atoms": [{"zeta": complex_to_json(z), "weight": w} for z, w in self.atoms]}

    @classmethod
    def from_json(cls, obj, field="measure"):
        if not isinstance(obj, dict) or not isinstance(obj.get("atoms"), list):
            raise SchemaError("expected an object with an 'atoms' list", field)
        atoms = []
        for i, item in enumerate(obj["atoms"]):
            where = f"{field}.atoms[{i}]"
            if not isinstance(item, dict) or "zeta" not in item or "weight" not in item:
                raise SchemaError("atom needs 'zeta' and 'weight'", where)
            try:
                weight = float(item["weight"])
            except (TypeError, ValueError) as exc:
                raise SchemaError("weight must be a number", where) from exc
            atoms.append((complex_from_json(item["zeta"], where + ".zeta"), weight))
        try:
            return cls(tuple(atoms))
        except InputError as exc:
            raise SchemaError(str(exc), field) from exc


def clark_measure(B):
    """Clark measure of ``B`` at the point ``1``.

    Atoms are the solutions of ``B(zeta) = 1`` and carry weight
    ``1 / |B'(zeta)|``.

    Raises
    ------
    NonUnimodularRootError
        If a computed root is more than ``1e-8`` away from the circle.
    """
    if B.degree < 1:
        raise InputError("Clark measure needs a non-constant Blaschke product")
    poly = _padd(B.numerator(), -B.denominator())
    desc = poly[::-1]
    roots = _polish_roots(desc, np.roots(desc), steps=5)
    if roots.size != B.degree:
        raise NonUnimodularRootError("B = 1 has fewer solutions than the degree")
    gap = np.max(np.abs(np.abs(roots) - 1))
    if gap > 1e-8:
        raise NonUnimodularRootError(f"root off the circle by {gap:.3e}")
    roots = roots / np.abs(roots)
    order = np.argsort(np.angle(roots))
    roots = roots[order]
    weights = 1 / B.derivative_modulus(roots)
    return AtomicMeasure(tuple(zip(roots, weights)))


def inner_from_measure(mu):
    """Finite Blaschke product whose Clark measure is ``mu``.

    With ``H(z) = sum w_k (zeta_k + z) / (zeta_k - z)`` this is
    ``(H - 1) / (H + 1)``.
    """
    zetas, weights = mu.points, mu.weights
    if zetas.size == 0:
        raise InputError("measure has no atoms")
    full = np.ones(1, dtype=np.complex128)
    for zk in zetas:
        full = np.convolve(full, [zk, -1.0])
    cauchy = np.zeros(1, dtype=np.complex128)
    for k, (zk, wk) in enumerate(zip(zetas, weights)):
        part = np.array([wk * zk, wk], dtype=np.complex128)
        for j, zj in enumerate(zetas):
            if j != k:
                part = np.convolve(part, [zj, -1.0])
        cauchy = _padd(cauchy, part)
    num = _padd(cauchy, -full)
    den = _padd(cauchy, full)
    return _blaschke_from_rational(num, den, _test_points())


def poisson_integral(mu, z):
    """``sum w_k (1 - |z|^2) / |zeta_k - z|^2``."""
    z = np.asarray(z, dtype=np.complex128)
    out = np.zeros(z.shape)
    for zk, wk in mu.atoms:
        out = out + wk * (1 - np.abs(z) ** 2) / np.abs(zk - z) ** 2
    return out


def measure_distance(mu, nu):
    """Largest atom or weight discrepancy after nearest-atom matching.

    Infinite when the atom counts differ.
    """
    if len(mu.atoms) != len(nu.atoms):
        return float("inf")
    remaining = list(nu.atoms)
    worst = 0.0
    for z, w in mu.atoms:
        i = int(np.argmin([abs(z - zz) for zz, _ in remaining]))
        zz, ww = remaining.pop(i)
        worst = max(worst, abs(z - zz), abs(w - ww))
    return worst


def multiplier_space(B1, B2):
    """Basis of the multipliers from ``K_{B1}`` into ``K_{B2}``.

    For ``n = deg B1 <= m = deg B2`` this is ``{z^k q1 / q2 : 0 <= k <= m - n}``
    with ``q_i`` the denominator polynomials; otherwise it is empty.
    """
    n, m = B1.degree, B2.degree
    if n > m:
        return []
    q1 = B1.denominator()
    return [Rational(np.concatenate([np.zeros(k), q1]), B2.zeros) for k in range(m - n + 1)]


def multiplier_exists(B1, B2):
    return B1.degree <= B2.degree


def multiplier_membership_residual(phi, B1, B2):
    """Largest ``||phi e - P_{K_{B2}}(phi e)||`` over the TM basis of ``K_{B1}``."""
    target = tm_basis(B2)
    return max(target.residual(phi * e) for e in tm_basis(B1).functions)


@dataclass(frozen=True, eq=False)
class IsometricMultiplierResult:
    """Outcome of :func:`isometric_multiplier`.

    ``outcome`` is ``"found"``, ``"not_found"`` or ``"undetermined"``.  For
    ``"found"``, ``h`` holds the ascending coefficients of ``h`` with
    ``phi = h q1 / q2`` and ``multiplier`` the function itself.  For
    ``"not_found"``, ``certificate`` explains why none exists.
    """

    outcome: str
    h: np.ndarray = None
    multiplier: Rational = None
    gram_residual: float = None
    certificate: dict = None
    method: str = ""


def _gram_tensor(B1, B2):
    """``T[k, l, i, j] = <z^k psi e_j, z^l psi e_i>`` with ``psi = q1 / q2``."""
    basis = tm_basis(B1)
    psi_terms = multiplier_space(B1, B2)
    d, n = len(psi_terms), len(basis)
    funcs = [[psi * e for e in basis.functions] for psi in psi_terms]
    T = np.empty((d, d, n, n), dtype=np.complex128)
    for k in range(d):
        for l in range(d):
            for i in range(n):
                for j in range(n):
                    T[k, l, i, j] = h2_inner(funcs[k][j], funcs[l][i])
    return T


def _gram_of(h, T):
    # G[i, j] = <phi e_j, phi e_i> with phi = sum_k h_k z^k psi
    return np.einsum("k,l,klij->ij", h, np.conj(h), T)


def isometric_multiplier(B1, B2, budget=8, rng=None, gram_tol=1e-8, certify=True):
    """Search for a multiplier ``phi`` with ``||phi f|| = ||f||`` on ``K_{B1}``.

    Parameters
    ----------
    B1, B2 : FiniteBlaschke
    budget : int
        Number of random starts for the nonlinear search (degree gap > 0).
    rng : numpy.random.Generator, optional
    gram_tol : float
        Acceptance bound on ``||Gram(phi e_i) - I||_F``.
    certify : bool
        Try to prove non-existence through a semidefinite dual when the
        search fails.

    Returns
    -------
    IsometricMultiplierResult
    """
    if not multiplier_exists(B1, B2):
        raise InputError("no multiplier exists: deg B1 > deg B2")
    rng = rng if rng is not None else np.random.default_rng(0)
    n, m = B1.degree, B2.degree
    q1 = B1.denominator()
    if divides(B1, B2):
        extra = _match_multiset(B1.zeros, B2.zeros)
        h = poly_from_factors(extra)
        phi = Rational(np.convolve(h, q1), B2.zeros)
        resid = _found_residual(phi, B1)
        return IsometricMultiplierResult("found", h, phi, resid, method="inclusion")
    T = _gram_tensor(B1, B2)
    if n == m:
        G0 = T[0, 0]
        lam = float(np.real(np.trace(G0))) / n
        deviation = float(np.linalg.norm(G0 - lam * np.eye(n)) / lam)
        if deviation <= gram_tol:
            h = np.array([1 / np.sqrt(lam)], dtype=np.complex128)
            phi = Rational(q1 * h[0], B2.zeros)
            return IsometricMultiplierResult(
                "found", h, phi, _found_residual(phi, B1), method="closed_form"
            )
        return IsometricMultiplierResult(
            "not_found",
            certificate={
                "kind": "one_dimensional",
                "gram": G0,
                "relative_deviation_from_scalar": deviation,
            },
            method="closed_form",
        )
    h, resid = _search(T, budget, rng)
    if resid <= gram_tol:
        phi = Rational(np.convolve(h, q1), B2.zeros)
        return IsometricMultiplierResult("found", h, phi, resid, method="least_squares")
    if certify:
        cert = _sdp_certificate(T)
        if cert is not None:
            return IsometricMultiplierResult("not_found", certificate=cert, method="sdp_dual")
    return IsometricMultiplierResult("undetermined", gram_residual=resid, method="least_squares")


def _found_residual(phi, B1):
    basis = tm_basis(B1)
    n = len(basis)
    G = np.array(
        [[h2_inner(phi * basis.functions[j], phi * basis.functions[i]) for j in range(n)] for i in range(n)]
    )
    return float(np.linalg.norm(G - np.eye(n)))


def _search(T, budget, rng):
    from scipy.optimize import least_squares

    d, n = T.shape[0], T.shape[2]
    eye = np.eye(n)

    def residuals(x):
        h = x[:d] + 1j * x[d:]
        R = _gram_of(h, T) - eye
        return np.concatenate([R.real.ravel(), R.imag.ravel()])

    best_h, best = None, np.inf
    for _ in range(max(1, budget)):
        x0 = rng.standard_normal(2 * d)
        sol = least_squares(residuals, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
        h = sol.x[:d] + 1j * sol.x[d:]
        value = float(np.linalg.norm(_gram_of(h, T) - eye))
        if value < best:
            best_h, best = h, value
    return best_h, best


def _sdp_certificate(T):
    """Dual certificate that no PSD ``H`` has ``sum H_kl T[k, l] = I``.

    A Hermitian ``Y`` with ``L^*(Y) >= 0`` and ``tr Y < 0`` rules out every
    multiplier, since ``phi`` gives ``H = h h^*``.  The solver output is
    repaired by adding a multiple of ``I`` so that ``L^*(Y) >= 0`` holds
    exactly, then accepted only if the trace stays negative.
    """
    try:
        import cvxpy as cp
    except ImportError:
        return None
    n = T.shape[2]

    def adjoint(Y):
        # L^*(Y)[k, l] = sum_ij T[k, l, i, j] conj(Y[i, j]), arranged as a d x d form in H
        return np.einsum("klij,ij->lk", T, np.conj(Y))

    Y = cp.Variable((n, n), hermitian=True)
    Lstar = sum(
        cp.conj(Y[i, j]) * T[:, :, i, j].T for i in range(n) for j in range(n)
    )
    Lstar = (Lstar + Lstar.H) / 2
    problem = cp.Problem(
        cp.Minimize(cp.real(cp.trace(Y))),
        [Lstar >> 0, Y << np.eye(n), Y >> -np.eye(n)],
    )
    try:
        problem.solve()
    except cp.error.SolverError:
        return None
    if Y.value is None:
        return None
    Yv = (Y.value + Y.value.conj().T) / 2
    M = adjoint(Yv)
    M = (M + M.conj().T) / 2
    M_eye = adjoint(np.eye(n))
    M_eye = (M_eye + M_eye.conj().T) / 2
    floor = np.linalg.eigvalsh(M_eye)[0]
    if floor <= 0:
        return None
    shift = max(0.0, -np.linalg.eigvalsh(M)[0]) / floor
    Yfix = Yv + shift * np.eye(n)
    trace = float(np.real(np.trace(Yfix)))
    if trace >= -1e-6:
        return None
    return {"kind": "sdp_dual", "Y": Yfix, "trace": trace}


def atomic_singular_inner(z):
    """``exp(-(1 + z) / (1 - z))``, with value ``0`` at ``z = 1``."""
    z = np.asarray(z, dtype=np.complex128)
    at_one = z == 1
    safe = np.where(at_one, 0.0, z)
    value = np.exp(-(1 + safe) / (1 - safe))
    value = np.where(at_one, 0.0, value)
    return value if value.ndim else complex(value)


def singular_carrier(n):
    """Point ``(2 n pi - i) / (2 n pi + i)`` where the singular inner function is 1,
    and its Clark weight ``2 / (4 n^2 pi^2 + 1)``.
    """
    t = 2 * np.pi * n
    return (t - 1j) / (t + 1j), 2 / (t * t + 1)


def quadrature_isometry_check(theta, Phi, tol=1e-6, nodes=24, max_doublings=12):
    """Largest Gram deviation of ``G = (1 - theta) / (1 - Phi)`` on ``K_Phi``.

    Computes ``max_{i, j} |int |G|^2 e_i conj(e_j) dm - delta_ij|`` over the
    TM basis of ``K_Phi``.  The circle is parametrized by
    ``u = cot(arg(zeta) / 2)``, so ``dm = du / (pi (1 + u^2))`` and the
    point ``zeta = 1`` moves to infinity.  The integral over ``[-U, U]`` is
    done with Gauss-Legendre panels of width ``2 pi``; ``U`` doubles and a
    Richardson step removes the ``1 / U`` tail until two extrapolated
    values agree within ``tol / 10``.

    Raises
    ------
    QuadratureNonConvergenceError
    """
    basis = tm_basis(Phi)
    x, w = np.polynomial.legendre.leggauss(nodes)
    n = len(basis)

    def moments(lo_panel, hi_panel):
        total = np.zeros((n, n), dtype=np.complex128)
        # process panels in chunks to bound memory
        for start in range(lo_panel, hi_panel, 256):
            stop = min(start + 256, hi_panel)
            centres = 2 * np.pi * (np.arange(start, stop) + 0.5)
            u = (centres[:, None] + np.pi * x[None, :]).ravel()
            wt = np.tile(np.pi * w, stop - start)
            zeta = (1j * u - 1) / (1j * u + 1)
            G2 = np.abs(1 - theta(zeta)) ** 2 / np.abs(1 - Phi(zeta)) ** 2
            dens = G2 * wt / (np.pi * (1 + u * u))
            E = basis.evaluate(zeta)
            total += (E * dens) @ E.conj().T
        return total

    def integral(K):
        return moments(-K, K)

    K = 16
    prev_val = integral(K)
    prev_rich = None
    for _ in range(max_doublings):
        val = prev_val + moments(-2 * K, -K) + moments(K, 2 * K)
        rich = 2 * val - prev_val
        if prev_rich is not None and np.max(np.abs(rich - prev_rich)) < tol / 10:
            # Gram is <e_j, e_i> arranged as M[i, j]
            return float(np.max(np.abs(rich - np.eye(n))))
        prev_rich, prev_val, K = rich, val, 2 * K
    raise QuadratureNonConvergenceError("quadrature did not settle")
