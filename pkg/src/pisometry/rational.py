"""Rational functions analytic on the closed disk and their H^2 inner product.

A :class:`Rational` stores a numerator polynomial (ascending coefficients)
and a list of pole parameters ``a``, one denominator factor ``1 - conj(a) z``
each, so the poles sit at ``1 / conj(a)``.  ``a = 0`` is a trivial factor.

The inner product is exact: both arguments are written as linear systems
and the coefficient sum ``sum_k f^_k conj(g^_k)`` is obtained from a
Stein equation (see :func:`h2_inner`).
"""
from __future__ import annotations

import numpy as np

from .exceptions import InputError, PoleInsideDiskError

__all__ = ["Rational", "h2_inner", "h2_norm", "poly_from_factors"]

# pole parameters closer than this are treated as the same pole
_MERGE = 1e-12


def _trim(c):
    c = np.atleast_1d(np.asarray(c, dtype=np.complex128))
    if c.size == 0:
        return np.zeros(1, dtype=np.complex128)
    nz = np.flatnonzero(c)
    return c[: nz[-1] + 1] if nz.size else c[:1] * 0


def poly_from_factors(poles):
    """Ascending coefficients of ``prod (1 - conj(a) z)``."""
    p = np.ones(1, dtype=np.complex128)
    for a in poles:
        p = np.convolve(p, [1.0, -np.conj(a)])
    return p


def _series_div(num, den, order):
    """First ``order`` Taylor coefficients of ``num / den`` (``den[0] != 0``)."""
    num = np.concatenate([num, np.zeros(max(0, order - len(num)))])[:order]
    den = np.concatenate([den, np.zeros(max(0, order - len(den)))])[:order]
    out = np.zeros(order, dtype=np.complex128)
    for k in range(order):
        out[k] = (num[k] - np.dot(den[1 : k + 1], out[k - 1 :: -1] if k else [])) / den[0]
    return out


class Rational:
    """``num(z) / prod (1 - conj(a_j) z)``.

    Parameters
    ----------
    num : array_like
        Ascending numerator coefficients.
    poles : sequence of complex, optional
        Pole parameters ``a_j``; zero entries are dropped.
    """

    __slots__ = ("num", "poles")

    def __init__(self, num, poles=()):
        self.num = _trim(num)
        self.num.setflags(write=False)
        poles = np.asarray([complex(a) for a in poles if a != 0], dtype=np.complex128)
        poles.setflags(write=False)
        self.poles = poles

    @classmethod
    def constant(cls, c):
        return cls([c])

    @classmethod
    def monomial(cls, k, c=1.0):
        coeffs = np.zeros(k + 1, dtype=np.complex128)
        coeffs[k] = c
        return cls(coeffs)

    @classmethod
    def from_polynomials(cls, num, den):
        """Convert ``num / den`` with a general denominator.

        Raises
        ------
        PoleInsideDiskError
            If ``den`` vanishes at ``0``, which puts a pole inside the disk.
        """
        den = _trim(den)
        if den[0] == 0:
            raise PoleInsideDiskError("denominator vanishes at 0")
        roots = np.roots(den[::-1]) if den.size > 1 else np.zeros(0)
        poles = [1 / np.conj(r) for r in roots]
        return cls(np.asarray(num, dtype=np.complex128) / den[0], poles)

    @property
    def den(self):
        return poly_from_factors(self.poles)

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        value = np.polynomial.polynomial.polyval(z, self.num)
        for a in self.poles:
            value = value / (1 - np.conj(a) * z)
        return value

    def _common(self, other):
        """Pole list covering both operands plus the factors each one lacks."""
        remaining = list(self.poles)
        extra_other = []
        for b in other.poles:
            for i, a in enumerate(remaining):
                if abs(a - b) <= _MERGE:
                    del remaining[i]
                    break
            else:
                extra_other.append(b)
        # remaining = poles of self absent from other
        return list(self.poles) + extra_other, extra_other, remaining

    def __add__(self, other):
        if not isinstance(other, Rational):
            other = Rational.constant(other)
        poles, extra_other, extra_self = self._common(other)
        num = _padd(
            np.convolve(self.num, poly_from_factors(extra_other)),
            np.convolve(other.num, poly_from_factors(extra_self)),
        )
        return Rational(num, poles)

    __radd__ = __add__

    def __neg__(self):
        return Rational(-self.num, self.poles)

    def __sub__(self, other):
        if not isinstance(other, Rational):
            other = Rational.constant(other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Rational):
            return Rational(
                np.convolve(self.num, other.num),
                np.concatenate([self.poles, other.poles]),
            )
        return Rational(self.num * complex(other), self.poles)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return Rational(self.num / complex(c), self.poles)

    def taylor(self, order):
        """First ``order`` Taylor coefficients at ``0``."""
        return _series_div(self.num, self.den, order)

    def check_analytic(self):
        """Raise unless every pole lies outside the closed disk."""
        if self.poles.size and np.max(np.abs(self.poles)) >= 1:
            raise PoleInsideDiskError("rational function has a pole in the closed disk")

    def __repr__(self):
        return f"Rational(num={self.num.tolist()}, poles={self.poles.tolist()})"


def _padd(p, q):
    n = max(len(p), len(q))
    out = np.zeros(n, dtype=np.complex128)
    out[: len(p)] += p
    out[: len(q)] += q
    return out


def _deflate(p, a):
    """Quotient of the ascending polynomial ``p`` by ``z - a`` (Horner from the top)."""
    n = len(p) - 1
    if n < 1:
        return np.zeros(0, dtype=np.complex128)
    q = np.empty(n, dtype=np.complex128)
    q[-1] = p[-1]
    for k in range(n - 1, 0, -1):
        q[k - 1] = p[k] + a * q[k]
    return q


def _realization(f):
    """State-space ``(A, B, C, D)`` with ``f(z) = D + z C (I - z A)^{-1} B``.

    ``(A, B)`` is the cascade of the lossless sections
    ``(z - a) / (1 - conj(a) z)``, one per pole (padded with poles at ``0``
    when the numerator degree exceeds the pole count).  The state response
    ``(I - z A)^{-1} B`` is then the orthonormal Takenaka-Malmquist basis for
    these poles, so no state is large.  ``C`` holds the coefficients of
    ``(f - f(0)) / z`` in that basis, found by evaluating at each pole and
    deflating the numerator.
    """
    num = np.asarray(f.num, dtype=np.complex128)
    poles = list(f.poles) + [0j] * max(0, len(num) - 1 - len(f.poles))
    n = len(poles)
    D = np.array([[num[0]]], dtype=np.complex128)
    A = np.zeros((0, 0), dtype=np.complex128)
    B = np.zeros((0, 1), dtype=np.complex128)
    out_C = np.zeros((1, 0), dtype=np.complex128)
    out_D = 1.0 + 0j
    for a in poles:
        s = np.sqrt(1 - abs(a) ** 2)
        m = A.shape[0]
        A = np.block([[A, np.zeros((m, 1))], [s * out_C, np.array([[np.conj(a)]])]])
        B = np.vstack([B, [[s * out_D]]])
        out_C = np.hstack([-a * out_C, [[s]]])
        out_D = -a * out_D
    # (f - f(0)) / z = p / prod (1 - conj(a) z), deg p < n
    den = poly_from_factors(poles)
    p = np.zeros(n + 1, dtype=np.complex128)
    p[: len(num)] += num
    p -= num[0] * den
    p = p[1:]
    C = np.zeros((1, n), dtype=np.complex128)
    for k, a in enumerate(poles):
        s = np.sqrt(1 - abs(a) ** 2)
        rest = poly_from_factors(poles[k + 1 :])
        value = np.polynomial.polynomial.polyval(a, p) / (
            (1 - abs(a) ** 2) * np.polynomial.polynomial.polyval(a, rest)
        )
        C[0, k] = s * value
        # subtract C_k e_k, then divide out the section (z - a) / (1 - conj(a) z)
        p = p.copy()
        p[: len(rest)] -= C[0, k] * s * rest
        p = _deflate(p, a)
    return A, B, C, D


def h2_inner(f, g):
    """Exact ``<f, g>_{H^2}`` for rational functions analytic on the closed disk.

    Linear in ``f`` and conjugate-linear in ``g``.  With realizations
    ``f^_0 = D_f`` and ``f^_k = C_f A_f^{k-1} B_f`` the coefficient sum
    ``sum_k f^_k conj(g^_k)`` equals ``D_f conj(D_g) + C_f X C_g^*`` where
    ``X = A_f X A_g^* + B_f B_g^*``.  Both realizations are input normal
    (see ``_realization``), so ``A`` is a contraction and the states stay
    bounded; clustered or repeated poles cause no cancellation.

    Raises
    ------
    PoleInsideDiskError
        If either argument has a pole in the closed disk.
    """
    if not (isinstance(f, Rational) and isinstance(g, Rational)):
        raise InputError("h2_inner expects Rational arguments")
    f.check_analytic()
    g.check_analytic()
    Af, Bf, Cf, Df = _realization(f)
    Ag, Bg, Cg, Dg = _realization(g)
    value = Df[0, 0] * np.conj(Dg[0, 0])
    nf, ng = Af.shape[0], Ag.shape[0]
    if nf and ng:
        rhs = (Bf @ Bg.conj().T).reshape(-1, order="F")
        # vec(A_f X A_g^*) = (conj(A_g) kron A_f) vec(X), column-major
        lhs = np.eye(nf * ng) - np.kron(np.conj(Ag), Af)
        X = np.linalg.solve(lhs, rhs).reshape(nf, ng, order="F")
        value += (Cf @ X @ Cg.conj().T)[0, 0]
    return complex(value)


def h2_norm(f):
    return float(np.sqrt(max(h2_inner(f, f).real, 0.0)))
