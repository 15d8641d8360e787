import numpy as np
import pytest
from hypothesis import given, strategies as st

from pisometry.exceptions import (
    DimensionMismatchError,
    NotPartialIsometryError,
    NotSquareError,
    SpectrumObstructionError,
)
from pisometry.numerics import Tolerance, random_unitary
from pisometry.partial_isometry import (
    cayley,
    deficiency_indices,
    from_json,
    hm_leq,
    inverse_cayley,
    is_completely_non_unitary,
    to_json,
    unitary_extension,
    validate,
)
from pisometry.sampling import random_cnu


def column_partial_isometry(rng, n, r):
    """``[u_1 | ... | u_r | 0 | ... | 0]`` for a random orthonormal basis."""
    U = random_unitary(n, rng)
    return np.hstack([U[:, :r], np.zeros((n, n - r))]), U


def test_validate_column_form(rng):
    M, _ = column_partial_isometry(rng, 4, 2)
    V = validate(M)
    assert deficiency_indices(V) == (2, 2)
    assert np.allclose(V.initial_projection, np.diag([1, 1, 0, 0]))


@pytest.mark.parametrize("n", [1, 3])
def test_zero_matrix(n):
    assert validate(np.zeros((n, n))).indices == (n, n)


def test_rejects_non_partial_isometry():
    with pytest.raises(NotPartialIsometryError):
        validate(np.diag([1, 0.5]))
    with pytest.raises(NotSquareError):
        validate(np.zeros((2, 3)))


def test_indices(jordan):
    A, _ = jordan
    assert deficiency_indices(A) == (2, 2)
    assert deficiency_indices(validate(np.eye(3))) == (0, 0)
    J = validate(np.eye(4, k=1))
    assert J.indices == (1, 1)
    # kernel spanned by e1, cokernel by e4
    assert np.allclose(np.abs(J.defect_plus[:, 0]), [1, 0, 0, 0])
    assert np.allclose(np.abs(J.defect_minus[:, 0]), [0, 0, 0, 1])


def test_cached_bases_are_consistent(rng):
    V = random_cnu(rng, 6, 2)
    M = V.matrix
    assert np.linalg.norm(M @ V.defect_plus) < 1e-12
    assert np.linalg.norm(M.conj().T @ V.defect_minus) < 1e-12
    assert V.initial_space.shape[1] + V.defect_plus.shape[1] == 6
    assert V.final_space.shape[1] + V.defect_minus.shape[1] == 6
    assert np.allclose(M.conj().T @ M, V.initial_projection)


def test_cnu_examples():
    assert is_completely_non_unitary(validate(np.eye(4, k=1))).kind == "cnu"
    status = is_completely_non_unitary(validate(np.eye(2)))
    assert status.kind == "not_cnu" and status.unitary_part.shape[1] == 2
    status = is_completely_non_unitary(validate(np.diag([1.0, 0.0])))
    assert status.kind == "not_cnu"
    assert np.allclose(np.abs(status.unitary_part[:, 0]), [1, 0])


def test_cnu_boundary_ambiguous():
    # eigenvalue within rank_eps of the circle whose eigenvector does not reduce V
    from pisometry.model_space import FiniteBlaschke, compressed_shift

    tol = Tolerance(rank_eps=1e-6, residual_eps=1e-8)
    S = compressed_shift(FiniteBlaschke((0j, 1 - 1e-7)))
    V = validate(S.matrix, tol)
    assert is_completely_non_unitary(V).kind == "ambiguous"
    assert is_completely_non_unitary(S).kind == "cnu"


def test_cnu_is_unitarily_invariant(rng):
    for dim, d in [(4, 1), (5, 2)]:
        V = random_cnu(rng, dim, d)
        W = V.conjugate_by(random_unitary(dim, rng))
        assert is_completely_non_unitary(V).kind == is_completely_non_unitary(W).kind == "cnu"
    U = validate(np.diag([1.0, 0.0, 0.0]) + np.diag([0.0, 1.0], -1)[:3, :3] * 0)
    Q = random_unitary(3, rng)
    assert is_completely_non_unitary(U.conjugate_by(Q)).kind == "not_cnu"


@given(st.integers(1, 6), st.integers(0, 6), st.integers(0, 2**31))
def test_adjoint_and_unitary_products_validate(n, r, seed):
    rng = np.random.default_rng(seed)
    r = min(r, n)
    M, _ = column_partial_isometry(rng, n, r)
    V = validate(M)
    assert V.adjoint().indices == (n - r, n - r)
    W = validate(random_unitary(n, rng) @ M @ random_unitary(n, rng))
    assert W.indices == V.indices


def test_unitary_extension_examples(jordan):
    U = unitary_extension(validate(np.zeros((1, 1))))
    assert abs(abs(U[0, 0]) - 1) < 1e-14
    V = validate(np.array([[0.0, 0.0], [1.0, 0.0]]))
    U = unitary_extension(V)
    assert np.allclose(U.conj().T @ U, np.eye(2))
    assert np.allclose(U @ V.initial_projection, V.matrix)
    A, _ = jordan
    U = unitary_extension(A)
    assert np.allclose(U.conj().T @ U, np.eye(4))
    assert np.allclose(U @ A.initial_projection, A.matrix)


def test_unitary_extension_many_seeds():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n, r = int(rng.integers(1, 7)), int(rng.integers(0, 7))
        M, _ = column_partial_isometry(rng, n, min(r, n))
        V = validate(random_unitary(n, rng) @ M)
        U = unitary_extension(V)
        assert np.linalg.norm(U.conj().T @ U - np.eye(n)) < 1e-10
        assert np.linalg.norm((U - V.matrix) @ V.initial_projection) < 1e-10
        # defect_plus is carried onto defect_minus
        assert np.linalg.norm(U @ V.defect_plus - V.defect_minus) < 1e-10


def test_hm_leq_column_example(rng):
    n, r = 5, 2
    U = random_unitary(n, rng)
    A = validate(np.hstack([U[:, :r], np.zeros((n, n - r))]))
    B = validate(np.hstack([U[:, : r + 1], np.zeros((n, n - r - 1))]))
    assert hm_leq(A, B)
    assert not hm_leq(B, A)
    assert hm_leq(A, A)


def test_hm_leq_block_example(rng):
    r, n = 2, 5
    Ur = random_unitary(r, rng)
    Vm = np.zeros((n, n), dtype=complex)
    Vm[n - r :, :r] = Ur
    P = validate(random_unitary(n - r, rng) @ np.diag([1, 1, 0]))
    VA = Vm.copy()
    VA[: n - r, r:] = P.matrix
    assert hm_leq(validate(Vm), validate(VA))
    assert np.allclose(Vm, VA @ Vm.conj().T @ Vm)


def test_hm_leq_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        hm_leq(validate(np.zeros((2, 2))), validate(np.zeros((3, 3))))


def random_hm_chain(rng, n):
    """Partial isometries ``A <~ B <~ C`` built from one unitary and nested supports."""
    Q = random_unitary(n, rng)
    W = random_unitary(n, rng)
    k1, k2 = sorted(rng.integers(0, n + 1, size=2))
    k3 = int(rng.integers(k2, n + 1))
    def part(k):
        return validate(Q[:, :k] @ W[:, :k].conj().T)
    return part(k1), part(k2), part(k3)


@given(st.integers(1, 6), st.integers(0, 2**31))
def test_hm_order_laws(n, seed):
    rng = np.random.default_rng(seed)
    A, B, C = random_hm_chain(rng, n)
    assert hm_leq(A, A)
    assert hm_leq(A, B) and hm_leq(B, C) and hm_leq(A, C)
    if hm_leq(B, A):
        assert np.linalg.norm(A.matrix - B.matrix) <= 1e-8
    # an unrelated random pair: mutual order still forces equality
    D = validate(random_unitary(n, rng) @ np.diag((rng.random(n) < 0.5).astype(float)))
    if hm_leq(A, D) and hm_leq(D, A):
        assert np.linalg.norm(A.matrix - D.matrix) <= 1e-8


def test_cayley_scalars():
    assert np.allclose(cayley(np.zeros((1, 1))), [[1j]])
    assert np.allclose(cayley(np.array([[0.5]])), [[3j]])
    with pytest.raises(SpectrumObstructionError):
        cayley(np.eye(2))
    with pytest.raises(SpectrumObstructionError):
        inverse_cayley(np.array([[-1j]]))


def test_cayley_round_trip(rng):
    V = random_cnu(rng, 3, 1)
    S = cayley(V)
    assert np.linalg.norm(inverse_cayley(S) - V.matrix) < 1e-9
    # symmetric on (I - V) applied to the initial space
    D = (np.eye(3) - V.matrix) @ V.initial_space
    for x in D.T:
        for y in D.T:
            assert abs(np.vdot(y, S @ x) - np.vdot(S @ y, x)) < 1e-9


def test_json_round_trip(jordan):
    A, _ = jordan
    doc = to_json(A)
    assert doc["tol"] == {"rank_eps": 1e-9, "residual_eps": 1e-8}
    B = from_json(doc)
    assert np.array_equal(B.matrix, A.matrix)
    B = from_json({**doc, "tol": {"residual_eps": 1e-6}})
    assert B.tol.residual_eps == 1e-6
