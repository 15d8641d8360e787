import numpy as np
import pytest

from pisometry.exceptions import DimensionMismatchError, NotCNUError, WrongDefectError
from pisometry.model_space import FiniteBlaschke, compressed_shift
from pisometry.numerics import random_unitary
from pisometry.orders import (
    blaschke_symbol,
    constraint_residual,
    leq,
    leq_q,
    sim_check,
    simq_check,
)
from pisometry.partial_isometry import hm_leq, validate
from pisometry.sampling import random_cnu, random_defect_one, random_disk_point


def shift(*zeros):
    return compressed_shift(FiniteBlaschke(tuple(complex(a) for a in zeros)))


def is_isometric_witness(X, A, B, tol=1e-8):
    return (
        np.linalg.norm(X.conj().T @ X - np.eye(A.dim)) <= tol
        and constraint_residual(X, A, B) <= tol
    )


def is_injective_witness(X, A, B, tol=1e-8):
    s = np.linalg.svd(X, compute_uv=False)
    return s[-1] > 1e-9 * s[0] and constraint_residual(X, A, B) <= tol


def final_example_pair(rng, n):
    """``[e_2 | ... | e_n | 0]`` against ``[u_2 | ... | u_n | 0]``."""
    U = random_unitary(n, rng)
    V1 = np.hstack([np.eye(n)[:, 1:], np.zeros((n, 1))])
    V2 = np.hstack([U[:, 1:], np.zeros((n, 1))])
    return validate(V1), validate(V2)


def test_operands_checked(jordan):
    A, _ = jordan
    with pytest.raises(WrongDefectError):
        leq(A, shift(0, 0, 0, 0))
    with pytest.raises(NotCNUError):
        leq_q(validate(np.diag([1.0, 0.0])), shift(0, 0))


def test_inclusion_of_model_spaces():
    A, B = shift(0), shift(0, 0.3)
    verdict = leq(A, B)
    assert verdict.holds and is_isometric_witness(verdict.witness, A, B)
    assert not leq(B, A).holds


def test_multiplier_without_isometry():
    A, B = shift(0, 0), shift(0, 0.5)
    q = leq_q(A, B)
    assert q.holds and is_injective_witness(q.witness, A, B)
    v = leq(A, B)
    assert v.outcome == "fails"


def test_smaller_target_fails():
    verdict = leq_q(shift(0, 0, 0), shift(0, 0))
    assert verdict.outcome == "fails"
    assert leq(shift(0, 0, 0), shift(0, 0)).outcome == "fails"


def test_unitary_equivalence_gives_leq(rng):
    A = random_cnu(rng, 5, 3)
    B = A.conjugate_by(random_unitary(5, rng))
    verdict = leq(A, B)
    assert verdict.holds and is_isometric_witness(verdict.witness, A, B)


def test_hm_implies_leq(rng):
    # with equal dimension and indices the ranks agree, so hm_leq forces A = B
    for dim, d in [(3, 1), (5, 2), (6, 3)]:
        A = random_cnu(rng, dim, d)
        B = validate(A.matrix.copy())
        assert hm_leq(A, B)
        verdict = leq(A, B)
        assert verdict.holds and verdict.residuals["method"] == "hm"
        assert is_isometric_witness(verdict.witness, A, B)


def test_leq_implies_leq_q(rng):
    for _ in range(10):
        zeros = [0j] + list(random_disk_point(rng, 0.8, 3))
        d1 = int(rng.integers(1, 4))
        d2 = int(rng.integers(d1, 5))
        A = random_defect_one(rng, zeros[:d1])
        B = random_defect_one(rng, zeros[:d2])
        v = leq(A, B)
        assert v.holds
        assert leq_q(A, B).holds


def test_witness_composition(rng):
    for _ in range(5):
        zeros = [0j] + list(random_disk_point(rng, 0.8, 4))
        d = sorted(int(x) for x in rng.integers(1, 6, size=3))
        A, B, C = (random_defect_one(rng, zeros[:k]) for k in d)
        ab, bc = leq(A, B), leq(B, C)
        assert ab.holds and bc.holds
        assert is_isometric_witness(bc.witness @ ab.witness, A, C)
        qab, qbc = leq_q(A, B), leq_q(B, C)
        assert is_injective_witness(qbc.witness @ qab.witness, A, C)


def test_blaschke_symbol(rng):
    zeros = (0j, 0.3, 0.3, -0.5j)
    V = random_defect_one(rng, zeros)
    B, S, U = blaschke_symbol(V)
    assert sorted(B.zeros, key=abs) == pytest.approx(sorted(zeros, key=abs), abs=1e-6)
    assert np.linalg.norm(U @ V.matrix @ U.conj().T - S.matrix) < 1e-8


def test_sim_check(rng):
    A = random_defect_one(rng, (0j, 0.4, 0.1j))
    assert sim_check(A, A.conjugate_by(random_unitary(3, rng)))
    assert not sim_check(A, random_defect_one(rng, (0j, 0.4, 0.2j)))


def test_simq_final_example(rng):
    for n in (2, 4, 6):
        V1, V2 = final_example_pair(rng, n)
        verdict = simq_check(V1, V2)
        assert verdict.outcome == "holds"
        L = verdict.witness
        assert constraint_residual(L, V1, V2) < 1e-8
        assert np.linalg.svd(L, compute_uv=False)[-1] > 1e-6


def test_simq_fails_for_different_jordan_types(jordan):
    A, B = jordan
    assert simq_check(A, B).outcome == "fails"


def test_simq_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        simq_check(shift(0), shift(0, 0))


def test_verdict_json():
    doc = leq_q(shift(0, 0, 0), shift(0, 0)).to_json()
    assert doc["relation"] == "quasi" and doc["outcome"] == "fails" and "obstruction" in doc


def test_equivalence_agrees_with_coincidence_and_orders(rng):
    from pisometry.livsic import CharFn, coincide, hml_equivalent

    for _ in range(5):
        zeros = (0j,) + tuple(complex(a) for a in random_disk_point(rng, 0.8, 3))
        A = random_defect_one(rng, zeros)
        B = A.conjugate_by(random_unitary(A.dim, rng))
        C = random_defect_one(rng, zeros[:-1] + (0.5 * zeros[-1],))
        for X in (B, C):
            same = hml_equivalent(A, X)
            assert same == (coincide(CharFn.from_defect(A), CharFn.from_defect(X)).outcome == "coincident")
            assert sim_check(A, X) == same
        assert leq(A, B).holds and leq(B, A).holds


def test_quasi_order_examples(rng):
    A = shift(0, 0.4)
    v = leq_q(A, A)
    assert v.holds
    assert constraint_residual(np.eye(2), A, A) < 1e-12
    V1, V2 = final_example_pair(rng, 5)
    assert leq_q(V1, V2).holds and leq_q(V2, V1).holds
    Q = random_unitary(2, rng)
    assert simq_check(A, A.conjugate_by(Q)).holds
    assert constraint_residual(Q, A, A.conjugate_by(Q)) < 1e-12
    assert not sim_check(shift(0, 0.5), shift(0, 0.3))
    assert sim_check(validate(np.eye(4, k=-1)), shift(0, 0, 0, 0))


def test_simq_matches_two_way_quasi_order(rng):
    checked = 0
    for _ in range(15):
        dim = int(rng.integers(1, 7))
        zeros = (0j,) + tuple(complex(a) for a in random_disk_point(rng, 0.8, dim - 1))
        A = random_defect_one(rng, zeros)
        other = zeros if rng.random() < 0.5 else (0j,) + tuple(complex(a) for a in random_disk_point(rng, 0.8, dim - 1))
        B = random_defect_one(rng, other)
        s = simq_check(A, B)
        if s.outcome == "undetermined":
            continue
        both = leq_q(A, B).holds and leq_q(B, A).holds
        assert s.holds == both
        checked += 1
    assert checked >= 10
