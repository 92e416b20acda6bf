from dataclasses import replace

import numpy as np
import pytest
import scipy.sparse as sp

from qtop.services.errors import ContractError, NumericalError
from qtop.services.qcore import qnum
from qtop.services.reps import qdim, simple_module, tau_module, typical_module
from qtop.services.ribbon import (
    SparseOperator,
    braid_operators,
    braiding,
    braiding_inverse_numeric,
    double_braiding,
    duality_vectors,
    flip,
    partial_qtrace,
    rmatrix,
    rmatrix_inverse,
    scalar_of,
    twist_closed_form,
    twist_scalar,
    yang_baxter_residual,
)

ALPHA = 0.3141 + 0.1j
BETA = -0.42 + 0.05j


def test_flip_swaps_factors():
    v = np.array([1.0, 2.0])
    w = np.array([3.0, 4.0, 5.0])
    assert np.allclose(flip(2, 3) @ np.kron(v, w), np.kron(w, v))


def test_rmatrix_inverse_closed_form(params):
    a = typical_module(params, ALPHA)
    s1 = simple_module(params, 1)
    for left, right in ((a, s1), (s1, a), (s1, s1)):
        product = rmatrix(params, left, right) @ rmatrix_inverse(params, left, right)
        assert np.abs(product - np.eye(left.dim * right.dim)).max() < 1e-9


def test_negative_crossing_inverts_positive(params):
    a = typical_module(params, ALPHA)
    b = typical_module(params, BETA)
    for left, right in ((a, b), (simple_module(params, 1), a), (tau_module(params), a)):
        forward = braiding(params, left, right, 1)
        backward = braiding(params, right, left, -1)
        assert np.abs(forward.compose(backward).to_dense() - np.eye(left.dim * right.dim)).max() < 1e-9
        closed = braiding(params, left, right, -1).to_dense()
        assert np.abs(closed - braiding_inverse_numeric(params, left, right)).max() < 1e-8


def test_crossing_sign_is_checked(p3):
    s1 = simple_module(p3, 1)
    with pytest.raises(ContractError):
        braiding(p3, s1, s1, 2)


def test_yang_baxter(params):
    a = typical_module(params, ALPHA)
    b = typical_module(params, BETA)
    s1 = simple_module(params, 1)
    for u, v, w in ((a, b, s1), (s1, a, b), (s1, s1, s1)):
        assert yang_baxter_residual(params, u, v, w) < 1e-9


def test_skein_relation_on_s1(params):
    s1 = simple_module(params, 1)
    c = braiding(params, s1, s1, 1).to_dense()
    c_inv = braiding(params, s1, s1, -1).to_dense()
    lhs = params.qpow(0.5) * c - params.qpow(-0.5) * c_inv
    assert np.abs(lhs - qnum(params, 1) * np.eye(4)).max() < 1e-10


def test_twists_match_closed_forms(params):
    modules = [simple_module(params, n) for n in range(params.r)]
    modules += [typical_module(params, ALPHA), typical_module(params, 2), tau_module(params)]
    for module in modules:
        expected = twist_closed_form(params, module)
        assert abs(twist_scalar(params, module) - expected) < 1e-9 * max(1.0, abs(expected)), module.name


def test_s1_twist_is_kink(params):
    assert abs(twist_scalar(params, simple_module(params, 1)) + params.qpow(1.5)) < 1e-10


def test_double_braiding_with_tau(params):
    a = typical_module(params, ALPHA)
    expected = params.qpow(params.r * (ALPHA + params.r - 1))
    assert np.abs(double_braiding(params, tau_module(params), a) - expected * np.eye(params.r)).max() < 1e-9


def test_duality(params):
    for module in (simple_module(params, 1), simple_module(params, 2), typical_module(params, ALPHA), tau_module(params)):
        data = duality_vectors(params, module)
        residuals = data.zigzag_residuals()
        assert len(residuals) == 4
        assert max(residuals.values()) < 1e-12
        assert abs(data.loop_value() - qdim(module)) < 1e-12
        assert abs(data.dual_loop_value() - qdim(module)) < 1e-12


def test_duality_maps_carry_the_pivot(p5):
    module = typical_module(p5, ALPHA)
    data = duality_vectors(p5, module)
    assert np.allclose(data.b, np.eye(module.dim))
    assert np.allclose(np.diag(data.d_prime), module.pivot_diag)
    assert np.allclose(np.diag(data.b_prime), 1 / module.pivot_diag)


def test_zigzag_detects_wrong_pivot(p5):
    data = duality_vectors(p5, simple_module(p5, 2))
    skewed = replace(data, d_prime=data.d_prime @ np.diag([1.0, 1.05, 1.0]))
    residuals = skewed.zigzag_residuals()
    assert residuals["(Id⊗d)(b⊗Id)"] < 1e-12
    assert residuals["(d⊗Id)(Id⊗b)"] < 1e-12
    assert residuals["(d′⊗Id)(Id⊗b′)"] == pytest.approx(0.05)
    assert residuals["(Id⊗d′)(b′⊗Id)"] == pytest.approx(0.05)

    swapped = replace(data, b_prime=data.d_prime)
    assert max(swapped.zigzag_residuals().values()) > 0.1


def test_local_apply_matches_embedded_matrix(p3):
    s1 = simple_module(p3, 1)
    a = typical_module(p3, ALPHA)
    op = braiding(p3, s1, a, 1).at(1)
    dims = (2, 2, 3)
    rng = np.random.default_rng(0)
    tensor = rng.normal(size=(*dims, 4)) + 1j * rng.normal(size=(*dims, 4))
    local = op.apply(tensor).reshape(12, 4)
    embedded = op.full(dims) @ tensor.reshape(12, 4)
    assert np.allclose(local, embedded)


def test_identity_operator():
    op = SparseOperator.identity((2, 3))
    assert op.nnz == 6
    assert np.allclose(op.to_dense(), np.eye(6))


def test_compose_checks_factors(p3):
    s1 = simple_module(p3, 1)
    a = typical_module(p3, ALPHA)
    with pytest.raises(ContractError):
        braiding(p3, s1, a, 1).compose(braiding(p3, s1, a, 1))


def test_full_trace_of_unknot_is_qdim(params):
    for module in (simple_module(params, 2), tau_module(params)):
        assert abs(partial_qtrace([], [module], keep=None) - qdim(module)) < 1e-12


def test_full_trace_of_kink(params):
    s1 = simple_module(params, 1)
    ops, top = braid_operators(params, [1], [s1, s1])
    assert [m.name for m in top] == ["S_1", "S_1"]
    value = partial_qtrace(ops, [s1, s1], keep=None)
    assert abs(value - twist_scalar(params, s1) * qdim(s1)) < 1e-10


def test_partial_trace_is_thread_independent(p5):
    a = typical_module(p5, ALPHA)
    ops, _ = braid_operators(p5, [1, 1, 1], [a, a])
    single = partial_qtrace(ops, [a, a], keep=0, threads=1)
    threaded = partial_qtrace(ops, [a, a], keep=0, threads=4)
    assert np.array_equal(single, threaded)


def test_scalar_of_rejects_non_scalar():
    assert scalar_of(3 * np.eye(2), [0, 1]) == 3
    with pytest.raises(NumericalError):
        scalar_of(np.diag([1.0, 2.0]), [0, 1])


def test_braid_operators_check_range(p3):
    s1 = simple_module(p3, 1)
    with pytest.raises(ContractError):
        braid_operators(p3, [2], [s1, s1])


def test_scalar_of_accepts_real_columns():
    assert scalar_of(2.0 * np.eye(3)[:, :2], [0, 1]) == 2
    assert scalar_of(np.eye(2, dtype=int), [0, 1]) == 1


def test_braiding_is_stored_sparse(params):
    a = typical_module(params, ALPHA)
    b = typical_module(params, BETA)
    op = braiding(params, a, b, 1)
    r = params.r
    assert sp.issparse(op.matrix)
    # E^n ⊗ F^n is supported on pairs (v_i, w_j) with i ≥ n and j ≤ r−1−n
    assert op.nnz == r * (r + 1) * (2 * r + 1) // 6
