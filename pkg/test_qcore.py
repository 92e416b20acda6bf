import cmath
import math

import pytest
from pydantic import ValidationError

from qtop.services.errors import ContractError, PoleError
from qtop.services.qcore import (
    FormalColor,
    QParams,
    degree_of,
    delta_cgp,
    delta_so3,
    delta_table,
    hr_set,
    is_typical,
    kirby_color,
    kirby_rt,
    mdim,
    mdim_product,
    qfactorial,
    qnum,
    quantum_integer,
    residue_mdim,
)
from qtop.services.reps import simple_module, typical_module


def test_root_of_unity(p3):
    assert abs(p3.q - cmath.exp(1j * math.pi / 3)) < 1e-15
    assert abs(p3.qpow(3) + 1) < 1e-12
    assert abs(p3.qpow(0.5) ** 2 - p3.q) < 1e-12


def test_r_below_two_is_rejected():
    with pytest.raises(ValidationError):
        QParams(r=1)


def test_manifold_order():
    assert QParams(r=3).manifold_ok
    assert not QParams(r=8).manifold_ok
    with pytest.raises(ContractError):
        QParams(r=4).require_manifold_order()


def test_quantum_numbers(params):
    r = params.r
    assert abs(quantum_integer(params, 1) - 1) < 1e-12
    assert abs(quantum_integer(params, 2) - 2 * math.cos(math.pi / r)) < 1e-12
    assert abs(qnum(params, r)) < 1e-12
    assert abs(qfactorial(params, r)) < 1e-12
    assert abs(qfactorial(params, r - 1)) > 1e-3


def test_hr_set():
    assert hr_set(QParams(r=3)) == [-2, 0, 2]
    assert hr_set(QParams(r=4)) == [-3, -1, 1, 3]


def test_degree_of():
    assert abs(degree_of(2.5) - 0.5) < 1e-12
    assert abs(degree_of(-0.5) - 1.5) < 1e-12
    assert abs(degree_of(2)) < 1e-12
    assert abs(degree_of(3.25 + 0.5j) - (1.25 + 0.5j)) < 1e-12


def test_typicality(p3):
    assert is_typical(p3, 0.5)
    assert is_typical(p3, 0)
    assert is_typical(p3, 6)
    assert not is_typical(p3, 1)
    assert not is_typical(p3, -4)


def test_mdim_at_half(p3):
    assert abs(mdim(p3, 0.5) - 1.5) < 1e-12


@pytest.mark.parametrize("alpha", [0.3141 + 0.1j, 0.5, -1.7 + 0.2j, 2.25])
def test_mdim_closed_form_matches_product(params, alpha):
    assert abs(mdim(params, alpha) - mdim_product(params, alpha)) < 1e-9 * max(1.0, abs(mdim(params, alpha)))


def test_mdim_finite_on_multiples_of_r(p3):
    # closed form is 0/0 there; the product form gives the limit
    assert abs(mdim(p3, 3) - 1) < 1e-9
    assert abs(mdim(p3, 0) - mdim_product(p3, 0)) < 1e-12


def test_mdim_poles(p3):
    for n in (1, 2, -1, 4):
        with pytest.raises(PoleError):
            mdim(p3, n)


@pytest.mark.parametrize("n", [1, 2, -1, 4])
def test_residue_of_mdim(p3, n):
    eps = 1e-7
    numeric = eps * mdim(p3, n + eps)
    assert abs(numeric - residue_mdim(p3, n)) < 1e-5


def test_residue_rejects_multiples_of_r(p3):
    with pytest.raises(ContractError):
        residue_mdim(p3, 3)


def test_delta_so3_trivial_at_r3(p3):
    assert abs(delta_so3(p3, 1) - 1) < 1e-12
    assert abs(delta_so3(p3, -1) - 1) < 1e-12


@pytest.mark.parametrize("r", [3, 5, 7])
def test_delta_case_table(r):
    p = QParams(r=r)
    assert abs(delta_cgp(p, -1) - delta_table(p)) < 1e-8 * abs(delta_table(p))
    assert abs(delta_cgp(p, 1) - delta_cgp(p, -1).conjugate()) < 1e-8 * abs(delta_table(p))


def test_deltas_need_r_outside_4z():
    with pytest.raises(ContractError):
        delta_so3(QParams(r=4), 1)


def test_kirby_color(p3):
    omega = kirby_color(p3, 0.3)
    assert len(omega) == 3
    assert abs(omega.degree - 0.3) < 1e-12
    for (coeff, module), k in zip(omega, hr_set(p3)):
        assert abs(module.label - (0.3 + k)) < 1e-12
        assert abs(coeff - mdim(p3, 0.3 + k)) < 1e-12
    with pytest.raises(PoleError):
        kirby_color(p3, 1)


def test_kirby_rt(p3, p5):
    even = list(kirby_rt(p3, 0))
    assert len(even) == 1
    assert even[0][1].name == "S_0"
    assert abs(even[0][0] - 1) < 1e-12

    odd = list(kirby_rt(p5, 1))
    assert [m.name for _, m in odd] == ["S_1", "S_3"]
    assert abs(odd[0][0] + quantum_integer(p5, 2)) < 1e-12
    assert abs(odd[1][0] + quantum_integer(p5, 4)) < 1e-12
    with pytest.raises(ContractError):
        kirby_rt(p3, 2)


def test_formal_color_rejects_mixed_families(p3):
    with pytest.raises(ContractError):
        FormalColor(((1, simple_module(p3, 1)), (1, typical_module(p3, 0.5))))
