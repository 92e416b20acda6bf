import numpy as np
import pytest

from qtop.services.errors import ContractError, ParseError
from qtop.services.qcore import quantum_integer
from qtop.services.reps import (
    ModuleKind,
    is_atypical_typical,
    module_from_label,
    parse_complex,
    qdim,
    relation_residuals,
    simple_module,
    submodule_invariant,
    tau_module,
    typical_module,
)


def _modules(p):
    return [simple_module(p, n) for n in range(p.r)] + [
        typical_module(p, 0.3141 + 0.1j),
        typical_module(p, 0.5),
        typical_module(p, 1),
        tau_module(p),
    ]


def test_relations_hold(params):
    for module in _modules(params):
        residuals = relation_residuals(module)
        assert max(residuals.values()) < 1e-10, (module.name, residuals)


def test_dimensions_and_weights(p5):
    s2 = simple_module(p5, 2)
    assert s2.dim == 3
    assert np.allclose(s2.weights, [2, 0, -2])

    v = typical_module(p5, 0.5)
    assert v.dim == 5
    assert np.allclose(v.weights, [4.5, 2.5, 0.5, -1.5, -3.5])
    assert v.kind is ModuleKind.TYPICAL

    tau = tau_module(p5)
    assert tau.dim == 1
    assert abs(tau.k_diag[0] + 1) < 1e-12


def test_simple_index_range(p3):
    with pytest.raises(ContractError):
        simple_module(p3, 3)
    with pytest.raises(ContractError):
        simple_module(p3, -1)


def test_quantum_dimensions(params):
    r = params.r
    for n in range(r):
        assert abs(qdim(simple_module(params, n)) - (-1) ** n * quantum_integer(params, n + 1)) < 1e-10
    assert abs(qdim(typical_module(params, 0.3141 + 0.1j))) < 1e-10
    assert abs(qdim(tau_module(params)) - (-1) ** (r + 1)) < 1e-12


def test_atypical_submodule(params):
    for k in range(1, params.r):
        assert submodule_invariant(params, k) == 0
    with pytest.raises(ContractError):
        submodule_invariant(params, 0)


def test_atypical_detection(p3):
    assert is_atypical_typical(typical_module(p3, 1))
    assert is_atypical_typical(typical_module(p3, -2))
    assert not is_atypical_typical(typical_module(p3, 3))
    assert not is_atypical_typical(typical_module(p3, 0.5))
    assert not is_atypical_typical(simple_module(p3, 1))


def test_degree(p3):
    assert abs(typical_module(p3, 0.37).degree - 0.37) < 1e-12
    assert abs(simple_module(p3, 1).degree - 1) < 1e-12
    assert abs(simple_module(p3, 2).degree) < 1e-12


def test_module_cache(p3):
    assert simple_module(p3, 1) is simple_module(p3, 1)
    assert typical_module(p3, 0.5) is typical_module(p3, 0.5)


def test_parse_complex():
    assert parse_complex("0.5") == 0.5
    assert parse_complex("0.3+0.1i") == complex(0.3, 0.1)
    assert parse_complex(" 0.3 + 0.1j ") == complex(0.3, 0.1)
    with pytest.raises(ParseError):
        parse_complex("half")


def test_module_labels(p3):
    assert module_from_label(p3, "S1").name == "S_1"
    assert module_from_label(p3, "S_2").dim == 3
    assert module_from_label(p3, "V0.5").name == "V_0.5"
    assert module_from_label(p3, "V_0.3+0.1j").label == complex(0.3, 0.1)
    assert module_from_label(p3, "tau").kind is ModuleKind.TAU
    with pytest.raises(ParseError):
        module_from_label(p3, "W1")
    with pytest.raises(ContractError):
        module_from_label(p3, "S7")
