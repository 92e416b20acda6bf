"""
Weight modules of the unrolled quantum group: the simple modules S_n
(0 ≤ n ≤ r−1), the typical modules V_α and the one-dimensional module τ.

Each module is stored as dense generator matrices in its weight basis
(v_0, …, v_{d−1}) with weights decreasing by 2.
"""

import logging
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Dict, List

import numpy as np
from scipy.linalg import expm

from qtop.services.errors import ContractError, ParseError
from qtop.services.qcore import QParams, degree_of, is_integral, nearest_integer, qnum

logger = logging.getLogger(__name__)


class ModuleKind(str, Enum):
    SIMPLE = "simple"
    TYPICAL = "typical"
    TAU = "tau"

    @property
    def family(self) -> str:
        return "typical" if self is ModuleKind.TYPICAL else "simple"


@dataclass(frozen=True, eq=False)
class WeightModule:
    params: QParams
    kind: ModuleKind
    label: complex
    weights: np.ndarray
    mat_e: np.ndarray
    mat_f: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def mat_h(self) -> np.ndarray:
        return np.diag(self.weights)

    @property
    def k_diag(self) -> np.ndarray:
        return np.exp(1j * np.pi * self.weights / self.params.r)

    @property
    def mat_k(self) -> np.ndarray:
        return np.diag(self.k_diag)

    @property
    def pivot_diag(self) -> np.ndarray:
        """Diagonal of the pivotal element K^{1−r}."""
        return np.exp(1j * np.pi * (1 - self.params.r) * self.weights / self.params.r)

    @property
    def degree(self) -> complex:
        """Class of the weights in C/2Z."""
        return degree_of(self.weights[0])

    @property
    def name(self) -> str:
        if self.kind is ModuleKind.SIMPLE:
            return f"S_{int(self.label.real)}"
        if self.kind is ModuleKind.TAU:
            return "tau"
        label = self.label
        text = f"{label.real:g}" if label.imag == 0 else f"{label.real:g}{label.imag:+g}j"
        return f"V_{text}"

    def __repr__(self) -> str:
        return f"WeightModule({self.name}, r={self.params.r})"


def _build(p: QParams, kind: ModuleKind, label: complex, weights: List[complex],
           e_entry: Callable[[int], complex]) -> WeightModule:
    dim = len(weights)
    mat_e = np.zeros((dim, dim), dtype=complex)
    mat_f = np.zeros((dim, dim), dtype=complex)
    for i in range(1, dim):
        mat_e[i - 1, i] = e_entry(i)
        mat_f[i, i - 1] = 1.0
    return WeightModule(p, kind, complex(label), np.asarray(weights, dtype=complex), mat_e, mat_f)


@lru_cache(maxsize=256)
def simple_module(p: QParams, n: int) -> WeightModule:
    """S_n: dimension n+1, weights n, n−2, …, −n, E v_i = {i}{n+1−i}/{1}² v_{i−1}."""
    if not 0 <= n <= p.r - 1:
        raise ContractError(f"simple module index must satisfy 0 ≤ n ≤ r−1, got n={n} for r={p.r}")
    one = qnum(p, 1)
    return _build(
        p, ModuleKind.SIMPLE, n,
        [n - 2 * i for i in range(n + 1)],
        lambda i: qnum(p, i) * qnum(p, n + 1 - i) / one ** 2,
    )


@lru_cache(maxsize=4096)
def typical_module(p: QParams, alpha: complex) -> WeightModule:
    """
    V_α: dimension r, weights α+r−1−2i, E v_i = {i}{i−α}/{1}² v_{i−1}.

    Defined for every α; it is simple exactly when α ∉ X_r.
    """
    alpha = complex(alpha)
    one = qnum(p, 1)
    return _build(
        p, ModuleKind.TYPICAL, alpha,
        [alpha + p.r - 1 - 2 * i for i in range(p.r)],
        lambda i: qnum(p, i) * qnum(p, i - alpha) / one ** 2,
    )


@lru_cache(maxsize=16)
def tau_module(p: QParams) -> WeightModule:
    """τ: one-dimensional, weight r, E = F = 0, K = −1."""
    return _build(p, ModuleKind.TAU, p.r, [p.r], lambda i: 0j)


def qdim(module: WeightModule) -> complex:
    """Quantum dimension trace(K^{1−r})."""
    return complex(module.pivot_diag.sum())


def relation_residuals(module: WeightModule) -> Dict[str, float]:
    """
    Max-abs residuals of the defining relations of the quantum group on a module.

    Returns:
        Mapping relation name → residual; all should vanish up to rounding.
    """
    p = module.params
    E, F, H, K = module.mat_e, module.mat_f, module.mat_h, module.mat_k
    K_inv = np.diag(1.0 / module.k_diag)
    q2 = p.qpow(2)
    one = qnum(p, 1)

    def norm(m: np.ndarray) -> float:
        return float(np.abs(m).max()) if m.size else 0.0

    residuals = {
        "[H,E]=2E": norm(H @ E - E @ H - 2 * E),
        "[H,F]=-2F": norm(H @ F - F @ H + 2 * F),
        "KEK^-1=q^2E": norm(K @ E @ K_inv - q2 * E),
        "KFK^-1=q^-2F": norm(K @ F @ K_inv - F / q2),
        "[E,F]=(K-K^-1)/{1}": norm(E @ F - F @ E - (K - K_inv) / one),
        "E^r=0": norm(np.linalg.matrix_power(E, p.r)),
        "F^r=0": norm(np.linalg.matrix_power(F, p.r)),
        "K=q^H": norm(expm(1j * np.pi * H / p.r) - K),
    }
    return residuals


def submodule_invariant(p: QParams, k: int) -> float:
    """
    For integer k in 1..r−1, the span of v_k, …, v_{r−1} in V_k is stable under E and F.

    Returns:
        Largest entry mapping that span outside of it.
    """
    if not 1 <= k <= p.r - 1:
        raise ContractError(f"k must lie in 1..r−1, got {k}")
    module = typical_module(p, k)
    leak_e = np.abs(module.mat_e[:k, k:]).max()
    leak_f = np.abs(module.mat_f[:k, k:]).max()
    return float(max(leak_e, leak_f))


_LABEL = re.compile(r"^\s*(?:(S)_?(\d+)|(V)_?(.+)|(tau))\s*$", re.IGNORECASE)


def parse_complex(text: str) -> complex:
    """Accepts '0.5', '0.3+0.1j', '0.3+0.1i'."""
    cleaned = str(text).strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError:
        raise ParseError(f"not a complex number: {text!r}")


def module_from_label(p: QParams, text: str) -> WeightModule:
    """Builds a module from 'S1', 'S_3', 'V0.5', 'V_0.3+0.1j' or 'tau'."""
    match = _LABEL.match(str(text))
    if not match:
        raise ParseError(f"unknown color label {text!r}")
    if match.group(1):
        return simple_module(p, int(match.group(2)))
    if match.group(3):
        return typical_module(p, parse_complex(match.group(4)))
    return tau_module(p)


def is_atypical_typical(module: WeightModule) -> bool:
    """V_α with α ∈ X_r, which is reducible."""
    if module.kind is not ModuleKind.TYPICAL or not is_integral(module.label):
        return False
    return nearest_integer(module.label) % module.params.r != 0
