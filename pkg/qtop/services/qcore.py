"""
Root-of-unity arithmetic: quantum integers, modified dimensions, the
surgery normalization constants and formal colors (Kirby colors).

Everything is evaluated at q = exp(iπ/r) with the convention
q^x = exp(iπx/r) for complex x.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Iterator, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from qtop.services.errors import ContractError, PoleError

if TYPE_CHECKING:
    from qtop.services.reps import WeightModule

logger = logging.getLogger(__name__)

# Distance to the nearest integer below which a color counts as integral
INTEGRAL_TOL = 1e-12

# Below this modulus {rα} is treated as vanishing and the product formula is used
_SMALL_DENOMINATOR = 1e-6


class QParams(BaseModel):
    """The integer r ≥ 2 fixing the root of unity q = exp(iπ/r)."""

    model_config = ConfigDict(frozen=True)

    r: int = Field(..., ge=2, description="Order parameter of the root of unity")

    @property
    def q(self) -> complex:
        return self.qpow(1)

    @property
    def manifold_ok(self) -> bool:
        return self.r % 4 != 0

    def qpow(self, x: complex) -> complex:
        return cmath.exp(1j * math.pi * complex(x) / self.r)

    def require_manifold_order(self) -> None:
        if not self.manifold_ok:
            raise ContractError(f"3-manifold invariants need r not divisible by 4 (r={self.r})")


def qnum(p: QParams, x: complex) -> complex:
    """{x} = q^x − q^{−x}."""
    return p.qpow(x) - p.qpow(-x)


def quantum_integer(p: QParams, n: int) -> complex:
    """[n] = {n}/{1}."""
    return qnum(p, n) / qnum(p, 1)


def qfactorial(p: QParams, n: int) -> complex:
    """{n}! = {1}{2}…{n}; zero as soon as n ≥ r."""
    result = 1 + 0j
    for k in range(1, n + 1):
        result *= qnum(p, k)
    return result


def nearest_integer(x: complex) -> Optional[int]:
    x = complex(x)
    n = round(x.real)
    if abs(x - n) < INTEGRAL_TOL:
        return int(n)
    return None


def is_integral(x: complex) -> bool:
    return nearest_integer(x) is not None


def is_typical(p: QParams, alpha: complex) -> bool:
    """True unless α ∈ X_r = Z minus rZ."""
    n = nearest_integer(alpha)
    return n is None or n % p.r == 0


def hr_set(p: QParams) -> List[int]:
    """H_r = {1−r, 3−r, …, r−1}."""
    return list(range(1 - p.r, p.r, 2))


def degree_of(x: complex) -> complex:
    """Representative of x in C/2Z with real part in [0, 2)."""
    x = complex(x)
    shift = 2 * math.floor(x.real / 2)
    value = x - shift
    # snap tiny negative drift produced by the floor on exact even integers
    if abs(value.real - 2) < INTEGRAL_TOL:
        value -= 2
    return value


def _reject_pole(p: QParams, alpha: complex) -> None:
    if not is_typical(p, alpha):
        raise PoleError(f"modified dimension has a pole at α={complex(alpha)} for r={p.r}")


def mdim_product(p: QParams, alpha: complex) -> complex:
    """(−1)^{r−1} ∏_{j=1}^{r−1} {j}/{α+r−j}, finite on rZ."""
    _reject_pole(p, alpha)
    value = complex((-1) ** (p.r - 1))
    for j in range(1, p.r):
        value *= qnum(p, j) / qnum(p, alpha + p.r - j)
    return value


def mdim(p: QParams, alpha: complex) -> complex:
    """
    Modified dimension d(α) = (−1)^{r−1} r{α}/{rα}.

    Raises:
        PoleError: when α ∈ X_r.
    """
    alpha = complex(alpha)
    _reject_pole(p, alpha)
    denominator = qnum(p, p.r * alpha)
    if abs(denominator) < _SMALL_DENOMINATOR:
        return mdim_product(p, alpha)
    return (-1) ** (p.r - 1) * p.r * qnum(p, alpha) / denominator


def residue_mdim(p: QParams, n: int) -> complex:
    """Residue of d at n ∈ X_r: (−1)^{r−1+n} (r/π) sin(nπ/r)."""
    if n % p.r == 0:
        raise ContractError(f"{n} is a multiple of r={p.r}; d has no pole there")
    sign = -1 if (p.r - 1 + n) % 2 else 1
    return complex(sign * (p.r / math.pi) * math.sin(n * math.pi / p.r))


@lru_cache(maxsize=64)
def delta_so3(p: QParams, sign: int) -> complex:
    """
    Δ^SO3_± as the evaluation of the ±1-framed unknot colored by the even
    Kirby color Σ_{j even ≤ r−2} [j+1] S_j.
    """
    from qtop.services.reps import qdim, simple_module
    from qtop.services.ribbon import twist_scalar

    p.require_manifold_order()
    if sign not in (1, -1):
        raise ContractError("sign must be +1 or -1")
    total = 0j
    for j in range(0, p.r - 1, 2):
        module = simple_module(p, j)
        total += quantum_integer(p, j + 1) * qdim(module) * twist_scalar(p, module) ** sign
    if abs(total) < 1e-12:
        raise ContractError(f"Δ^SO3 vanishes for r={p.r}")
    return total


def delta_cgp(p: QParams, sign: int) -> complex:
    """Δ_+ = {1} r Δ^SO3_+ and Δ_− = −{1} r Δ^SO3_−."""
    value = qnum(p, 1) * p.r * delta_so3(p, sign)
    return value if sign == 1 else -value


def delta_table(p: QParams) -> complex:
    """Closed form of Δ_− by r mod 4 (principal branch of the 3/2 power)."""
    p.require_manifold_order()
    base = (p.r * p.q) ** 1.5
    residue = p.r % 4
    if residue == 1:
        return 1j * base
    if residue == 2:
        return (1j - 1) * base
    return -base


@dataclass(frozen=True)
class FormalColor:
    """
    A finite linear combination of modules all of the same kind.

    Typical combinations carry the degree in C/2Z shared by their terms.
    """

    terms: Tuple[Tuple[complex, "WeightModule"], ...]
    degree: Optional[complex] = None

    def __post_init__(self):
        kinds = {module.kind.family for _, module in self.terms}
        if len(kinds) > 1:
            raise ContractError("formal color mixes typical and simple modules")

    def __iter__(self) -> Iterator[Tuple[complex, "WeightModule"]]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def scale(self, factor: complex) -> "FormalColor":
        return FormalColor(tuple((factor * c, m) for c, m in self.terms), self.degree)

    @property
    def name(self) -> str:
        return " + ".join(f"({c:.6g})·{m.name}" for c, m in self.terms) or "0"


def kirby_color(p: QParams, alpha: complex) -> FormalColor:
    """Ω_α = Σ_{k∈H_r} d(α+k) V_{α+k} for non-integral α."""
    from qtop.services.reps import typical_module

    alpha = complex(alpha)
    if is_integral(alpha):
        raise PoleError(f"Kirby color needs a non-integral degree, got {alpha}")
    terms = tuple((mdim(p, alpha + k), typical_module(p, alpha + k)) for k in hr_set(p))
    return FormalColor(terms, degree_of(alpha))


def kirby_rt(p: QParams, parity: int) -> FormalColor:
    """Ω^RT_{parity} = Σ_{j ≡ parity mod 2, 0 ≤ j ≤ r−2} (−1)^{parity} [j+1] S_j."""
    from qtop.services.reps import simple_module

    if parity not in (0, 1):
        raise ContractError(f"parity must be 0 or 1, got {parity}")
    sign = -1 if parity else 1
    terms = tuple(
        (sign * quantum_integer(p, j + 1), simple_module(p, j)) for j in range(parity, p.r - 1, 2)
    )
    return FormalColor(terms, complex(parity))
