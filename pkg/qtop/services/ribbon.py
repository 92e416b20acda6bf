"""
Ribbon structure on weight modules: R-matrix, braidings and their inverses,
duality morphisms, twists and the partial quantum trace of braid operators.

Operators act on tensor products W_1 ⊗ … ⊗ W_k stored as numpy tensors of
shape (d_1, …, d_k, M); the trailing axis batches M input columns. A local
operator only touches the factors it acts on.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from qtop.config import get_settings
from qtop.services.errors import ContractError, NumericalError
from qtop.services.qcore import QParams, qfactorial, qnum
from qtop.services.reps import ModuleKind, WeightModule

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SparseOperator:
    """A linear map acting on consecutive tensor factors starting at `position`."""

    matrix: sp.csr_matrix
    dims_in: Tuple[int, ...]
    dims_out: Tuple[int, ...]
    position: int = 0

    @classmethod
    def identity(cls, dims: Sequence[int]) -> "SparseOperator":
        size = int(np.prod(dims)) if len(dims) else 1
        return cls(sp.identity(size, dtype=complex, format="csr"), tuple(dims), tuple(dims), 0)

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def at(self, position: int) -> "SparseOperator":
        return SparseOperator(self.matrix, self.dims_in, self.dims_out, position)

    def compose(self, other: "SparseOperator") -> "SparseOperator":
        """self ∘ other for two operators on the same factors."""
        if other.dims_out != self.dims_in or other.position != self.position:
            raise ContractError("operators do not compose: factor dimensions or positions differ")
        return SparseOperator((self.matrix @ other.matrix).tocsr(), other.dims_in, self.dims_out, self.position)

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def full(self, dims: Sequence[int]) -> sp.csr_matrix:
        """Embeds the local block into the whole product with identities around it."""
        left = int(np.prod(dims[: self.position])) if self.position else 1
        right = int(np.prod(dims[self.position + len(self.dims_in):]))
        block = sp.kron(sp.identity(left, format="csr"), self.matrix, format="csr")
        return sp.kron(block, sp.identity(right, format="csr"), format="csr")

    def apply(self, tensor: np.ndarray) -> np.ndarray:
        width = len(self.dims_in)
        axes = list(range(self.position, self.position + width))
        front = list(range(width))
        moved = np.moveaxis(tensor, axes, front)
        rest = moved.shape[width:]
        flat = moved.reshape(int(np.prod(self.dims_in)), -1)
        out = np.asarray(self.matrix @ flat).reshape(*self.dims_out, *rest)
        return np.moveaxis(out, front, axes)


def _swap(dim_v: int, dim_w: int) -> sp.csr_matrix:
    cols = np.arange(dim_v * dim_w)
    i, j = np.divmod(cols, dim_w)
    rows = j * dim_v + i
    return sp.csr_matrix((np.ones(len(cols)), (rows, cols)), shape=(len(cols), len(cols)))


def flip(dim_v: int, dim_w: int) -> np.ndarray:
    """The swap V⊗W → W⊗V in the product bases."""
    return _swap(dim_v, dim_w).toarray()


def _theta_sum(p: QParams, left: WeightModule, right: WeightModule, inverse: bool) -> sp.csr_matrix:
    """Σ_n c_n E^n ⊗ F^n with the coefficients of R (or of R^{-1} when inverse)."""
    one = qnum(p, 1)
    size = left.dim * right.dim
    total = sp.csr_matrix((size, size), dtype=complex)
    mat_e = sp.csr_matrix(left.mat_e)
    mat_f = sp.csr_matrix(right.mat_f)
    e_pow = sp.identity(left.dim, dtype=complex, format="csr")
    f_pow = sp.identity(right.dim, dtype=complex, format="csr")
    for n in range(p.r):
        if n:
            e_pow = mat_e @ e_pow
            f_pow = mat_f @ f_pow
        if not e_pow.count_nonzero() or not f_pow.count_nonzero():
            break
        coeff = one ** (2 * n) / qfactorial(p, n)
        if inverse:
            coeff *= (-1) ** n * p.qpow(-n * (n - 1) / 2)
        else:
            coeff *= p.qpow(n * (n - 1) / 2)
        total = total + coeff * sp.kron(e_pow, f_pow, format="csr")
    return total.tocsr()


def _weight_phase(p: QParams, left: WeightModule, right: WeightModule) -> np.ndarray:
    """Diagonal of q^{H⊗H/2} on V⊗W."""
    return np.exp(1j * np.pi * np.outer(left.weights, right.weights).ravel() / (2 * p.r))


def _rmatrix_sparse(p: QParams, left: WeightModule, right: WeightModule, inverse: bool = False) -> sp.csr_matrix:
    phase = _weight_phase(p, left, right)
    if inverse:
        return (_theta_sum(p, left, right, inverse=True) @ sp.diags(1 / phase)).tocsr()
    return (sp.diags(phase) @ _theta_sum(p, left, right, inverse=False)).tocsr()


def rmatrix(p: QParams, left: WeightModule, right: WeightModule) -> np.ndarray:
    """R = q^{H⊗H/2} Σ_{n<r} ({1}^{2n}/{n}!) q^{n(n−1)/2} E^n ⊗ F^n on V⊗W."""
    return _rmatrix_sparse(p, left, right).toarray()


def rmatrix_inverse(p: QParams, left: WeightModule, right: WeightModule) -> np.ndarray:
    """Closed form R^{-1} = (Σ (−1)^n q^{−n(n−1)/2} {1}^{2n}/{n}! E^n⊗F^n) q^{−H⊗H/2}."""
    return _rmatrix_sparse(p, left, right, inverse=True).toarray()


@lru_cache(maxsize=4096)
def braiding(p: QParams, left: WeightModule, right: WeightModule, sign: int) -> SparseOperator:
    """
    Crossing operator V⊗W → W⊗V for the braid letter σ^{sign}.

    sign = +1 gives c_{V,W} = flip ∘ R; sign = −1 gives c_{W,V}^{-1}, the
    negative crossing whose left input strand carries V. Assembled sparse:
    only the E^n ⊗ F^n bands of R are stored.
    """
    dims_in = (left.dim, right.dim)
    dims_out = (right.dim, left.dim)
    if sign == 1:
        matrix = _swap(left.dim, right.dim) @ _rmatrix_sparse(p, left, right)
    elif sign == -1:
        matrix = _rmatrix_sparse(p, right, left, inverse=True) @ _swap(left.dim, right.dim)
    else:
        raise ContractError(f"crossing sign must be +1 or -1, got {sign}")
    return SparseOperator(matrix.tocsr(), dims_in, dims_out)


def braiding_inverse_numeric(p: QParams, left: WeightModule, right: WeightModule) -> np.ndarray:
    """c_{W,V}^{-1} as V⊗W → W⊗V, obtained by a dense inversion."""
    forward = braiding(p, right, left, 1).to_dense()
    try:
        return np.linalg.inv(forward)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"braiding {right.name}⊗{left.name} is not invertible: {e}")


def braid_operators(p: QParams, letters: Sequence[int],
                    modules: Sequence[WeightModule]) -> Tuple[List[SparseOperator], List[WeightModule]]:
    """
    Operators of a braid word applied to the given bottom colors.

    Returns:
        The placed crossing operators, in order, and the colors at the top.
    """
    current = list(modules)
    ops = []
    for letter in letters:
        a = abs(letter) - 1
        if not 0 <= a < len(current) - 1:
            raise ContractError(f"letter {letter} out of range for {len(current)} strands")
        sign = 1 if letter > 0 else -1
        ops.append(braiding(p, current[a], current[a + 1], sign).at(a))
        current[a], current[a + 1] = current[a + 1], current[a]
    return ops, current


def braid_operator_apply(ops: Sequence[SparseOperator], tensor: np.ndarray) -> np.ndarray:
    for op in ops:
        tensor = op.apply(tensor)
    return tensor


def dense_product(ops: Sequence[SparseOperator], dims: Sequence[int]) -> np.ndarray:
    """Matrix of the composite of placed operators on the full product space."""
    size = int(np.prod(dims))
    tensor = np.eye(size, dtype=complex).reshape(*dims, size)
    out = braid_operator_apply(ops, tensor)
    return out.reshape(-1, size)


def _pivot_vector(modules: Sequence[WeightModule]) -> np.ndarray:
    vec = np.ones(1, dtype=complex)
    for m in modules:
        vec = np.kron(vec, m.pivot_diag)
    return vec


def _batches(count: int, size: int) -> List[Tuple[int, int]]:
    return [(start, min(start + size, count)) for start in range(0, count, size)]


def _run_batches(work, batches: Sequence[Tuple[int, int]], threads: int) -> list:
    if threads <= 1 or len(batches) <= 1:
        return [work(b) for b in batches]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        # map keeps the batch order so the reduction is deterministic
        return list(pool.map(work, batches))


def partial_qtrace(
    ops: Sequence[SparseOperator],
    modules: Sequence[WeightModule],
    keep: Optional[int] = 0,
    columns: Optional[Sequence[int]] = None,
    threads: Optional[int] = None,
):
    """
    Quantum trace of a closed braid operator over all factors but `keep`.

    The traced factors contribute the pivotal weights K^{1−r}. With
    keep=None the full quantum trace is returned as a scalar; otherwise the
    result is the matrix of the open factor restricted to `columns`.
    """
    settings = get_settings()
    threads = threads or settings.threads
    dims = [m.dim for m in modules]
    total = int(np.prod(dims))

    if keep is None:
        pivot = _pivot_vector(modules)
        batch = max(1, settings.batch_entries // total)

        def work(bounds):
            start, stop = bounds
            width = stop - start
            tensor = np.zeros((total, width), dtype=complex)
            tensor[np.arange(start, stop), np.arange(width)] = 1.0
            out = braid_operator_apply(ops, tensor.reshape(*dims, width)).reshape(total, width)
            return complex((out[np.arange(start, stop), np.arange(width)] * pivot[start:stop]).sum())

        return sum(_run_batches(work, _batches(total, batch), threads), 0j)

    if not 0 <= keep < len(modules):
        raise ContractError(f"keep index {keep} outside 0..{len(modules) - 1}")
    kept_dim = dims[keep]
    others = [m for i, m in enumerate(modules) if i != keep]
    other_dims = [m.dim for m in others]
    rest = total // kept_dim
    pivot = _pivot_vector(others)
    selected = list(range(kept_dim)) if columns is None else list(columns)
    batch = max(1, settings.batch_entries // total)

    def to_product(tensor: np.ndarray) -> np.ndarray:
        # (kept, rest, B) → (*dims, B)
        shaped = tensor.reshape(kept_dim, *other_dims, tensor.shape[-1])
        return np.moveaxis(shaped, 0, keep)

    def from_product(tensor: np.ndarray) -> np.ndarray:
        return np.moveaxis(tensor, keep, 0).reshape(kept_dim, rest, tensor.shape[-1])

    result = np.zeros((kept_dim, len(selected)), dtype=complex)
    for slot, a in enumerate(selected):

        def work(bounds, a=a):
            start, stop = bounds
            width = stop - start
            tensor = np.zeros((kept_dim, rest, width), dtype=complex)
            tensor[a, np.arange(start, stop), np.arange(width)] = 1.0
            out = from_product(braid_operator_apply(ops, to_product(tensor)))
            picked = out[:, np.arange(start, stop), np.arange(width)]
            return (picked * pivot[start:stop]).sum(axis=1)

        parts = _run_batches(work, _batches(rest, batch), threads)
        result[:, slot] = np.sum(parts, axis=0)
    return result


def scalar_of(matrix: np.ndarray, columns: Sequence[int], label: str = "endomorphism") -> complex:
    """Reads s from s·Id, checking proportionality on the evaluated columns."""
    settings = get_settings()
    value = complex(matrix[columns[0], 0])
    expected = np.zeros(matrix.shape, dtype=complex)
    for slot, a in enumerate(columns):
        expected[a, slot] = value
    deviation = float(np.abs(matrix - expected).max())
    scale = max(1.0, abs(value))
    if deviation > settings.scalar_tol * scale:
        raise NumericalError(f"{label} is not a scalar multiple of the identity (deviation {deviation:.3e})")
    return value


@lru_cache(maxsize=4096)
def twist_scalar(p: QParams, module: WeightModule) -> complex:
    """θ_V, read off the closure of one strand of the positive crossing c_{V,V}."""
    ops, _ = braid_operators(p, [1], [module, module])
    matrix = partial_qtrace(ops, [module, module], keep=0, threads=1)
    return scalar_of(matrix, list(range(module.dim)), f"kink on {module.name}")


def twist_closed_form(p: QParams, module: WeightModule) -> complex:
    """θ_{V_α} = q^{(α²−(r−1)²)/2}, θ_{S_n} = (−1)^n q^{(n²+2n)/2}, θ_τ = −i^{−r}."""
    if module.kind is ModuleKind.TYPICAL:
        alpha = module.label
        return p.qpow((alpha ** 2 - (p.r - 1) ** 2) / 2)
    if module.kind is ModuleKind.SIMPLE:
        n = int(round(module.label.real))
        return (-1) ** n * p.qpow((n * n + 2 * n) / 2)
    return -(1j ** (-p.r))


def double_braiding(p: QParams, left: WeightModule, right: WeightModule) -> np.ndarray:
    """c_{W,V} ∘ c_{V,W} on V⊗W."""
    first = braiding(p, left, right, 1).to_dense()
    second = braiding(p, right, left, 1).to_dense()
    return second @ first


def yang_baxter_residual(p: QParams, u: WeightModule, v: WeightModule, w: WeightModule) -> float:
    """Max-abs difference between the two sides of the braid relation on U⊗V⊗W."""
    dims = [u.dim, v.dim, w.dim]
    lhs, _ = braid_operators(p, [1, 2, 1], [u, v, w])
    rhs, _ = braid_operators(p, [2, 1, 2], [u, v, w])
    return float(np.abs(dense_product(lhs, dims) - dense_product(rhs, dims)).max())


@dataclass(frozen=True)
class Duality:
    """
    Evaluation and coevaluation maps as 2-tensors.

    b[i, j] is the coefficient of v_i ⊗ v_j^* in b(1) ∈ V⊗V*, d[i, j] the
    value of d on v_i^* ⊗ v_j, b_prime[i, j] the coefficient of v_i^* ⊗ v_j in
    b′(1) ∈ V*⊗V and d_prime[i, j] the value of d′ on v_i ⊗ v_j^*.
    """

    b: np.ndarray
    d: np.ndarray
    b_prime: np.ndarray
    d_prime: np.ndarray

    def zigzags(self) -> Dict[str, np.ndarray]:
        """
        The four snake composites, each evaluated by contracting a triple
        tensor product. The last axis of every intermediate tensor is the
        input basis vector.
        """
        eye = np.eye(self.b.shape[0], dtype=complex)
        # V → V⊗V*⊗V → V
        left_v = np.einsum("ij,ka->ijka", self.b, eye)
        # V → V⊗V*⊗V → V, through the pivotal pair
        right_v = np.einsum("ka,ij->kija", eye, self.b_prime)
        # V* → V*⊗V⊗V* → V*
        left_dual = np.einsum("ka,ij->kija", eye, self.b)
        # V* → V*⊗V⊗V* → V*, through the pivotal pair
        right_dual = np.einsum("ij,ka->ijka", self.b_prime, eye)
        return {
            "(Id⊗d)(b⊗Id)": np.einsum("ijka,jk->ia", left_v, self.d),
            "(d′⊗Id)(Id⊗b′)": np.einsum("kija,ki->ja", right_v, self.d_prime),
            "(d⊗Id)(Id⊗b)": np.einsum("kija,ki->ja", left_dual, self.d),
            "(Id⊗d′)(b′⊗Id)": np.einsum("ijka,jk->ia", right_dual, self.d_prime),
        }

    def zigzag_residuals(self) -> Dict[str, float]:
        """Max-abs distance of each snake composite from the identity."""
        eye = np.eye(self.b.shape[0])
        return {name: float(np.abs(m - eye).max()) for name, m in self.zigzags().items()}

    def loop_value(self) -> complex:
        """d′ ∘ b, the quantum dimension."""
        return complex(np.einsum("ij,ij->", self.b, self.d_prime))

    def dual_loop_value(self) -> complex:
        """d ∘ b′, the quantum dimension computed on the other side."""
        return complex(np.einsum("ij,ij->", self.b_prime, self.d))


def duality_vectors(p: QParams, module: WeightModule) -> Duality:
    """
    b(1) = Σ v_i ⊗ v_i^*, d(f ⊗ v) = f(v), b′(1) = Σ v_i^* ⊗ K^{r−1} v_i and
    d′(v ⊗ f) = f(K^{1−r} v).
    """
    eye = np.eye(module.dim, dtype=complex)
    k_up = np.linalg.matrix_power(module.mat_k, p.r - 1)
    k_down = np.diag(module.pivot_diag)
    # b′[i, j] = v_j-coefficient of K^{r−1} v_i; d′[i, j] = v_j^*(K^{1−r} v_i)
    return Duality(b=eye, d=eye, b_prime=k_up.T, d_prime=k_down.T)


def braid_rmatrix_scaled(p: QParams, alpha: complex, right: WeightModule) -> np.ndarray:
    """q^{−αβ/2} q^{−(r−1)(α+β)/2} c_{V_α,W}, whose entries are Laurent polynomials in q^α."""
    from qtop.services.reps import typical_module

    left = typical_module(p, alpha)
    beta = right.label if right.kind is ModuleKind.TYPICAL else 0
    factor = p.qpow(-alpha * beta / 2 - (p.r - 1) * (alpha + beta) / 2)
    return factor * braiding(p, left, right, 1).to_dense()
