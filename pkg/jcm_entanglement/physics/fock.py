"""
Truncated Fock-space operator algebra.

Composite spaces are always ordered qubit A, qubit B, field, and each qubit
uses the basis order (|e>, |g>). Operator exponentials are taken through
Hermitian eigendecompositions; displacement and squeeze operators are built
on a padded workspace and cropped to the retained block.
"""

from __future__ import annotations

import logging
import warnings
from functools import reduce
from typing import Iterable, Optional, Sequence

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import linalg

from ..config.settings import config
from ..exceptions import (
    InvalidDimensionError,
    InvalidOperatorError,
    InvalidShapeError,
    TruncationError,
    TruncationWarning,
)
from ..utils.validators import MatrixValidator

logger = logging.getLogger(__name__)

OperatorMatrix = npt.NDArray[np.complex128]

EXCITED, GROUND = 0, 1
QUBIT_DIM = 2


class TruncationPolicy(BaseModel):
    """How many Fock levels are kept and how operators are padded"""

    model_config = ConfigDict(frozen=True)

    n_max: int = Field(default_factory=lambda: config.n_max, ge=1)
    pad_factor: int = Field(default_factory=lambda: config.pad_factor, ge=2)
    tail_tol: float = Field(default_factory=lambda: config.tail_tol, gt=0.0, lt=1.0)
    escalation_step: int = Field(default_factory=lambda: config.escalation_step, ge=1)
    n_max_ceiling: int = Field(default_factory=lambda: config.n_max_ceiling, ge=1)

    @model_validator(mode="after")
    def _ceiling_covers_start(self) -> "TruncationPolicy":
        if self.n_max_ceiling < self.n_max:
            raise ValueError("n_max_ceiling must be >= n_max")
        return self

    @property
    def padded_dim(self) -> int:
        return self.pad_factor * self.n_max

    def escalated(self) -> "TruncationPolicy":
        """Next policy in the escalation ladder"""
        if self.n_max >= self.n_max_ceiling:
            raise TruncationError(
                f"n_max reached its ceiling {self.n_max_ceiling} without meeting tail_tol={self.tail_tol:g}"
            )
        n_max = min(self.n_max + self.escalation_step, self.n_max_ceiling)
        return self.model_copy(update={"n_max": n_max})


def _require_dim(dim: int) -> None:
    if int(dim) != dim or dim < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {dim!r}")


def annihilation(dim: int) -> OperatorMatrix:
    """Photon annihilation operator with a[n-1, n] = sqrt(n)"""
    _require_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(np.complex128)


def creation(dim: int) -> OperatorMatrix:
    return annihilation(dim).conj().T


def number(dim: int) -> OperatorMatrix:
    _require_dim(dim)
    return np.diag(np.arange(dim, dtype=float)).astype(np.complex128)


def parity(dim: int) -> OperatorMatrix:
    """Photon-number parity (-1)^n"""
    _require_dim(dim)
    return np.diag((-1.0) ** np.arange(dim)).astype(np.complex128)


def sigma_z() -> OperatorMatrix:
    return np.diag([1.0, -1.0]).astype(np.complex128)


def sigma_plus() -> OperatorMatrix:
    """|e><g|"""
    op = np.zeros((QUBIT_DIM, QUBIT_DIM), dtype=np.complex128)
    op[EXCITED, GROUND] = 1.0
    return op


def sigma_minus() -> OperatorMatrix:
    """|g><e|"""
    return sigma_plus().conj().T


def tensor(*factors: npt.ArrayLike) -> OperatorMatrix:
    """Kronecker product, leftmost factor slowest-varying"""
    if not factors:
        raise InvalidShapeError("tensor needs at least one factor")
    return reduce(np.kron, (np.asarray(f, dtype=np.complex128) for f in factors))


def embed(op: npt.ArrayLike, position: int, dims: Sequence[int]) -> OperatorMatrix:
    """Place a single-factor operator at ``position`` with identities elsewhere"""
    op = np.asarray(op, dtype=np.complex128)
    if op.shape != (dims[position], dims[position]):
        raise InvalidShapeError(f"operator of shape {op.shape} does not fit factor {position} of {list(dims)}")
    factors = [op if i == position else np.eye(d) for i, d in enumerate(dims)]
    return tensor(*factors)


def _reshape_factors(rho: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    dims = [int(d) for d in dims]
    total = int(np.prod(dims))
    if rho.ndim != 2 or rho.shape != (total, total):
        raise InvalidShapeError(f"matrix of shape {rho.shape} does not match factor dimensions {dims}")
    return rho.reshape(dims + dims)


def partial_trace(rho: npt.ArrayLike, dims: Sequence[int], keep: Iterable[int]) -> OperatorMatrix:
    """Reduced matrix on the ``keep`` factors, in their original order.

    An empty ``keep`` traces everything out and returns the 1x1 trace.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    tensor_rho = _reshape_factors(rho, dims)
    keep = sorted(set(keep))
    n_factors = len(dims)
    if any(k < 0 or k >= n_factors for k in keep):
        raise InvalidShapeError(f"keep={keep} out of range for {n_factors} factors")

    traced = [i for i in range(n_factors) if i not in keep]
    remaining = n_factors
    for axis in reversed(traced):
        tensor_rho = np.trace(tensor_rho, axis1=axis, axis2=axis + remaining)
        remaining -= 1

    kept_dim = int(np.prod([dims[k] for k in keep])) if keep else 1
    return tensor_rho.reshape(kept_dim, kept_dim)


def partial_transpose(rho: npt.ArrayLike, dims: Sequence[int], transposed: Iterable[int]) -> OperatorMatrix:
    """Transpose the indices of the listed factors only"""
    rho = np.asarray(rho, dtype=np.complex128)
    tensor_rho = _reshape_factors(rho, dims)
    n_factors = len(dims)
    for axis in set(transposed):
        if axis < 0 or axis >= n_factors:
            raise InvalidShapeError(f"factor {axis} out of range for {n_factors} factors")
        tensor_rho = np.swapaxes(tensor_rho, axis, axis + n_factors)
    return tensor_rho.reshape(rho.shape)


def _require_hermitian(H: np.ndarray) -> None:
    result = MatrixValidator().check_hermitian(H)
    if not result.is_valid:
        raise InvalidOperatorError(result.reason)


def eigendecompose(H: npt.ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of a Hermitian generator"""
    H = np.asarray(H, dtype=np.complex128)
    _require_hermitian(H)
    return linalg.eigh(0.5 * (H + H.conj().T))


def _exp_anti_hermitian(generator: np.ndarray) -> OperatorMatrix:
    # exp(G) for anti-Hermitian G via the Hermitian matrix i*G.
    energies, vectors = linalg.eigh(1j * generator)
    return (vectors * np.exp(-1j * energies)) @ vectors.conj().T


def displacement_padded(alpha: complex, dim: int) -> OperatorMatrix:
    """D(alpha) exponentiated on a ``dim``-level space, uncropped"""
    _require_dim(dim)
    a = annihilation(dim)
    return _exp_anti_hermitian(alpha * a.conj().T - np.conj(alpha) * a)


def squeeze_padded(zeta: complex, dim: int) -> OperatorMatrix:
    """S(zeta) = exp(-zeta a^dag^2 / 2 + zeta^* a^2 / 2) on a ``dim``-level space, uncropped"""
    _require_dim(dim)
    a = annihilation(dim)
    a2 = a @ a
    return _exp_anti_hermitian(-0.5 * zeta * a2.conj().T + 0.5 * np.conj(zeta) * a2)


def displacement(alpha: complex, policy: Optional[TruncationPolicy] = None) -> OperatorMatrix:
    """Displacement operator cropped to the retained block"""
    policy = policy or TruncationPolicy()
    if abs(alpha) ** 2 > policy.n_max / 4:
        warnings.warn(
            f"|alpha|^2={abs(alpha) ** 2:.3g} exceeds n_max/4={policy.n_max / 4:.3g}; "
            "high-n columns of D(alpha) are unreliable",
            TruncationWarning,
            stacklevel=2,
        )
    full = displacement_padded(alpha, policy.padded_dim)
    return full[: policy.n_max, : policy.n_max].copy()


def squeeze(zeta: complex, policy: Optional[TruncationPolicy] = None) -> OperatorMatrix:
    """Squeeze operator cropped to the retained block"""
    policy = policy or TruncationPolicy()
    if np.sinh(abs(zeta)) ** 2 > policy.n_max / 4:
        warnings.warn(
            f"sinh^2 r={np.sinh(abs(zeta)) ** 2:.3g} exceeds n_max/4={policy.n_max / 4:.3g}",
            TruncationWarning,
            stacklevel=2,
        )
    full = squeeze_padded(zeta, policy.padded_dim)
    return full[: policy.n_max, : policy.n_max].copy()


def evolve_unitary(H: npt.ArrayLike, t: float) -> OperatorMatrix:
    """U = exp(-iHt) with hbar = 1"""
    energies, vectors = eigendecompose(H)
    return (vectors * np.exp(-1j * energies * t)) @ vectors.conj().T


def unitarity_defect(U: npt.ArrayLike, columns: Optional[Sequence[int]] = None) -> float:
    """max|U^dagger U - I| over the selected columns"""
    return MatrixValidator().check_unitary(np.asarray(U), columns, tol=np.inf).deviation
