"""
Entanglement and phase-space observables.

Concurrence uses the singular values of sqrt(rho) (sy x sy) sqrt(rho)^*, which
equal the square roots of the Wootters eigenvalues without taking square
roots of round-off. Wigner functions are displaced-parity expectations
W(alpha) = (2/pi) Tr[rho D(alpha) Pi D^dag(alpha)], normalised so that the
integral over d^2 alpha is 1.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence, Union

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import linalg
from scipy.special import gammaln

from ..config.settings import config
from ..exceptions import InvalidShapeError, InvalidStateError, ModelParameterError, TruncationWarning
from ..utils.validators import MatrixValidator
from .evolve import SystemState
from .fock import (
    QUBIT_DIM,
    OperatorMatrix,
    TruncationPolicy,
    displacement,
    parity,
    partial_trace,
    partial_transpose,
    sigma_z,
    tensor,
)
from .states import AtomPairState, FieldState

logger = logging.getLogger(__name__)

Cut = Literal["atoms_vs_field", "atomA_vs_rest"]
CUTS: tuple[str, ...] = ("atoms_vs_field", "atomA_vs_rest")
WignerMethod = Literal["recurrence", "direct"]

_SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_WOOTTERS_FLIP = np.kron(_SIGMA_Y, _SIGMA_Y)
# eigenvalues of rho below this are treated as exact zeros before sqrt
_SPECTRUM_FLOOR = 1e-14


def atom_pair_reduced(state: SystemState) -> OperatorMatrix:
    """rho_AB = Tr_field rho"""
    return partial_trace(state.rho, state.dims, keep=[0, 1])


def field_reduced(state: SystemState) -> OperatorMatrix:
    """rho_F = Tr_AB rho"""
    return partial_trace(state.rho, state.dims, keep=[2])


def _pair_matrix(rho: Union[SystemState, AtomPairState, npt.ArrayLike]) -> np.ndarray:
    if isinstance(rho, SystemState):
        return atom_pair_reduced(rho)
    if isinstance(rho, AtomPairState):
        return rho.rho
    return np.asarray(rho, dtype=np.complex128)


def concurrence(rho_ab: Union[SystemState, AtomPairState, npt.ArrayLike]) -> float:
    """Wootters concurrence max(0, L1 - L2 - L3 - L4) of a two-qubit state"""
    rho = _pair_matrix(rho_ab)
    if rho.shape != (4, 4):
        raise InvalidShapeError(f"concurrence needs a 4x4 matrix, got {rho.shape}")
    validator = MatrixValidator()
    hermitian = validator.check_hermitian(rho)
    if not hermitian.is_valid:
        raise InvalidStateError(hermitian.reason)

    weights, vectors = linalg.eigh(0.5 * (rho + rho.conj().T))
    if weights[0] < -validator.positivity_tol:
        raise InvalidStateError(f"two-qubit state has negative eigenvalue {weights[0]:.3e}")
    weights = np.where(weights < _SPECTRUM_FLOOR, 0.0, weights)

    sqrt_rho = (vectors * np.sqrt(weights)) @ vectors.conj().T
    lambdas = linalg.svdvals(sqrt_rho @ _WOOTTERS_FLIP @ sqrt_rho.conj())
    lambdas = np.sort(lambdas)[::-1]
    value = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]
    return float(min(1.0, max(0.0, value)))


def negativity_of(rho: npt.ArrayLike, dims: Sequence[int], transposed: Sequence[int]) -> float:
    """Sum of |xi| - xi over 2 for the eigenvalues xi of the partial transpose"""
    rho_pt = partial_transpose(rho, dims, transposed)
    eigenvalues = np.linalg.eigvalsh(0.5 * (rho_pt + rho_pt.conj().T))
    return float(np.sum(np.abs(eigenvalues) - eigenvalues) / 2.0)


def negativity(state: SystemState, cut: Cut = "atoms_vs_field") -> float:
    """Negativity of the global state across ``cut``"""
    if cut == "atoms_vs_field":
        dims = [QUBIT_DIM * QUBIT_DIM, state.n_max]
    elif cut == "atomA_vs_rest":
        dims = [QUBIT_DIM, QUBIT_DIM * state.n_max]
    else:
        raise ModelParameterError(f"unknown negativity cut {cut!r}, expected one of {CUTS}")
    return negativity_of(state.rho, dims, [0])


def atomic_inversion(state: Union[SystemState, AtomPairState, npt.ArrayLike], atom: Literal["A", "B"] = "A") -> float:
    """<sigma_z> of one atom"""
    rho = _pair_matrix(state)
    if atom == "A":
        op = tensor(sigma_z(), np.eye(2))
    elif atom == "B":
        op = tensor(np.eye(2), sigma_z())
    else:
        raise ModelParameterError(f"atom must be 'A' or 'B', got {atom!r}")
    return float(np.real(np.trace(rho @ op)))


class PhaseSpaceGrid(BaseModel):
    """Rectangular alpha = x + ip grid"""

    x_range: tuple[float, float] = Field(default_factory=lambda: (-config.wigner_extent, config.wigner_extent))
    p_range: tuple[float, float] = Field(default_factory=lambda: (-config.wigner_extent, config.wigner_extent))
    nx: int = Field(default_factory=lambda: config.wigner_points, ge=2)
    np_: int = Field(default_factory=lambda: config.wigner_points, ge=2, alias="np")

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    @model_validator(mode="after")
    def _ordered_ranges(self) -> "PhaseSpaceGrid":
        if self.x_range[1] <= self.x_range[0] or self.p_range[1] <= self.p_range[0]:
            raise ValueError("grid ranges must be increasing intervals")
        return self

    @classmethod
    def square(cls, extent: float, points: int, center: complex = 0.0) -> "PhaseSpaceGrid":
        center = complex(center)
        return cls(
            x_range=(center.real - extent, center.real + extent),
            p_range=(center.imag - extent, center.imag + extent),
            nx=points,
            np_=points,
        )

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_range[0], self.x_range[1], self.nx)

    @property
    def p(self) -> np.ndarray:
        return np.linspace(self.p_range[0], self.p_range[1], self.np_)

    def alphas(self) -> np.ndarray:
        """alpha[i, j] = x[i] + i p[j]"""
        return self.x[:, None] + 1j * self.p[None, :]


@dataclass
class WignerGrid:
    """W(alpha) sampled on a PhaseSpaceGrid, values[i, j] at (x[i], p[j])"""
    x: np.ndarray
    p: np.ndarray
    values: np.ndarray
    method: str = "recurrence"

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def dp(self) -> float:
        return float(self.p[1] - self.p[0])

    @property
    def integral(self) -> float:
        """Riemann sum of W dx dp"""
        return float(np.sum(self.values) * self.dx * self.dp)

    @property
    def min_value(self) -> float:
        return float(np.min(self.values))


def _field_matrix(rho_field: Union[FieldState, SystemState, npt.ArrayLike]) -> np.ndarray:
    if isinstance(rho_field, FieldState):
        return rho_field.rho
    if isinstance(rho_field, SystemState):
        return field_reduced(rho_field)
    rho = np.asarray(rho_field, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidShapeError(f"field matrix must be square, got {rho.shape}")
    return rho


def _wigner_recurrence(rho: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    # Displaced-parity kernel K[m, n] = (2/pi) <n| D Pi D^dag |m>, built row by row.
    dim = rho.shape[0]
    sqrt_n = np.sqrt(np.arange(dim))
    two_alpha = 2.0 * alphas
    two_alpha_conj = np.conj(two_alpha)

    row = [None] * dim
    row[0] = (2.0 / np.pi) * np.exp(-2.0 * np.abs(alphas) ** 2)
    values = np.real(rho[0, 0] * row[0])
    for n in range(1, dim):
        row[n] = two_alpha * row[n - 1] / sqrt_n[n]
        values = values + 2.0 * np.real(rho[0, n] * row[n])

    for m in range(1, dim):
        next_row = [None] * dim
        next_row[m] = (two_alpha_conj * row[m] - sqrt_n[m] * row[m - 1]) / sqrt_n[m]
        values = values + np.real(rho[m, m] * next_row[m])
        for n in range(m + 1, dim):
            next_row[n] = (two_alpha * next_row[n - 1] - sqrt_n[m] * row[n - 1]) / sqrt_n[n]
            values = values + 2.0 * np.real(rho[m, n] * next_row[n])
        row = next_row
    return values


def _wigner_direct(rho: np.ndarray, alphas: np.ndarray) -> np.ndarray:
    dim = rho.shape[0]
    policy = TruncationPolicy(n_max=dim, n_max_ceiling=max(dim, config.n_max_ceiling))
    max_alpha_sq = float(np.max(np.abs(alphas) ** 2))
    if max_alpha_sq > dim / 4:
        warnings.warn(
            f"grid reaches |alpha|^2={max_alpha_sq:.3g} beyond the reliable range n_max/4={dim / 4:.3g} of D(alpha)",
            TruncationWarning,
            stacklevel=3,
        )
    pi_op = parity(dim)
    values = np.empty(alphas.shape)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for index, alpha in np.ndenumerate(alphas):
            D = displacement(alpha, policy)
            kernel = D @ pi_op @ D.conj().T
            values[index] = (2.0 / np.pi) * np.real(np.sum(rho * kernel.T))
    return values


def wigner(
    rho_field: Union[FieldState, SystemState, npt.ArrayLike],
    grid: Optional[PhaseSpaceGrid] = None,
    method: WignerMethod = "recurrence",
) -> WignerGrid:
    """Wigner function of the field on ``grid``.

    ``recurrence`` evaluates the displaced-parity kernel exactly on the
    retained block; ``direct`` builds D(alpha) per point and warns when the
    grid leaves its reliable range.
    """
    rho = _field_matrix(rho_field)
    grid = grid or PhaseSpaceGrid()
    alphas = grid.alphas()
    if method == "recurrence":
        values = _wigner_recurrence(rho, alphas)
    elif method == "direct":
        values = _wigner_direct(rho, alphas)
    else:
        raise ModelParameterError(f"unknown Wigner method {method!r}")
    return WignerGrid(grid.x, grid.p, np.asarray(values, dtype=float), method)


def _creation_exponential(gamma: complex, dim: int) -> np.ndarray:
    # <m| exp(gamma a^dag) |n> = gamma^(m-n) sqrt(m!/n!) / (m-n)!, exact on the block
    m = np.arange(dim)[:, None]
    n = np.arange(dim)[None, :]
    k = m - n
    lower = k >= 0
    k_safe = np.where(lower, k, 0)
    if gamma == 0:
        return np.eye(dim, dtype=np.complex128)
    log_mag = k_safe * math.log(abs(gamma)) + 0.5 * (gammaln(m + 1) - gammaln(n + 1)) - gammaln(k_safe + 1)
    phase = np.exp(1j * k_safe * np.angle(gamma))
    return np.where(lower, np.exp(log_mag) * phase, 0.0)


def characteristic_function(rho_field: Union[FieldState, SystemState, npt.ArrayLike], beta: complex) -> complex:
    """chi(beta) = Tr[rho D(beta)] with D in normal-ordered form on the retained block"""
    rho = _field_matrix(rho_field)
    dim = rho.shape[0]
    beta = complex(beta)
    D = np.exp(-0.5 * abs(beta) ** 2) * _creation_exponential(beta, dim) @ _creation_exponential(-beta, dim).conj().T
    return complex(np.sum(rho * D.T))


def wigner_characteristic(
    rho_field: Union[FieldState, SystemState, npt.ArrayLike],
    grid: PhaseSpaceGrid,
    beta_extent: float = 5.0,
    beta_step: float = 0.2,
) -> WignerGrid:
    """W(alpha) = (1/pi^2) int chi(beta) exp(beta^* alpha - beta alpha^*) d^2 beta by quadrature"""
    rho = _field_matrix(rho_field)
    axis = np.arange(-beta_extent, beta_extent + 0.5 * beta_step, beta_step)
    betas = (axis[:, None] + 1j * axis[None, :]).ravel()
    chi = np.array([characteristic_function(rho, beta) for beta in betas])

    alphas = grid.alphas()
    phase = np.exp(np.conj(betas)[None, :] * alphas.ravel()[:, None] - betas[None, :] * np.conj(alphas.ravel())[:, None])
    values = np.real(phase @ chi) * beta_step ** 2 / np.pi ** 2
    return WignerGrid(grid.x, grid.p, values.reshape(alphas.shape), "characteristic")


@dataclass
class EsdReport:
    """Intervals (first, last sample time) where a measure stays below threshold"""
    threshold: float
    intervals: list[tuple[float, float]] = field(default_factory=list)

    @property
    def total_duration(self) -> float:
        return float(sum(end - start for start, end in self.intervals))

    @property
    def longest(self) -> float:
        return float(max((end - start for start, end in self.intervals), default=0.0))

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "intervals": [list(interval) for interval in self.intervals],
            "count": len(self.intervals),
            "total_duration": self.total_duration,
            "longest": self.longest,
        }


def detect_esd(
    times: npt.ArrayLike,
    values: npt.ArrayLike,
    threshold: Optional[float] = None,
    min_samples: Optional[int] = None,
) -> EsdReport:
    """Maximal runs of samples with value < threshold.

    Runs shorter than ``min_samples`` samples are discarded.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape:
        raise InvalidShapeError(f"times {times.shape} and values {values.shape} differ")
    threshold = config.esd_threshold if threshold is None else threshold
    min_samples = config.esd_min_samples if min_samples is None else min_samples

    report = EsdReport(threshold=threshold)
    dead = values < threshold
    start: Optional[int] = None
    for index, is_dead in enumerate(dead):
        if is_dead and start is None:
            start = index
        elif not is_dead and start is not None:
            if index - start >= min_samples:
                report.intervals.append((float(times[start]), float(times[index - 1])))
            start = None
    if start is not None and len(dead) - start >= min_samples:
        report.intervals.append((float(times[start]), float(times[-1])))
    return report


__all__ = [
    "CUTS",
    "EsdReport",
    "PhaseSpaceGrid",
    "WignerGrid",
    "atom_pair_reduced",
    "atomic_inversion",
    "characteristic_function",
    "concurrence",
    "detect_esd",
    "field_reduced",
    "negativity",
    "negativity_of",
    "wigner",
    "wigner_characteristic",
]
