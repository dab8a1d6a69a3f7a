"""
Density-matrix propagation and the closed-form JCM comparators.

Exact propagation diagonalises H once and rotates the initial state into its
eigenbasis; every sample is then a phase multiplication and one basis change.
Times are dimensionless (lambda*t), so H is divided by the coupling lambda.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Literal, Optional

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..config.settings import config
from ..exceptions import InvalidShapeError, InvalidStateError, ModelParameterError
from ..utils.validators import MatrixValidator
from .fock import (
    EXCITED,
    GROUND,
    QUBIT_DIM,
    OperatorMatrix,
    annihilation,
    eigendecompose,
    partial_trace,
    sigma_minus,
    sigma_plus,
    tensor,
)

logger = logging.getLogger(__name__)

Branch = Literal["excited", "ground"]

# Above this Hilbert dimension the rho_AB overlap kernel (16 D^2 entries) is not built
PAIR_KERNEL_MAX_DIM = 512


@dataclass(frozen=True)
class SystemState:
    """Density matrix on A (x) B (x) field at time lambda*t"""
    rho: OperatorMatrix
    time: float = 0.0
    n_max: int = 0

    def __post_init__(self) -> None:
        if self.n_max == 0:
            object.__setattr__(self, "n_max", self.rho.shape[0] // 4)
        if self.rho.shape != (4 * self.n_max, 4 * self.n_max):
            raise InvalidShapeError(f"state of shape {self.rho.shape} does not fit 2x2x{self.n_max}")

    @property
    def dims(self) -> list[int]:
        return [QUBIT_DIM, QUBIT_DIM, self.n_max]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))


class TimeGrid(BaseModel):
    """Sample times in lambda*t units.

    Either uniform over [0, t_max] with ``steps`` intervals, or an explicit
    strictly increasing list starting at 0.
    """

    model_config = ConfigDict(frozen=True)

    t_max: float = Field(default_factory=lambda: config.t_max, gt=0.0)
    steps: int = Field(default_factory=lambda: config.steps, ge=1)
    times: Optional[tuple[float, ...]] = None

    @field_validator("times")
    @classmethod
    def _validate_times(cls, value: Optional[tuple[float, ...]]) -> Optional[tuple[float, ...]]:
        if value is None:
            return value
        if not value or value[0] != 0.0:
            raise ValueError("explicit sample times must start at 0")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("explicit sample times must be strictly increasing")
        return value

    @property
    def samples(self) -> np.ndarray:
        if self.times is not None:
            return np.asarray(self.times, dtype=float)
        return np.linspace(0.0, self.t_max, self.steps + 1)

    def __len__(self) -> int:
        return len(self.times) if self.times is not None else self.steps + 1


@dataclass(frozen=True)
class PairSample:
    """rho_AB at one grid sample, plus the full state when it was rebuilt"""
    time: float
    rho_ab: OperatorMatrix
    state: Optional[SystemState] = None


class Propagator:
    """Exact evolution under a time-independent Hamiltonian"""

    def __init__(self, H: npt.ArrayLike, coupling: float = 1.0):
        if coupling <= 0:
            raise ModelParameterError(f"coupling must be positive, got {coupling}")
        self.H = np.asarray(H, dtype=np.complex128)
        energies, self.vectors = eigendecompose(self.H)
        self.energies = energies / coupling
        self.coupling = coupling
        self.energy_scale = float(np.max(np.abs(energies))) if energies.size else 0.0
        self._pair_kernel: Optional[np.ndarray] = None
        logger.debug(f"diagonalised H of dimension {self.H.shape[0]}, spectral radius {self.energy_scale:.4g}")

    @property
    def dim(self) -> int:
        return self.H.shape[0]

    @property
    def pair_kernel(self) -> Optional[np.ndarray]:
        """K[i, j, k, l] = sum_n V[(i,n),k] V*[(j,n),l], so rho_AB[i, j] = sum_kl M[k, l] K[i, j, k, l]"""
        if self._pair_kernel is None and self.dim <= PAIR_KERNEL_MAX_DIM and self.dim % 4 == 0:
            blocks = self.vectors.reshape(4, self.dim // 4, self.dim)
            self._pair_kernel = np.einsum("ink,jnl->ijkl", blocks, blocks.conj(), optimize=True)
        return self._pair_kernel

    def _check(self, rho: np.ndarray) -> None:
        if rho.shape != self.H.shape:
            raise InvalidShapeError(f"state of shape {rho.shape} does not match H of shape {self.H.shape}")

    def to_eigenbasis(self, rho: np.ndarray) -> np.ndarray:
        self._check(rho)
        return self.vectors.conj().T @ rho @ self.vectors

    def _phased(self, rho_eig: np.ndarray, lambda_t: float) -> np.ndarray:
        phases = np.exp(-1j * self.energies * lambda_t)
        return (phases[:, None] * rho_eig) * phases.conj()[None, :]

    def _rotate(self, rho_eig: np.ndarray, lambda_t: float) -> np.ndarray:
        return self.vectors @ self._phased(rho_eig, lambda_t) @ self.vectors.conj().T

    def state_at(self, rho0: SystemState, lambda_t: float) -> SystemState:
        if lambda_t == 0.0:
            self._check(rho0.rho)
            return SystemState(rho0.rho.copy(), 0.0, rho0.n_max)
        return SystemState(self._rotate(self.to_eigenbasis(rho0.rho), lambda_t), float(lambda_t), rho0.n_max)

    def run(self, rho0: SystemState, grid: TimeGrid) -> Iterator[SystemState]:
        """Lazily yield the state at every grid sample, in time order"""
        rho_eig = self.to_eigenbasis(rho0.rho)
        for lambda_t in grid.samples:
            if lambda_t == 0.0:
                yield SystemState(rho0.rho.copy(), 0.0, rho0.n_max)
            else:
                yield SystemState(self._rotate(rho_eig, lambda_t), float(lambda_t), rho0.n_max)

    def run_pairs(
        self,
        rho0: SystemState,
        grid: TimeGrid,
        full_at: Optional[Callable[[int], bool]] = None,
    ) -> Iterator[PairSample]:
        """Yield rho_AB at every sample; the full state only where ``full_at(index)`` holds.

        Without the full state, rho_AB is contracted straight from the
        eigenbasis and costs O(D^2) instead of O(D^3).
        """
        rho_eig = self.to_eigenbasis(rho0.rho)
        kernel = self.pair_kernel
        for index, lambda_t in enumerate(grid.samples):
            if kernel is not None and lambda_t != 0.0 and not (full_at is not None and full_at(index)):
                rho_ab = np.tensordot(kernel, self._phased(rho_eig, lambda_t), axes=([2, 3], [0, 1]))
                yield PairSample(float(lambda_t), rho_ab)
                continue
            if lambda_t == 0.0:
                state = SystemState(rho0.rho.copy(), 0.0, rho0.n_max)
            else:
                state = SystemState(self._rotate(rho_eig, lambda_t), float(lambda_t), rho0.n_max)
            yield PairSample(state.time, partial_trace(state.rho, state.dims, keep=[0, 1]), state)

    def energy(self, rho: np.ndarray) -> float:
        """Tr[rho H] in the units of H"""
        return float(np.real(np.sum(rho * self.H.T)))


def propagate(rho0: SystemState, H: npt.ArrayLike, grid: TimeGrid, coupling: float = 1.0) -> Iterator[SystemState]:
    """rho(t) = U rho0 U^dag for every sample of ``grid``"""
    return Propagator(H, coupling).run(rho0, grid)


def jcm_amplitudes(n: int, lambda_t: float, branch: Branch = "excited") -> tuple[complex, complex]:
    """Closed-form resonant JCM amplitudes of |e,n> (excited) or |g,n> (ground)"""
    if n < 0:
        raise ModelParameterError(f"photon number must be non-negative, got {n}")
    if branch == "excited":
        omega = math.sqrt(n + 1)
    elif branch == "ground":
        omega = math.sqrt(n)
    else:
        raise ModelParameterError(f"unknown branch {branch!r}")
    return complex(math.cos(omega * lambda_t)), -1j * math.sin(omega * lambda_t)


def _composite_index(a: int, b: int, n: int, n_max: int) -> int:
    return (2 * a + b) * n_max + n


def factorized_scheme(theta: float, c: npt.ArrayLike, grid: TimeGrid) -> Iterator[SystemState]:
    """Factorised two-atom ket built from single-atom amplitudes.

    Each Fock component c_n contributes

        a1 = cos(theta)/2 * c_n (x1 + y1)                   on |e,g,n>
        a2 = (cos(theta)/2 + sin(theta)/2) * c_n x2         on |g,g,n+1>
        a3 = sin(theta)/2 * c_n (x1 + y1)                   on |g,e,n>
        a4 = (cos(theta)/2 + sin(theta)/2) * c_n y2         on |e,e,n-1>

    The ket is renormalised at every sample. Components pushed past the
    retained block are dropped.
    """
    c = np.asarray(c, dtype=np.complex128)
    if c.ndim != 1 or c.size == 0:
        raise InvalidStateError("field coefficients must be a non-empty vector")
    norm = float(np.sum(np.abs(c) ** 2))
    if abs(norm - 1.0) > 1e-10:
        raise InvalidStateError(f"field coefficients are not normalised (sum |c|^2 = {norm:.12f})")

    n_max = c.size
    ns = np.arange(n_max)
    cos_w, sin_w = math.cos(theta) / 2.0, math.sin(theta) / 2.0
    mixed_w = cos_w + sin_w
    eg = _composite_index(EXCITED, GROUND, 0, n_max) + ns
    ge = _composite_index(GROUND, EXCITED, 0, n_max) + ns
    gg_up = _composite_index(GROUND, GROUND, 0, n_max) + ns[:-1] + 1
    ee_down = _composite_index(EXCITED, EXCITED, 0, n_max) + ns[1:] - 1

    for lambda_t in grid.samples:
        x1 = np.cos(np.sqrt(ns + 1) * lambda_t)
        x2 = -1j * np.sin(np.sqrt(ns + 1) * lambda_t)
        y1 = np.cos(np.sqrt(ns) * lambda_t)
        y2 = -1j * np.sin(np.sqrt(ns) * lambda_t)

        ket = np.zeros(4 * n_max, dtype=np.complex128)
        ket[eg] += cos_w * c * (x1 + y1)
        ket[ge] += sin_w * c * (x1 + y1)
        ket[gg_up] += mixed_w * c[:-1] * x2[:-1]
        ket[ee_down] += mixed_w * c[1:] * y2[1:]

        ket_norm = np.linalg.norm(ket)
        if ket_norm == 0.0:
            raise InvalidStateError(f"factorised ket vanishes at lambda_t={lambda_t}")
        ket /= ket_norm
        yield SystemState(np.outer(ket, ket.conj()), float(lambda_t), n_max)


@dataclass
class OracleTrack:
    """Populations of |e,n> and |g,n+1> from exact evolution and closed form"""
    times: np.ndarray
    exact_excited: np.ndarray
    exact_ground: np.ndarray
    closed_excited: np.ndarray
    closed_ground: np.ndarray

    @property
    def max_deviation(self) -> float:
        return float(max(
            np.max(np.abs(self.exact_excited - self.closed_excited)),
            np.max(np.abs(self.exact_ground - self.closed_ground)),
        ))

    @property
    def probability_sums(self) -> np.ndarray:
        return self.exact_excited + self.exact_ground


def single_atom_oracle(n: int, grid: TimeGrid, n_max: Optional[int] = None) -> OracleTrack:
    """Exact-diagonalisation evolution of one resonant atom from |e,n>"""
    n_max = n_max if n_max is not None else n + 2
    if n < 0 or n + 1 >= n_max:
        raise ModelParameterError(f"|e,{n}> needs n + 1 < n_max, got n_max={n_max}")

    a = annihilation(n_max)
    H = tensor(sigma_minus(), a.conj().T) + tensor(sigma_plus(), a)

    excited_index = EXCITED * n_max + n
    ground_index = GROUND * n_max + n + 1
    psi0 = np.zeros(QUBIT_DIM * n_max, dtype=np.complex128)
    psi0[excited_index] = 1.0

    energies, vectors = eigendecompose(H)
    coefficients = vectors.conj().T @ psi0
    times = grid.samples
    evolved = vectors @ (coefficients[:, None] * np.exp(-1j * np.outer(energies, times)))

    closed = np.array([jcm_amplitudes(n, t, "excited") for t in times])
    return OracleTrack(
        times=times,
        exact_excited=np.abs(evolved[excited_index]) ** 2,
        exact_ground=np.abs(evolved[ground_index]) ** 2,
        closed_excited=np.abs(closed[:, 0]) ** 2,
        closed_ground=np.abs(closed[:, 1]) ** 2,
    )


@dataclass
class InvariantReport:
    """Worst-case conservation errors over a propagated series"""
    samples: int = 0
    max_trace_drift: float = 0.0
    max_hermiticity_defect: float = 0.0
    min_eigenvalue: float = float("inf")
    max_energy_drift: float = 0.0
    energy_scale: float = 0.0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "max_trace_drift": self.max_trace_drift,
            "max_hermiticity_defect": self.max_hermiticity_defect,
            "min_eigenvalue": self.min_eigenvalue,
            "max_energy_drift": self.max_energy_drift,
            "energy_scale": self.energy_scale,
            "passed": self.passed,
            "failures": list(self.failures),
        }


class InvariantTracker:
    """Accumulates trace, Hermiticity, positivity and energy errors sample by sample"""

    def __init__(
        self,
        H: npt.ArrayLike,
        rho0: SystemState,
        stride: Optional[int] = None,
        energy_scale: Optional[float] = None,
        trace_tol: float = 1e-10,
        energy_tol: float = 1e-8,
    ):
        self.H = np.asarray(H, dtype=np.complex128)
        if self.H.shape != rho0.rho.shape:
            raise InvalidShapeError(f"H of shape {self.H.shape} does not match state {rho0.rho.shape}")
        self.stride = stride or config.invariant_stride
        self.validator = MatrixValidator()
        self.trace_tol = trace_tol
        self.energy_tol = energy_tol
        self.trace0 = rho0.trace
        self.energy0 = self._energy(rho0.rho)
        if energy_scale is None:
            energy_scale = float(np.max(np.abs(np.linalg.eigvalsh(self.H)))) if self.H.size else 0.0
        self.report = InvariantReport(energy_scale=energy_scale)

    def _energy(self, rho: np.ndarray) -> float:
        return float(np.real(np.sum(rho * self.H.T)))

    def update(self, state: SystemState) -> None:
        report = self.report
        rho = state.rho
        report.max_trace_drift = max(report.max_trace_drift, abs(state.trace - self.trace0))
        report.max_hermiticity_defect = max(report.max_hermiticity_defect, float(np.max(np.abs(rho - rho.conj().T))))
        report.max_energy_drift = max(report.max_energy_drift, abs(self._energy(rho) - self.energy0))
        if report.samples % self.stride == 0:
            min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
            report.min_eigenvalue = min(report.min_eigenvalue, min_eig)
        report.samples += 1

    def finish(self) -> InvariantReport:
        report = self.report
        report.failures.clear()
        if report.max_trace_drift > self.trace_tol:
            report.failures.append(f"trace drift {report.max_trace_drift:.3e}")
        if report.max_hermiticity_defect > self.validator.hermitian_tol:
            report.failures.append(f"Hermiticity defect {report.max_hermiticity_defect:.3e}")
        if report.samples and report.min_eigenvalue < -self.validator.positivity_tol:
            report.failures.append(f"negative eigenvalue {report.min_eigenvalue:.3e}")
        if report.max_energy_drift > self.energy_tol * max(report.energy_scale, 1.0):
            report.failures.append(f"energy drift {report.max_energy_drift:.3e}")
        return report


def check_invariants(
    states: Iterable[SystemState],
    H: npt.ArrayLike,
    stride: Optional[int] = None,
) -> InvariantReport:
    """Consume a propagated series and report its conservation errors"""
    iterator = iter(states)
    try:
        first = next(iterator)
    except StopIteration:
        raise InvalidStateError("cannot check invariants of an empty series") from None
    tracker = InvariantTracker(H, first, stride)
    tracker.update(first)
    for state in iterator:
        tracker.update(state)
    return tracker.finish()


__all__ = [
    "InvariantReport",
    "InvariantTracker",
    "OracleTrack",
    "PairSample",
    "Propagator",
    "SystemState",
    "TimeGrid",
    "check_invariants",
    "jcm_amplitudes",
    "factorized_scheme",
    "propagate",
    "single_atom_oracle",
]
