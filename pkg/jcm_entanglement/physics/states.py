"""
Field and atomic state constructors.

Field states are squeezed coherent thermal states (SCTS)
rho = D(alpha) S(zeta) rho_th S^dag(zeta) D^dag(alpha), built on the padded
workspace of a TruncationPolicy and cropped; n_max escalates until the
retained block holds all but ``tail_tol`` of the probability.

The analytic photon-count distribution follows the Glauber R-function form
with three repairs of its printed transcription:

* the ``(l/q)`` factor is the binomial coefficient;
* the Hermite argument is tilde-consistent, ``(2*Y~)^(-1/2) * Z~``
  (``hermite_argument="untilded"`` keeps the printed ``Y``);
* ``Y`` carries the sign that matches the squeeze operator as written,
  ``Y = -<(da)^2>`` (``y_sign="verbatim"`` keeps the printed sign, which is the
  same distribution evaluated at ``phi + pi``).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import linalg
from scipy.special import gammaln, logsumexp

from ..exceptions import (
    HermiteOverflowError,
    InvalidStateError,
    ModelParameterError,
)
from ..utils.validators import MatrixValidator
from .evolve import SystemState
from .fock import (
    EXCITED,
    GROUND,
    OperatorMatrix,
    TruncationPolicy,
    displacement_padded,
    number,
    squeeze_padded,
    tensor,
)

logger = logging.getLogger(__name__)

HermiteArgument = Literal["tilded", "untilded"]
YSign = Literal["operator", "verbatim"]

_HERMITE_SUM_MAX_ORDER = 20


class FieldParams(BaseModel):
    """Mean photon numbers and phases of an SCTS"""

    model_config = ConfigDict(frozen=True)

    nbar_c: float = Field(default=0.0, ge=0.0, description="mean coherent photons |alpha|^2")
    nbar_s: float = Field(default=0.0, ge=0.0, description="mean squeezed photons sinh^2 r")
    nbar_th: float = Field(default=0.0, ge=0.0, description="mean thermal photons")
    phi: float = Field(default=0.0, description="squeezing phase (rad)")
    alpha_phase: float = Field(default=0.0, description="coherent amplitude phase (rad)")

    @property
    def alpha(self) -> complex:
        return math.sqrt(self.nbar_c) * complex(math.cos(self.alpha_phase), math.sin(self.alpha_phase))

    @property
    def r(self) -> float:
        return math.asinh(math.sqrt(self.nbar_s))

    @property
    def zeta(self) -> complex:
        return self.r * complex(math.cos(self.phi), math.sin(self.phi))

    @property
    def mean_photons(self) -> float:
        return self.nbar_c + self.nbar_s + self.nbar_th + 2.0 * self.nbar_th * self.nbar_s


@dataclass(frozen=True)
class FieldState:
    """Density matrix of the field on the retained Fock block"""
    rho: OperatorMatrix
    policy: TruncationPolicy
    params: FieldParams

    @property
    def n_max(self) -> int:
        return self.rho.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))

    @property
    def tail_mass(self) -> float:
        return max(0.0, 1.0 - self.trace)


@dataclass(frozen=True)
class AtomPairState:
    """Two-qubit density matrix in the basis (|ee>, |eg>, |ge>, |gg>)"""
    rho: OperatorMatrix
    kind: Literal["bell", "werner"]
    parameter: float


def _pair_index(a: int, b: int) -> int:
    return 2 * a + b


def _thermal_probabilities(nbar_th: float, dim: int) -> np.ndarray:
    probs = np.zeros(dim)
    if nbar_th == 0.0:
        probs[0] = 1.0
        return probs
    ratio = nbar_th / (1.0 + nbar_th)
    return ratio ** np.arange(dim) / (1.0 + nbar_th)


def thermal_state(nbar_th: float, policy: Optional[TruncationPolicy] = None) -> FieldState:
    """Geometric photon distribution, renormalised over the retained block"""
    if nbar_th < 0:
        raise ModelParameterError(f"nbar_th must be non-negative, got {nbar_th}")
    policy = policy or TruncationPolicy()

    while True:
        probs = _thermal_probabilities(nbar_th, policy.n_max)
        tail = 0.0 if nbar_th == 0.0 else (nbar_th / (1.0 + nbar_th)) ** policy.n_max
        if tail <= policy.tail_tol:
            break
        logger.info(f"thermal tail {tail:.2e} above tolerance at n_max={policy.n_max}, escalating")
        policy = policy.escalated()

    rho = np.diag(probs / probs.sum()).astype(np.complex128)
    return FieldState(rho, policy, FieldParams(nbar_th=nbar_th))


def scts_state(
    nbar_c: float = 0.0,
    nbar_s: float = 0.0,
    nbar_th: float = 0.0,
    phi: float = 0.0,
    policy: Optional[TruncationPolicy] = None,
    alpha_phase: float = 0.0,
) -> FieldState:
    """Squeezed coherent thermal state D S rho_th S^dag D^dag"""
    try:
        params = FieldParams(nbar_c=nbar_c, nbar_s=nbar_s, nbar_th=nbar_th, phi=phi, alpha_phase=alpha_phase)
    except ValueError as exc:
        raise ModelParameterError(str(exc)) from exc
    return scts_from_params(params, policy)


def scts_from_params(params: FieldParams, policy: Optional[TruncationPolicy] = None) -> FieldState:
    policy = policy or TruncationPolicy()
    start_n_max = policy.n_max

    while True:
        dim = policy.padded_dim
        probs = _thermal_probabilities(params.nbar_th, dim)
        S = squeeze_padded(params.zeta, dim)
        D = displacement_padded(params.alpha, dim)
        DS = D @ S
        rho_full = (DS * probs) @ DS.conj().T
        rho = rho_full[: policy.n_max, : policy.n_max]
        rho = 0.5 * (rho + rho.conj().T)
        tail = 1.0 - float(np.real(np.trace(rho)))
        if tail <= policy.tail_tol:
            break
        logger.info(f"SCTS tail {tail:.2e} above tolerance at n_max={policy.n_max}, escalating")
        policy = policy.escalated()

    if policy.n_max != start_n_max:
        logger.info(f"SCTS {params.model_dump()} needs n_max={policy.n_max} (started at {start_n_max})")
    return FieldState(np.ascontiguousarray(rho), policy, params)


def coherent_state(nbar_c: float, policy: Optional[TruncationPolicy] = None, phase: float = 0.0) -> FieldState:
    return scts_state(nbar_c, 0.0, 0.0, policy=policy, alpha_phase=phase)


def fock_state(n: int, policy: Optional[TruncationPolicy] = None) -> FieldState:
    """|n><n|"""
    policy = policy or TruncationPolicy()
    if n < 0 or n >= policy.n_max:
        raise ModelParameterError(f"Fock level {n} outside the retained block of {policy.n_max}")
    rho = np.zeros((policy.n_max, policy.n_max), dtype=np.complex128)
    rho[n, n] = 1.0
    return FieldState(rho, policy, FieldParams())


def mean_photon_number(field: FieldState) -> float:
    return float(np.real(np.trace(number(field.n_max) @ field.rho)))


def purity(field: FieldState) -> float:
    return float(np.real(np.vdot(field.rho.conj().T, field.rho)))


def pure_field_coefficients(field: FieldState, tol: float = 1e-8) -> np.ndarray:
    """Normalised Fock amplitudes of a pure field, largest component real positive"""
    weights, vectors = linalg.eigh(field.rho)
    top = weights[-1] / max(field.trace, np.finfo(float).tiny)
    if top < 1.0 - tol:
        raise InvalidStateError(f"field is mixed (largest eigenvalue fraction {top:.6f})")
    coefficients = vectors[:, -1]
    pivot = coefficients[np.argmax(np.abs(coefficients))]
    coefficients = coefficients * (abs(pivot) / pivot)
    return coefficients / np.linalg.norm(coefficients)


def hermite(q: int, x: complex) -> complex:
    """Physicists' Hermite polynomial H_q(x) for complex x"""
    if q < 0:
        raise ModelParameterError(f"Hermite order must be non-negative, got {q}")
    x = complex(x)
    try:
        if q <= _HERMITE_SUM_MAX_ORDER:
            value = sum(
                (-1) ** j * math.factorial(q) // (math.factorial(j) * math.factorial(q - 2 * j)) * (2 * x) ** (q - 2 * j)
                for j in range(q // 2 + 1)
            )
        else:
            previous, value = 1.0 + 0j, 2 * x
            for k in range(1, q):
                previous, value = value, 2 * x * value - 2 * k * previous
    except OverflowError as exc:
        raise HermiteOverflowError(f"H_{q}({x}) overflowed") from exc

    value = complex(value)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise HermiteOverflowError(f"H_{q}({x}) is not finite")
    return value


@dataclass(frozen=True)
class GaussianMoments:
    """X, Y, Z of an SCTS and the derived tilded quantities"""
    X: float
    Y: complex
    Z: complex

    @property
    def denominator(self) -> float:
        return (1.0 + self.X) ** 2 - abs(self.Y) ** 2

    @property
    def X_tilde(self) -> float:
        return (self.X * (1.0 + self.X) - abs(self.Y) ** 2) / self.denominator

    @property
    def Y_tilde(self) -> complex:
        return self.Y / self.denominator

    @property
    def Z_tilde(self) -> complex:
        return ((1.0 + self.X) * self.Z + self.Y * np.conj(self.Z)) / self.denominator

    @property
    def r_function(self) -> float:
        """Glauber's R(0,0) = pi*Q(0)"""
        D = self.denominator
        Z = self.Z
        exponent = ((1.0 + self.X) * abs(Z) ** 2 + 0.5 * (self.Y * np.conj(Z) ** 2 + np.conj(self.Y) * Z ** 2)).real
        return float(np.exp(-exponent / D) / np.sqrt(D))


def gaussian_moments(params: FieldParams, y_sign: YSign = "operator") -> GaussianMoments:
    r = params.r
    X = params.nbar_th + (2 * params.nbar_th + 1) * math.sinh(r) ** 2
    Y = -(2 * params.nbar_th + 1) * np.exp(1j * params.phi) * math.sinh(r) * math.cosh(r)
    if y_sign == "operator":
        Y = -Y
    elif y_sign != "verbatim":
        raise ModelParameterError(f"unknown y_sign {y_sign!r}")
    return GaussianMoments(X=X, Y=complex(Y), Z=params.alpha)


def pcd_table(
    l_max: int,
    nbar_c: float = 0.0,
    nbar_s: float = 0.0,
    nbar_th: float = 0.0,
    phi: float = 0.0,
    alpha_phase: float = 0.0,
    hermite_argument: HermiteArgument = "tilded",
    y_sign: YSign = "operator",
) -> np.ndarray:
    """Analytic P(l) for l = 0..l_max.

    |Y~/2|^q |H_q(Z~/sqrt(2W))|^2 is evaluated as |Y~/W|^q |G_q|^2 with
    G_{q+1} = Z~ G_q - q W G_{q-1}, which stays finite as W -> 0. The
    recurrence runs on G_q / sqrt(q!) and the binomial sums in log space.
    """
    if l_max < 0:
        raise ModelParameterError(f"l must be non-negative, got {l_max}")
    params = FieldParams(nbar_c=nbar_c, nbar_s=nbar_s, nbar_th=nbar_th, phi=phi, alpha_phase=alpha_phase)
    moments = gaussian_moments(params, y_sign)

    X_t = moments.X_tilde
    Z_t = moments.Z_tilde
    if hermite_argument == "tilded":
        W = moments.Y_tilde
        log_scale = 0.0
    elif hermite_argument == "untilded":
        W = moments.Y
        log_scale = -math.log(moments.denominator)
    else:
        raise ModelParameterError(f"unknown hermite_argument {hermite_argument!r}")

    gamma = np.zeros(l_max + 1, dtype=np.complex128)
    gamma[0] = 1.0
    if l_max >= 1:
        gamma[1] = Z_t
    for q in range(1, l_max):
        gamma[q + 1] = (Z_t * gamma[q] - math.sqrt(q) * W * gamma[q - 1]) / math.sqrt(q + 1)
    if not np.all(np.isfinite(gamma)):
        raise HermiteOverflowError(f"Hermite recurrence overflowed below order {l_max}")

    with np.errstate(divide="ignore"):
        log_gamma_sq = np.log(np.abs(gamma) ** 2)
        log_x = math.log(X_t) if X_t > 0 else -np.inf

    r_00 = moments.r_function
    probabilities = np.empty(l_max + 1)
    for l in range(l_max + 1):
        q = np.arange(l + 1)
        power = l - q
        if np.isinf(log_x):
            x_term = np.where(power == 0, 0.0, -np.inf)
        else:
            x_term = power * log_x
        log_terms = (
            gammaln(l + 1) - gammaln(q + 1) - gammaln(power + 1)
            + q * log_scale + x_term + log_gamma_sq[: l + 1]
        )
        with np.errstate(divide="ignore"):
            total = logsumexp(log_terms)
        probabilities[l] = r_00 * math.exp(total) if np.isfinite(total) else 0.0

    if not np.all(np.isfinite(probabilities)):
        raise HermiteOverflowError("photon-count distribution is not finite")
    return probabilities


def pcd_analytic(
    l: int,
    nbar_c: float = 0.0,
    nbar_s: float = 0.0,
    nbar_th: float = 0.0,
    phi: float = 0.0,
    alpha_phase: float = 0.0,
    hermite_argument: HermiteArgument = "tilded",
    y_sign: YSign = "operator",
) -> float:
    """Analytic photon-count probability P(l) of an SCTS"""
    return float(pcd_table(l, nbar_c, nbar_s, nbar_th, phi, alpha_phase, hermite_argument, y_sign)[l])


def bell_atoms(theta: float) -> AtomPairState:
    """Projector onto cos(theta)|eg> + sin(theta)|ge>"""
    psi = np.zeros(4, dtype=np.complex128)
    psi[_pair_index(EXCITED, GROUND)] = math.cos(theta)
    psi[_pair_index(GROUND, EXCITED)] = math.sin(theta)
    return AtomPairState(np.outer(psi, psi.conj()), "bell", float(theta))


def werner_atoms(eta: float) -> AtomPairState:
    """(1 - eta) I/4 + eta |psi-><psi-| with |psi-> = (|ge> - |eg>)/sqrt(2)"""
    if not 0.0 <= eta <= 1.0:
        raise ModelParameterError(f"Werner mixing parameter must lie in [0, 1], got {eta}")
    singlet = np.zeros(4, dtype=np.complex128)
    singlet[_pair_index(GROUND, EXCITED)] = 1.0 / math.sqrt(2.0)
    singlet[_pair_index(EXCITED, GROUND)] = -1.0 / math.sqrt(2.0)
    rho = (1.0 - eta) * np.eye(4, dtype=np.complex128) / 4.0 + eta * np.outer(singlet, singlet.conj())
    return AtomPairState(rho, "werner", float(eta))


def compose_initial(atoms: AtomPairState, field: FieldState) -> SystemState:
    """rho_AB (x) rho_F on the 4*n_max composite space"""
    if atoms.rho.shape != (4, 4):
        raise InvalidStateError(f"atom pair matrix must be 4x4, got {atoms.rho.shape}")
    result = MatrixValidator().check_density_matrix(atoms.rho)
    if not result.is_valid:
        raise InvalidStateError(f"atom pair state: {result.reason}")
    return SystemState(rho=tensor(atoms.rho, field.rho), time=0.0, n_max=field.n_max)


__all__ = [
    "AtomPairState",
    "FieldParams",
    "FieldState",
    "GaussianMoments",
    "bell_atoms",
    "coherent_state",
    "compose_initial",
    "fock_state",
    "gaussian_moments",
    "hermite",
    "mean_photon_number",
    "pcd_analytic",
    "pcd_table",
    "pure_field_coefficients",
    "purity",
    "scts_from_params",
    "scts_state",
    "thermal_state",
    "werner_atoms",
]
