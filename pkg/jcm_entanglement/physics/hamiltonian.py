"""
Two-atom Jaynes-Cummings Hamiltonians on A (x) B (x) field.

sigma_z carries eigenvalues +1/-1 on |e>/|g> without a factor 1/2, so the
excitation-conserving sectors are resonant when nu = 2*omega.
"""

from __future__ import annotations

import logging
from typing import Any, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..config.settings import config
from ..exceptions import ModelParameterError
from .fock import (
    EXCITED,
    GROUND,
    QUBIT_DIM,
    OperatorMatrix,
    TruncationPolicy,
    annihilation,
    embed,
    number,
    sigma_minus,
    sigma_plus,
    sigma_z,
    tensor,
)

logger = logging.getLogger(__name__)

ATOMS = ("A", "B")
_FREQUENCY_TOL = 1e-12


class ModelSpec(BaseModel):
    """Couplings and frequencies in units of lambda.

    sigma_z carries eigenvalues +-1, so the atoms see a splitting of 2*omega
    and resonance with the field needs nu = 2*omega. The defaults
    (omega = nu = 10) are therefore detuned by 10 lambda; pass nu = 2*omega
    for resonant dynamics. ``effective_detuning`` reports 2*omega - nu.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    coupling: float = Field(default=1.0, gt=0.0, alias="lambda", description="atom-field coupling lambda")
    omega: Optional[float] = Field(default=None, description="atomic transition frequency")
    nu: Optional[float] = Field(default=None, description="field frequency")
    delta: Optional[float] = Field(default=None, description="detuning omega - nu")
    jz: float = Field(default=0.0, description="Ising coupling J_z")
    gd: float = Field(default=0.0, description="dipole-dipole coupling g_d")
    kerr_k: float = Field(default=0.0, ge=0.0, description="Kerr strength k, chi = k*omega")
    detuned_form: bool = Field(default=False, description="use the effective detuned Hamiltonian")
    policy: TruncationPolicy = Field(default_factory=TruncationPolicy)

    @model_validator(mode="before")
    @classmethod
    def _resolve_frequencies(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        data = dict(data)
        omega, nu, delta = data.get("omega"), data.get("nu"), data.get("delta")
        omega = None if omega is None else float(omega)
        nu = None if nu is None else float(nu)
        delta = None if delta is None else float(delta)

        if omega is not None and nu is not None:
            if delta is not None and abs(delta - (omega - nu)) > _FREQUENCY_TOL * max(1.0, abs(omega), abs(nu)):
                raise ValueError(f"delta={delta} contradicts omega - nu = {omega - nu}")
            delta = omega - nu
        elif omega is not None:
            nu = omega - delta if delta is not None else omega
        elif nu is not None:
            omega = nu + delta if delta is not None else nu
        else:
            omega = config.omega
            nu = omega - delta if delta is not None else omega
        data.update(omega=omega, nu=nu, delta=omega - nu)
        return data

    @property
    def chi(self) -> float:
        """Kerr coefficient chi = k*omega"""
        return self.kerr_k * self.omega

    @property
    def chi_over_lambda(self) -> float:
        return self.chi / self.coupling

    @property
    def effective_detuning(self) -> float:
        """Energy gap between |e,n> and |g,n+1>: 2*omega - nu with the unhalved sigma_z"""
        if self.detuned_form:
            return -self.delta
        return 2.0 * self.omega - self.nu

    @property
    def n_max(self) -> int:
        return self.policy.n_max

    def with_policy(self, policy: TruncationPolicy) -> "ModelSpec":
        return self.model_copy(update={"policy": policy})


def _dims(n_max: int) -> list[int]:
    return [QUBIT_DIM, QUBIT_DIM, n_max]


def _atom_position(atom: str) -> int:
    if atom not in ATOMS:
        raise ModelParameterError(f"atom must be one of {ATOMS}, got {atom!r}")
    return ATOMS.index(atom)


def atom_operator(op: np.ndarray, atom: str, n_max: int) -> OperatorMatrix:
    return embed(op, _atom_position(atom), _dims(n_max))


def field_operator(op: np.ndarray, n_max: int) -> OperatorMatrix:
    return embed(op, 2, _dims(n_max))


def jc_coupling(atom: str, n_max: int) -> OperatorMatrix:
    """a^dag sigma_- + a sigma_+ for one atom"""
    a = field_operator(annihilation(n_max), n_max)
    lower = atom_operator(sigma_minus(), atom, n_max)
    return a.conj().T @ lower + a @ lower.conj().T


def excitation_number(n_max: int) -> OperatorMatrix:
    """N_exc = a^dag a + sigma_+ sigma_- (A) + sigma_+ sigma_- (B)"""
    excited = sigma_plus() @ sigma_minus()
    return (
        field_operator(number(n_max), n_max)
        + atom_operator(excited, "A", n_max)
        + atom_operator(excited, "B", n_max)
    )


def swap_atoms(n_max: int) -> OperatorMatrix:
    """Permutation exchanging the two qubit factors"""
    swap = np.zeros((4, 4), dtype=np.complex128)
    for a in (EXCITED, GROUND):
        for b in (EXCITED, GROUND):
            swap[2 * b + a, 2 * a + b] = 1.0
    return tensor(swap, np.eye(n_max))


def _interaction_terms(spec: ModelSpec) -> OperatorMatrix:
    n_max = spec.n_max
    H = spec.coupling * (jc_coupling("A", n_max) + jc_coupling("B", n_max))

    if spec.jz:
        H = H + spec.jz * tensor(sigma_z(), sigma_z(), np.eye(n_max))
    if spec.gd:
        exchange = tensor(sigma_plus(), sigma_minus()) + tensor(sigma_minus(), sigma_plus())
        H = H + spec.gd * tensor(exchange, np.eye(n_max))
    if spec.kerr_k:
        n = np.arange(n_max, dtype=float)
        H = H + spec.chi * field_operator(np.diag(n * (n - 1)).astype(np.complex128), n_max)
    return H


def build(spec: ModelSpec) -> OperatorMatrix:
    """Bare two-atom JCM plus the optional Ising, dipole-dipole and Kerr terms"""
    n_max = spec.n_max
    sz = sigma_z()
    H = (
        spec.omega * (atom_operator(sz, "A", n_max) + atom_operator(sz, "B", n_max))
        + spec.nu * field_operator(number(n_max), n_max)
        + _interaction_terms(spec)
    )
    logger.debug(
        f"built H dim={H.shape[0]} omega={spec.omega} nu={spec.nu} jz={spec.jz} gd={spec.gd} chi/lambda={spec.chi_over_lambda:.4g}"
    )
    return H


def build_detuned(spec: ModelSpec) -> OperatorMatrix:
    """Effective detuned form: Delta on each ground-state projector plus the interaction terms"""
    if not spec.detuned_form:
        raise ModelParameterError("build_detuned requires detuned_form = true")
    n_max = spec.n_max
    ground = sigma_minus() @ sigma_plus()
    H = spec.delta * (atom_operator(ground, "A", n_max) + atom_operator(ground, "B", n_max)) + _interaction_terms(spec)
    logger.debug(f"built detuned H dim={H.shape[0]} delta={spec.delta} chi/lambda={spec.chi_over_lambda:.4g}")
    return H


def hamiltonian_for(spec: ModelSpec) -> OperatorMatrix:
    return build_detuned(spec) if spec.detuned_form else build(spec)


__all__ = [
    "ATOMS",
    "ModelSpec",
    "atom_operator",
    "build",
    "build_detuned",
    "excitation_number",
    "field_operator",
    "hamiltonian_for",
    "jc_coupling",
    "swap_atoms",
]
