"""
JCM Entanglement Physics Module
"""

from .fock import TruncationPolicy
from .evolve import (
    InvariantReport,
    Propagator,
    SystemState,
    TimeGrid,
    check_invariants,
    factorized_scheme,
    jcm_amplitudes,
    propagate,
    single_atom_oracle,
)
from .states import (
    AtomPairState,
    FieldParams,
    FieldState,
    bell_atoms,
    coherent_state,
    compose_initial,
    fock_state,
    pcd_analytic,
    pcd_table,
    scts_state,
    thermal_state,
    werner_atoms,
)
from .hamiltonian import ModelSpec, build, build_detuned, hamiltonian_for
from .measures import (
    EsdReport,
    PhaseSpaceGrid,
    WignerGrid,
    atomic_inversion,
    concurrence,
    detect_esd,
    negativity,
    wigner,
)

__all__ = [
    "AtomPairState",
    "EsdReport",
    "FieldParams",
    "FieldState",
    "InvariantReport",
    "ModelSpec",
    "PhaseSpaceGrid",
    "Propagator",
    "SystemState",
    "TimeGrid",
    "TruncationPolicy",
    "WignerGrid",
    "atomic_inversion",
    "bell_atoms",
    "build",
    "build_detuned",
    "check_invariants",
    "coherent_state",
    "compose_initial",
    "concurrence",
    "detect_esd",
    "factorized_scheme",
    "fock_state",
    "hamiltonian_for",
    "jcm_amplitudes",
    "negativity",
    "pcd_analytic",
    "pcd_table",
    "propagate",
    "scts_state",
    "single_atom_oracle",
    "thermal_state",
    "wigner",
    "werner_atoms",
]
