"""
Matrix validators for operators and density matrices
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..config.settings import config


@dataclass
class ValidationResult:
    """Validation result with details"""
    is_valid: bool
    reason: str
    deviation: float = 0.0


class MatrixValidator:
    """Checks the structural invariants every operator in the simulator relies on"""

    def __init__(self, hermitian_tol: Optional[float] = None, positivity_tol: Optional[float] = None):
        self.hermitian_tol = hermitian_tol if hermitian_tol is not None else config.hermitian_tol
        self.positivity_tol = positivity_tol if positivity_tol is not None else config.positivity_tol

    def check_square(self, matrix: np.ndarray) -> ValidationResult:
        """Square, two-dimensional and non-empty"""
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            return ValidationResult(False, f"expected a non-empty square matrix, got shape {matrix.shape}")
        return ValidationResult(True, "square")

    def check_hermitian(self, matrix: np.ndarray) -> ValidationResult:
        """Entry-wise |M - M^dagger| against the tolerance scaled by max(1, max|M|)"""
        square = self.check_square(matrix)
        if not square.is_valid:
            return square

        deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
        scale = max(1.0, float(np.max(np.abs(matrix))))
        if deviation > self.hermitian_tol * scale:
            return ValidationResult(False, f"matrix is not Hermitian (max deviation {deviation:.3e})", deviation)
        return ValidationResult(True, "Hermitian", deviation)

    def check_unitary(self, matrix: np.ndarray, columns: Optional[Sequence[int]] = None, tol: float = 1e-8) -> ValidationResult:
        """max|U^dagger U - I| over the selected columns"""
        block = matrix if columns is None else matrix[:, list(columns)]
        gram = block.conj().T @ block
        deviation = float(np.max(np.abs(gram - np.eye(gram.shape[0]))))
        if deviation > tol:
            return ValidationResult(False, f"matrix is not unitary (max deviation {deviation:.3e})", deviation)
        return ValidationResult(True, "unitary", deviation)

    def check_density_matrix(self, rho: np.ndarray, trace_tol: float = 1e-6) -> ValidationResult:
        """Hermitian, unit trace and positive semidefinite"""
        hermitian = self.check_hermitian(rho)
        if not hermitian.is_valid:
            return hermitian

        trace_error = abs(complex(np.trace(rho)) - 1.0)
        if trace_error > trace_tol:
            return ValidationResult(False, f"trace differs from 1 by {trace_error:.3e}", trace_error)

        min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
        if min_eig < -self.positivity_tol:
            return ValidationResult(False, f"negative eigenvalue {min_eig:.3e}", -min_eig)

        return ValidationResult(True, "valid density matrix", max(trace_error, -min_eig, 0.0))
