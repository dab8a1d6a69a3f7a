"""
Unit tests - truncated Fock-space operator algebra
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from jcm_entanglement.exceptions import (
    InvalidDimensionError,
    InvalidOperatorError,
    InvalidShapeError,
    TruncationError,
    TruncationWarning,
)
from jcm_entanglement.physics.fock import (
    TruncationPolicy,
    annihilation,
    creation,
    displacement,
    embed,
    evolve_unitary,
    number,
    parity,
    partial_trace,
    partial_transpose,
    sigma_minus,
    sigma_plus,
    sigma_z,
    squeeze,
    tensor,
    unitarity_defect,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_density(rng, dim):
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


class TestLadderOperators:
    """Test annihilation, creation and number operators"""

    def test_annihilation_entries(self):
        """a[n-1, n] = sqrt(n) and nothing else"""
        a = annihilation(4)
        expected = np.zeros((4, 4))
        for n in range(1, 4):
            expected[n - 1, n] = math.sqrt(n)
        np.testing.assert_allclose(a, expected, atol=1e-15)

    def test_creation_is_adjoint(self):
        np.testing.assert_allclose(creation(5), annihilation(5).conj().T)

    def test_number_is_a_dag_a(self):
        a = annihilation(6)
        np.testing.assert_allclose(a.conj().T @ a, number(6), atol=1e-14)

    def test_commutator_truncated(self):
        """[a, a^dag] = I except the last level"""
        a = annihilation(5)
        commutator = a @ a.conj().T - a.conj().T @ a
        np.testing.assert_allclose(np.diag(commutator).real, [1, 1, 1, 1, -4], atol=1e-14)

    def test_parity(self):
        np.testing.assert_allclose(np.diag(parity(4)).real, [1, -1, 1, -1])

    @pytest.mark.parametrize("dim", [0, -3, 2.5])
    def test_invalid_dimension(self, dim):
        with pytest.raises(InvalidDimensionError):
            annihilation(dim)


class TestQubitOperators:
    """Test the (|e>, |g>) qubit conventions"""

    def test_sigma_z_eigenvalues(self):
        np.testing.assert_allclose(np.diag(sigma_z()).real, [1, -1])

    def test_raising_maps_ground_to_excited(self):
        ground = np.array([0, 1])
        np.testing.assert_allclose(sigma_plus() @ ground, [1, 0])
        np.testing.assert_allclose(sigma_minus() @ np.array([1, 0]), [0, 1])

    def test_embed_matches_tensor(self):
        dims = [2, 2, 3]
        np.testing.assert_allclose(embed(sigma_z(), 1, dims), tensor(np.eye(2), sigma_z(), np.eye(3)))

    def test_embed_shape_mismatch(self):
        with pytest.raises(InvalidShapeError):
            embed(sigma_z(), 2, [2, 2, 3])


class TestPartialOperations:
    """Test partial trace and partial transpose"""

    def test_partial_trace_of_product(self, rng):
        rho_a = random_density(rng, 2)
        rho_b = random_density(rng, 3)
        rho = tensor(rho_a, rho_b)
        np.testing.assert_allclose(partial_trace(rho, [2, 3], keep=[0]), rho_a, atol=1e-12)
        np.testing.assert_allclose(partial_trace(rho, [2, 3], keep=[1]), rho_b, atol=1e-12)

    def test_partial_trace_three_factors(self, rng):
        rho_a, rho_b, rho_c = (random_density(rng, d) for d in (2, 2, 4))
        rho = tensor(rho_a, rho_b, rho_c)
        np.testing.assert_allclose(partial_trace(rho, [2, 2, 4], keep=[0, 1]), tensor(rho_a, rho_b), atol=1e-12)
        np.testing.assert_allclose(partial_trace(rho, [2, 2, 4], keep=[2]), rho_c, atol=1e-12)

    def test_empty_keep_returns_trace(self, rng):
        rho = random_density(rng, 6)
        result = partial_trace(rho, [2, 3], keep=[])
        assert result.shape == (1, 1)
        assert abs(result[0, 0] - 1.0) < 1e-12

    def test_partial_trace_shape_mismatch(self):
        with pytest.raises(InvalidShapeError):
            partial_trace(np.eye(5), [2, 3], keep=[0])

    def test_partial_transpose_of_product(self, rng):
        rho_a = random_density(rng, 2)
        rho_b = random_density(rng, 3)
        result = partial_transpose(tensor(rho_a, rho_b), [2, 3], transposed=[1])
        np.testing.assert_allclose(result, tensor(rho_a, rho_b.T), atol=1e-12)

    def test_partial_transpose_of_bell_pair(self):
        psi = np.array([0, 1, 1, 0]) / math.sqrt(2)
        rho_pt = partial_transpose(np.outer(psi, psi), [2, 2], transposed=[0])
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(rho_pt)), [-0.5, 0.5, 0.5, 0.5], atol=1e-12)


class TestDisplacementAndSqueeze:
    """Test the padded-and-cropped exponentials"""

    @pytest.fixture
    def policy(self):
        return TruncationPolicy(n_max=80, pad_factor=2)

    def test_displacement_low_block_is_unitary(self, policy):
        D = displacement(math.sqrt(5), policy)
        assert D.shape == (80, 80)
        assert unitarity_defect(D, columns=range(6)) < 1e-10

    def test_displacement_inverse_on_low_block(self, policy):
        alpha = 1.2 - 0.7j
        product = displacement(alpha, policy) @ displacement(-alpha, policy)
        np.testing.assert_allclose(product[:10, :10], np.eye(10), atol=1e-10)

    def test_displaced_vacuum_is_coherent(self, policy):
        alpha = 1.5 + 0.5j
        column = displacement(alpha, policy)[:, 0]
        n = np.arange(20)
        expected = np.exp(-abs(alpha) ** 2 / 2) * alpha ** n / np.sqrt([math.factorial(k) for k in n])
        np.testing.assert_allclose(column[:20], expected, atol=1e-10)

    def test_squeezed_vacuum_amplitudes(self, policy):
        r = 0.5
        column = squeeze(r, policy)[:, 0]
        assert abs(column[0] - 1 / math.sqrt(math.cosh(r))) < 1e-10
        assert abs(column[2] - (-math.tanh(r) * math.sqrt(2) / 2 / math.sqrt(math.cosh(r)))) < 1e-10
        assert abs(column[1]) < 1e-12

    def test_squeeze_low_block_is_unitary(self, policy):
        S = squeeze(math.asinh(1.0) * np.exp(0.3j), policy)
        assert unitarity_defect(S, columns=range(6)) < 1e-6

    @pytest.mark.parametrize(
        "build,argument",
        [(displacement, math.sqrt(5)), (displacement, 1.0 + 1.0j), (squeeze, math.asinh(1.0) * np.exp(0.3j))],
    )
    def test_padding_converged(self, build, argument):
        pad2 = build(argument, TruncationPolicy(n_max=80, pad_factor=2))
        pad4 = build(argument, TruncationPolicy(n_max=80, pad_factor=4))
        assert np.max(np.abs(pad2[:, :6] - pad4[:, :6])) <= 1e-8

    def test_truncation_warning(self):
        with pytest.warns(TruncationWarning):
            displacement(2.0, TruncationPolicy(n_max=8))


class TestEvolveUnitary:
    """Test exp(-iHt) via eigendecomposition"""

    def test_zero_hamiltonian(self):
        np.testing.assert_allclose(evolve_unitary(np.zeros((4, 4)), 3.0), np.eye(4), atol=1e-14)

    def test_matches_analytic_phase(self):
        H = np.diag([0.0, 1.0, 2.5])
        U = evolve_unitary(H, 0.7)
        np.testing.assert_allclose(np.diag(U), np.exp(-1j * np.array([0.0, 1.0, 2.5]) * 0.7), atol=1e-14)

    def test_unitarity(self, rng):
        m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        assert unitarity_defect(evolve_unitary(m + m.conj().T, 1.3)) < 1e-12

    def test_group_property(self, rng):
        m = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        H = m + m.conj().T
        np.testing.assert_allclose(evolve_unitary(H, 0.4) @ evolve_unitary(H, 1.1), evolve_unitary(H, 1.5), atol=1e-12)

    def test_non_hermitian_rejected(self):
        with pytest.raises(InvalidOperatorError):
            evolve_unitary(annihilation(3), 1.0)


class TestTruncationPolicy:
    """Test escalation rules"""

    def test_escalation_step(self):
        policy = TruncationPolicy(n_max=80, escalation_step=20, n_max_ceiling=400)
        assert policy.escalated().n_max == 100
        assert policy.padded_dim == 160

    def test_escalation_clamps_to_ceiling(self):
        policy = TruncationPolicy(n_max=390, escalation_step=20, n_max_ceiling=400)
        assert policy.escalated().n_max == 400

    def test_ceiling_reached(self):
        with pytest.raises(TruncationError):
            TruncationPolicy(n_max=400, n_max_ceiling=400).escalated()

    def test_ceiling_below_start(self):
        with pytest.raises(ValidationError):
            TruncationPolicy(n_max=100, n_max_ceiling=50)

    def test_pad_factor_minimum(self):
        with pytest.raises(ValidationError):
            TruncationPolicy(pad_factor=1)
