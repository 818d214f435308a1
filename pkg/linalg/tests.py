import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from lang.tables import CNOT, HADAMARD, PAULI_Y, PAULI_Z, PHASE

from . import kernel
from .exceptions import DimensionMismatch, InvalidKrausMap, InvalidPredicate, InvalidState, MatrixFormatError, NotHermitian
from .exchange import parse_library, parse_matrix
from .operators import DensityMatrix, KrausMap, QuantumPredicate, apply_kraus, compress, random_density, random_unitary
from .serializers import MatrixSerializer

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
small_dims = st.integers(min_value=1, max_value=3)

PLUS = np.full((2, 2), 0.5, dtype=np.complex128)


def random_matrix(dim, seed):
    return kernel.ginibre(dim, seed)


class KroneckerTests(SimpleTestCase):
    def test_identity(self):
        np.testing.assert_array_equal(kernel.kron(kernel.identity(2), kernel.identity(2)), kernel.identity(4))

    def test_hadamard_square(self):
        h2 = kernel.kron(HADAMARD, HADAMARD)
        np.testing.assert_allclose(np.abs(h2), np.full((4, 4), 0.5), atol=1e-15)
        np.testing.assert_allclose(h2[3], [0.5, -0.5, -0.5, 0.5], atol=1e-15)

    def test_basis_kets(self):
        np.testing.assert_array_equal(kernel.kron(kernel.ket(0), kernel.ket(1)).ravel(), [0, 1, 0, 0])

    @settings(max_examples=50, deadline=None)
    @given(seeds, st.sampled_from([2, 3]), st.sampled_from([2, 3]), st.sampled_from([2, 3]))
    def test_associative(self, seed, a, b, c):
        rng = np.random.default_rng(seed)
        x, y, z = random_matrix(a, rng), random_matrix(b, rng), random_matrix(c, rng)
        left = kernel.kron(kernel.kron(x, y), z)
        right = kernel.kron(x, kernel.kron(y, z))
        self.assertLessEqual(kernel.max_norm(left - right), 1e-12)

    @settings(max_examples=50, deadline=None)
    @given(seeds, st.sampled_from([2, 3]), st.sampled_from([2, 3]))
    def test_mixed_product(self, seed, m, n):
        rng = np.random.default_rng(seed)
        a, c = random_matrix(m, rng), random_matrix(m, rng)
        b, d = random_matrix(n, rng), random_matrix(n, rng)
        lhs = kernel.kron(a, b) @ kernel.kron(c, d)
        rhs = kernel.kron(a @ c, b @ d)
        self.assertLessEqual(kernel.max_norm(lhs - rhs), 1e-12 * max(1.0, kernel.max_norm(rhs)))


class DaggerTests(SimpleTestCase):
    def test_hadamard_is_self_adjoint(self):
        np.testing.assert_allclose(kernel.dagger(HADAMARD), HADAMARD)

    def test_phase(self):
        np.testing.assert_array_equal(kernel.dagger(PHASE), np.diag([1, -1j]))

    def test_pauli_y(self):
        np.testing.assert_array_equal(kernel.dagger(PAULI_Y), PAULI_Y)

    @settings(max_examples=30, deadline=None)
    @given(seeds, small_dims)
    def test_involution(self, seed, dim):
        a = random_matrix(dim, seed)
        np.testing.assert_array_equal(kernel.dagger(kernel.dagger(a)), a)


class LoewnerTests(SimpleTestCase):
    def test_examples(self):
        self.assertTrue(kernel.loewner_leq(np.zeros((2, 2)), kernel.identity(2), 1e-9))
        self.assertFalse(kernel.loewner_leq(kernel.identity(2), kernel.identity(2) / 2, 1e-9))
        self.assertTrue(kernel.loewner_leq(PLUS, kernel.identity(2), 1e-9))

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            kernel.loewner_leq(kernel.identity(2), kernel.identity(4))

    def test_not_hermitian(self):
        with self.assertRaises(NotHermitian):
            kernel.loewner_leq(np.array([[0, 1], [0, 0]]), kernel.identity(2))

    @settings(max_examples=150, deadline=None)
    @given(seeds, small_dims)
    def test_reflexive(self, seed, dim):
        a = kernel.hermitian_part(random_matrix(dim, seed))
        self.assertTrue(kernel.loewner_leq(a, a, 1e-9))

    @settings(max_examples=150, deadline=None)
    @given(seeds, small_dims)
    def test_conjugation_monotone(self, seed, dim):
        rng = np.random.default_rng(seed)
        a = QuantumPredicate(kernel.random_density_matrix(dim, rng)).mat
        b = a + kernel.random_density_matrix(dim, rng)
        e = random_matrix(dim, rng)
        self.assertTrue(kernel.loewner_leq(kernel.dagger(e) @ a @ e, kernel.dagger(e) @ b @ e, 1e-9))

    @settings(max_examples=150, deadline=None)
    @given(seeds, small_dims, st.floats(min_value=0.0, max_value=0.9e-9))
    def test_antisymmetric(self, seed, dim, delta):
        rng = np.random.default_rng(seed)
        a = kernel.hermitian_part(random_matrix(dim, rng))
        b = a + delta * kernel.hermitian_part(kernel.random_density_matrix(dim, rng))
        self.assertTrue(kernel.loewner_leq(a, b, 1e-9) and kernel.loewner_leq(b, a, 1e-9))
        self.assertLessEqual(kernel.max_norm(a - b), 2e-9)


class UnitaryAndSpectrumTests(SimpleTestCase):
    def test_is_unitary(self):
        self.assertTrue(kernel.is_unitary(HADAMARD))
        self.assertFalse(kernel.is_unitary(HADAMARD / 2))

    def test_every_two_bit_oracle_is_unitary(self):
        for code in range(16):
            table = [(code >> x) & 1 for x in range(4)]
            uf = np.zeros((8, 8), dtype=np.complex128)
            for x in range(4):
                for b in (0, 1):
                    uf[2 * x + (b ^ table[x]), 2 * x + b] = 1
            self.assertTrue(kernel.is_unitary(uf, 1e-12), table)

    def test_non_square_gate(self):
        with self.assertRaises(DimensionMismatch):
            kernel.is_unitary(np.ones((2, 3)))

    def test_eigenvalues(self):
        np.testing.assert_allclose(kernel.eig_hermitian(kernel.identity(2)), [1, 1])
        np.testing.assert_allclose(kernel.eig_hermitian(PAULI_Z), [-1, 1])
        np.testing.assert_allclose(kernel.eig_hermitian(PLUS), [0, 1], atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.integers(min_value=1, max_value=5))
    def test_eigenvalues_sum_to_trace(self, seed, dim):
        a = kernel.hermitian_part(random_matrix(dim, seed))
        self.assertAlmostEqual(sum(kernel.eig_hermitian(a)), float(np.trace(a).real), delta=1e-9)


class EmbedTests(SimpleTestCase):
    def test_single_variable(self):
        np.testing.assert_array_equal(kernel.embed_at(kernel.outer(0, 1) + kernel.outer(1, 0), [0], [2]),
                                      [[0, 1], [1, 0]])

    def test_second_factor(self):
        projector = kernel.outer(0, 0)
        np.testing.assert_array_equal(kernel.embed_at(projector, [1], [2, 2]),
                                      kernel.kron(kernel.identity(2), projector))

    def test_reversed_cnot(self):
        # control q2, target q1: swaps |01> and |11>
        lifted = kernel.embed_at(CNOT, [1, 0], [2, 2])
        expected = np.zeros((4, 4))
        for source, target in {0: 0, 1: 3, 2: 2, 3: 1}.items():
            expected[target, source] = 1
        np.testing.assert_array_equal(lifted, expected)

    def test_errors(self):
        with self.assertRaises(DimensionMismatch):
            kernel.embed_at(kernel.identity(2), [2], [2, 2])
        with self.assertRaises(DimensionMismatch):
            kernel.embed_at(kernel.identity(4), [0, 0], [2, 2])
        with self.assertRaises(DimensionMismatch):
            kernel.embed_at(kernel.identity(4), [0], [2, 2])

    def test_rectangular_factor(self):
        bra = kernel.dagger(kernel.ket(1))
        lifted = kernel.embed_factor(bra, 0, [2, 3])
        self.assertEqual(lifted.shape, (3, 6))
        np.testing.assert_array_equal(lifted, kernel.kron(bra, kernel.identity(3)))


class OperatorTests(SimpleTestCase):
    def test_measure_and_forget(self):
        rng = np.random.default_rng(7)
        measure = KrausMap((kernel.outer(0, 0), kernel.outer(1, 1)))
        for _ in range(100):
            v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            alpha, beta = v / np.linalg.norm(v)
            rho = DensityMatrix.pure([alpha, beta])
            out = apply_kraus(measure, rho).mat
            expected = np.diag([abs(alpha) ** 2, abs(beta) ** 2])
            self.assertLessEqual(kernel.max_norm(out - expected), 1e-12)

    def test_allocation(self):
        allocate = KrausMap((np.vstack([kernel.identity(2), np.zeros((2, 2))]),))
        rho = random_density(2, 3)
        out = apply_kraus(allocate, rho).mat
        self.assertEqual(out.shape, (4, 4))
        np.testing.assert_allclose(out[:2, :2], rho.mat)
        self.assertEqual(kernel.max_norm(out[2:, :]), 0.0)

    def test_maximally_mixed_is_fixed_by_unitaries(self):
        mixed = DensityMatrix.maximally_mixed(4)
        self.assertAlmostEqual(mixed.trace, 1.0, delta=1e-15)
        u = random_unitary(4, 12)
        out = apply_kraus(KrausMap((u,)), mixed).mat
        self.assertLessEqual(kernel.max_norm(out - mixed.mat), 1e-12)

    def test_identity_map(self):
        rho = random_density(3, 11)
        np.testing.assert_allclose(apply_kraus(KrausMap.identity(3), rho).mat, rho.mat)

    def test_random_generators(self):
        rho = random_density(2, 5)
        self.assertAlmostEqual(rho.trace, 1.0, delta=1e-12)
        self.assertGreaterEqual(kernel.eig_hermitian(rho.mat)[0], -1e-12)
        self.assertTrue(kernel.is_unitary(random_unitary(4, 5), 1e-9))
        np.testing.assert_array_equal(random_density(2, 9).mat, random_density(2, 9).mat)

    def test_zero_dimension(self):
        with self.assertRaises(DimensionMismatch):
            random_density(0, 1)

    @settings(max_examples=40, deadline=None)
    @given(seeds, small_dims)
    def test_admissible_map_preserves_trace(self, seed, dim):
        rng = np.random.default_rng(seed)
        u = random_unitary(dim, rng)
        half = KrausMap((u / math.sqrt(2), kernel.identity(dim) / math.sqrt(2)))
        self.assertTrue(half.is_admissible())
        rho = random_density(dim, rng)
        self.assertAlmostEqual(apply_kraus(half, rho).trace, rho.trace, delta=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(seeds, small_dims)
    def test_subnormalized_map_never_raises_trace(self, seed, dim):
        rng = np.random.default_rng(seed)
        lossy = KrausMap((random_unitary(dim, rng) * 0.6,))
        rho = random_density(dim, rng)
        self.assertLessEqual(apply_kraus(lossy, rho).trace, rho.trace + 1e-10)

    def test_heisenberg_duality(self):
        rng = np.random.default_rng(21)
        k = KrausMap((kernel.outer(0, 0), kernel.outer(0, 1)))
        q = kernel.random_density_matrix(2, rng)
        rho = kernel.random_density_matrix(2, rng)
        self.assertAlmostEqual(kernel.expectation(k.adjoint_apply(q), rho),
                               kernel.expectation(q, k.apply(rho)), delta=1e-12)

    def test_composition_order(self):
        flip = KrausMap((np.array([[0, 1], [1, 0]]),))
        reset = KrausMap((kernel.outer(0, 0), kernel.outer(0, 1)))
        rho = DensityMatrix.basis(0, 2)
        np.testing.assert_allclose(reset.then(flip).apply(rho.mat), kernel.outer(1, 1))
        np.testing.assert_allclose(flip.then(reset).apply(rho.mat), kernel.outer(0, 0))

    def test_compression_preserves_map(self):
        rng = np.random.default_rng(4)
        ops = [random_unitary(2, rng) / 3 for _ in range(9)]
        compressed = compress(ops)
        self.assertLessEqual(len(compressed), 4)
        rho = kernel.random_density_matrix(2, rng)
        before = sum(op @ rho @ kernel.dagger(op) for op in ops)
        after = sum(op @ rho @ kernel.dagger(op) for op in compressed)
        self.assertLessEqual(kernel.max_norm(before - after), 1e-12)

    def test_over_complete_map_rejected(self):
        with self.assertRaises(InvalidKrausMap):
            KrausMap((kernel.identity(2), kernel.identity(2)))

    def test_state_validation(self):
        with self.assertRaises(InvalidState):
            DensityMatrix(np.diag([1.0, 1.0]))
        with self.assertRaises(InvalidState):
            DensityMatrix(np.diag([1.5, -0.5]))
        self.assertAlmostEqual(DensityMatrix(np.diag([0.25, 0.25])).trace, 0.5)

    def test_predicate_validation(self):
        with self.assertRaises(InvalidPredicate):
            QuantumPredicate(2 * kernel.identity(2))
        predicate, clamp = QuantumPredicate.clamped(np.diag([1.0 + 1e-6, -1e-6]))
        self.assertAlmostEqual(clamp, 1e-6, delta=1e-12)
        np.testing.assert_allclose(predicate.mat, np.diag([1.0, 0.0]), atol=1e-15)


class ExchangeTests(SimpleTestCase):
    def test_parse_complex_matrix(self):
        matrix = parse_matrix({'dim': [2, 2], 're': [[1, 0], [0, 1]], 'im': [[0, 1], [-1, 0]]})
        np.testing.assert_array_equal(matrix, [[1, 1j], [-1j, 1]])

    def test_missing_imaginary_part_is_zero(self):
        matrix = parse_matrix({'dim': [1, 2], 're': [[0.5, 2]]})
        self.assertEqual(matrix.dtype, np.complex128)
        np.testing.assert_array_equal(matrix, [[0.5, 2]])

    def test_rejects_shape_mismatch(self):
        with self.assertRaises(MatrixFormatError):
            parse_matrix({'dim': [2, 2], 're': [[1, 0]]})

    def test_rejects_non_finite(self):
        with self.assertRaises(MatrixFormatError):
            parse_matrix({'dim': [1, 1], 're': [[float('nan')]]})

    def test_representation(self):
        data = MatrixSerializer(np.array([[1, 1j]])).data
        self.assertEqual(data['dim'], [1, 2])
        self.assertEqual(data['re'], [[1.0, 0.0]])
        self.assertEqual(data['im'], [[0.0, 1.0]])

    def test_library(self):
        library = parse_library({
            'schema': 1,
            'matrices': {'U': {'dim': [1, 1], 're': [[1]]}},
            'measurements': {'M': [{'dim': [1, 1], 're': [[1]]}]},
        })
        self.assertEqual(set(library['matrices']), {'U'})
        self.assertEqual(len(library['measurements']['M']), 1)

    def test_library_schema(self):
        with self.assertRaises(MatrixFormatError):
            parse_library({'schema': 2, 'matrices': {}})
