import json
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose
from rest_framework.exceptions import ValidationError

from apps.selfdual.exceptions import (
    NotBasisProjection, NotGammaCommuting, NotHermitian, NotInvolution,
    NotSelfDual, NotUnitary, ShapeMismatch, UnpairedLabel,
)
from apps.selfdual.models import BasisProjection, SelfDualSpace
from apps.selfdual.serializers import MatrixField, dump_matrix, load_matrix
from apps.selfdual.services import (
    bogoliubov_parity, chain_labels, diagonalization_residual, diagonalizes, make_space,
    mode_swap, one_particle_hamiltonian, opnorm, random_bogoliubov, random_self_dual,
    symmetrize, validate_basis_projection, validate_self_dual,
)
from apps.spectral.services import resolve


class SpaceTests(SimpleTestCase):
    def test_labels_sorted_minus_before_plus(self):
        space = make_space([((1,), 0, "+"), ((0,), 0, "+"), ((1,), 0, "-"), ((0,), 0, "-")])
        self.assertEqual([lab[2] for lab in space.labels], ["-", "+", "-", "+"])
        self.assertEqual(space.labels[0][0], (0,))
        self.assertEqual(list(space.partner), [1, 0, 3, 2])

    def test_gamma_is_antiunitary_involution(self):
        space = make_space(chain_labels(3, n_spins=2))
        rng = np.random.default_rng(1)
        v = rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
        assert_allclose(space.gamma(space.gamma(v)), v)
        w = rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
        # ⟨Γv, Γw⟩ = conj⟨v, w⟩
        self.assertAlmostEqual(np.vdot(space.gamma(v), space.gamma(w)), np.conj(np.vdot(v, w)))

    def test_unpaired_label(self):
        with self.assertRaises(UnpairedLabel):
            make_space([((0,), 0, "-"), ((1,), 0, "+")])
        with self.assertRaises(UnpairedLabel):
            make_space([((0,), 0, "-"), ((0,), 0, "x")])
        with self.assertRaises(UnpairedLabel):
            make_space([])

    def test_gamma_matrix_is_checked(self):
        good = make_space(chain_labels(1))
        for g, error in ((2 * good.gamma_matrix, NotUnitary),
                         (np.array([[0.0, 1.0], [-1.0, 0.0]]), NotInvolution),
                         (np.eye(3), ShapeMismatch)):
            with self.subTest(error=error.__name__):
                with self.assertRaises(error):
                    SelfDualSpace(labels=good.labels, gamma_matrix=g, partner=good.partner)

    def test_majorana_basis_is_gamma_real(self):
        space = make_space(chain_labels(4))
        w = space.majorana_basis()
        assert_allclose(w.conj().T @ w, np.eye(space.dim), atol=1e-14)
        for k in range(space.dim):
            assert_allclose(space.gamma(w[:, k]), w[:, k], atol=1e-14)

    def test_canonical_projection_is_basis(self):
        space = make_space(chain_labels(3))
        p = space.canonical_projection()
        validate_basis_projection(space, p.matrix)
        self.assertEqual(p.range_basis().shape, (space.dim, space.n_modes))


class HamiltonianTests(SimpleTestCase):
    def setUp(self):
        self.space = make_space(chain_labels(4))

    def test_symmetrize_produces_self_dual(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((self.space.dim,) * 2) + 1j * rng.standard_normal((self.space.dim,) * 2)
        h = validate_self_dual(self.space, symmetrize(self.space, a))
        self.assertLessEqual(h.meta["residuals"]["self_dual"], 1e-12)

    def test_spectrum_symmetric(self):
        h = random_self_dual(self.space, seed=3)
        w = np.linalg.eigvalsh(h.matrix)
        assert_allclose(np.sort(w), np.sort(-w), atol=1e-12)
        self.assertAlmostEqual(h.norm, 1.0)

    def test_rejections(self):
        n = self.space.dim
        with self.assertRaises(ShapeMismatch):
            validate_self_dual(self.space, np.eye(n + 2))
        a = np.zeros((n, n), dtype=complex)
        a[0, 1] = 1.0
        with self.assertRaises(NotHermitian):
            validate_self_dual(self.space, a)
        with self.assertRaises(NotSelfDual):
            validate_self_dual(self.space, np.diag(np.arange(n, dtype=float)))

    def test_ground_projection_diagonalizes(self):
        h = random_self_dual(self.space, seed=11)
        res = resolve(h)
        p = res.basis_projection()
        self.assertTrue(diagonalizes(h, p))
        self.assertGreaterEqual(np.linalg.eigvalsh(one_particle_hamiltonian(h, p)).min(), 0.0)
        self.assertGreater(diagonalization_residual(h, self.space.canonical_projection()), 1e-3)


class ProjectionTests(SimpleTestCase):
    def test_not_basis_projection(self):
        space = make_space(chain_labels(2))
        with self.assertRaises(NotBasisProjection):
            validate_basis_projection(space, np.eye(space.dim))
        with self.assertRaises(NotBasisProjection):
            validate_basis_projection(space, 0.5 * np.eye(space.dim))


class BogoliubovTests(SimpleTestCase):
    def setUp(self):
        self.space = make_space(chain_labels(4))

    def test_mode_swap_parity(self):
        for modes in ([], [0], [1, 3], [0, 1, 2]):
            t = bogoliubov_parity(self.space, mode_swap(self.space, modes),
                                  projection=self.space.canonical_projection())
            self.assertEqual(t.parity, (-1) ** len(modes))
            self.assertEqual(t.kernel_dim, len(modes))

    def test_random_bogoliubov_keeps_parity_of_swaps(self):
        u = random_bogoliubov(self.space, seed=5, swapped_modes=[2])
        t = bogoliubov_parity(self.space, u, projection=self.space.canonical_projection())
        self.assertEqual(t.parity, -1)
        self.assertAlmostEqual(abs(t.det), 1.0, places=9)

    def test_not_gamma_commuting(self):
        u = np.eye(self.space.dim, dtype=complex)
        u[0, 0] = 1j
        with self.assertRaises(NotGammaCommuting):
            bogoliubov_parity(self.space, u)

    def test_kernel_dim_on_other_projection(self):
        # 모드 2, 3 을 + 쪽으로 둔 기저 사영에서도 커널 패리티 = det 부호
        other = BasisProjection(space=self.space, matrix=np.diag(
            [1.0, 0.0] * 2 + [0.0, 1.0] * 2).astype(complex))
        t = bogoliubov_parity(self.space, mode_swap(self.space, [0, 3]), projection=other)
        self.assertEqual(t.parity, 1)
        self.assertEqual(t.kernel_dim, 2)


class MatrixCodecTests(SimpleTestCase):
    def test_file_codec(self):
        m = np.array([[1 + 2j, 0], [3, -1j]])
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "m.json"
            dump_matrix(path, m)
            payload = json.loads(path.read_text())
            self.assertEqual(payload["rows"], 2)
            self.assertEqual(payload["data"][0][0], [1.0, 2.0])
            assert_allclose(load_matrix(path), m)

    def test_invalid_payloads(self):
        field = MatrixField()
        for bad in ({"rows": 1}, {"rows": 1, "cols": 2, "data": [[[0, 0]]]},
                    {"rows": 1, "cols": 1, "data": [[[0]]]}):
            with self.assertRaises(ValidationError):
                field.to_internal_value(bad)

    def test_opnorm_empty(self):
        self.assertEqual(opnorm(np.zeros((0, 0))), 0.0)
