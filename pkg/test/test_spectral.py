import numpy as np
from django.test import SimpleTestCase, override_settings
from numpy.testing import assert_allclose

from apps.lattice.geometry import distance_matrix
from apps.lattice.models import OPEN, PERIODIC, LatticeConfig
from apps.lattice.services import build_anderson_hamiltonian, build_kitaev_chain, sample_disorder
from apps.selfdual.models import SelfDualHamiltonian
from apps.selfdual.services import chain_labels, make_space, opnorm, random_self_dual
from apps.spectral.decay import combes_thomas_sum, ct_constants, ct_verify, decay_fit
from apps.spectral.exceptions import GapClosed, InsufficientData, ZNearSpectrum
from apps.spectral.services import (
    evolve_operator, gap_of, propagator, reconstruction_residual, resolve, resolvent,
    resolvent_element,
)


class ResolveTests(SimpleTestCase):
    def test_spectral_projections(self):
        h = random_self_dual(make_space(chain_labels(5)), seed=2)
        res = resolve(h)
        n = h.space.dim
        assert_allclose(res.E_plus + res.E_minus + res.E_zero, np.eye(n), atol=1e-12)
        assert_allclose(res.E_minus, h.space.gamma_conjugate(res.E_plus), atol=1e-10)
        self.assertLess(reconstruction_residual(res), 1e-12)
        self.assertTrue(res.gapped)
        self.assertAlmostEqual(res.gap, gap_of(h))

    def test_zero_hamiltonian(self):
        space = make_space(chain_labels(2))
        res = resolve(SelfDualHamiltonian(space=space, matrix=np.zeros((4, 4))))
        self.assertFalse(res.gap_defined)
        self.assertEqual(res.gap, 0.0)
        with self.assertRaises(GapClosed):
            res.basis_projection()

    def test_zero_tolerance_from_settings(self):
        h = build_kitaev_chain(8, 1.0, 2.0 + 1e-6, 1.0, PERIODIC)
        self.assertTrue(resolve(h).gapped)
        with override_settings(SPECTRAL_ZERO_RTOL=1e-4):
            self.assertFalse(resolve(h).gapped)

    def test_dynamics(self):
        res = resolve(random_self_dual(make_space(chain_labels(3)), seed=8))
        u = propagator(res, 0.7)
        assert_allclose(u.conj().T @ u, np.eye(6), atol=1e-12)
        a = res.E_plus
        assert_allclose(evolve_operator(res, a, 1.3), a, atol=1e-12)


class ResolventTests(SimpleTestCase):
    def setUp(self):
        self.res = resolve(build_kitaev_chain(6, 1.0, 0.5, 1.0, OPEN))

    def test_resolvent_inverse(self):
        z = 0.3 + 0.8j
        r = resolvent(self.res, z)
        h = self.res.hamiltonian.matrix
        assert_allclose(r @ (z * np.eye(h.shape[0]) - h), np.eye(h.shape[0]), atol=1e-12)
        lab_x, lab_y = self.res.space.labels[0], self.res.space.labels[5]
        self.assertAlmostEqual(resolvent_element(self.res, z, lab_x, lab_y), r[0, 5])

    def test_z_near_spectrum(self):
        with self.assertRaises(ZNearSpectrum):
            resolvent(self.res, complex(self.res.eigenvalues[0]))


class CombesThomasTests(SimpleTestCase):
    def test_monotone_in_mu(self):
        h = build_kitaev_chain(10, 1.0, 0.5, 1.0, OPEN)
        for mu1, mu2 in ((0.1, 0.5), (0.3, 1.0), (0.0, 0.2)):
            self.assertLessEqual(combes_thomas_sum(h, mu1), (mu1 / mu2) * combes_thomas_sum(h, mu2) + 1e-15)
        params = ct_constants(h, 1.0, z=1j)
        self.assertAlmostEqual(params.s_value_at(0.25), 0.25 * params.S_value)
        with self.assertRaises(ValueError):
            params.s_value_at(2.0)

    def test_disordered_chains_have_no_violations(self):
        cfg = LatticeConfig(d=1, L=20)
        for seed in range(10):
            h = build_anderson_hamiltonian(cfg, sample_disorder(cfg, seed, 0.5), fermi=-0.6)
            report = ct_verify(h, mu=0.5, epsilon=1.0, z=1j)
            self.assertEqual(report.violations, 0)
            self.assertEqual(report.gapped_violations, 0)
            self.assertTrue(report.passed)
            self.assertGreater(report.params.Delta_value, report.params.S_value)

    def test_not_applicable_is_a_status(self):
        h = build_kitaev_chain(6, 1.0, 0.5, 1.0, OPEN)
        report = ct_verify(h, mu=5.0, epsilon=1.0, z=0.01j)
        self.assertEqual(report.status, "not_applicable")
        self.assertTrue(report.passed)


class DecayFitTests(SimpleTestCase):
    def test_exact_exponential_kernel(self):
        space = build_kitaev_chain(16, 1.0, 0.5, 1.0, OPEN).space
        fit = decay_fit(np.exp(-0.5 * distance_matrix(space)), space)
        self.assertAlmostEqual(fit.rate, 0.5, delta=1e-6)
        self.assertLessEqual(fit.residual, 1e-9)

    def test_identity_kernel(self):
        space = build_kitaev_chain(8, 1.0, 0.5, 1.0, OPEN).space
        with self.assertRaises(InsufficientData):
            decay_fit(np.eye(space.dim), space)

    def test_ground_projection_kernel_decays(self):
        res = resolve(build_kitaev_chain(16, 1.0, 0.5, 1.0, PERIODIC))
        self.assertTrue(res.gapped)
        fit = decay_fit(res.E_plus, res.space)
        self.assertGreater(fit.rate, 0.0)
        self.assertGreaterEqual(fit.n_pairs, 10)

    def test_positive_rate(self):
        res = resolve(build_kitaev_chain(16, 1.0, 0.5, 1.0, OPEN))
        fit = decay_fit(resolvent(res, 1j), res.space)
        self.assertGreater(fit.rate, 0.0)
        self.assertGreaterEqual(fit.n_pairs, 10)

    def test_flat_band_has_no_slope(self):
        # μ = 0, t = Δ: 최근접 쌍만 남아 거리가 하나뿐
        h = build_kitaev_chain(8, 1.0, 0.0, 1.0, PERIODIC)
        k = h.matrix.copy()
        with self.assertRaises(InsufficientData):
            decay_fit(k, h.space)
        self.assertGreater(opnorm(k), 0)
