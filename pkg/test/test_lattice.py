import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from apps.lattice.exceptions import BoxMismatch, LatticeError
from apps.lattice.geometry import box_sites, distance_matrix, neighbors
from apps.lattice.models import OPEN, PERIODIC, LatticeConfig, QuadraticModel
from apps.lattice.services import (
    build_anderson, build_anderson_hamiltonian, build_box_space, build_kitaev_chain,
    build_laplacian, embed_quadratic, restrict_finite_volume, sample_disorder,
)
from apps.spectral.services import gap_of


class GeometryTests(SimpleTestCase):
    def test_box_sites(self):
        cfg = LatticeConfig(d=2, L=1)
        sites = box_sites(cfg)
        self.assertEqual(len(sites), 9)
        self.assertEqual(sites[0], (-1, -1))

    def test_neighbors_open_and_periodic(self):
        self.assertEqual(neighbors((2,), LatticeConfig(d=1, L=2, boundary=OPEN)), [(1,)])
        self.assertEqual(sorted(neighbors((2,), LatticeConfig(d=1, L=2, boundary=PERIODIC))), [(-2,), (1,)])

    def test_torus_distance(self):
        space = build_box_space(LatticeConfig(d=1, L=3, boundary=PERIODIC))
        dist = distance_matrix(space)
        i = space.index_of(((-3,), 0, "-"))
        j = space.index_of(((3,), 0, "-"))
        self.assertAlmostEqual(dist[i, j], 1.0)
        open_space = build_box_space(LatticeConfig(d=1, L=3))
        self.assertAlmostEqual(distance_matrix(open_space, epsilon=0.5)[i, j], 6.0 ** 0.5)

    def test_config_validation(self):
        with self.assertRaises(LatticeError):
            LatticeConfig(d=0)
        with self.assertRaises(LatticeError):
            LatticeConfig(epsilon=1.5)
        with self.assertRaises(LatticeError):
            LatticeConfig(boundary="twisted")


class AndersonTests(SimpleTestCase):
    def test_laplacian_spectrum(self):
        cfg = LatticeConfig(d=2, L=2, spins=("up", "down"))
        w = np.linalg.eigvalsh(build_laplacian(cfg))
        self.assertGreaterEqual(w.min(), -1e-12)
        self.assertLessEqual(w.max(), 4 * cfg.d + 1e-12)
        self.assertEqual(len(w), cfg.n_sites * 2)

    def test_hopping_scale_range(self):
        with self.assertRaises(LatticeError):
            build_laplacian(LatticeConfig(L=1), hopping_scale=1.5)

    def test_clean_model_is_laplacian(self):
        cfg = LatticeConfig(d=1, L=3)
        real = sample_disorder(cfg, seed=4, lam=0.0)
        assert_allclose(build_anderson(cfg, real), build_laplacian(cfg))

    def test_disorder_depends_on_site_not_box(self):
        small = sample_disorder(LatticeConfig(d=2, L=1), seed=9, lam=1.0)
        big = sample_disorder(LatticeConfig(d=2, L=3), seed=9, lam=1.0)
        for x, v in small.potential.items():
            self.assertEqual(big.potential[x], v)
        self.assertTrue(all(-1.0 <= v <= 1.0 for v in big.potential.values()))
        other = sample_disorder(LatticeConfig(d=2, L=1), seed=10, lam=1.0)
        self.assertNotEqual(small.potential, other.potential)

    def test_embedding_is_self_dual_and_gapped_with_fermi_shift(self):
        cfg = LatticeConfig(d=1, L=5)
        h = build_anderson_hamiltonian(cfg, sample_disorder(cfg, 1, 0.4), fermi=-0.5)
        self.assertEqual(h.space.dim, 2 * cfg.n_sites)
        self.assertGreaterEqual(gap_of(h), 0.5 * 0.1 - 1e-12)

    def test_embed_rejects_bad_pairing(self):
        cfg = LatticeConfig(d=1, L=1)
        space = build_box_space(cfg)
        with self.assertRaises(LatticeError):
            embed_quadratic(QuadraticModel(h=np.eye(3), g=np.ones((3, 3))), space)


class KitaevTests(SimpleTestCase):
    def test_atomic_limit(self):
        h = build_kitaev_chain(4, t=0.0, mu=1.0, delta=0.0)
        assert_allclose(np.diag(h.matrix).real, [-0.5, 0.5] * 4)
        self.assertAlmostEqual(gap_of(h), 0.5)

    def test_ring_dispersion(self):
        n, t, mu, delta = 8, 1.0, 1.0, 1.0
        h = build_kitaev_chain(n, t, mu, delta, PERIODIC)
        k = 2 * np.pi * np.arange(n) / n
        e = 0.5 * np.sqrt((2 * t * np.cos(k) + mu) ** 2 + 4 * delta ** 2 * np.sin(k) ** 2)
        assert_allclose(np.sort(np.linalg.eigvalsh(h.matrix)), np.sort(np.concatenate([e, -e])), atol=1e-12)

    def test_ring_gap_closes_at_phase_boundary(self):
        self.assertLess(gap_of(build_kitaev_chain(8, 1.0, 2.0, 1.0, PERIODIC)), 1e-12)
        self.assertGreater(gap_of(build_kitaev_chain(8, 1.0, 1.0, 1.0, PERIODIC)), 0.4)

    def test_open_chain_edge_modes(self):
        # μ = 0, t = Δ: 끝 마요라나 쌍이 정확한 영에너지 모드
        self.assertLess(gap_of(build_kitaev_chain(6, 1.0, 0.0, 1.0, OPEN)), 1e-12)


class RestrictionTests(SimpleTestCase):
    def test_partition_is_exact(self):
        h = build_kitaev_chain(7, 1.0, 3.0, 1.0, OPEN, first_site=-3)
        r = restrict_finite_volume(h, 1)
        self.assertEqual(r.inner.space.dim, 6)
        assert_allclose(r.reassemble(), h.matrix, atol=1e-15)

    def test_bad_radius(self):
        h = build_kitaev_chain(5, 1.0, 3.0, 1.0, OPEN, first_site=-2)
        with self.assertRaises(BoxMismatch):
            restrict_finite_volume(h, 3)
        off_center = build_kitaev_chain(5, 1.0, 3.0, 1.0, OPEN)
        with self.assertRaises(BoxMismatch):
            restrict_finite_volume(off_center, 1)
