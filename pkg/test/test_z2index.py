import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from apps.lattice.models import PERIODIC
from apps.lattice.services import build_kitaev_chain
from apps.selfdual.models import BasisProjection
from apps.selfdual.services import chain_labels, make_space, mode_swap, random_bogoliubov, random_self_dual
from apps.spectral.services import resolve
from apps.z2index.exceptions import IllConditioned, MethodDisagreement, NotBasisProjection
from apps.z2index.services import (
    chained_parity, intersection_dim, intersection_spectrum, kernel_dim, pfaffian_parity,
    relative_parity, wedge, z2_index,
)


def _random_pair(seed: int, n_modes: int):
    space = make_space(chain_labels(n_modes))
    p1 = resolve(random_self_dual(space, seed)).basis_projection()
    p2 = resolve(random_self_dual(space, seed + 10_000)).basis_projection()
    return p1, p2


def _moved(p: BasisProjection, u: np.ndarray) -> BasisProjection:
    return BasisProjection(space=p.space, matrix=u.conj().T @ p.matrix @ u)


class IndexMethodTests(SimpleTestCase):
    def test_identical_projections(self):
        p, _ = _random_pair(1, 4)
        report = z2_index(p, p)
        self.assertEqual(report.sigma, 1)
        self.assertEqual(report.dim_intersection, 0)
        self.assertEqual(report.kernel_dim, 0)
        self.assertTrue(report.methods_agree)

    def test_mode_swaps(self):
        space = make_space(chain_labels(5))
        p = space.canonical_projection()
        for modes in ([0], [1, 4], [0, 2, 3]):
            u = mode_swap(space, modes)
            report = z2_index(p, _moved(p, u), u=u)
            self.assertEqual(report.dim_intersection, len(modes))
            self.assertEqual(report.kernel_dim, 2 * len(modes))
            self.assertEqual(report.sigma, (-1) ** len(modes))
            self.assertEqual(set(report.methods), {"intersection", "kernel", "pfaffian", "determinant"})
            self.assertAlmostEqual(report.det.real, (-1) ** len(modes))

    def test_random_pairs_agree(self):
        # 2N = 4 … 40
        for k in range(60):
            p1, p2 = _random_pair(100 + k, 2 + k % 19)
            report = z2_index(p1, p2, tol_one=1e-9)
            self.assertTrue(report.methods_agree)
            self.assertEqual(report.kernel_dim % 2, 0)
            self.assertEqual(report.kernel_dim, 2 * report.dim_intersection)

    def test_bogoliubov_pairs_with_determinant(self):
        space = make_space(chain_labels(4))
        p = space.canonical_projection()
        for seed, swaps in ((1, []), (2, [3]), (3, [0, 1])):
            u = random_bogoliubov(space, seed, swapped_modes=swaps)
            report = z2_index(p, _moved(p, u), u=u, tol_one=1e-9)
            self.assertEqual(report.methods["determinant"], (-1) ** len(swaps))
            self.assertTrue(report.methods_agree)

    def test_non_basis_projection(self):
        space = make_space(chain_labels(2))
        p = space.canonical_projection()
        bad = BasisProjection(space=space, matrix=np.eye(space.dim))
        with self.assertRaises(NotBasisProjection):
            z2_index(p, bad)

    def test_disagreement_strict_and_lenient(self):
        # tol_one > 1 이면 모든 고유값이 교집합으로 세어져 커널 방법과 어긋난다
        space = make_space(chain_labels(3))
        p = space.canonical_projection()
        u = random_bogoliubov(space, 4, scale=0.3, swapped_modes=[1])
        q = _moved(p, u)
        lenient = z2_index(p, q, tol_one=1.5, strict=False)
        self.assertFalse(lenient.methods_agree)
        with self.assertRaises(MethodDisagreement):
            z2_index(p, q, tol_one=1.5)


class ParityTests(SimpleTestCase):
    def test_canonical_parity_is_plus(self):
        space = make_space(chain_labels(6))
        self.assertEqual(pfaffian_parity(space, space.canonical_projection()), 1)

    def test_multiplicativity(self):
        space = make_space(chain_labels(4))
        ps = [resolve(random_self_dual(space, s)).E_plus for s in range(5)]
        for a in range(5):
            for b in range(5):
                for c in range(5):
                    self.assertEqual(
                        relative_parity(space, ps[a], ps[c]),
                        relative_parity(space, ps[a], ps[b]) * relative_parity(space, ps[b], ps[c]),
                    )
        self.assertEqual(chained_parity(space, ps), relative_parity(space, ps[0], ps[-1]))

    def test_kitaev_phases(self):
        trivial = resolve(build_kitaev_chain(8, 1.0, 3.0, 1.0, PERIODIC))
        topological = resolve(build_kitaev_chain(8, 1.0, 1.0, 1.0, PERIODIC))
        other_trivial = resolve(build_kitaev_chain(8, 1.0, 5.0, 1.0, PERIODIC))
        space = trivial.space
        self.assertEqual(relative_parity(space, trivial.E_plus, topological.E_plus), -1)
        self.assertEqual(relative_parity(space, trivial.E_plus, other_trivial.E_plus), 1)


class IntersectionTests(SimpleTestCase):
    def test_spectrum_in_unit_interval(self):
        p1, p2 = _random_pair(7, 5)
        w = intersection_spectrum(p1, p2.complement)
        self.assertGreaterEqual(w.min(), -1e-12)
        self.assertLessEqual(w.max(), 1 + 1e-12)

    def test_ambiguous_eigenvalue(self):
        space = make_space(chain_labels(2))
        p = space.canonical_projection().matrix
        # 거의 ran P 안에 있는 벡터 하나 → 고유값 1 − 1e-8
        theta = np.arccos(np.sqrt(1 - 1e-8))
        q = np.zeros((4, 4), dtype=complex)
        v = np.zeros(4, dtype=complex)
        v[0], v[1] = np.cos(theta), np.sin(theta)
        q += np.outer(v, v.conj())
        with self.assertRaises(IllConditioned):
            intersection_dim(p, q, tol_one=1e-10)

    def test_wedge_and_kernel(self):
        space = make_space(chain_labels(4))
        p = space.canonical_projection()
        u = mode_swap(space, [0, 2])
        q = _moved(p, u)
        w = wedge(p.matrix, q.complement)
        self.assertAlmostEqual(np.trace(w).real, 2.0)
        assert_allclose(w @ w, w, atol=1e-12)
        assert_allclose(p.matrix @ w, w, atol=1e-12)
        self.assertEqual(kernel_dim(p, q), 4)

    def test_invariant_under_common_bogoliubov(self):
        p1, p2 = _random_pair(17, 4)
        u = random_bogoliubov(p1.space, seed=8, swapped_modes=[1])
        before = z2_index(p1, p2, tol_one=1e-9).sigma
        after = z2_index(_moved(p1, u), _moved(p2, u), tol_one=1e-9).sigma
        self.assertEqual(before, after)
