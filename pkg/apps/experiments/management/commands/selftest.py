# apps/experiments/management/commands/selftest.py
"""
빠른 자체 점검. 항목마다 [OK]/[FAIL], 첫 실패에서 종료 코드 2.
"""
import math

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from apps.flow.conf import FILTER, KATO
from apps.flow.models import FilterProfile
from apps.flow.paths import linear_path
from apps.flow.services import flow_generator, generator_residuals, min_cross_band_difference
from apps.lattice.models import OPEN
from apps.lattice.services import build_kitaev_chain
from apps.qfstates.fock import build_fock_oracle, fock_expectation, gibbs_density
from apps.qfstates.models import monomials_from_indices
from apps.qfstates.pfaffian import pfaffian, pfaffian_by_permutations
from apps.qfstates.services import evaluate, gibbs_symbol, ground_symbol, tracial_symbol
from apps.selfdual.exceptions import SelfDualError
from apps.selfdual.services import chain_labels, make_space, opnorm, random_self_dual
from apps.spectral.decay import ct_verify
from apps.spectral.services import resolve
from apps.z2index.services import z2_index


class CheckFailed(Exception):
    pass


def expect(cond: bool, msg: str):
    if not cond:
        raise CheckFailed(msg)


# ================== 점검 항목 ==================

def check_pfaffian(seed: int) -> str:
    rng = np.random.default_rng(seed)
    worst_oracle = worst_det = 0.0
    for n in (2, 4, 6, 8):
        for _ in range(5):
            a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            a = a - a.T
            pf = pfaffian(a)
            scale = max(1.0, abs(pf))
            worst_oracle = max(worst_oracle, abs(pf - pfaffian_by_permutations(a)) / scale)
            det = np.linalg.det(a)
            worst_det = max(worst_det, abs(pf ** 2 - det) / max(1.0, abs(det)))
    expect(worst_oracle <= 1e-12, f"Pfaffian differs from the permutation sum by {worst_oracle:.2e}")
    expect(worst_det <= 1e-9, f"Pf^2 differs from det by {worst_det:.2e}")
    return f"oracle {worst_oracle:.1e}, Pf^2 vs det {worst_det:.1e}"


def check_index_methods(seed: int) -> str:
    minus = 0
    for k in range(20):
        space = make_space(chain_labels(2 + k % 5))
        p1 = resolve(random_self_dual(space, seed + 2 * k)).basis_projection()
        p2 = resolve(random_self_dual(space, seed + 2 * k + 1)).basis_projection()
        report = z2_index(p1, p2, tol_one=1e-9)
        expect(report.kernel_dim % 2 == 0, f"odd kernel dimension {report.kernel_dim}")
        minus += report.sigma == -1
    return f"20 pairs agree, {minus} with sigma = -1"


def check_fock(seed: int) -> str:
    space = make_space(chain_labels(2))
    # 2점, 4점 단항식 (기저 벡터, star 여부)
    words = [[(0, False), (1, True)], [(0, False), (2, False)],
             [(0, False), (1, True), (2, False), (3, True)], [(3, True), (1, False), (2, True), (0, False)]]
    worst = 0.0
    for k in range(3):
        h = random_self_dual(space, seed + k)
        res = resolve(h)
        canonical = build_fock_oracle(space)
        ground = build_fock_oracle(space, res.basis_projection())
        rho = gibbs_density(canonical, h, 1.3)
        flat = np.eye(canonical.fock_dim) / canonical.fock_dim
        for w in words:
            m = monomials_from_indices(space, w)
            pairs = [
                (evaluate(tracial_symbol(space), m), fock_expectation(canonical, m, flat)),
                (evaluate(gibbs_symbol(h, 1.3, res), m), fock_expectation(canonical, m, rho)),
                (evaluate(ground_symbol(res), m), fock_expectation(ground, m)),
            ]
            worst = max(worst, max(abs(a - b) for a, b in pairs))
    expect(worst <= 1e-9, f"Fock expectation differs by {worst:.2e}")
    return f"max difference {worst:.1e}"


def check_beta_limits(seed: int) -> str:
    space = make_space(chain_labels(3))
    h = random_self_dual(space, seed)
    res = resolve(h)
    expect(np.array_equal(gibbs_symbol(h, 0.0).S, tracial_symbol(space).S), "beta = 0 is not tracial")
    diff = opnorm(gibbs_symbol(h, 50.0, res).S - res.E_plus)
    bound = math.exp(-50.0 * res.gap) * (1.0 + 1e-6)
    expect(diff <= bound, f"beta = 50: ‖S − E₊‖ = {diff:.2e} > {bound:.2e}")
    return f"‖S_50 − E₊‖ = {diff:.1e}"


def check_combes_thomas(seed: int) -> str:
    h = build_kitaev_chain(12, 1.0, 0.5, 1.0, OPEN)
    report = ct_verify(h, mu=0.5, epsilon=1.0, z=1j)
    expect(report.passed, f"{report.violations} general / {report.gapped_violations} gapped violations")
    return f"worst ratio {report.worst_ratio:.3f} ({report.status})"


def check_kato_filter(seed: int) -> str:
    worst = 0.0
    for k in range(5):
        space = make_space(chain_labels(3))
        path = linear_path(random_self_dual(space, seed + 2 * k), random_self_dual(space, seed + 2 * k + 1))
        res = resolve(path.at(0.5))
        dh = path.derivative_at(0.5)
        profile = FilterProfile(nu0=0.95 * min_cross_band_difference(res))
        kato = flow_generator(res, dh, mode=KATO)
        filt = flow_generator(res, dh, profile, mode=FILTER)
        worst = max(worst, opnorm(res.E_plus @ (kato - filt) @ res.E_minus))
        r = generator_residuals(res, dh, kato)
        expect(r["gamma"] <= 1e-8 and r["trace"] <= 1e-9, f"generator residuals {r}")
    expect(worst <= 1e-12, f"cross-band blocks differ by {worst:.2e}")
    return f"cross-band difference {worst:.1e}"


CHECKS = [
    ("pfaffian oracle", check_pfaffian),
    ("index methods", check_index_methods),
    ("fock equivalence", check_fock),
    ("beta limits", check_beta_limits),
    ("combes-thomas chain", check_combes_thomas),
    ("kato vs filter", check_kato_filter),
]


class Command(BaseCommand):
    help = "Fast numerical self-check (Pfaffian, index, Fock oracle, beta limits, Combes-Thomas, flow generators)."

    def add_arguments(self, parser):
        parser.add_argument("--seed", type=int, default=0, help="base seed for the random instances")

    def handle(self, *args, **opts):
        seed = opts["seed"]
        for name, check in CHECKS:
            try:
                detail = check(seed)
            except (CheckFailed, SelfDualError) as e:
                self.stdout.write(self.style.ERROR(f"[FAIL] {name}: {e}"))
                raise CommandError(f"selftest failed at {name!r}", returncode=2)
            self.stdout.write(self.style.SUCCESS(f"[OK] {name}: {detail}"))
        self.stdout.write(self.style.SUCCESS(f"selftest passed ({len(CHECKS)} checks)"))
