# apps/experiments/management/commands/crossing.py
import numpy as np
import scipy.linalg as sla

from apps.qfstates.models import Monomial

from ... import conf
from ...serializers import GapClosingSerializer
from ...services import build_path, crossing_analysis, find_gap_closing, mixed_ground_state
from ..base import ExperimentCommand


class Command(ExperimentCommand):
    help = "Gap closing, one-sided ground projections, splitting P+ + P- + P0 and the mixed ground-state family."
    output_name = "crossing"

    def run(self, config, /, **opts):
        path = build_path(config)
        closing = find_gap_closing(path)
        report = crossing_analysis(path, closing.s_tilde, delta=float(config.crossing["delta"]),
                                   n_max=int(config.crossing["n_max"]))
        records = [
            {"kind": "closing", **GapClosingSerializer(closing).data},
            {"kind": "crossing", **report.summary()},
        ]
        failures = []
        if closing.gap > conf.GAP_CLOSED_TOL:
            failures.append(f"gap at s~ is {closing.gap:.2e}")
        if report.sigma_across != -1:
            failures.append(f"sigma across s~ is {report.sigma_across:+d}")
        if not report.jump or report.jump["lower_bound"] <= 0.0:
            failures.append("no observable separates the one-sided ground states")

        # k ∈ ran W_right 이면 ω₊(B(k)B(k)*) = 1, ω₋ = 0 → ω̃_λ = λ
        _, vecs = sla.eigh(report.W_right)
        k = vecs[:, -1]
        a0 = Monomial.of(k, (k, True))
        for lam in sorted({0.0, float(config.crossing["lam"]), 1.0}):
            value = mixed_ground_state(report, lam).evaluate(Monomial(), a0)
            records.append({"kind": "mixed", "lam": lam, "value": value})
            if abs(value - lam) > conf.SPLITTING_TOL:
                failures.append(f"mixed state at lambda = {lam}: {value.real:.6f}")

        jump = report.jump or {}
        self.stdout.write(
            f"s~ = {report.s_tilde:.10f}  sigma = {report.sigma_across:+d}  rank P0 = {report.rank_zero}  "
            f"splitting = {report.splitting_residual:.1e}  jump >= {jump.get('lower_bound', 0.0):.3e}"
        )
        return records, failures
