# apps/experiments/management/commands/index.py
from apps.spectral.services import resolve
from apps.z2index.services import z2_index

from ...serializers import IndexReportSerializer, StabilizationRowSerializer
from ...services import build_model, index_stabilization
from ..base import ExperimentCommand


class Command(ExperimentCommand):
    help = "Z2 index of the ground projections at the first and last waypoints (per L when run.L_list is set)."
    output_name = "index"

    def run(self, config, /, **opts):
        if config.run["L_list"]:
            return self._stabilization(config)

        left, right = resolve(build_model(config, 0)), resolve(build_model(config, -1))
        report = z2_index(left.basis_projection(), right.basis_projection(), strict=False)
        record = {"kind": "endpoints", "gap_left": left.gap, "gap_right": right.gap,
                  **IndexReportSerializer(report).data}
        self.stdout.write(
            f"sigma = {report.sigma:+d}  dim_intersection = {report.dim_intersection}  "
            f"kernel_dim = {report.kernel_dim}  conditioning = {report.conditioning:.3e}  "
            f"methods = {dict(sorted(report.methods.items()))}"
        )
        failures = [] if report.methods_agree else [f"index methods disagree: {report.methods}"]
        return [record], failures

    def _stabilization(self, config):
        result = index_stabilization(config)
        records = [{"kind": "size", **StabilizationRowSerializer(row).data} for row in result.rows]
        records.append({"kind": "stabilization", "L0": result.L0, "sigma": result.sigma})
        for row in result.rows:
            self.stdout.write(f"L = {row.L:3d}  dim = {row.dim:4d}  sigma = {row.sigma:+d}")
        if result.L0 is None:
            return records, ["sigma does not settle on the given sizes"]
        self.stdout.write(f"sigma = {result.sigma:+d} for every L >= {result.L0}")
        return records, []
