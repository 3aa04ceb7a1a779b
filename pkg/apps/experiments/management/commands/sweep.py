# apps/experiments/management/commands/sweep.py
from apps.flow.conf import DET_TOL

from ...serializers import DeficitRowSerializer, SweepRecordSerializer
from ...services import build_path, flow_profile, run_deficit_study, run_sweep, step_control
from ..base import ExperimentCommand


class Command(ExperimentCommand):
    help = "Gap, index and transported flow along the configured path (plus the deficit study for run.L_list)."
    output_name = "sweep"

    def run(self, config, /, **opts):
        result = run_sweep(build_path(config), profile=flow_profile(config),
                           mode=config.flow["mode"], control=step_control(config))
        records = []
        failures = []
        for rec in result.records:
            if "event" in rec:
                records.append(rec)
            else:
                records.append({"kind": "point", **SweepRecordSerializer(rec).data})

        if result.gapped:
            flow = result.flow
            if not flow.converged:
                failures.append(f"transport error {flow.transport_error:.2e} above tolerance ({flow.status})")
            drift = max(abs(d - 1.0) for d in flow.det_track)
            if drift > DET_TOL:
                failures.append(f"det V drifts from 1 by {drift:.2e}")
            if any(r["sigma_chain"] not in (1, None) for r in result.records):
                failures.append("neighbour index chain leaves +1")
            self.stdout.write(f"gapped path: min gap {min(r['gap'] for r in result.records):.4e}, "
                              f"transport error {flow.transport_error:.2e}")
        else:
            self.stderr.write(self.style.WARNING(f"gap closes near s = {result.closing.s_tilde:.8f}"))

        if config.run["L_list"]:
            for row in run_deficit_study(config):
                records.append({"kind": "deficit", **DeficitRowSerializer(row).data})
                if abs(row.det - 1.0) > DET_TOL:
                    failures.append(f"L = {row.L}: det V1 = {row.det:.6f}")
        return records, failures
