# apps/experiments/management/commands/ct_check.py
from ...serializers import CTReportSerializer
from ...services import run_ct_check
from ..base import ExperimentCommand


class Command(ExperimentCommand):
    help = "Verify the Combes-Thomas resolvent bounds (general and gapped case) on the configured instances."
    output_name = "ct_check"

    def run(self, config, /, **opts):
        reports = run_ct_check(config)
        records = [CTReportSerializer(r).data for r in reports]
        failures = [
            f"instance {i}: {r.violations} general / {r.gapped_violations} gapped violations"
            for i, r in enumerate(reports) if not r.passed
        ]
        skipped = sum(r.status == "not_applicable" for r in reports)
        self.stdout.write(f"{len(reports)} instances, {len(failures)} violated, {skipped} not applicable")
        return records, failures
