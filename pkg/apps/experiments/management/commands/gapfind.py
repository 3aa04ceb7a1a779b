# apps/experiments/management/commands/gapfind.py
from ... import conf
from ...serializers import GapClosingSerializer
from ...services import build_path, find_gap_closing
from ..base import ExperimentCommand


class Command(ExperimentCommand):
    help = "Locate the gap closing s~ between endpoints in different phases."
    output_name = "gapfind"

    def run(self, config, /, **opts):
        closing = find_gap_closing(build_path(config))
        records = [{"kind": "scan", "s": s, "gap": gap, "parity": parity} for s, gap, parity in closing.scan]
        records.append({"kind": "closing", **GapClosingSerializer(closing).data})
        self.stdout.write(f"s~ = {closing.s_tilde:.10f}  gap = {closing.gap:.3e}  crossings = {closing.n_crossings}")
        failures = []
        if closing.gap > conf.GAP_CLOSED_TOL:
            failures.append(f"gap at s~ is {closing.gap:.2e} > {conf.GAP_CLOSED_TOL:.0e}")
        return records, failures
