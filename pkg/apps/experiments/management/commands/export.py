# apps/experiments/management/commands/export.py
from pathlib import Path

from apps.selfdual.serializers import HamiltonianOutSerializer, dump_matrix

from ... import conf
from ...services import build_model
from ..base import ExperimentCommand


class Command(ExperimentCommand):
    help = "Write the waypoint Hamiltonians in the JSON matrix format (reloadable with kind = \"matrix\")."
    output_name = "export"

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument("--waypoint", type=int, help="only this waypoint (negative counts from the end)")
        parser.add_argument("--L", type=int, dest="size", help="resize the model to box radius L")

    def run(self, config, /, **opts):
        out_dir = Path(config.run.get("out") or conf.out_dir())
        out_dir.mkdir(parents=True, exist_ok=True)
        n = config.n_waypoints
        ks = [opts["waypoint"] % n] if opts.get("waypoint") is not None else range(n)

        records = []
        for k in ks:
            h = build_model(config, k, L=opts.get("size"))
            name = f"hamiltonian_{k}.json"
            dump_matrix(out_dir / name, h.matrix)
            records.append({"waypoint": k, "dim": h.space.dim, "file": name,
                            **HamiltonianOutSerializer(h).data})
            self.stdout.write(f"waypoint {k}: dim = {h.space.dim} -> {out_dir / name}")
        return records, []
