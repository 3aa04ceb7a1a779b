import json
import tempfile
from io import StringIO
from pathlib import Path

import numpy as np
import scipy.linalg as sla
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

import apps.experiments
from apps.experiments.config import parse_config, parse_text
from apps.experiments.exceptions import ExperimentError, NoSignChange, ParseError, StillGapped
from apps.experiments.output import ResultWriter
from apps.experiments.services import (
    build_model, build_path, crossing_analysis, ensemble_run, find_gap_closing, index_stabilization,
    mixed_ground_state, run_ct_check, run_sweep, step_control, tolerance_settings,
)
from apps.experiments.services.ensemble import realization_seeds
from apps.experiments.services.factory import sized
from apps.flow.models import StepControl
from apps.qfstates.exceptions import SpaceMismatch
from apps.qfstates.models import Monomial
from apps.selfdual.services import opnorm

FIXTURES = Path(apps.experiments.__file__).parent / "fixtures"

RING_CROSSING = """
[model]
kind = "kitaev"
n_sites = 8
boundary = "periodic"

[path]
grid = 5
waypoints = [{ mu = 1.0 }, { mu = 3.0 }]
"""

RING_INTRA = """
[model]
kind = "kitaev"
n_sites = 6
boundary = "periodic"

[path]
rule = "ramp"
grid = 6
waypoints = [{ mu = 0.0 }, { mu = 1.0 }]

[flow]
h = 0.05
h_min = 1e-4
"""

ANDERSON = """
[model]
kind = "anderson"
d = 1
L = 4
boundary = "open"
lam = 0.4
fermi = -0.5

[ensemble]
n_realizations = 3

[run]
seed = 12345
"""


class ConfigTests(SimpleTestCase):
    def test_defaults(self):
        config = parse_text('[model]\nkind = "kitaev"\n')
        self.assertEqual(config.model["n_sites"], 8)
        self.assertEqual(config.model["boundary"], "open")
        self.assertEqual(config.n_waypoints, 2)
        self.assertEqual(config.tolerances["transport"], 1e-6)
        self.assertEqual(config.flow["mode"], "kato")
        self.assertEqual(config.run["seed"], 0)
        self.assertNotIn("lam", config.model)

    def test_anderson_boundary_defaults_to_open(self):
        implicit = parse_text(ANDERSON.replace('boundary = "open"\n', ""))
        self.assertEqual(implicit.model["boundary"], "open")
        explicit = parse_text(ANDERSON)
        self.assertEqual(build_model(implicit, 0).space.dim, build_model(explicit, 0).space.dim)
        self.assertIsNone(build_model(implicit, 0).space.periods)

    def test_waypoint_values_are_validated(self):
        text = '[model]\nkind = "kitaev"\n[path]\nwaypoints = [{ mu = "abc" }, { mu = 1.0 }]\n'
        with self.assertRaises(ParseError) as ctx:
            parse_text(text)
        self.assertEqual(ctx.exception.key, "path.waypoints.0.mu")
        self.assertEqual(ctx.exception.line, 4)

    def test_waypoint_range_is_checked(self):
        text = '[model]\nkind = "kitaev"\n[path]\nwaypoints = [{ mu = 1.0 }, { n_sites = 1 }]\n'
        with self.assertRaises(ParseError) as ctx:
            parse_text(text)
        self.assertEqual(ctx.exception.key, "path.waypoints.1.n_sites")

    def test_waypoint_cannot_change_kind(self):
        text = '[model]\nkind = "kitaev"\n[path]\nwaypoints = [{ kind = "anderson" }, {}]\n'
        with self.assertRaises(ParseError) as ctx:
            parse_text(text)
        self.assertEqual(ctx.exception.key, "path.waypoints.0.kind")

    def test_waypoint_values_are_coerced(self):
        config = parse_text('[model]\nkind = "kitaev"\n[path]\nwaypoints = [{ mu = 2 }, { mu = 3.5 }]\n')
        self.assertIsInstance(config.waypoint(0)["mu"], float)
        self.assertEqual(config.waypoint(0)["mu"], 2.0)

    def test_foreign_kind_key_is_rejected(self):
        with self.assertRaises(ParseError) as ctx:
            parse_text('[model]\nkind = "kitaev"\nlam = 0.3\n')
        self.assertEqual(ctx.exception.key, "model.lam")
        self.assertEqual(ctx.exception.line, 3)
        with self.assertRaises(ParseError) as ctx:
            parse_text('[model]\nkind = "kitaev"\n[path]\nwaypoints = [{ lam = 0.3 }, {}]\n')
        self.assertEqual(ctx.exception.key, "path.waypoints.0.lam")

    def test_unknown_key_reports_key_and_line(self):
        with self.assertRaises(ParseError) as ctx:
            parse_text('[model]\nkind = "kitaev"\nbogus = 1\n')
        self.assertEqual(ctx.exception.key, "model.bogus")
        self.assertEqual(ctx.exception.line, 3)

    def test_invalid_toml(self):
        with self.assertRaises(ParseError) as ctx:
            parse_text("[model\nkind = 1\n")
        self.assertEqual(ctx.exception.line, 1)

    def test_endpoint_dimensions_differ(self):
        text = '[model]\nkind = "kitaev"\n[path]\nwaypoints = [{ n_sites = 4 }, { n_sites = 6 }]\n'
        with self.assertRaises(ParseError) as ctx:
            parse_text(text)
        self.assertEqual(ctx.exception.key, "path.waypoints")
        self.assertIn("dimensions", str(ctx.exception))

    def test_overrides_and_echo(self):
        config = parse_text(RING_CROSSING, overrides={"run": {"seed": 7, "out": "/tmp/x"},
                                                      "tolerances": {"transport": None}})
        self.assertEqual(config.run["seed"], 7)
        self.assertEqual(config.run["out"], "/tmp/x")
        self.assertEqual(config.tolerances["transport"], 1e-6)
        self.assertNotIn("out", config.echo()["run"])
        self.assertIn("out", config.run)

    def test_missing_file(self):
        with self.assertRaises(ParseError):
            parse_config(FIXTURES / "missing.toml")

    def test_fixtures_parse(self):
        for path in sorted(FIXTURES.glob("*.toml")):
            config = parse_config(path)
            self.assertEqual(config.source, str(path))


class FactoryTests(SimpleTestCase):
    def test_sized_mapping(self):
        ring = parse_text(RING_CROSSING)
        self.assertEqual(build_model(ring, 0, L=3).space.dim, 12)
        self.assertEqual(build_model(ring, -1).space.dim, 16)
        chain = parse_text('[model]\nkind = "kitaev"\nboundary = "open"\n')
        h = build_model(chain, 0, L=2)
        self.assertEqual(h.space.dim, 10)
        self.assertEqual(h.space.labels[0][0], (-2,))
        params = {"file": "h.npy"}
        self.assertIs(sized(params, "matrix", None), params)
        with self.assertRaises(ExperimentError):
            sized(params, "matrix", 3)

    def test_tolerances_and_step_control(self):
        config = parse_text(RING_INTRA + "\n[tolerances]\ntransport = 1e-7\n")
        self.assertEqual(tolerance_settings(config)["FLOW_TRANSPORT_TOL"], 1e-7)
        control = step_control(config)
        self.assertEqual((control.h, control.h_min, control.transport_tol), (0.05, 1e-4, 1e-7))


class GapClosingTests(SimpleTestCase):
    def test_ring_closes_at_half(self):
        closing = find_gap_closing(build_path(parse_text(RING_CROSSING)))
        self.assertAlmostEqual(closing.s_tilde, 0.5, places=6)
        self.assertLessEqual(closing.gap, 1e-6)
        self.assertEqual(closing.n_crossings, 1)

    def test_same_phase(self):
        with self.assertRaises(NoSignChange):
            find_gap_closing(build_path(parse_text(RING_INTRA)))

    def test_two_crossings_reports_first(self):
        there_and_back = RING_CROSSING.replace(
            "waypoints = [{ mu = 1.0 }, { mu = 3.0 }]", "waypoints = [{ mu = 1.0 }, { mu = 3.0 }, { mu = 1.0 }]")
        path = build_path(parse_text(there_and_back))
        with self.assertLogs("apps.experiments", level="WARNING") as logs:
            closing = find_gap_closing(path)
        self.assertAlmostEqual(closing.s_tilde, 0.25, places=6)
        self.assertEqual(closing.n_crossings, 2)
        self.assertLessEqual(closing.gap, 1e-6)
        self.assertTrue(any("2 times" in line for line in logs.output))


class CrossingTests(SimpleTestCase):
    def setUp(self):
        self.path = build_path(parse_text(RING_CROSSING))
        self.report = crossing_analysis(self.path, 0.5)

    def test_splitting(self):
        r = self.report
        self.assertEqual(r.sigma_across, -1)
        self.assertLessEqual(r.splitting_residual, 1e-8)
        self.assertLessEqual(opnorm(r.K1 + r.P_zero - np.eye(r.space.dim)), 1e-8)
        self.assertEqual(r.rank_zero % 2, 0)
        self.assertGreater(r.jump["lower_bound"], 0.0)
        self.assertEqual(r.summary()["sigma_across"], -1)

    def test_still_gapped(self):
        with self.assertRaises(StillGapped):
            crossing_analysis(build_path(parse_text(RING_INTRA)), 0.5)

    def test_mixed_family(self):
        _, vecs = sla.eigh(self.report.W_right)
        k = vecs[:, -1]
        a0 = Monomial.of(k, (k, True))
        for lam in (0.0, 0.3, 1.0):
            value = mixed_ground_state(self.report, lam).evaluate(Monomial(), a0)
            self.assertAlmostEqual(value, lam, places=8)
        with self.assertRaises(ValueError):
            mixed_ground_state(self.report, 1.5)

    def test_mixed_family_checks_support(self):
        _, vecs = sla.eigh(self.report.K1)
        outside = vecs[:, -1]
        with self.assertRaises(SpaceMismatch):
            mixed_ground_state(self.report, 0.5).evaluate(Monomial(), Monomial.of(outside, (outside, True)))


class SweepTests(SimpleTestCase):
    def test_gapped_sweep(self):
        config = parse_text(RING_INTRA)
        result = run_sweep(build_path(config), control=step_control(config))
        self.assertTrue(result.gapped)
        self.assertEqual(len(result.records), 6)
        for rec in result.records:
            self.assertEqual(rec["sigma"], 1)
            self.assertEqual(rec["sigma_chain"], 1)
            self.assertLessEqual(abs(complex(*rec["det"]) - 1.0), 1e-6)
        self.assertTrue(result.flow.converged)

    def test_sweep_stops_at_closing(self):
        result = run_sweep(build_path(parse_text(RING_CROSSING)), control=StepControl(h=0.05))
        self.assertFalse(result.gapped)
        self.assertIsNone(result.flow)
        self.assertEqual(result.records[-1]["event"], "gap_closing")
        self.assertAlmostEqual(result.records[-1]["s_tilde"], 0.5, places=6)
        self.assertTrue(all(r["s"] < 0.5 for r in result.records[:-1]))


class EnsembleTests(SimpleTestCase):
    def test_seeds_are_reproducible(self):
        self.assertEqual(realization_seeds(12345, 4), realization_seeds(12345, 4))
        self.assertEqual(len(set(realization_seeds(12345, 4))), 4)
        self.assertEqual(realization_seeds(12345, 4)[:2], realization_seeds(12345, 2))

    def test_run_and_aggregate(self):
        config = parse_text(ANDERSON)
        first = ensemble_run(config, workers=1)
        second = ensemble_run(config, workers=3)
        self.assertEqual(first.members, second.members)
        agg = first.aggregate
        self.assertEqual(agg["n"], 3)
        self.assertEqual(agg["sigma_counts"]["closed"], 0)
        self.assertGreaterEqual(agg["min_gap"], 0.05 - 1e-12)

    def test_needs_anderson(self):
        with self.assertRaises(ExperimentError):
            ensemble_run(parse_text(RING_CROSSING))

    def test_ct_check(self):
        reports = run_ct_check(parse_text(ANDERSON), n_realizations=2)
        self.assertEqual(len(reports), 2)
        self.assertTrue(all(r.passed for r in reports))
        self.assertEqual(len(run_ct_check(parse_text(RING_INTRA))), 1)


class StabilizationTests(SimpleTestCase):
    def test_ring_index_settles(self):
        result = index_stabilization(parse_text(RING_CROSSING), [4, 2, 3])
        self.assertEqual([r.L for r in result.rows], [2, 3, 4])
        self.assertTrue(all(r.sigma == -1 for r in result.rows))
        self.assertEqual(result.L0, 2)
        self.assertEqual(result.sigma, -1)

    def test_empty_list(self):
        with self.assertRaises(ExperimentError):
            index_stabilization(parse_text(RING_CROSSING))


class OutputTests(SimpleTestCase):
    def test_rerun_is_byte_identical(self):
        records = [{"s": 0.0, "det": complex(1.0, 0.0), "sigma": np.int64(1)}, {"s": 0.5, "gap": np.float64(0.25)}]
        header = parse_text(RING_CROSSING).echo()
        with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
            pa = ResultWriter(a, "sweep").write(records, header=header)
            pb = ResultWriter(b, "sweep").write(records, header=header)
            for x, y in zip(pa, pb):
                self.assertEqual(x.read_bytes(), y.read_bytes())
            lines = pa[0].read_text(encoding="utf-8").splitlines()
            self.assertEqual(json.loads(lines[0])["config"]["model"]["kind"], "kitaev")
            self.assertEqual(json.loads(lines[1])["det"], [1.0, 0.0])
            self.assertEqual(pa[1].read_text(encoding="utf-8").splitlines()[0], "det,gap,s,sigma")


class CommandTests(SimpleTestCase):
    def _call(self, name, *args):
        out, err = StringIO(), StringIO()
        call_command(name, *args, stdout=out, stderr=err)
        return out.getvalue()

    def test_selftest(self):
        output = self._call("selftest")
        self.assertIn("[OK]", output)
        self.assertNotIn("[FAIL]", output)

    def test_index_on_fixture(self):
        with tempfile.TemporaryDirectory() as tmp:
            output = self._call("index", "--config", str(FIXTURES / "kitaev_inter.toml"), "--out", tmp)
            self.assertIn("sigma = -1", output)
            lines = (Path(tmp) / "index.jsonl").read_text(encoding="utf-8").splitlines()
            record = json.loads(lines[1])
            self.assertEqual(record["kind"], "endpoints")
            self.assertTrue(record["methods_agree"])

    def test_gapfind_rerun_identical(self):
        with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
            for tmp in (a, b):
                self._call("gapfind", "--config", str(FIXTURES / "kitaev_inter.toml"), "--out", tmp)
            self.assertEqual((Path(a) / "gapfind.jsonl").read_bytes(), (Path(b) / "gapfind.jsonl").read_bytes())

    def test_same_phase_gapfind_is_an_error(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(CommandError) as ctx:
                self._call("gapfind", "--config", str(FIXTURES / "kitaev_intra.toml"), "--out", tmp)
        self.assertEqual(ctx.exception.returncode, 1)

    def test_bad_config_is_an_error(self):
        with tempfile.TemporaryDirectory() as tmp:
            bad = Path(tmp) / "bad.toml"
            bad.write_text('[model]\nkind = "spin_glass"\n', encoding="utf-8")
            with self.assertRaises(CommandError) as ctx:
                self._call("index", "--config", str(bad), "--out", tmp)
        self.assertEqual(ctx.exception.returncode, 1)

    def test_export_reloads_as_matrix_model(self):
        with tempfile.TemporaryDirectory() as tmp:
            self._call("export", "--config", str(FIXTURES / "kitaev_inter.toml"), "--out", tmp, "--waypoint", "0")
            lines = (Path(tmp) / "export.jsonl").read_text(encoding="utf-8").splitlines()
            record = json.loads(lines[1])
            self.assertEqual(record["waypoint"], 0)
            self.assertEqual(record["matrix"]["rows"], record["dim"])
            self.assertEqual(len(record["labels"]), record["dim"])
            self.assertTrue((Path(tmp) / "hamiltonian_0.json").exists())

            original = build_model(parse_config(FIXTURES / "kitaev_inter.toml"), 0)
            reload = Path(tmp) / "reload.toml"
            reload.write_text('[model]\nkind = "matrix"\nfile = "hamiltonian_0.json"\n', encoding="utf-8")
            rebuilt = build_model(parse_config(reload), 0)
            self.assertLessEqual(opnorm(rebuilt.matrix - original.matrix), 1e-12)
