# apps/experiments/management/base.py
"""
실험 커맨드 공통 뼈대.

  --config 로 TOML 을 읽고 (--seed / --out / --tol 은 덮어쓰기)
  허용오차를 settings 로 덮어쓴 채 run() 을 실행한 뒤 결과를 JSONL + CSV 로 쓴다.

종료 코드: 0 성공, 1 입력/라이브러리 오류, 2 검사 실패.
"""
from __future__ import annotations
import logging
from typing import Any, Dict, List, Tuple

from django.core.management.base import BaseCommand, CommandError
from django.test.utils import override_settings

from apps.selfdual.exceptions import SelfDualError

from .. import conf
from ..config import parse_config
from ..models import ExperimentConfig
from ..output import ResultWriter
from ..services import tolerance_settings

log = logging.getLogger(__name__)

Records = List[Dict[str, Any]]


class ExperimentCommand(BaseCommand):
    output_name = "experiment"

    def add_arguments(self, parser):
        parser.add_argument("--config", required=True, help="TOML experiment file")
        parser.add_argument("--seed", type=int, help="overrides run.seed")
        parser.add_argument("--out", help="output directory (overrides run.out)")
        parser.add_argument("--tol", type=float, help="overrides tolerances.transport")

    def run(self, config: ExperimentConfig, /, **opts) -> Tuple[Records, List[str]]:
        """(레코드, 실패한 검사 설명) 을 돌려준다."""
        raise NotImplementedError

    def handle(self, *args, **opts):
        try:
            config = parse_config(
                opts["config"],
                run={"seed": opts.get("seed"), "out": opts.get("out")},
                tolerances={"transport": opts.get("tol")},
            )
        except SelfDualError as e:
            raise CommandError(str(e), returncode=1)

        try:
            with override_settings(**tolerance_settings(config)):
                records, failures = self.run(config, **opts)
        except SelfDualError as e:
            raise CommandError(f"{type(e).__name__}: {e}", returncode=1)

        writer = ResultWriter(config.run.get("out") or conf.out_dir(), self.output_name)
        writer.write(records, header=config.echo())

        for failure in failures:
            self.stderr.write(self.style.ERROR(f"[FAIL] {failure}"))
        if failures:
            raise CommandError(f"{len(failures)} check(s) failed; see {writer.jsonl_path}", returncode=2)
        self.stdout.write(self.style.SUCCESS(
            f"{self.output_name}: {len(records)} records written to {writer.jsonl_path}"
        ))
