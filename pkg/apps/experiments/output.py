# apps/experiments/output.py
"""
JSON-lines + CSV 결과 파일.

첫 줄은 {"config": ...} 에코. sort_keys 고정, 시각 정보 없음 (재실행 시 바이트 동일).
"""
from __future__ import annotations
import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from .serializers import plain

log = logging.getLogger(__name__)


def dumps(record: Dict[str, Any]) -> str:
    return json.dumps(plain(record), sort_keys=True, ensure_ascii=False)


def _flat(record: Dict[str, Any]) -> Dict[str, Any]:
    out = {}
    for k, v in plain(record).items():
        out[k] = json.dumps(v, sort_keys=True) if isinstance(v, (list, dict)) else v
    return out


class ResultWriter:
    def __init__(self, out_dir: str | Path, name: str):
        self.out_dir = Path(out_dir)
        self.name = name

    @property
    def jsonl_path(self) -> Path:
        return self.out_dir / f"{self.name}.jsonl"

    @property
    def csv_path(self) -> Path:
        return self.out_dir / f"{self.name}.csv"

    def write(self, records: Iterable[Dict[str, Any]], header: Optional[Dict[str, Any]] = None) -> List[Path]:
        records = list(records)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        with open(self.jsonl_path, "w", encoding="utf-8", newline="\n") as fh:
            if header is not None:
                fh.write(dumps({"config": header}) + "\n")
            for rec in records:
                fh.write(dumps(rec) + "\n")

        rows = [_flat(r) for r in records]
        columns = sorted({k for r in rows for k in r})
        with open(self.csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
        log.info("wrote %d records to %s", len(records), self.jsonl_path)
        return [self.jsonl_path, self.csv_path]
