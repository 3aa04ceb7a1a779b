"""
TOML 실험 설정 -> ExperimentConfig.

구문 오류와 스키마 오류는 모두 ParseError(key, line) 로 바꾼다.
"""
from __future__ import annotations
import logging
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from rest_framework import serializers

from .exceptions import ParseError
from .models import ExperimentConfig
from .serializers import ExperimentConfigSerializer, plain

log = logging.getLogger(__name__)

_LINE_RE = re.compile(r"line (\d+)")


def _first_error(detail: Any, prefix: str = "") -> Tuple[str, str]:
    """DRF 오류 트리에서 첫 (점 경로, 메시지)."""
    if isinstance(detail, dict):
        for key, sub in detail.items():
            if key == "non_field_errors":
                return _first_error(sub, prefix)
            return _first_error(sub, f"{prefix}.{key}" if prefix else str(key))
    if isinstance(detail, list) and detail:
        first = detail[0]
        if isinstance(first, (dict, list)):
            return _first_error(first, prefix)
        return prefix, str(first)
    return prefix, str(detail)


def _line_of(text: str, key: str) -> Optional[int]:
    """
    점 경로의 마지막 키가 처음 대입된 줄 (섹션 헤더 포함).
    인라인 테이블 안의 키(path.waypoints.0.mu)는 못 찾으므로 상위 키 줄로 물러난다.
    """
    if not key:
        return None
    parts = [p for p in key.split(".") if not p.isdigit()]
    section = parts[0] if len(parts) > 1 else None
    for leaf in reversed(parts[1:] or parts):
        no = _assignment_line(text, section, leaf)
        if no is not None:
            return no
    return None


def _assignment_line(text: str, section: Optional[str], leaf: str) -> Optional[int]:
    in_section = section is None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("["):
            name = line.strip("[]").strip()
            in_section = section is None or name == section or name.startswith(f"{section}.")
            if name == leaf:
                return no
            continue
        if in_section and re.match(rf"{re.escape(leaf)}\s*=", line):
            return no
    return None


def parse_text(text: str, *, source: Optional[str] = None,
               base_dir: Optional[Union[str, Path]] = None,
               overrides: Optional[Dict[str, Dict[str, Any]]] = None) -> ExperimentConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        line = getattr(e, "lineno", None)
        if line is None:
            m = _LINE_RE.search(str(e))
            line = int(m.group(1)) if m else None
        raise ParseError(f"invalid TOML: {e}", line=line) from e

    for section, values in (overrides or {}).items():
        values = {k: v for k, v in values.items() if v is not None}
        if values:
            raw.setdefault(section, {}).update(values)

    ser = ExperimentConfigSerializer(data=raw, context={"base_dir": str(base_dir) if base_dir else None})
    try:
        ser.is_valid(raise_exception=True)
    except serializers.ValidationError as e:
        key, msg = _first_error(e.detail)
        raise ParseError(msg, key=key or None, line=_line_of(text, key)) from e

    data = plain(dict(ser.validated_data))
    log.debug("parsed config %s", source or "<text>")
    return ExperimentConfig(source=source, **{name: dict(data[name]) for name in ExperimentConfig.SECTIONS})


def parse_config(path: Union[str, Path], **overrides) -> ExperimentConfig:
    """overrides: 섹션 이름 -> {키: 값} (None 값은 무시)."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read config: {e}") from e
    return parse_text(text, source=str(p), base_dir=p.parent, overrides=overrides)
