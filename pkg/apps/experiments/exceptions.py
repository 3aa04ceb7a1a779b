from __future__ import annotations
from typing import Optional

from apps.selfdual.exceptions import SelfDualError


class ExperimentError(SelfDualError):
    pass


class ParseError(ExperimentError):
    """설정 파일 오류. key 는 점으로 이은 경로, line 은 1부터."""

    def __init__(self, message: str, *, key: Optional[str] = None, line: Optional[int] = None):
        where = ", ".join(p for p in (f"key {key}" if key else "", f"line {line}" if line else "") if p)
        super().__init__(f"{message} ({where})" if where else message)
        self.key = key
        self.line = line


class NoSignChange(ExperimentError):
    """양 끝이 같은 상 (σ = +1), 부호 변화 없음."""


class StillGapped(ExperimentError):
    pass


class DegenerateWedge(ExperimentError):
    pass
