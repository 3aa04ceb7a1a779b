from __future__ import annotations
from dataclasses import dataclass, field
from typing import Dict, Optional


@dataclass(frozen=True)
class IndexReport:
    """
    σ(P₁,P₂) 와 진단값.
    methods: 방법 이름 -> σ ("intersection", "kernel", "determinant", "pfaffian").
    """
    sigma: int
    dim_intersection: int
    kernel_dim: int
    conditioning: float
    methods_agree: bool
    methods: Dict[str, int] = field(default_factory=dict)
    det: Optional[complex] = None

