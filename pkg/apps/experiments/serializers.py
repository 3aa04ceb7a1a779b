# apps/experiments/serializers.py
from __future__ import annotations
from pathlib import Path
from typing import Any, Dict

import numpy as np
from rest_framework import serializers

from apps.flow.conf import MODES
from apps.lattice.models import BOUNDARIES
from apps.selfdual.serializers import LabelField, load_matrix

from . import conf

# ---- 설정 스키마 ----


class StrictSerializer(serializers.Serializer):
    """선언되지 않은 키는 거부."""

    def to_internal_value(self, data):
        if not isinstance(data, dict):
            raise serializers.ValidationError({"non_field_errors": ["expected a table"]})
        unknown = sorted(set(data) - set(self.fields))
        if unknown:
            raise serializers.ValidationError({k: ["unknown key"] for k in unknown})
        return super().to_internal_value(data)


KITAEV_KEYS = {"n_sites", "t", "mu", "delta", "boundary", "first_site"}
ANDERSON_KEYS = {"d", "L", "spins", "boundary", "epsilon", "lam", "hopping", "fermi", "seed"}
MATRIX_KEYS = {"file"}
KIND_KEYS = {"kitaev": KITAEV_KEYS, "anderson": ANDERSON_KEYS, "matrix": MATRIX_KEYS}


class ModelSerializer(StrictSerializer):
    kind = serializers.ChoiceField(choices=conf.MODEL_KINDS)
    # kitaev
    n_sites = serializers.IntegerField(min_value=2, default=8)
    t = serializers.FloatField(default=1.0)
    mu = serializers.FloatField(default=1.0)
    delta = serializers.FloatField(default=1.0)
    first_site = serializers.IntegerField(default=0)
    # anderson
    d = serializers.IntegerField(min_value=1, default=1)
    L = serializers.IntegerField(min_value=0, default=4)
    spins = serializers.ListField(child=serializers.CharField(), min_length=1, default=["0"])
    epsilon = serializers.FloatField(default=1.0)
    lam = serializers.FloatField(min_value=0.0, default=0.0)
    hopping = serializers.FloatField(min_value=0.0, max_value=1.0, default=1.0)
    fermi = serializers.FloatField(default=0.0)
    seed = serializers.IntegerField(min_value=0, default=0)
    # 공통 / 행렬
    boundary = serializers.ChoiceField(choices=BOUNDARIES, default="open")
    file = serializers.CharField(required=False)

    def to_internal_value(self, data):
        # 다른 kind 의 키도 거부
        kind = data.get("kind") if isinstance(data, dict) else None
        if kind in KIND_KEYS:
            foreign = sorted((set(data) & set(self.fields)) - KIND_KEYS[kind] - {"kind"})
            if foreign:
                raise serializers.ValidationError({k: [f"not a {kind} parameter"] for k in foreign})
        return super().to_internal_value(data)

    def validate(self, attrs):
        kind = attrs["kind"]
        if kind == "matrix" and "file" not in attrs:
            raise serializers.ValidationError({"file": ["required for kind = matrix"]})
        if not (0.0 < attrs["epsilon"] <= 1.0):
            raise serializers.ValidationError({"epsilon": ["must lie in (0, 1]"]})
        return {"kind": kind, **{k: v for k, v in attrs.items() if k in KIND_KEYS[kind]}}


class PathSerializer(StrictSerializer):
    rule = serializers.ChoiceField(choices=conf.PATH_RULES, default="linear")
    waypoints = serializers.ListField(child=serializers.DictField(), min_length=2)
    grid = serializers.IntegerField(min_value=2, default=11)


class TolerancesSerializer(StrictSerializer):
    residual = serializers.FloatField(min_value=0.0, default=1e-10)
    zero_rel = serializers.FloatField(min_value=0.0, default=1e-8)
    tol_one = serializers.FloatField(min_value=0.0, default=1e-6)
    transport = serializers.FloatField(min_value=0.0, default=1e-6)


class FlowSerializer(StrictSerializer):
    mode = serializers.ChoiceField(choices=MODES, default="kato")
    h = serializers.FloatField(min_value=0.0, default=1e-2)
    h_min = serializers.FloatField(min_value=0.0, default=1e-5)
    nu0 = serializers.FloatField(min_value=0.0, required=False)


class CrossingSerializer(StrictSerializer):
    delta = serializers.FloatField(min_value=0.0, default=conf.DEFAULT_DELTA)
    n_max = serializers.IntegerField(min_value=1, default=64)
    lam = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.5)


class CTSerializer(StrictSerializer):
    mu = serializers.FloatField(min_value=0.0, default=0.5)
    epsilon = serializers.FloatField(default=1.0)
    z_re = serializers.FloatField(default=0.0)
    z_im = serializers.FloatField(default=1.0)


class EnsembleSerializer(StrictSerializer):
    n_realizations = serializers.IntegerField(min_value=1, default=conf.DEFAULT_REALIZATIONS)


class RunSerializer(StrictSerializer):
    seed = serializers.IntegerField(min_value=0, default=0)
    L_list = serializers.ListField(child=serializers.IntegerField(min_value=0), default=list)
    out = serializers.CharField(required=False)


class ExperimentConfigSerializer(StrictSerializer):
    model = ModelSerializer()
    path = PathSerializer(required=False)
    tolerances = TolerancesSerializer(default=dict)
    flow = FlowSerializer(default=dict)
    crossing = CrossingSerializer(default=dict)
    ct = CTSerializer(default=dict)
    ensemble = EnsembleSerializer(default=dict)
    run = RunSerializer(default=dict)

    SIZE_KEYS = {
        "kitaev": ("n_sites", "boundary", "first_site"),
        "anderson": ("d", "L", "spins", "boundary"),
        "matrix": ("file",),
    }

    def _fill(self, name: str, value: Any) -> Dict:
        """빠진 섹션은 default=dict 로 검증 없이 들어오므로 하위 기본값을 채운다."""
        if value:
            return dict(value)
        inner = self.fields[name].__class__(data={})
        inner.is_valid(raise_exception=True)
        return dict(inner.validated_data)

    def _matrix_shapes(self, model: Dict, waypoints) -> set:
        base = self.context.get("base_dir")
        shapes = set()
        for wp in waypoints:
            name = wp.get("file", model.get("file"))
            path = Path(base) / name if base else Path(name)
            try:
                shapes.add(load_matrix(path).shape)
            except (OSError, ValueError) as e:
                raise serializers.ValidationError({"model": {"file": [str(e)]}})
        return shapes

    def _waypoints(self, model: Dict, waypoints) -> list:
        """경유점마다 [model] 과 합쳐 같은 필드로 검증하고, 덮어쓴 키만 타입 변환해 돌려준다."""
        out = []
        for i, wp in enumerate(waypoints):
            if "kind" in wp:
                raise serializers.ValidationError(
                    {"path": {"waypoints": {str(i): {"kind": ["kind is fixed by [model]"]}}}})
            ser = ModelSerializer(data={**model, **wp})
            if not ser.is_valid():
                raise serializers.ValidationError({"path": {"waypoints": {str(i): ser.errors}}})
            out.append({k: ser.validated_data[k] for k in wp})
        return out

    def validate(self, attrs):
        for name in ("tolerances", "flow", "crossing", "ct", "ensemble", "run"):
            attrs[name] = self._fill(name, attrs.get(name))
        model = attrs["model"]
        path = attrs.get("path") or {"rule": "linear", "grid": 2, "waypoints": [{}, {}]}
        kind = model["kind"]
        path = {**path, "waypoints": self._waypoints(model, path["waypoints"])}
        sizes = {tuple(str(wp.get(k, model.get(k))) for k in self.SIZE_KEYS[kind])
                 for wp in path["waypoints"]}
        if kind == "matrix":
            sizes = self._matrix_shapes(model, path["waypoints"])
        if len(sizes) > 1:
            raise serializers.ValidationError(
                {"path": {"waypoints": ["endpoint dimensions differ"]}})
        if path["rule"] == "ramp" and kind == "matrix":
            raise serializers.ValidationError({"path": {"rule": ["ramp needs a parametrized model"]}})
        attrs["path"] = dict(path)
        return attrs


# ---- 출력 레코드 ----


class ComplexField(serializers.Field):
    def to_representation(self, value):
        z = complex(value)
        return [z.real, z.imag]

    def to_internal_value(self, data):
        try:
            return complex(float(data[0]), float(data[1]))
        except (TypeError, ValueError, IndexError):
            raise serializers.ValidationError("expected a [re, im] pair")


class IndexReportSerializer(serializers.Serializer):
    sigma = serializers.IntegerField()
    dim_intersection = serializers.IntegerField()
    kernel_dim = serializers.IntegerField()
    conditioning = serializers.FloatField()
    methods_agree = serializers.BooleanField()
    methods = serializers.DictField(child=serializers.IntegerField())
    det = ComplexField(allow_null=True)


class SweepRecordSerializer(serializers.Serializer):
    s = serializers.FloatField()
    gap = serializers.FloatField()
    sigma = serializers.IntegerField()
    sigma_chain = serializers.IntegerField(allow_null=True)
    det = ComplexField(required=False)
    transport_error = serializers.FloatField(required=False)
    deficit = serializers.FloatField(required=False)


class DeficitRowSerializer(serializers.Serializer):
    L = serializers.IntegerField()
    n_sites = serializers.IntegerField()
    deficit = serializers.FloatField()
    per_site = serializers.FloatField()
    det = ComplexField()
    transport_error = serializers.FloatField()
    converged = serializers.BooleanField()


class GapClosingSerializer(serializers.Serializer):
    s_tilde = serializers.FloatField()
    gap = serializers.FloatField()
    bracket = serializers.ListField(child=serializers.FloatField())
    n_crossings = serializers.IntegerField()


class EnsembleMemberSerializer(serializers.Serializer):
    index = serializers.IntegerField()
    seed = serializers.IntegerField()
    gap = serializers.FloatField()
    sigma = serializers.IntegerField()
    decay_rate = serializers.FloatField(allow_null=True)
    decay_residual = serializers.FloatField(allow_null=True)


class CTReportSerializer(serializers.Serializer):
    mu = serializers.FloatField(source="params.mu")
    epsilon = serializers.FloatField(source="params.epsilon")
    S_value = serializers.FloatField(source="params.S_value")
    Delta_value = serializers.FloatField(source="params.Delta_value")
    z = ComplexField()
    status = serializers.CharField()
    worst_ratio = serializers.FloatField()
    worst_pair = serializers.SerializerMethodField()
    violations = serializers.IntegerField()
    gap = serializers.FloatField()
    gapped_status = serializers.CharField()
    gapped_mu = serializers.FloatField()
    gapped_worst_ratio = serializers.FloatField()
    gapped_violations = serializers.IntegerField()
    n_pairs = serializers.IntegerField()

    def get_worst_pair(self, obj):
        if obj.worst_pair is None:
            return None
        field = LabelField()
        return [field.to_representation(lab) for lab in obj.worst_pair]


class StabilizationRowSerializer(serializers.Serializer):
    L = serializers.IntegerField()
    dim = serializers.IntegerField()
    sigma = serializers.IntegerField()
    gap_left = serializers.FloatField()
    gap_right = serializers.FloatField()


def plain(value: Any) -> Any:
    """numpy 스칼라/배열/복소수를 JSON 값으로."""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value
