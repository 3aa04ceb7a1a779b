# apps/selfdual/serializers.py
from __future__ import annotations
import json
from pathlib import Path
from typing import Union

import numpy as np
from rest_framework import serializers


class MatrixField(serializers.Field):
    """
    복소 행렬 JSON 포맷 (row-major, [re, im] 쌍):
      {"rows": n, "cols": m, "data": [[[re, im], ...], ...]}
    """
    default_error_messages = {
        "invalid": "Expected an object with rows, cols and data.",
        "shape": "data does not match rows x cols.",
        "pair": "Every entry must be a [re, im] pair of numbers.",
    }

    def to_representation(self, value):
        a = np.asarray(value, dtype=complex)
        if a.ndim != 2:
            a = a.reshape(1, -1)
        return {
            "rows": int(a.shape[0]),
            "cols": int(a.shape[1]),
            "data": [[[float(z.real), float(z.imag)] for z in row] for row in a],
        }

    def to_internal_value(self, data):
        if not isinstance(data, dict) or not {"rows", "cols", "data"} <= set(data):
            self.fail("invalid")
        try:
            rows, cols = int(data["rows"]), int(data["cols"])
        except (TypeError, ValueError):
            self.fail("invalid")
        body = data["data"]
        if not isinstance(body, list) or len(body) != rows or any(
                not isinstance(r, list) or len(r) != cols for r in body):
            self.fail("shape")
        out = np.empty((rows, cols), dtype=complex)
        for i, row in enumerate(body):
            for j, pair in enumerate(row):
                if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                    self.fail("pair")
                try:
                    out[i, j] = complex(float(pair[0]), float(pair[1]))
                except (TypeError, ValueError):
                    self.fail("pair")
        return out


class LabelField(serializers.Field):
    def to_representation(self, value):
        x, spin, tag = value
        return {"x": list(x), "spin": int(spin), "tag": tag}

    def to_internal_value(self, data):
        try:
            return (tuple(int(c) for c in data["x"]), int(data["spin"]), str(data["tag"]))
        except (KeyError, TypeError, ValueError):
            raise serializers.ValidationError("label needs x, spin and tag")


class HamiltonianOutSerializer(serializers.Serializer):
    labels = serializers.ListField(child=LabelField(), source="space.labels")
    matrix = MatrixField()
    meta = serializers.DictField()


# ---------- 파일 IO ----------
def load_matrix(path: Union[str, Path]) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    field = MatrixField()
    try:
        return field.to_internal_value(payload)
    except serializers.ValidationError as e:
        raise ValueError(f"{path}: {e.detail}") from e


def dump_matrix(path: Union[str, Path], matrix: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(MatrixField().to_representation(matrix), fh, sort_keys=True)
