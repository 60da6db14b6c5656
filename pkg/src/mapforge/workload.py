"""Layer shapes and model files.

A model is a named list of layers.  Convolution layers carry their six
loop dimensions directly; GEMM layers are lowered to the same
six-dimension form on load, so every later stage sees a single layer
type.  Spatial sizes are output sizes; the input extent is derived from
output size, stride, and filter size (no padding).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import InputError

# Canonical dimension order used everywhere: output channels, input
# channels, output rows, output columns, filter rows, filter columns.
DIMS = ("K", "C", "Y", "X", "R", "S")


@dataclass(frozen=True)
class LayerShape:
    """One layer's six loop extents plus its convolution stride."""

    name: str
    K: int
    C: int
    Y: int
    X: int
    R: int
    S: int
    stride: int = 1

    def dim(self, d: str) -> int:
        return getattr(self, d)

    @property
    def in_y(self) -> int:
        # no padding: input rows follow from output rows and filter rows
        return (self.Y - 1) * self.stride + self.R

    @property
    def in_x(self) -> int:
        return (self.X - 1) * self.stride + self.S


@dataclass(frozen=True)
class Model:
    name: str
    layers: tuple


def total_macs(layer: LayerShape) -> int:
    """Multiply-accumulates needed for one layer, independent of mapping."""
    return layer.K * layer.C * layer.Y * layer.X * layer.R * layer.S


def gemm_to_conv(name: str, m: int, n: int, k: int) -> LayerShape:
    """Lower an (m x k) by (k x n) product onto the six-dimension form.

    Output rows of the product become output channels, the reduction
    becomes input channels, and output columns become one spatial axis.
    """
    return LayerShape(name=name, K=m, C=k, Y=n, X=1, R=1, S=1, stride=1)


def validate_layer(layer: LayerShape) -> list:
    """Return a list of violation strings; empty means the layer is usable."""
    problems = []
    for d in DIMS:
        v = layer.dim(d)
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            problems.append("%s: dimension %s must be a positive integer, got %r"
                            % (layer.name, d, v))
    if not isinstance(layer.stride, int) or isinstance(layer.stride, bool) or layer.stride < 1:
        problems.append("%s: stride must be a positive integer, got %r"
                        % (layer.name, layer.stride))
    return problems


_CONV_KEYS = {"name", "type", "K", "C", "Y", "X", "R", "S", "stride"}
_GEMM_KEYS = {"name", "type", "M", "N", "K"}


def _require_int(entry, key, where):
    if key not in entry:
        raise InputError("%s: missing field %r" % (where, key))
    v = entry[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise InputError("%s: field %r must be an integer, got %r" % (where, key, v))
    return v


def model_from_dict(obj) -> Model:
    """Build a model from parsed JSON, rejecting unknown or missing fields."""
    if not isinstance(obj, dict):
        raise InputError("model file: top level must be an object")
    extra = set(obj) - {"name", "layers"}
    if extra:
        raise InputError("model file: unknown field %r" % sorted(extra)[0])
    if "name" not in obj or not isinstance(obj["name"], str) or not obj["name"]:
        raise InputError("model file: 'name' must be a non-empty string")
    if "layers" not in obj or not isinstance(obj["layers"], list) or not obj["layers"]:
        raise InputError("model file: 'layers' must be a non-empty list")

    layers = []
    for i, entry in enumerate(obj["layers"]):
        where = "layer %d" % i
        if not isinstance(entry, dict):
            raise InputError("%s: must be an object" % where)
        if not isinstance(entry.get("name"), str) or not entry.get("name"):
            raise InputError("%s: 'name' must be a non-empty string" % where)
        where = "layer %r" % entry["name"]
        kind = entry.get("type")
        if kind == "conv":
            extra = set(entry) - _CONV_KEYS
            if extra:
                raise InputError("%s: unknown field %r" % (where, sorted(extra)[0]))
            layer = LayerShape(name=entry["name"],
                               **{d: _require_int(entry, d, where) for d in DIMS},
                               stride=_require_int(entry, "stride", where))
        elif kind == "gemm":
            extra = set(entry) - _GEMM_KEYS
            if extra:
                raise InputError("%s: unknown field %r" % (where, sorted(extra)[0]))
            layer = gemm_to_conv(entry["name"],
                                 _require_int(entry, "M", where),
                                 _require_int(entry, "N", where),
                                 _require_int(entry, "K", where))
        else:
            raise InputError("%s: 'type' must be 'conv' or 'gemm', got %r"
                             % (where, kind))
        problems = validate_layer(layer)
        if problems:
            raise InputError("; ".join(problems))
        layers.append(layer)
    names = [l.name for l in layers]
    for name in names:
        if names.count(name) > 1:
            raise InputError("model file: duplicate layer name %r" % name)
    return Model(name=obj["name"], layers=tuple(layers))


def load_model(path) -> Model:
    """Load and validate a model description from a JSON file."""
    try:
        with open(path, "rb") as fh:
            obj = json.load(fh)
    except OSError as e:
        raise InputError("cannot read model file %s: %s" % (path, e))
    except json.JSONDecodeError as e:
        raise InputError("model file %s is not valid JSON: %s" % (path, e))
    return model_from_dict(obj)
