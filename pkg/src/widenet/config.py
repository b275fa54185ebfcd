"""Network configuration: architecture, scale constants, activation, weight law.

The model is a fully connected network with ``L = len(widths)`` hidden layers:

    z^(1)(x) = b^(1) + sqrt(C_W/n0) W^(1) x
    z^(l)(x) = b^(l) + sqrt(C_W/n_{l-1}) W^(l) sigma(z^(l-1)(x)),  l = 2..L+1

with biases i.i.d. N(0, C_b) (identically zero when C_b = 0) and weights i.i.d.
from a centered unit-variance law.  ``inputs`` holds the d evaluation points,
each in R^n0; all inputs are pushed through the *same* random network, so the
layer-(L+1) readout is a dependent d-vector per draw.

Configs round-trip losslessly through JSON (shortest-repr floats).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .activations import ActivationSpec, activation
from .weights import WeightLaw, weight_law

__all__ = ["NetConfig", "make_config", "config_to_json", "config_from_json",
           "load_config", "dump_config"]


@dataclass(frozen=True)
class NetConfig:
    n0: int
    widths: tuple[int, ...]
    c_b: float
    c_w: float
    act: ActivationSpec
    weights: WeightLaw
    inputs: tuple[tuple[float, ...], ...]
    output_width: int = 1

    def __post_init__(self):
        if self.n0 < 1:
            raise ValueError("n0 must be >= 1")
        if len(self.widths) < 1 or any(n < 1 for n in self.widths):
            raise ValueError("need at least one hidden layer, all widths >= 1")
        if self.output_width < 1:
            raise ValueError("output_width must be >= 1")
        if self.c_b < 0:
            raise ValueError("c_b must be >= 0")
        if self.c_w <= 0:
            raise ValueError("c_w must be > 0")
        if len(self.inputs) < 1:
            raise ValueError("need at least one input point")
        if any(len(x) != self.n0 for x in self.inputs):
            raise ValueError("every input must have n0 coordinates")

    @property
    def depth(self) -> int:
        """Number of hidden layers L; the readout is layer L+1."""
        return len(self.widths)

    @property
    def n_inputs(self) -> int:
        return len(self.inputs)

    def layer_width(self, layer: int) -> int:
        """Width of layer ``layer`` (1..L hidden, L+1 readout, 0 input)."""
        if layer == 0:
            return self.n0
        if 1 <= layer <= self.depth:
            return self.widths[layer - 1]
        if layer == self.depth + 1:
            return self.output_width
        raise ValueError(f"layer {layer} outside 0..{self.depth + 1}")

    def input_array(self) -> np.ndarray:
        """Inputs as a (d, n0) float array."""
        return np.asarray(self.inputs, dtype=np.float64)

    def input_sq_norm(self, i: int = 0) -> float:
        """||x^(i)||^2."""
        return float(np.sum(np.asarray(self.inputs[i], dtype=np.float64) ** 2))

    def first_layer_variance(self, i: int = 0) -> float:
        """Var(z^(1)(x^(i))) = C_b + C_W ||x^(i)||^2 / n0 (exact, any law)."""
        return self.c_b + self.c_w * self.input_sq_norm(i) / self.n0

    def with_widths(self, widths: Sequence[int]) -> "NetConfig":
        return replace(self, widths=tuple(int(n) for n in widths))


def make_config(*, n0, widths, c_b, c_w, activation_kind="relu", act=None,
                weight_kind="gaussian", weights=None, inputs=None,
                output_width=1, **law_params) -> NetConfig:
    """Convenience constructor with registry lookups for activation/law."""
    if act is None:
        act = activation(activation_kind)
    elif isinstance(act, str):
        act = activation(act)
    if weights is None:
        weights = weight_law(weight_kind, **law_params)
    elif isinstance(weights, str):
        weights = weight_law(weights, **law_params)
    if inputs is None:
        # default probe: the all-ones vector scaled to ||x||^2 = n0
        inputs = (tuple(1.0 for _ in range(n0)),)
    return NetConfig(n0=int(n0), widths=tuple(int(n) for n in widths),
                     c_b=float(c_b), c_w=float(c_w), act=act, weights=weights,
                     inputs=tuple(tuple(float(v) for v in x) for x in inputs),
                     output_width=int(output_width))


def config_to_json(cfg: NetConfig) -> str:
    """Serialize to a canonical JSON string (sorted keys, lossless floats)."""
    act = {"kind": cfg.act.kind, "lipschitz": cfg.act.lipschitz,
           "sigma0": cfg.act.sigma0, "sup": cfg.act.sup_norm}
    obj = {
        "n0": cfg.n0,
        "widths": list(cfg.widths),
        "output_width": cfg.output_width,
        "c_b": cfg.c_b,
        "c_w": cfg.c_w,
        "activation": act,
        "weights": {"kind": cfg.weights.kind, "params": dict(cfg.weights.params)},
        "inputs": [list(x) for x in cfg.inputs],
    }
    return json.dumps(obj, sort_keys=True, indent=2)


def config_from_json(text: str) -> NetConfig:
    obj = json.loads(text)
    akind = obj["activation"]["kind"]
    if akind == "custom":
        raise ValueError("custom activations cannot be loaded from JSON")
    act = activation(akind)
    # sanity: stored analytic constants must match the registry
    stored = obj["activation"]
    if stored.get("sigma0") is not None and not math.isclose(stored["sigma0"], act.sigma0):
        raise ValueError(f"activation metadata mismatch for {akind!r}")
    wkind = obj["weights"]["kind"]
    if wkind == "custom":
        raise ValueError("custom weight laws cannot be loaded from JSON")
    law = weight_law(wkind, **obj["weights"].get("params", {}))
    return NetConfig(
        n0=int(obj["n0"]),
        widths=tuple(int(n) for n in obj["widths"]),
        c_b=float(obj["c_b"]),
        c_w=float(obj["c_w"]),
        act=act,
        weights=law,
        inputs=tuple(tuple(float(v) for v in x) for x in obj["inputs"]),
        output_width=int(obj.get("output_width", 1)),
    )


def dump_config(cfg: NetConfig, path) -> None:
    with open(path, "w") as f:
        f.write(config_to_json(cfg))
        f.write("\n")


def load_config(path) -> NetConfig:
    with open(path) as f:
        return config_from_json(f.read())
