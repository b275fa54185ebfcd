"""Activation functions with the analytic metadata the bound engine needs.

Each activation carries, besides the pointwise map itself, the quantities that
enter the closed-form kernel recursions and the explicit error bounds:

* ``lipschitz``  -- best Lipschitz constant, or ``None`` when the function is
  not Lipschitz (the unit step).
* ``sigma0``     -- value at the origin.
* ``sup_norm``   -- sup norm, or ``None`` when unbounded.
* ``derivative`` -- a.e. derivative, used for expected-derivative factors;
  ``None`` when no classical derivative is available (the unit step).

The built-in kinds are ``identity``, ``relu``, ``perceptron`` (unit step
``1{x >= 0}``), ``tanh`` and ``sigmoid``.  ``custom`` activations supply their
own callables and constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = ["ActivationSpec", "activation", "BUILTIN_ACTIVATIONS"]


@dataclass(frozen=True)
class ActivationSpec:
    kind: str
    lipschitz: Optional[float]
    sigma0: float
    sup_norm: Optional[float]
    fn: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)

    def __call__(self, x):
        return self.apply(x)

    def apply(self, x):
        """Apply the activation elementwise (ufunc-style, preserves shape)."""
        x = np.asarray(x)
        if self.kind == "identity":
            return x
        if self.kind == "relu":
            return np.maximum(x, 0.0)
        if self.kind == "perceptron":
            return (x >= 0.0).astype(x.dtype if x.dtype.kind == "f" else np.float64)
        if self.kind == "tanh":
            return np.tanh(x)
        if self.kind == "sigmoid":
            return 1.0 / (1.0 + np.exp(-x))
        if self.fn is None:
            raise ValueError(f"custom activation {self.kind!r} has no callable")
        return self.fn(x)

    def apply_derivative(self, x):
        """A.e. derivative, elementwise.  Raises for kinds without one."""
        x = np.asarray(x)
        if self.kind == "identity":
            return np.ones_like(x, dtype=np.float64)
        if self.kind == "relu":
            return (x > 0.0).astype(np.float64)
        if self.kind == "tanh":
            t = np.tanh(x)
            return 1.0 - t * t
        if self.kind == "sigmoid":
            s = 1.0 / (1.0 + np.exp(-x))
            return s * (1.0 - s)
        if self.derivative is not None:
            return self.derivative(x)
        raise ValueError(f"activation {self.kind!r} has no usable derivative")

    @property
    def has_derivative(self) -> bool:
        return self.kind in ("identity", "relu", "tanh", "sigmoid") or self.derivative is not None

    @property
    def is_bounded(self) -> bool:
        return self.sup_norm is not None and np.isfinite(self.sup_norm)


BUILTIN_ACTIVATIONS = {
    "identity": dict(lipschitz=1.0, sigma0=0.0, sup_norm=None),
    "relu": dict(lipschitz=1.0, sigma0=0.0, sup_norm=None),
    # unit step 1{x >= 0}: bounded, not Lipschitz, no classical derivative
    "perceptron": dict(lipschitz=None, sigma0=1.0, sup_norm=1.0),
    "tanh": dict(lipschitz=1.0, sigma0=0.0, sup_norm=1.0),
    "sigmoid": dict(lipschitz=0.25, sigma0=0.5, sup_norm=1.0),
}


def activation(kind: str, *, fn=None, derivative=None, lipschitz=None,
               sigma0=None, sup_norm=None) -> ActivationSpec:
    """Build an :class:`ActivationSpec`.

    For built-in kinds the analytic constants are filled in automatically and
    keyword overrides are rejected (they are properties of the function, not
    tunables).  ``kind='custom'`` requires ``fn`` plus whichever constants the
    caller can certify; ``lipschitz`` and ``sigma0`` are needed by most bounds.
    """
    if kind in BUILTIN_ACTIVATIONS:
        if any(v is not None for v in (fn, derivative, lipschitz, sigma0, sup_norm)):
            raise ValueError(f"built-in activation {kind!r} does not accept overrides")
        meta = BUILTIN_ACTIVATIONS[kind]
        return ActivationSpec(kind=kind, **meta)
    if kind == "custom":
        if fn is None:
            raise ValueError("custom activation requires fn")
        if sigma0 is None:
            sigma0 = float(fn(np.zeros(1))[0])
        return ActivationSpec(kind="custom", fn=fn, derivative=derivative,
                              lipschitz=lipschitz, sigma0=float(sigma0),
                              sup_norm=sup_norm)
    raise ValueError(f"unknown activation kind {kind!r}")
