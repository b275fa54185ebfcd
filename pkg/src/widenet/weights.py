"""Weight laws: centered, unit-variance i.i.d. distributions with moment access.

Every law W satisfies E[W] = 0 and E[W^2] = 1.  The bound formulas consume
``moment(p)`` = E[W^p] for even p (exact) and ``abs_moment(p)`` = an upper
bound on E[|W|^p]:

* even p: exact value,
* odd p: the Holder bracket E[|W|^p] <= E[W^(p+1)]^(p/(p+1)), documented and
  used uniformly so every downstream bound stays a true upper bound.

``log_moment`` returns log E[W^p] for even p, computed in log space so that
huge orders (p in the hundreds, as the explicit bounds require) never overflow.

Built-in kinds: ``gaussian``, ``rademacher``, ``uniform`` (on
[-sqrt(3), sqrt(3)]), ``student_t`` (scaled to unit variance, df > 4), and
``custom`` (caller supplies a sampler and a moment function).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = ["WeightLaw", "weight_law", "log_double_factorial_odd"]


def log_double_factorial_odd(p: int) -> float:
    """log((p-1)!!) for even p >= 2: product of odd numbers 1*3*...*(p-1).

    (p-1)!! = p! / (2^(p/2) * (p/2)!), evaluated via lgamma.
    """
    if p % 2 != 0 or p < 2:
        raise ValueError("p must be even and >= 2")
    return math.lgamma(p + 1) - (p / 2) * math.log(2.0) - math.lgamma(p / 2 + 1)


def _gaussian_log_moment(p: int) -> float:
    # E[Z^p] = (p-1)!! for even p
    return log_double_factorial_odd(p)


def _uniform_log_moment(p: int) -> float:
    # W ~ U(-sqrt(3), sqrt(3)): E[W^p] = 3^(p/2) / (p+1) for even p
    return (p / 2) * math.log(3.0) - math.log(p + 1.0)


def _rademacher(rng: np.random.Generator, size) -> np.ndarray:
    # Fair signs from raw generator words, 64 per word: an order of magnitude
    # cheaper than integers() for the large weight tensors the dense sampler
    # draws, where the float64 write is the remaining cost.
    if size is None:
        size = ()
    shape = (size,) if isinstance(size, int) else tuple(size)
    n = int(np.prod(shape)) if shape else 1
    words = np.atleast_1d(rng.bit_generator.random_raw((n + 63) // 64))
    bits = np.unpackbits(words.view(np.uint8), count=n)
    out = bits.astype(np.float64)
    out *= 2.0
    out -= 1.0
    return out.reshape(shape) if shape else out[0]


def _student_t_log_moment(p: int, df: float) -> float:
    # T ~ t_df, W = T * sqrt((df-2)/df):
    # E[T^p] = df^(p/2) * G((p+1)/2) G((df-p)/2) / (sqrt(pi) G(df/2)), even p < df
    if p >= df:
        raise ValueError(f"moment of order {p} diverges for student_t(df={df})")
    return ((p / 2) * math.log(df - 2.0)
            + math.lgamma((p + 1) / 2) + math.lgamma((df - p) / 2)
            - 0.5 * math.log(math.pi) - math.lgamma(df / 2))


@dataclass(frozen=True)
class WeightLaw:
    kind: str
    params: dict = field(default_factory=dict)
    _sampler: Optional[Callable] = field(default=None, repr=False)
    _log_moment: Optional[Callable[[int], float]] = field(default=None, repr=False)
    max_finite_moment: float = math.inf  # largest finite even moment order

    def log_moment(self, p: int) -> float:
        """log E[W^p] for even p (exact; raises beyond max_finite_moment)."""
        if p % 2 != 0 or p < 2:
            raise ValueError("log_moment takes even p >= 2; use abs_moment for odd p")
        if p > self.max_finite_moment:
            raise ValueError(
                f"E[W^{p}] is not finite for {self.kind}{self.params or ''}: "
                f"largest finite even order is {self.max_finite_moment}")
        if self.kind == "gaussian":
            return _gaussian_log_moment(p)
        if self.kind == "rademacher":
            return 0.0
        if self.kind == "uniform":
            return _uniform_log_moment(p)
        if self.kind == "student_t":
            return _student_t_log_moment(p, self.params["df"])
        if self._log_moment is not None:
            return float(self._log_moment(p))
        raise ValueError(f"no moment function for custom law {self.kind!r}")

    def moment(self, p: int) -> float:
        """E[W^p] for even p (may overflow to inf for huge p; see log_moment)."""
        return math.exp(self.log_moment(p))

    def log_abs_moment(self, p: int) -> float:
        """log of an upper bound on E[|W|^p].

        Even p: exact log-moment.  Odd p: Holder bracket
        log E[W^(p+1)] * p/(p+1), an upper bound by Lyapunov/Holder.
        """
        if p % 2 == 0:
            return self.log_moment(p)
        return self.log_moment(p + 1) * p / (p + 1)

    def abs_moment(self, p: int) -> float:
        return math.exp(self.log_abs_moment(p))

    def log_moment_root(self, p: int) -> float:
        """log( E[W^p]^(1/p) ) for even p -- the L^p norm of W, log scale."""
        return self.log_moment(p) / p

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == "gaussian":
            return rng.standard_normal(size)
        if self.kind == "rademacher":
            return _rademacher(rng, size)
        if self.kind == "uniform":
            s3 = math.sqrt(3.0)
            return rng.uniform(-s3, s3, size=size)
        if self.kind == "student_t":
            df = self.params["df"]
            return rng.standard_t(df, size=size) * math.sqrt((df - 2.0) / df)
        if self._sampler is not None:
            return np.asarray(self._sampler(rng, size), dtype=np.float64)
        raise ValueError(f"no sampler for custom law {self.kind!r}")


def weight_law(kind: str, *, df: Optional[float] = None, sampler=None,
               log_moment=None, max_finite_moment=math.inf) -> WeightLaw:
    """Build a :class:`WeightLaw` of the given kind.

    ``student_t`` requires ``df > 4`` (unit variance needs df > 2; every bound
    consumes at least a 4th moment).  ``custom`` requires a sampler and a
    ``log_moment(p)`` callable for even p, plus ``max_finite_moment``.
    """
    if kind == "gaussian":
        return WeightLaw("gaussian")
    if kind == "rademacher":
        return WeightLaw("rademacher")
    if kind == "uniform":
        return WeightLaw("uniform")
    if kind == "student_t":
        if df is None or df <= 4:
            raise ValueError("student_t requires df > 4")
        largest = int(df - 1e-12)
        if largest >= df:  # integer df: strict inequality p < df
            largest = int(df) - 1
        largest_even = largest if largest % 2 == 0 else largest - 1
        return WeightLaw("student_t", params={"df": float(df)},
                         max_finite_moment=float(largest_even))
    if kind == "custom":
        if sampler is None or log_moment is None:
            raise ValueError("custom law requires sampler and log_moment")
        return WeightLaw("custom", _sampler=sampler, _log_moment=log_moment,
                         max_finite_moment=float(max_finite_moment))
    raise ValueError(f"unknown weight law kind {kind!r}")
