"""Explicit and semi-empirical upper bounds on the distance to the Gaussian
limit, evaluated as pure functions of (NetConfig, KernelSequence, optional
Monte Carlo statistics).

Every bound returns a :class:`BoundReport` whose ``value`` recombines
bit-for-bit from its ``factors`` under the documented combination formula:

* ``combination == "product"``: the factors flagged ``linear`` (the width
  terms) multiply left-to-right in value space; all other factors combine
  in log space.  ``value = prod(linear values) * exp(fsum(other
  log_values))``.  Keeping the width terms linear makes power-of-two width
  rescalings bit-exact (IEEE multiplication and sqrt commute with scaling
  by powers of two), so quadrupling every width halves a
  ``(sum 1/n_j)^(1/2)`` bound exactly; the log-space remainder prevents
  spurious intermediate overflow.
* ``combination == "sum"``: ``value = fsum(term values)``.

``log_value`` is always the full log-space evaluation and stays finite when
the value exceeds the float64 range (then ``value`` reports ``inf`` and
``log_value`` is authoritative).  When a precondition fails the value is
``inf`` and ``reasons`` is non-empty — never NaN, never an exception, so
sweeps can tabulate inapplicable cells.

Two unspecified numeric constants appear throughout and are configuration
supplied (echoed in every report): ``k_rosenthal`` (the constant of the
p/log(p) moment inequality for centered i.i.d. sums, default 2.0) and
``c_universal`` (the universal prefactor of the multi-input convex-distance
bound, default 1.0).  ``log`` means the natural logarithm everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .config import NetConfig
from .kernels import (KernelSequence, bivariate_sigma_moment,
                      expected_sigma_prime)
from .sampling import (forward_sample, forward_sample_full,
                       layer_mean_square_activity)
from .weights import log_double_factorial_odd

__all__ = [
    "BoundError", "BoundFactor", "BoundReport", "MomentBound", "QEstimate",
    "output_moment_bound", "sigma_moment_root_bound", "empirical_output_moment",
    "variance_gap_bound", "variance_gap_empirical",
    "kolmogorov_semi_bound", "wasserstein_semi_bound",
    "explicit_one_input_bound", "explicit_multi_input_bound",
    "convex_semi_bound", "determinant_lower_bound", "eigenvalue_lower_bound",
    "perceptron_kolmogorov_bound", "perceptron_wasserstein_bound",
    "identity_kolmogorov_bound", "identity_wasserstein_bound",
    "relu_kolmogorov_bound", "relu_wasserstein_bound",
    "bounded_lipschitz_bound", "identity_multi_input_bound",
    "special_case_bounds", "evaluate_bound", "depth_for_width", "BOUND_IDS",
]

K_ROSENTHAL_DEFAULT = 2.0
C_UNIVERSAL_DEFAULT = 1.0

_LOG_MAX = math.log(np.finfo(np.float64).max)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


class BoundError(ValueError):
    """Raised by the scalar operations (moments, Q, det/eigen) on invalid
    requests; the BoundReport-returning bounds never raise on preconditions."""


def _exp(log_value: float) -> float:
    if log_value == -math.inf:
        return 0.0
    if log_value >= _LOG_MAX:
        return math.inf
    return math.exp(log_value)


def _log(value: float) -> float:
    if value < 0:
        raise BoundError("negative factor value")
    return math.log(value) if value > 0 else -math.inf


@dataclass(frozen=True)
class BoundFactor:
    name: str
    value: float
    log_value: float
    linear: bool = False     # True: combines in value space (width factors)


def _pf(name: str, log_value: float) -> BoundFactor:
    """Multiplicative factor specified in log space."""
    return BoundFactor(name, _exp(log_value), float(log_value))


def _vf(name: str, value: float) -> BoundFactor:
    """Multiplicative factor carried in value space (width terms, so that
    power-of-two width rescalings move the bound bit-exactly)."""
    return BoundFactor(name, float(value), _log(float(value)), linear=True)


def _af(name: str, value: float) -> BoundFactor:
    """Additive term specified by value."""
    return BoundFactor(name, float(value), _log(float(value)))


@dataclass(frozen=True)
class BoundReport:
    bound_id: str
    target: str              # kolmogorov | wasserstein | wasserstein_normalized
    combination: str         # 'product' | 'sum'      | max_kw | convex | ...
    factors: tuple
    value: float
    log_value: float
    constants: dict
    preconditions_ok: bool
    reasons: tuple = ()
    extras: dict = field(default_factory=dict)

    def recombine(self) -> float:
        """Recompute value from factors under the combination formula."""
        if not self.preconditions_ok:
            return math.inf
        if self.combination == "product":
            return _combine_product(self.factors)
        return math.fsum(f.value for f in self.factors)

    def to_dict(self) -> dict:
        return {
            "bound_id": self.bound_id,
            "target": self.target,
            "combination": self.combination,
            "value": self.value,
            "log_value": self.log_value,
            "factors": [{"name": f.name, "value": f.value,
                         "log_value": f.log_value, "linear": f.linear}
                        for f in self.factors],
            "constants": dict(self.constants),
            "preconditions_ok": self.preconditions_ok,
            "reasons": list(self.reasons),
            "extras": {k: v for k, v in self.extras.items()},
        }

    @staticmethod
    def from_dict(obj: dict) -> "BoundReport":
        return BoundReport(
            bound_id=obj["bound_id"], target=obj["target"],
            combination=obj["combination"],
            factors=tuple(BoundFactor(f["name"], f["value"], f["log_value"],
                                      f.get("linear", False))
                          for f in obj["factors"]),
            value=obj["value"], log_value=obj["log_value"],
            constants=dict(obj["constants"]),
            preconditions_ok=obj["preconditions_ok"],
            reasons=tuple(obj.get("reasons", ())),
            extras=dict(obj.get("extras", {})))


def _combine_product(factors) -> float:
    value = _exp(math.fsum(f.log_value for f in factors if not f.linear))
    for f in factors:
        if f.linear:
            value *= f.value
    return value


def _product_report(bound_id, target, factors, constants, extras=None) -> BoundReport:
    lv = math.fsum(f.log_value for f in factors)
    return BoundReport(bound_id=bound_id, target=target, combination="product",
                       factors=tuple(factors), value=_combine_product(factors),
                       log_value=lv, constants=constants,
                       preconditions_ok=True, extras=extras or {})


def _sum_report(bound_id, target, factors, constants, extras=None) -> BoundReport:
    v = math.fsum(f.value for f in factors)
    return BoundReport(bound_id=bound_id, target=target, combination="sum",
                       factors=tuple(factors), value=v, log_value=_log(v),
                       constants=constants, preconditions_ok=True,
                       extras=extras or {})


def _fail(bound_id, target, reasons, constants) -> BoundReport:
    return BoundReport(bound_id=bound_id, target=target, combination="product",
                       factors=(), value=math.inf, log_value=math.inf,
                       constants=constants, preconditions_ok=False,
                       reasons=tuple(reasons))


def _constants(k_rosenthal=None, c_universal=None) -> dict:
    out = {}
    if k_rosenthal is not None:
        out["k_rosenthal"] = float(k_rosenthal)
    if c_universal is not None:
        out["c_universal"] = float(c_universal)
    return out


def _single(cfg: NetConfig, i: int) -> NetConfig:
    return cfg if cfg.n_inputs == 1 and i == 0 else replace(cfg, inputs=(cfg.inputs[i],))


def _child_seed(seed: int, tag: int) -> int:
    ss = np.random.SeedSequence(seed, spawn_key=(0xBD, tag))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _weight_moment_ok(cfg: NetConfig, order: int) -> bool:
    return order <= cfg.weights.max_finite_moment


def _p_over_log(p) -> float:
    """p / log(p) with the natural logarithm (p >= 2 in every use)."""
    return p / math.log(p)


# ---------------------------------------------------------------------------
# moments of the network output


@dataclass(frozen=True)
class MomentBound:
    layer: int
    p: int
    value: float      # bound on E[(z_1^(layer))^p]^(1/p)
    log_value: float


def output_moment_bound(cfg: NetConfig, layer: int, p: int, *,
                        k_rosenthal: float = K_ROSENTHAL_DEFAULT,
                        input_index: int = 0) -> MomentBound:
    """Upper bound on E[(z_1^(layer)(x))^p]^(1/p) for even p >= 2.

    Layer 1 uses the direct i.i.d.-sum inequality
        K sqrt(C_b) ((p-1)!!)^(1/p)
        + sqrt(C_W/n0) * p/log(p) * max{||x||_2, ||x||_p} * E[W^p]^(1/p);
    deeper layers iterate it through the activation:
        ((sqrt(C_b)((p-1)!!)^(1/p)
          + K sqrt(C_W) p/log(p) |sigma(0)| E[W^p]^(1/p)) * (layer-1)
         + first_layer)
        * (1 + (K p/log(p) sqrt(C_W) ||sigma||_Lip E[W^p]^(1/p))^(layer-1)).
    """
    if p < 2 or p % 2 != 0:
        raise BoundError("p must be an even integer >= 2")
    if not 1 <= layer <= cfg.depth + 1:
        raise BoundError(f"layer must be in 1..{cfg.depth + 1}")
    if not _weight_moment_ok(cfg, p):
        raise BoundError(f"E[W^{p}] is not finite for weight law {cfg.weights.kind!r}")
    x = np.asarray(cfg.inputs[input_index], dtype=np.float64)
    dfac_root = math.exp(log_double_factorial_odd(p) / p)   # ((p-1)!!)^(1/p)
    wp_root = math.exp(cfg.weights.log_moment_root(p))
    plog = _p_over_log(p)
    norm2 = math.sqrt(cfg.input_sq_norm(input_index))
    normp = float(np.sum(np.abs(x) ** p)) ** (1.0 / p)
    first = (k_rosenthal * math.sqrt(cfg.c_b) * dfac_root
             + math.sqrt(cfg.c_w / cfg.n0) * plog * max(norm2, normp) * wp_root)
    if layer == 1:
        return MomentBound(layer, p, first, _log(first))
    if cfg.act.lipschitz is None:
        raise BoundError(
            f"activation {cfg.act.kind!r} has no finite Lipschitz constant")
    drift = (math.sqrt(cfg.c_b) * dfac_root
             + k_rosenthal * math.sqrt(cfg.c_w) * plog * abs(cfg.act.sigma0)
             * wp_root) * (layer - 1) + first
    growth_log = (layer - 1) * _log(k_rosenthal * plog * math.sqrt(cfg.c_w)
                                    * cfg.act.lipschitz * wp_root)
    lv = _log(drift) + float(np.logaddexp(0.0, growth_log))
    return MomentBound(layer, p, _exp(lv), lv)


def sigma_moment_root_bound(cfg: NetConfig, layer: int, p: int, *,
                            k_rosenthal: float = K_ROSENTHAL_DEFAULT,
                            input_index: int = 0) -> float:
    """Upper bound on E[|sigma(z_1^(layer))|^p]^(1/p) for even p.

    Bounded activations use the sup norm; Lipschitz ones use
    |sigma(0)| + Lip * E[z^p]^(1/p); the minimum of the applicable routes.
    """
    routes = []
    if cfg.act.is_bounded:
        routes.append(cfg.act.sup_norm)
    if cfg.act.lipschitz is not None and _weight_moment_ok(cfg, p):
        mb = output_moment_bound(cfg, layer, p, k_rosenthal=k_rosenthal,
                                 input_index=input_index)
        routes.append(abs(cfg.act.sigma0) + cfg.act.lipschitz * mb.value)
    if not routes:
        raise BoundError(
            f"no moment route for activation {cfg.act.kind!r} with weight law "
            f"{cfg.weights.kind!r} at p={p}")
    return min(routes)


def empirical_output_moment(cfg: NetConfig, layer: int, p: int, m: int,
                            seed: int, *, input_index: int = 0):
    """(E_m[z^p]^(1/p), delta-method stderr of that root) from m draws."""
    z = forward_sample(_single(cfg, input_index), layer, m, seed).values[:, 0]
    zp = z ** p
    v = float(np.mean(zp))
    se_v = float(np.std(zp)) / math.sqrt(m)
    if v <= 0:
        return 0.0, se_v
    root = v ** (1.0 / p)
    return root, root / (p * v) * se_v


# ---------------------------------------------------------------------------
# variance-gap moments Q_p^(l)


@dataclass(frozen=True)
class QEstimate:
    layer: int
    p: int
    value: float
    stderr: float
    n_samples: int


def variance_gap_empirical(cfg: NetConfig, layer: int, p: int, m: int,
                           seed: int, kernel: KernelSequence, *,
                           input_index: int = 0,
                           max_elements: int = 2 ** 28) -> QEstimate:
    """Monte Carlo Q_p^(layer)(x) = E[|A_l - (K^(layer+1) - C_b)|^p] where
    A_l = C_W/n_l * sum_j sigma(z_j^(layer))^2 over m forward passes."""
    if p < 1:
        raise BoundError("p must be >= 1")
    if m < 1000:
        raise BoundError("m must be >= 1000 for a usable stderr")
    a = layer_mean_square_activity(cfg, layer, m, seed,
                                   input_index=input_index,
                                   max_elements=max_elements)
    target = kernel.variance(layer + 1, input_index) - cfg.c_b
    dev = np.abs(a - target) ** p
    return QEstimate(layer=layer, p=p, value=float(dev.mean()),
                     stderr=float(dev.std()) / math.sqrt(m), n_samples=m)


def _log_m_p(cfg: NetConfig, ell: int, p: int, input_index: int = 0) -> float:
    """log M_p^(ell)(x): the width-free envelope constant

        5^(2p) 2^(26p) (1+C_W)^(19p) (Lip+|sigma(0)|+1)^(36p)
        (1+||x||/sqrt(n0))^(24p) (2+C_b+1/C_b+1/C_b^2)^(12p)
        (1+E[W^(5p*2^(ell+1))]^(1/2^ell))^3.
    """
    if cfg.c_b == 0.0:
        raise BoundError("the variance-gap envelope requires C_b != 0")
    if cfg.act.lipschitz is None:
        raise BoundError(f"activation {cfg.act.kind!r} has no Lipschitz constant")
    order = 5 * p * 2 ** (ell + 1)
    if not _weight_moment_ok(cfg, order):
        raise BoundError(f"E[W^{order}] is not finite for {cfg.weights.kind!r}")
    norm = math.sqrt(cfg.input_sq_norm(input_index))
    cb = cfg.c_b
    lv = (2 * p * math.log(5.0)
          + 26 * p * math.log(2.0)
          + 19 * p * math.log1p(cfg.c_w)
          + 36 * p * math.log(cfg.act.lipschitz + abs(cfg.act.sigma0) + 1.0)
          + 24 * p * math.log1p(norm / math.sqrt(cfg.n0))
          + 12 * p * math.log(2.0 + cb + 1.0 / cb + 1.0 / cb ** 2)
          + 3.0 * float(np.logaddexp(0.0, cfg.weights.log_moment(order) / 2 ** ell)))
    return lv


def variance_gap_bound(cfg: NetConfig, layer: int, p: int, *,
                       k_rosenthal: float = K_ROSENTHAL_DEFAULT,
                       input_index: int = 0) -> BoundReport:
    """Fully explicit bound on Q_(2p)^(layer)(x) (log-space product)."""
    cons = _constants(k_rosenthal=k_rosenthal)
    bid = "variance_gap"
    if p < 1 or int(p) != p:
        raise BoundError("p must be an integer >= 1")
    if not 1 <= layer <= cfg.depth:
        raise BoundError(f"layer must be in 1..{cfg.depth}")
    ell = layer
    reasons = []
    if cfg.c_b == 0.0:
        reasons.append("requires C_b != 0")
    if cfg.act.lipschitz is None:
        reasons.append(f"activation {cfg.act.kind!r} has no Lipschitz constant")
    order = 5 * p * 2 ** (ell + 1)
    if not _weight_moment_ok(cfg, order):
        reasons.append(f"E[W^{order}] not finite for {cfg.weights.kind!r}")
    if reasons:
        return _fail(bid, "variance_gap", reasons, cons)
    lip = cfg.act.lipschitz
    q_big = 5 * 2 ** (ell + 1) * p
    plog_big = _p_over_log(q_big)
    w_root_big = cfg.weights.log_moment(q_big) / q_big
    log_m = _log_m_p(cfg, ell, p, input_index)
    width_sum = math.fsum(1.0 / float(cfg.widths[j] ** p) for j in range(ell))
    lip_core = 2.0 * cfg.c_w * lip * lip
    inner_mid = np.logaddexp(math.log(3.0) + 4 * (ell - 1) * p * math.log(2.0)
                             + 4 * p * math.log(p),
                             (12 * p + 3) * math.log(2.0))
    log_y = (_log(k_rosenthal) + _log(plog_big) + 0.5 * _log(cfg.c_w)
             + _log(lip) + w_root_big)
    factors = [
        _pf("envelope_power", ell * log_m),
        _vf("width_sum", width_sum),
        _pf("lipschitz_geometric",
            2 * ell * p * float(np.logaddexp(0.0, ell * _log(lip_core)))),
        _pf("depth_polynomial", (6 * ell * p + 16 * p) * math.log(ell + 1.0)),
        _pf("rosenthal_core",
            (4 * ell * p + 16 * p)
            * float(np.logaddexp(_log(4.0 * math.sqrt(5.0 * 2 ** ell * p)),
                                 _log(k_rosenthal) + _log(plog_big)))),
        _pf("central_constant",
            float(np.logaddexp(math.log(9.0), 2.0 * inner_mid))),
        _pf("tail",
            ell * float(np.logaddexp(math.log(41.0), 2 * (ell - 1) * log_y))),
    ]
    rep = _product_report(bid, "variance_gap", factors, cons,
                          extras={"layer": ell, "p": p, "q_order": 2 * p})
    return rep


# ---------------------------------------------------------------------------
# semi-empirical one-input distance bounds


def _q2_and_sigma_root(cfg, kernel, layer, p_sigma, mode, m, seed, k_rosenthal,
                       input_index):
    """Shared plumbing: (Q_2 value, Q_2 stderr, sigma-moment root, its stderr,
    notes dict). mode 'empirical' samples both; 'theoretical' uses the
    explicit envelopes."""
    notes = {"mode": mode}
    if mode == "empirical":
        qe = variance_gap_empirical(cfg, layer, 2, m, _child_seed(seed, 1),
                                    kernel, input_index=input_index)
        q2, q2_err = qe.value, qe.stderr
        z = forward_sample(_single(cfg, input_index), layer, m,
                           _child_seed(seed, 2)).values[:, 0]
        s_abs = np.abs(cfg.act.apply(z)) ** p_sigma
        mean_p = float(s_abs.mean())
        se_p = float(s_abs.std()) / math.sqrt(m)
        root = mean_p ** (1.0 / p_sigma) if mean_p > 0 else 0.0
        root_err = (root / (p_sigma * mean_p) * se_p) if mean_p > 0 else se_p
        notes.update(m=m, q2_samples=qe.n_samples)
        return q2, q2_err, root, root_err, notes
    if mode != "theoretical":
        raise BoundError(f"unknown mode {mode!r}")
    qrep = variance_gap_bound(cfg, layer, 1, k_rosenthal=k_rosenthal,
                              input_index=input_index)
    if not qrep.preconditions_ok:
        raise BoundError("; ".join(qrep.reasons))
    root = sigma_moment_root_bound(cfg, layer, p_sigma,
                                   k_rosenthal=k_rosenthal,
                                   input_index=input_index)
    return qrep.value, 0.0, root, 0.0, notes


def kolmogorov_semi_bound(cfg: NetConfig, kernel: KernelSequence, *,
                          mode: str = "empirical", m: int = 100_000,
                          seed: int = 0,
                          k_rosenthal: float = K_ROSENTHAL_DEFAULT,
                          input_index: int = 0) -> BoundReport:
    """Kolmogorov-distance bound with a variance-gap term and a 1/sqrt(n_L)
    interaction term:

        d_K <= sqrt(Q_2^(L))/K
               + C_W/(K sqrt(n_L)) E[W^6]^(1/2) (1 + E[|sigma(z^(L))|^6]^(1/2))
                 * (2 sqrt(C_W/K) + 2 sqrt(C_W)(sqrt(C_b/K) + sqrt(2 pi)/4) + 5/2),
        K = K^(L+1).
    """
    cons = _constants(k_rosenthal=k_rosenthal)
    bid = "kolmogorov_semi"
    L = cfg.depth
    k_var = kernel.variance(L + 1, input_index)
    reasons = []
    if k_var <= 0:
        reasons.append("limit variance K^(L+1) must be positive")
    if not _weight_moment_ok(cfg, 6):
        reasons.append(f"E[W^6] not finite for {cfg.weights.kind!r}")
    if reasons:
        return _fail(bid, "kolmogorov", reasons, cons)
    try:
        q2, q2_err, s_root, s_root_err, notes = _q2_and_sigma_root(
            cfg, kernel, L, 6, mode, m, seed, k_rosenthal, input_index)
    except BoundError as e:
        return _fail(bid, "kolmogorov", [str(e)], cons)
    s_half = s_root ** 3          # E[|sigma|^6]^(1/2)
    w6_half = math.exp(cfg.weights.log_moment(6) / 2)
    paren = (2.0 * math.sqrt(cfg.c_w / k_var)
             + 2.0 * math.sqrt(cfg.c_w) * (math.sqrt(cfg.c_b / k_var)
                                           + _SQRT_2PI / 4.0)
             + 2.5)
    t1 = math.sqrt(q2) / k_var
    scale2 = cfg.c_w / (k_var * math.sqrt(cfg.widths[L - 1])) * w6_half * paren
    t2 = scale2 * (1.0 + s_half)
    stat_error = 0.0
    if q2 > 0:
        stat_error += q2_err / (2.0 * math.sqrt(q2) * k_var)
    stat_error += scale2 * 3.0 * s_root ** 2 * s_root_err
    rep = _sum_report(bid, "kolmogorov",
                      [_af("variance_gap_term", t1),
                       _af("weight_interaction_term", t2)], cons,
                      extras={"q2": q2, "q2_stderr": q2_err,
                              "sigma6_root": s_root, "limit_variance": k_var,
                              "stat_error": stat_error, **notes})
    return rep


def wasserstein_semi_bound(cfg: NetConfig, kernel: KernelSequence, *,
                           mode: str = "empirical", m: int = 100_000,
                           seed: int = 0,
                           k_rosenthal: float = K_ROSENTHAL_DEFAULT,
                           input_index: int = 0) -> BoundReport:
    """Wasserstein-1 bound:

        W_1 <= C_W/(sqrt(n_L) sqrt(K)) E[W^4]^(3/4) (E[|sigma(z^(L))|^4]^(3/4)+1)
               * (4 sqrt(C_W)/sqrt(K) + 1/sqrt(2 pi))
               + sqrt(2/(K pi)) sqrt(Q_2^(L)).
    """
    cons = _constants(k_rosenthal=k_rosenthal)
    bid = "wasserstein_semi"
    L = cfg.depth
    k_var = kernel.variance(L + 1, input_index)
    reasons = []
    if k_var <= 0:
        reasons.append("limit variance K^(L+1) must be positive")
    if not _weight_moment_ok(cfg, 4):
        reasons.append(f"E[W^4] not finite for {cfg.weights.kind!r}")
    if reasons:
        return _fail(bid, "wasserstein", reasons, cons)
    try:
        q2, q2_err, s_root, s_root_err, notes = _q2_and_sigma_root(
            cfg, kernel, L, 4, mode, m, seed, k_rosenthal, input_index)
    except BoundError as e:
        return _fail(bid, "wasserstein", [str(e)], cons)
    s34 = s_root ** 3             # E[|sigma|^4]^(3/4)
    w4_34 = math.exp(0.75 * cfg.weights.log_moment(4))
    paren = 4.0 * math.sqrt(cfg.c_w) / math.sqrt(k_var) + 1.0 / _SQRT_2PI
    scale1 = (cfg.c_w / (math.sqrt(cfg.widths[L - 1]) * math.sqrt(k_var))
              * w4_34 * paren)
    t1 = scale1 * (s34 + 1.0)
    t2 = math.sqrt(2.0 / (k_var * math.pi)) * math.sqrt(q2)
    stat_error = scale1 * 3.0 * s_root ** 2 * s_root_err
    if q2 > 0:
        stat_error += math.sqrt(2.0 / (k_var * math.pi)) * q2_err / (2.0 * math.sqrt(q2))
    rep = _sum_report(bid, "wasserstein",
                      [_af("weight_interaction_term", t1),
                       _af("variance_gap_term", t2)], cons,
                      extras={"q2": q2, "q2_stderr": q2_err,
                              "sigma4_root": s_root, "limit_variance": k_var,
                              "stat_error": stat_error, **notes})
    return rep


# ---------------------------------------------------------------------------
# fully explicit one-input bound


def explicit_one_input_bound(cfg: NetConfig, *,
                             k_rosenthal: float = K_ROSENTHAL_DEFAULT,
                             input_index: int = 0) -> BoundReport:
    """Fully explicit bound on max{d_K, W_1} for one input:

        7 * 2^(4L+16) (1 + 1/C_b) M_1^(L)(x)^((L+1)/2) (sum 1/n_j)^(1/2)
        (1 + (2 C_W Lip^2)^L)^(L+1) L^(3L+11)
        (4 sqrt(5*2^L) + K * 5*2^(L+1)/log(5*2^(L+1)))^(2L+10)
        (8 + (6 K (5*2^(L+1)/log(5*2^(L+1))) sqrt(C_W) Lip E[W^q]^(1/q))^L)^(L/2+3)

    with q = 5*2^(L+1).
    """
    cons = _constants(k_rosenthal=k_rosenthal)
    bid = "explicit_one_input"
    L = cfg.depth
    q = 5 * 2 ** (L + 1)
    reasons = []
    if cfg.c_b <= 0:
        reasons.append("requires C_b > 0")
    if cfg.c_w <= 0:
        reasons.append("requires C_W > 0")
    if cfg.act.lipschitz is None:
        reasons.append(f"activation {cfg.act.kind!r} has no Lipschitz constant")
    if not _weight_moment_ok(cfg, q):
        reasons.append(f"E[W^{q}] not finite for {cfg.weights.kind!r}")
    if reasons:
        return _fail(bid, "max_kw", reasons, cons)
    lip = cfg.act.lipschitz
    plog = _p_over_log(q)
    w_root = cfg.weights.log_moment(q) / q
    log_m1 = _log_m_p(cfg, L, 1, input_index)
    width_sum = math.fsum(1.0 / n for n in cfg.widths[:L])
    tail_base = (_log(6.0 * k_rosenthal * plog) + 0.5 * _log(cfg.c_w)
                 + _log(lip) + w_root)
    factors = [
        _pf("prefactor", _log(7.0) + (4 * L + 16) * math.log(2.0)),
        _pf("bias_term", _log(1.0 + 1.0 / cfg.c_b)),
        _pf("envelope_power", (L + 1) / 2.0 * log_m1),
        _vf("width_sum_sqrt", math.sqrt(width_sum)),
        _pf("lipschitz_geometric",
            (L + 1) * float(np.logaddexp(0.0, L * _log(2.0 * cfg.c_w * lip * lip)))),
        _pf("depth_polynomial", (3 * L + 11) * math.log(float(L))
            if L > 1 else 0.0),
        _pf("rosenthal_core",
            (2 * L + 10) * float(np.logaddexp(
                _log(4.0 * math.sqrt(5.0 * 2 ** L)),
                _log(k_rosenthal * plog)))),
        _pf("tail",
            (L / 2.0 + 3.0) * float(np.logaddexp(math.log(8.0), L * tail_base))),
    ]
    return _product_report(bid, "max_kw", factors, cons,
                           extras={"moment_order": q})


# ---------------------------------------------------------------------------
# multi-input explicit convex-distance bound


def _sigma_prime_logs(cfg, kernel, upto_layer, gh_nodes=64):
    """log E[sigma'(G^(q)(x^k))]^2 for q = 2..upto_layer, k = 0..d-1.

    Returns (array of shape (upto_layer-1, d), list of failures)."""
    d = cfg.n_inputs
    out = np.zeros((max(0, upto_layer - 1), d))
    fails = []
    for q in range(2, upto_layer + 1):
        for k in range(d):
            val = expected_sigma_prime(cfg.act, kernel.variance(q, k),
                                       gh_nodes=gh_nodes)
            if abs(val) < 1e-12:
                fails.append(f"E[sigma'(G^({q})(x^{k}))] = {val:.2e} ~ 0")
                continue
            out[q - 2, k] = 2.0 * math.log(abs(val))
    return out, fails


def explicit_multi_input_bound(cfg: NetConfig, kernel: KernelSequence, *,
                               k_rosenthal: float = K_ROSENTHAL_DEFAULT,
                               c_universal: float = C_UNIVERSAL_DEFAULT,
                               gh_nodes: int = 64) -> BoundReport:
    """Fully explicit bound on the convex distance for d >= 2 distinct inputs.

    The final factor's nested exclusion sums (over injective index tuples)
    collapse algebraically: the summand depends only on the index value, so
    the iterated sum equals d! times the full product over inputs, and

        1 + d! lambda(K^(2))^(-2d) sum_l prod_i (sum_{k_i} prod_r E^2)^(-1)
      = 1 + lambda(K^(2))^(-2d)
            sum_{l=2}^{L+1} prod_{k=1}^{d} prod_{r=1}^{l-2}
                E[sigma'(G^(l-r)(x^(k)))]^(-2).
    """
    cons = _constants(k_rosenthal=k_rosenthal, c_universal=c_universal)
    bid = "explicit_multi_input"
    L, d = cfg.depth, cfg.n_inputs
    q = 5 * 2 ** (L + 1)
    q_pre = 5 * 2 ** (L + 2)
    reasons = []
    if d < 2:
        reasons.append("requires at least two distinct inputs")
    if cfg.c_b <= 0 or cfg.c_w <= 0:
        reasons.append("requires C_b > 0 and C_W > 0")
    if cfg.act.lipschitz is None:
        reasons.append(f"activation {cfg.act.kind!r} has no Lipschitz constant")
    if not cfg.act.has_derivative and cfg.act.kind not in ("identity", "relu"):
        reasons.append(f"activation {cfg.act.kind!r} admits no derivative factor")
    if not _weight_moment_ok(cfg, q_pre):
        reasons.append(f"E[W^{q_pre}] not finite for {cfg.weights.kind!r}")
    if reasons:
        return _fail(bid, "convex", reasons, cons)
    k2 = kernel.matrix(2)
    lam = float(np.linalg.eigvalsh(k2).min())
    if lam <= 0 or not np.isfinite(np.linalg.det(k2)) or abs(np.linalg.det(k2)) < 1e-300:
        return _fail(bid, "convex", ["det K^(2) vanishes"], cons)
    sp_logs, fails = _sigma_prime_logs(cfg, kernel, L, gh_nodes)
    if fails:
        return _fail(bid, "convex", fails, cons)

    # last factor: 1 + lam^(-2d) sum_l exp(-sum_k sum_r log E^2)
    acc = -math.inf
    for ell in range(2, L + 2):
        s = -2.0 * d * math.log(lam)
        for r in range(1, ell - 1):
            s -= float(np.sum(sp_logs[ell - r - 2, :]))
        acc = float(np.logaddexp(acc, s))
    log_last = float(np.logaddexp(0.0, acc))

    lip = cfg.act.lipschitz
    plog = _p_over_log(q)
    w_root = cfg.weights.log_moment(q) / q
    x = cfg.input_array()
    width_sum = math.fsum(1.0 / n for n in cfg.widths[:L])
    inputs_poly = 9.0 * d + float(np.sum(np.sum(x ** 2, axis=1) ** 2)) / cfg.n0 ** 2
    m2_terms = []
    for i in range(d):
        m2_terms.append(float(np.logaddexp(
            0.0, (L / 2.0 + 2.0) * _log_m_p(cfg, L, 2, i))))
    log_m2_sum = float(m2_terms[0]) if d == 1 else _logsumexp(m2_terms)
    tail_base = _log(k_rosenthal * plog) + 0.5 * _log(cfg.c_w) + _log(lip) + w_root
    factors = [
        _pf("universal_constant", _log(c_universal)),
        _pf("input_count", (d + 6) * math.log(float(d))),
        _pf("depth_polynomial", (3 * L + d + 20) * math.log(L + 1.0)),
        _vf("width_sum_sqrt", math.sqrt(width_sum)),
        _pf("cw_polynomial",
            (4 * d + d * L - 4) * _log(1.0 + cfg.c_w + 1.0 / cfg.c_w)),
        _pf("cb_polynomial", (2 * d - 2) * math.log1p(cfg.c_b)),
        _pf("sigma_origin", 4.0 * math.log1p(abs(cfg.act.sigma0))),
        _pf("inputs_polynomial", (d - 1) * _log(inputs_poly)),
        _pf("lipschitz_geometric",
            (L + d) * float(np.logaddexp(math.log(2.0),
                                         2 * L * _log(2.0 * cfg.c_w * lip * lip)))),
        _pf("rosenthal_tail",
            (L / 2.0 + 24.0) * float(np.logaddexp(math.log(2.0),
                                                  (L - 1) * tail_base))),
        _pf("envelope_sum", log_m2_sum),
        _pf("two_power", 4 * L * math.log(2.0)),
        _pf("rosenthal_core",
            (2 * L + 8) * float(np.logaddexp(
                _log(4.0 * math.sqrt(5.0 * 2 ** L)),
                _log(k_rosenthal * plog)))),
        _pf("eigen_term", log_last),
    ]
    return _product_report(bid, "convex", factors, cons,
                           extras={"lambda_k2": lam, "moment_order": q_pre})


def _logsumexp(vals):
    arr = np.asarray(vals, dtype=np.float64)
    hi = float(arr.max())
    if hi == -math.inf:
        return -math.inf
    return hi + math.log(float(np.sum(np.exp(arr - hi))))


# ---------------------------------------------------------------------------
# semi-empirical multi-input convex-distance bound


def _conditional_second_moment_matrix(cfg, acts, kernel, m_inner, rng, gh_nodes):
    """E[sigma(z^(L)_i) sigma(z^(L)_j) | F_(L-1)] for each outer draw.

    acts: (m, n, d) activations of layer L-1.  Gaussian weights: the
    conditional law is N(0, C_b + C_W/n * a'a) and the expectation is a
    bivariate Gaussian moment.  Otherwise: nested Monte Carlo with m_inner
    weight rows.
    """
    m, n, d = acts.shape
    out = np.empty((m, d, d))
    if cfg.weights.kind == "gaussian":
        grams = cfg.c_b + (cfg.c_w / n) * np.einsum("cnd,cne->cde", acts, acts)
        for c in range(m):
            for i in range(d):
                for j in range(i, d):
                    mom = bivariate_sigma_moment(
                        cfg.act, grams[c][np.ix_([i, j], [i, j])],
                        gh_nodes=gh_nodes)
                    out[c, i, j] = out[c, j, i] = mom.value
        return out
    scale = math.sqrt(cfg.c_w / n)
    for c in range(m):
        w = cfg.weights.sample(rng, (m_inner, n))
        z = scale * (w @ acts[c])
        if cfg.c_b > 0:
            z += math.sqrt(cfg.c_b) * rng.standard_normal((m_inner, 1))
        s = cfg.act.apply(z)
        out[c] = (s.T @ s) / m_inner
    return out


def convex_semi_bound(cfg: NetConfig, kernel: KernelSequence, *,
                      m_outer: int = 256, m_stat: int = 65_536,
                      m_ref: int = 131_072, m_inner: int = 4096,
                      seed: int = 0, gh_nodes: int = 64,
                      stats: dict = None) -> BoundReport:
    """Semi-empirical convex-distance bound:

        d_C <= 541 d^4 sqrt(C_W)(1+C_W) max{1, ||K^(L+1)^(-1)||_op^2}
               E[|W|^6]^(1/2) / sqrt(n_L)
               * {43 (1 + E[||sigma(z^(L))||^6]^(1/2) + E[||sigma(G^(L))||^4]^(1/2))
                  + sqrt(2) sqrt(n_L) (sum_jk E[B_L(x^j,x^k)^2])^(1/2)}

    where B_L is the gap between the conditional second-moment matrix of the
    last hidden layer and its infinite-width limit.

    ``stats`` may inject precomputed statistics (keys ``b_sum``,
    ``sigma6_z``, ``sigma4_g``, optional ``b_stderr``/``sigma6_z_stderr``)
    to share samples with other estimates; missing keys are sampled here.
    """
    cons = _constants()
    bid = "convex_semi"
    L, d = cfg.depth, cfg.n_inputs
    reasons = []
    if not _weight_moment_ok(cfg, 6):
        reasons.append(f"E[|W|^6] not finite for {cfg.weights.kind!r}")
    k_mat = kernel.matrix(L + 1)
    eig_min = float(np.linalg.eigvalsh(k_mat).min())
    if eig_min <= 0:
        reasons.append("K^(L+1) is singular")
    if reasons:
        return _fail(bid, "convex", reasons, cons)
    n_last = cfg.widths[L - 1]
    op_sq = max(1.0, (1.0 / eig_min) ** 2)
    w6_half = math.exp(cfg.weights.log_moment(6) / 2)
    stats = dict(stats or {})

    if "sigma6_z" in stats:
        s6z = float(stats["sigma6_z"])
        s6z_err = float(stats.get("sigma6_z_stderr", 0.0))
    else:
        z = forward_sample(cfg, L, m_stat, _child_seed(seed, 3)).values  # (m, d)
        s = cfg.act.apply(z)
        norm_sq = np.sum(s * s, axis=1)
        v6 = float(np.mean(norm_sq ** 3))
        s6z = math.sqrt(v6)
        s6z_err = float(np.std(norm_sq ** 3)) / math.sqrt(m_stat) / (2.0 * max(s6z, 1e-300))

    if "sigma4_g" in stats:
        s4g = float(stats["sigma4_g"])
    else:
        rng_ref = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x47,)))
        cov_l = kernel.matrix(L) if L >= 2 else kernel.first_layer_cov
        chol = np.linalg.cholesky(cov_l + 1e-12 * np.trace(cov_l) / d * np.eye(d))
        g = rng_ref.standard_normal((m_ref, d)) @ chol.T
        sg = cfg.act.apply(g)
        ng = np.sum(sg * sg, axis=1)
        s4g = math.sqrt(float(np.mean(ng ** 2)))

    if "b_sum" in stats:
        b_sum = float(stats["b_sum"])
        b_err = float(stats.get("b_stderr", 0.0))
    else:
        ref = (np.asarray(k_mat) - cfg.c_b) / cfg.c_w
        rng_b = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x42,)))
        if L == 1:
            if cfg.weights.kind == "gaussian":
                b_sum, b_err = 0.0, 0.0
            else:
                z1 = forward_sample(cfg, 1, m_stat, _child_seed(seed, 4)).values
                s1 = cfg.act.apply(z1)
                prods = s1[:, :, None] * s1[:, None, :]
                gap = prods.mean(axis=0) - ref
                b_sum = float(np.sum(gap ** 2))
                b_err = float(np.sum(2.0 * np.abs(gap)
                                     * prods.std(axis=0) / math.sqrt(m_stat)))
        else:
            acts = cfg.act.apply(
                forward_sample_full(cfg, L - 1, m_outer, _child_seed(seed, 5)))
            cond = _conditional_second_moment_matrix(cfg, acts, kernel, m_inner,
                                                     rng_b, gh_nodes)
            b_sq = np.sum((cond - ref[None, :, :]) ** 2, axis=(1, 2))
            b_sum = float(b_sq.mean())
            b_err = float(b_sq.std()) / math.sqrt(m_outer)

    brace = (43.0 * (1.0 + s6z + s4g)
             + math.sqrt(2.0) * math.sqrt(n_last) * math.sqrt(b_sum))
    factors = [
        _pf("prefactor", _log(541.0) + 4 * math.log(float(d))
            + 0.5 * _log(cfg.c_w) + math.log1p(cfg.c_w)),
        _pf("op_norm_sq", _log(op_sq)),
        _pf("weight_sixth", _log(w6_half)),
        _vf("width", 1.0 / math.sqrt(float(n_last))),
        _vf("brace", brace),
    ]
    rep = _product_report(bid, "convex", factors, cons)
    scale = rep.value / brace if brace > 0 else 0.0
    b_term_err = (math.sqrt(2.0 * n_last) * b_err / (2.0 * math.sqrt(b_sum))
                  if b_sum > 0 else 0.0)
    rep.extras.update({
        "sigma6_z": s6z, "sigma4_g": s4g, "b_sum": b_sum, "b_stderr": b_err,
        "m_outer": m_outer, "m_stat": m_stat,
        "stat_error": scale * (43.0 * s6z_err + b_term_err),
        "min_eig_last": eig_min,
    })
    return rep


# ---------------------------------------------------------------------------
# determinant / eigenvalue lower bounds for the limit covariances


def determinant_lower_bound(cfg: NetConfig, kernel: KernelSequence,
                            layer: int, *, gh_nodes: int = 64) -> float:
    """Lower bound on det(K^(layer) - C_b * ones):

        C_W^(d(layer-2)) lambda(K^(2))^d
        * prod_{k=1}^{d} prod_{r=1}^{layer-2} E[sigma'(G^(layer-r)(x^(k)))]^2.

    (The nested exclusion sums over injective index tuples collapse to d!
    times this product, cancelling the 1/d! prefactor.)
    """
    if layer < 3:
        raise BoundError("determinant bound starts at layer 3")
    if layer > cfg.depth + 1:
        raise BoundError(f"layer must be <= {cfg.depth + 1}")
    if cfg.act.kind == "perceptron":
        raise BoundError("unit-step activation admits no derivative factor")
    d = cfg.n_inputs
    lam = float(np.linalg.eigvalsh(kernel.matrix(2)).min())
    if lam < 0:
        lam = 0.0
    log_val = d * (layer - 2) * _log(cfg.c_w) + d * _log(lam)
    for k in range(d):
        for r in range(1, layer - 1):
            e = expected_sigma_prime(cfg.act, kernel.variance(layer - r, k),
                                     gh_nodes=gh_nodes)
            log_val += 2.0 * _log(abs(e))
    return _exp(log_val)


def eigenvalue_lower_bound(cfg: NetConfig, kernel: KernelSequence,
                           layer: int, *, gh_nodes: int = 64) -> float:
    """Lower bound on the smallest eigenvalue of K^(layer):

        lambda(K^(layer)) >= lambda(Khat) >= det(Khat) / tr(Khat)^(d-1),
        Khat = K^(layer) - C_b * ones.
    """
    det_lb = determinant_lower_bound(cfg, kernel, layer, gh_nodes=gh_nodes)
    d = cfg.n_inputs
    if d == 1:
        return det_lb
    khat = kernel.matrix(layer) - cfg.c_b
    tr = float(np.trace(khat))
    if tr <= 0:
        return 0.0
    return det_lb / tr ** (d - 1)


# ---------------------------------------------------------------------------
# special-case displays


def _width_sum_sqrt(cfg: NetConfig) -> float:
    return math.sqrt(math.fsum(1.0 / n for n in cfg.widths[: cfg.depth]))


def perceptron_kolmogorov_bound(cfg: NetConfig, kernel=None) -> BoundReport:
    """Unit-step activation, Gaussian weights: d_K bound with limit variance
    K = C_b + C_W/2, decaying as 1/sqrt(n_L)."""
    bid = "perceptron_kolmogorov"
    reasons = _match(cfg, act="perceptron", weights="gaussian")
    if reasons:
        return _fail(bid, "kolmogorov", reasons, {})
    k = cfg.c_b + cfg.c_w / 2.0
    sk = math.sqrt(k)
    n_last = cfg.widths[cfg.depth - 1]
    scw = math.sqrt(cfg.c_w)
    paren = (2.0 * scw / sk + 2.0 * scw * (scw / sk + _SQRT_2PI / 4.0) + 3.5)
    factors = [_pf("prefactor", _log(8.0 * cfg.c_w / k)),
               _vf("width", 1.0 / math.sqrt(float(n_last))),
               _pf("paren", _log(paren))]
    return _product_report(bid, "kolmogorov", factors, {},
                           extras={"limit_variance": k})


def perceptron_wasserstein_bound(cfg: NetConfig, kernel=None) -> BoundReport:
    bid = "perceptron_wasserstein"
    reasons = _match(cfg, act="perceptron", weights="gaussian")
    if reasons:
        return _fail(bid, "wasserstein", reasons, {})
    k = cfg.c_b + cfg.c_w / 2.0
    sk = math.sqrt(k)
    n_last = cfg.widths[cfg.depth - 1]
    paren = 3.0 * math.sqrt(cfg.c_w) / sk + 1.0 / _SQRT_2PI
    factors = [_pf("prefactor", _log(6.0 * cfg.c_w / sk)),
               _vf("width", 1.0 / math.sqrt(float(n_last))),
               _pf("paren", _log(paren))]
    return _product_report(bid, "wasserstein", factors, {},
                           extras={"limit_variance": k})


def identity_kolmogorov_bound(cfg: NetConfig, kernel=None) -> BoundReport:
    """Identity activation, Gaussian weights, critical setting C_b=0, C_W=1."""
    bid = "identity_kolmogorov"
    reasons = _match(cfg, act="identity", weights="gaussian", c_b=0.0, c_w=1.0)
    if reasons:
        return _fail(bid, "kolmogorov", reasons, {})
    norm_sq = cfg.input_sq_norm(0)
    norm = math.sqrt(norm_sq)
    core = (2.0 * cfg.n0 / norm_sq + 5.0 * math.sqrt(cfg.n0) / norm
            + math.sqrt(15.0) * norm_sq + 1.0)
    factors = [_pf("prefactor", _log(2.0 * math.sqrt(15.0))),
               _pf("core_squared", 2.0 * _log(core)),
               _vf("width_sum_sqrt", _width_sum_sqrt(cfg))]
    return _product_report(bid, "kolmogorov", factors, {})


def identity_wasserstein_bound(cfg: NetConfig, kernel=None) -> BoundReport:
    bid = "identity_wasserstein"
    reasons = _match(cfg, act="identity", weights="gaussian", c_b=0.0, c_w=1.0)
    if reasons:
        return _fail(bid, "wasserstein", reasons, {})
    norm_sq = cfg.input_sq_norm(0)
    norm = math.sqrt(norm_sq)
    rt_n0 = math.sqrt(cfg.n0)
    f1 = 1.0 + rt_n0 / norm + 3.0 * norm_sq
    f2 = 4.0 * rt_n0 / norm + norm / rt_n0 + 1.0
    factors = [_pf("prefactor", _log(4.0)),
               _pf("first_paren", _log(f1)),
               _pf("second_paren", _log(f2)),
               _vf("width_sum_sqrt", _width_sum_sqrt(cfg))]
    return _product_report(bid, "wasserstein", factors, {})


def relu_kolmogorov_bound(cfg: NetConfig, kernel=None) -> BoundReport:
    """Relu activation, Gaussian weights, C_b = 0."""
    bid = "relu_kolmogorov"
    reasons = _match(cfg, act="relu", weights="gaussian", c_b=0.0)
    if reasons:
        return _fail(bid, "kolmogorov", reasons, {})
    L = cfg.depth
    half = cfg.c_w / 2.0
    norm = math.sqrt(cfg.input_sq_norm(0))
    paren = (7.0 + 2.0 * half ** (L - 1)
             + math.sqrt(5.0 * math.pi) * norm / math.sqrt(cfg.n0)
             * half ** ((L + 1) / 2.0))
    factors = [_pf("prefactor", _log(3.0 * math.sqrt(5.0))),
               _vf("width_sum_sqrt", _width_sum_sqrt(cfg)),
               _pf("paren", _log(paren))]
    return _product_report(bid, "kolmogorov", factors, {})


def relu_wasserstein_bound(cfg: NetConfig, kernel=None) -> BoundReport:
    """Relu, Gaussian weights, C_b = 0.  Bounds the NORMALIZED Wasserstein
    distance W_1(z/sqrt(K), G/sqrt(K)) (the Kolmogorov distance is scale
    free; W_1 is not)."""
    bid = "relu_wasserstein"
    reasons = _match(cfg, act="relu", weights="gaussian", c_b=0.0)
    if reasons:
        return _fail(bid, "wasserstein_normalized", reasons, {})
    L = cfg.depth
    half = cfg.c_w / 2.0
    factors = [_pf("prefactor", _log(8.0)),
               _pf("depth_paren", _log(1.0 + half ** (L - 1))),
               _vf("width_sum_sqrt", _width_sum_sqrt(cfg))]
    return _product_report(bid, "wasserstein_normalized", factors, {},
                           extras={"normalized": True})


def bounded_lipschitz_bound(cfg: NetConfig, kernel=None) -> BoundReport:
    """Bounded Lipschitz activation, C_b > 0: three additive terms with the
    geometric depth factor (6 C_W / (pi C_b))^(L+1-k).

    E[|W|^3] is evaluated through the even-moment bracket
    E[|W|^3] <= E[W^4]^(3/4) so the result stays a true upper bound for all
    symmetric laws."""
    bid = "bounded_lipschitz"
    cons = {}
    reasons = []
    if not cfg.act.is_bounded:
        reasons.append(f"activation {cfg.act.kind!r} is not bounded")
    if cfg.act.lipschitz is None:
        reasons.append(f"activation {cfg.act.kind!r} is not Lipschitz")
    if cfg.c_b <= 0:
        reasons.append("requires C_b > 0")
    if not _weight_moment_ok(cfg, 6):
        reasons.append(f"E[W^6] not finite for {cfg.weights.kind!r}")
    if reasons:
        return _fail(bid, "max_kw", reasons, cons)
    L = cfg.depth
    sup = cfg.act.sup_norm
    cb, cw = cfg.c_b, cfg.c_w
    n_last = cfg.widths[L - 1]
    w6_half = math.exp(cfg.weights.log_moment(6) / 2)
    w4_half = math.exp(cfg.weights.log_moment(4) / 2)
    w3_abs = cfg.weights.abs_moment(3)
    ratio = 6.0 * cw / (math.pi * cb)
    t1 = (cw * (1.0 + math.sqrt(cw)) / math.sqrt(n_last)
          * (2.0 + 1.0 / cb) ** 2 * (8.0 + 2.0 * math.sqrt(cb))
          * (sup ** 3 + 1.0) * w6_half)
    mid = (2.0 + 4.0 * math.sqrt(3.0) * sup ** 4 * cw ** 1.5 * w3_abs / cb
           + math.sqrt(6.0 * math.pi) * cw * w4_half / (2.0 * math.pi * math.sqrt(cb)))
    geo_sum = math.fsum(cw ** 2 * sup ** 4 / cfg.widths[k - 2]
                        * ratio ** (L + 1 - k) for k in range(2, L + 2))
    t2 = (1.0 + 1.0 / cb) * mid * math.sqrt(geo_sum)
    t3 = ((1.0 + 1.0 / cb) * 2.0 * cw * sup ** 2 / math.sqrt(cfg.widths[0])
          * ratio ** (L / 2.0))
    return _sum_report(bid, "max_kw",
                       [_af("last_layer_term", t1),
                        _af("variance_gap_sum_term", t2),
                        _af("first_layer_term", t3)], cons,
                       extras={"geometric_ratio": ratio})


def identity_multi_input_bound(cfg: NetConfig, kernel: KernelSequence, *,
                               c_universal: float = C_UNIVERSAL_DEFAULT) -> BoundReport:
    """Identity activation, d >= 2 inputs, any weight law with E[W^6] finite
    and det K^(2) != 0: convex-distance bound

        C d^4 sqrt(d) (d + sum ||x^i||^2/n0 + 2 sum_i sqrt(sum_j (|x^i_j|^6+|x^i_j|^4)/n0))
        sqrt(C_W)(1+C_W)(1 + C_b + L C_b(1+C_b)) E[W^6]^(1/2)
        max{1, 1/(C_W^(2(L-1)) lambda(K^(2))^2)} sqrt(sum_j 1/n_j)
        (108 max{1,C_W}^2 E[W^6]^(1/2))^(L+1).
    """
    bid = "identity_multi_input"
    cons = _constants(c_universal=c_universal)
    reasons = []
    if cfg.act.kind != "identity":
        reasons.append("requires identity activation")
    if cfg.n_inputs < 2:
        reasons.append("requires at least two inputs")
    if not _weight_moment_ok(cfg, 6):
        reasons.append(f"E[W^6] not finite for {cfg.weights.kind!r}")
    lam = float(np.linalg.eigvalsh(kernel.matrix(2)).min()) if not reasons else 0.0
    if not reasons and lam <= 0:
        reasons.append("det K^(2) vanishes")
    if reasons:
        return _fail(bid, "convex", reasons, cons)
    L, d = cfg.depth, cfg.n_inputs
    x = cfg.input_array()
    w6_half = math.exp(cfg.weights.log_moment(6) / 2)
    input_term = (d + float(np.sum(x ** 2)) / cfg.n0
                  + 2.0 * float(np.sum(np.sqrt(
                      np.sum(np.abs(x) ** 6 + x ** 4, axis=1) / cfg.n0))))
    cw_gap = max(1.0, 1.0 / (cfg.c_w ** (2 * (L - 1)) * lam ** 2))
    width_sum = math.fsum(1.0 / n for n in cfg.widths[:L])
    factors = [
        _pf("universal_constant", _log(c_universal)),
        _pf("input_count", 4.5 * math.log(float(d))),
        _pf("inputs_polynomial", _log(input_term)),
        _pf("cw_prefactor", 0.5 * _log(cfg.c_w) + math.log1p(cfg.c_w)),
        _pf("depth_bias", _log(1.0 + cfg.c_b + L * cfg.c_b * (1.0 + cfg.c_b))),
        _pf("weight_sixth", _log(w6_half)),
        _pf("eigen_gap", _log(cw_gap)),
        _vf("width_sum_sqrt", math.sqrt(width_sum)),
        _pf("geometric",
            (L + 1) * (_log(108.0) + 2.0 * _log(max(1.0, cfg.c_w)) + _log(w6_half))),
    ]
    return _product_report(bid, "convex", factors, cons,
                           extras={"lambda_k2": lam})


def _match(cfg: NetConfig, act=None, weights=None, c_b=None, c_w=None):
    reasons = []
    if act is not None and cfg.act.kind != act:
        reasons.append(f"requires {act} activation (got {cfg.act.kind})")
    if weights is not None and cfg.weights.kind != weights:
        reasons.append(f"requires {weights} weights (got {cfg.weights.kind})")
    if c_b is not None and cfg.c_b != c_b:
        reasons.append(f"requires C_b = {c_b} (got {cfg.c_b})")
    if c_w is not None and cfg.c_w != c_w:
        reasons.append(f"requires C_W = {c_w} (got {cfg.c_w})")
    return reasons


def special_case_bounds(cfg: NetConfig, kernel: KernelSequence = None, *,
                        c_universal: float = C_UNIVERSAL_DEFAULT) -> dict:
    """All special-case displays applicable to cfg, keyed by bound id.
    Raises BoundError when none matches."""
    candidates = {
        "perceptron_kolmogorov": perceptron_kolmogorov_bound(cfg),
        "perceptron_wasserstein": perceptron_wasserstein_bound(cfg),
        "identity_kolmogorov": identity_kolmogorov_bound(cfg),
        "identity_wasserstein": identity_wasserstein_bound(cfg),
        "relu_kolmogorov": relu_kolmogorov_bound(cfg),
        "relu_wasserstein": relu_wasserstein_bound(cfg),
        "bounded_lipschitz": bounded_lipschitz_bound(cfg),
    }
    if kernel is not None:
        candidates["identity_multi_input"] = identity_multi_input_bound(
            cfg, kernel, c_universal=c_universal)
    out = {k: v for k, v in candidates.items() if v.preconditions_ok}
    if not out:
        raise BoundError(
            "no special-case bound matches this configuration: "
            + "; ".join(f"{k}: {', '.join(v.reasons)}"
                        for k, v in candidates.items()))
    return out


# ---------------------------------------------------------------------------
# depth schedule


def depth_for_width(n: int, epsilon: float) -> int:
    """Depth keeping the explicit bound vanishing at width n:
    floor(((1/2 - epsilon) log2 n)^(1/3)), clamped to >= 1."""
    if not 0.0 < epsilon < 0.5:
        raise BoundError("epsilon must be in (0, 1/2)")
    if n < 2:
        raise BoundError("n must be >= 2")
    return max(1, int(math.floor(((0.5 - epsilon) * math.log2(n)) ** (1.0 / 3.0))))


# ---------------------------------------------------------------------------
# dispatch


BOUND_IDS = (
    "kolmogorov_semi", "wasserstein_semi", "explicit_one_input",
    "explicit_multi_input", "convex_semi", "perceptron_kolmogorov",
    "perceptron_wasserstein", "identity_kolmogorov", "identity_wasserstein",
    "relu_kolmogorov", "relu_wasserstein", "bounded_lipschitz",
    "identity_multi_input",
)


def evaluate_bound(bound_id: str, cfg: NetConfig,
                   kernel: KernelSequence = None, *,
                   mode: str = "empirical", m: int = 100_000, seed: int = 0,
                   k_rosenthal: float = K_ROSENTHAL_DEFAULT,
                   c_universal: float = C_UNIVERSAL_DEFAULT,
                   **kwargs) -> BoundReport:
    """Evaluate one bound by id.  Semi-empirical ids require ``kernel``."""
    needs_kernel = bound_id in ("kolmogorov_semi", "wasserstein_semi",
                                "explicit_multi_input", "convex_semi",
                                "identity_multi_input")
    if needs_kernel and kernel is None:
        raise BoundError(f"bound {bound_id!r} requires a kernel sequence")
    if bound_id == "kolmogorov_semi":
        return kolmogorov_semi_bound(cfg, kernel, mode=mode, m=m, seed=seed,
                                     k_rosenthal=k_rosenthal, **kwargs)
    if bound_id == "wasserstein_semi":
        return wasserstein_semi_bound(cfg, kernel, mode=mode, m=m, seed=seed,
                                      k_rosenthal=k_rosenthal, **kwargs)
    if bound_id == "explicit_one_input":
        return explicit_one_input_bound(cfg, k_rosenthal=k_rosenthal, **kwargs)
    if bound_id == "explicit_multi_input":
        return explicit_multi_input_bound(cfg, kernel, k_rosenthal=k_rosenthal,
                                          c_universal=c_universal, **kwargs)
    if bound_id == "convex_semi":
        return convex_semi_bound(cfg, kernel, seed=seed, **kwargs)
    if bound_id == "identity_multi_input":
        return identity_multi_input_bound(cfg, kernel,
                                          c_universal=c_universal)
    simple = {
        "perceptron_kolmogorov": perceptron_kolmogorov_bound,
        "perceptron_wasserstein": perceptron_wasserstein_bound,
        "identity_kolmogorov": identity_kolmogorov_bound,
        "identity_wasserstein": identity_wasserstein_bound,
        "relu_kolmogorov": relu_kolmogorov_bound,
        "relu_wasserstein": relu_wasserstein_bound,
        "bounded_lipschitz": bounded_lipschitz_bound,
    }
    if bound_id in simple:
        return simple[bound_id](cfg, kernel)
    raise BoundError(f"unknown bound id {bound_id!r}; known: {', '.join(BOUND_IDS)}")
