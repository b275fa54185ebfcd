"""Exact finite-width samplers for the random network's pre-activations.

``forward_sample(cfg, layer, m, seed)`` returns m independent draws of the
first neuron of the requested layer, evaluated jointly at all configured
inputs (an (m, d) array): each draw realizes one random network and pushes
every input through it.

Reproducibility: the batch is a pure function of (cfg, layer, m, seed,
stream_count).  Draws are partitioned into ``stream_count`` contiguous
substreams, each driven by a generator derived via
``SeedSequence(seed, spawn_key=(stream,))``, so partitions can be produced
independently (e.g. by parallel workers) and concatenated in stream order
with bit-identical results.

Sampling paths
--------------
The dense path materializes every hidden layer (fresh i.i.d. weights per
draw).  Three distribution-preserving reductions replace it when the law of
the output admits a low-dimensional sufficient statistic; each is an exact
identity in law (unit-tested against the dense path):

* Gaussian weights, one input, activation in {identity, relu, perceptron}:
  conditionally on layer l the next layer's neurons are i.i.d.
  N(0, v_{l+1}) with v_{l+1} = C_b + (C_W/n_l) * S_l, and S_l given v_l is

      identity:    v_l * chi2(n_l)
      relu:        v_l * chi2(R),  R ~ Binomial(n_l, 1/2)
      perceptron:  Binomial(n_l, 1/2)            (count of nonnegative cells)

  so the whole network collapses to a scalar variance chain.

* Gaussian weights, identity activation, several inputs: the same collapse on
  the conditional d x d covariance, whose Gram update is a Wishart draw
  (Bartlett construction).

* Rademacher weights, identity activation, C_b = 0, one input, at most three
  hidden layers below the target: sign-flip invariance turns each outer
  matrix-vector product into sums of independent signs, which are Binomial
  counts; e.g. for a target four layers up the output equals
  scale * sum_j V_j Y_j with V_j iid 2*Bin(n_3,1/2)-n_3 and Y_j iid
  2*Bin(n_1,1/2)-n_1 scaled (single-coordinate input).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .config import NetConfig, config_to_json, config_from_json

__all__ = ["SampleBatch", "forward_sample", "forward_sample_full",
           "layer_mean_square_activity", "sampling_path"]

# soft cap on elements materialized per dense chunk
_CHUNK_ELEMS = 2 ** 25


@dataclass
class SampleBatch:
    """m draws of the first neuron of one layer at all configured inputs."""
    layer: int
    values: np.ndarray  # (m, d)
    seed: int
    stream_count: int
    path: str
    cfg: NetConfig

    @property
    def m(self) -> int:
        return self.values.shape[0]

    def column(self, i: int = 0) -> np.ndarray:
        return self.values[:, i]

    def save(self, path) -> None:
        meta = {"layer": self.layer, "seed": self.seed,
                "stream_count": self.stream_count, "path": self.path,
                "cfg": json.loads(config_to_json(self.cfg))}
        np.savez_compressed(path, values=self.values, meta=json.dumps(meta, sort_keys=True))

    @classmethod
    def load(cls, path) -> "SampleBatch":
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            values = np.array(data["values"])
        return cls(layer=int(meta["layer"]), values=values, seed=int(meta["seed"]),
                   stream_count=int(meta["stream_count"]), path=str(meta["path"]),
                   cfg=config_from_json(json.dumps(meta["cfg"])))


# ---------------------------------------------------------------------------
# path selection

def sampling_path(cfg: NetConfig, layer: int) -> str:
    """Which sampler implementation (cfg, layer) resolves to."""
    d = cfg.n_inputs
    if layer == 1:
        if cfg.weights.kind == "gaussian":
            return "gaussian_chain" if d == 1 else "gaussian_first"
        return "dense"
    if cfg.weights.kind == "gaussian":
        if d == 1 and cfg.act.kind in ("identity", "relu", "perceptron"):
            return "gaussian_chain"
        if cfg.act.kind == "identity" and min(cfg.widths[: layer - 1]) > d:
            return "wishart_chain"
        # any activation: conditionally on the previous layer the next one is
        # exactly Gaussian with a d x d covariance, so we never need to draw
        # the O(n^2) weight tensors
        return "gaussian_cond"
    if (cfg.weights.kind == "rademacher" and cfg.act.kind == "identity"
            and cfg.c_b == 0.0 and d == 1 and layer - 1 <= 3 and cfg.n0 <= 3):
        return "rademacher_reduction"
    return "dense"


def _stream_sizes(m: int, stream_count: int) -> list[int]:
    base, extra = divmod(m, stream_count)
    return [base + (1 if k < extra else 0) for k in range(stream_count)]


def _stream_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


def forward_sample(cfg: NetConfig, layer: int, m: int, seed: int,
                   stream_count: int = 1) -> SampleBatch:
    """Draw m networks and return z_1^(layer) at every input, shape (m, d)."""
    if not 1 <= layer <= cfg.depth + 1:
        raise ValueError(f"layer must be in 1..{cfg.depth + 1}")
    if m < 1:
        raise ValueError("m must be >= 1")
    if stream_count < 1:
        raise ValueError("stream_count must be >= 1")
    path = sampling_path(cfg, layer)
    parts = []
    for stream, size in enumerate(_stream_sizes(m, stream_count)):
        if size == 0:
            continue
        rng = _stream_rng(seed, stream)
        parts.append(_SAMPLERS[path](cfg, layer, size, rng))
    values = parts[0] if len(parts) == 1 else np.concatenate(parts, axis=0)
    return SampleBatch(layer=layer, values=values, seed=seed,
                       stream_count=stream_count, path=path, cfg=cfg)


# ---------------------------------------------------------------------------
# Gaussian-weight fast paths

def _variance_chain(cfg: NetConfig, upto: int, size: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Per-draw conditional variances v_upto of layer ``upto`` (d = 1)."""
    v = np.full(size, cfg.first_layer_variance(0))
    for l in range(1, upto):
        n = cfg.layer_width(l)
        kind = cfg.act.kind
        if kind == "identity":
            s = v * rng.chisquare(n, size=size)
        elif kind == "relu":
            r = rng.binomial(n, 0.5, size=size)
            s = v * 2.0 * rng.standard_gamma(0.5 * r, size=size)
        elif kind == "perceptron":
            active = rng.binomial(n, 0.5, size=size).astype(np.float64)
            # degenerate conditional law: all cells sit at 0, step maps to 1
            s = np.where(v > 0.0, active, float(n))
        else:  # pragma: no cover - guarded by sampling_path
            raise AssertionError(kind)
        v = cfg.c_b + (cfg.c_w / n) * s
    return v


def _sample_gaussian_chain(cfg, layer, size, rng):
    v = _variance_chain(cfg, layer, size, rng)
    return (np.sqrt(v) * rng.standard_normal(size))[:, None]


def _sample_gaussian_first(cfg, layer, size, rng):
    """Layer 1, Gaussian weights, several inputs: exact joint Gaussian."""
    x = cfg.input_array()
    cov = cfg.c_b + (cfg.c_w / cfg.n0) * (x @ x.T)
    chol = _psd_cholesky(cov)
    return rng.standard_normal((size, x.shape[0])) @ chol.T


def _psd_cholesky(cov: np.ndarray) -> np.ndarray:
    d = cov.shape[0]
    jitter = 1e-12 * max(1.0, float(np.trace(cov)) / max(d, 1))
    for _ in range(6):
        try:
            return np.linalg.cholesky(cov + jitter * np.eye(d))
        except np.linalg.LinAlgError:
            jitter *= 100.0
    raise np.linalg.LinAlgError("covariance not PSD within jitter budget")


def _wishart_gram(rng, nu: int, size: int, d: int) -> np.ndarray:
    """Batched Bartlett draws of Wishart(nu, I_d), shape (size, d, d)."""
    t = np.zeros((size, d, d))
    for i in range(d):
        t[:, i, i] = np.sqrt(rng.chisquare(nu - i, size=size))
        for j in range(i):
            t[:, i, j] = rng.standard_normal(size)
    return t @ np.swapaxes(t, 1, 2)


def _sample_wishart_chain(cfg, layer, size, rng):
    """Identity activation, Gaussian weights, d inputs: covariance chain."""
    x = cfg.input_array()
    d = x.shape[0]
    cov0 = cfg.c_b + (cfg.c_w / cfg.n0) * (x @ x.T)
    cov = np.broadcast_to(cov0, (size, d, d)).copy()
    for l in range(1, layer):
        n = cfg.layer_width(l)
        chol = np.linalg.cholesky(cov + 1e-13 * np.trace(cov0) * np.eye(d))
        b = _wishart_gram(rng, n, size, d)
        gram = chol @ b @ np.swapaxes(chol, 1, 2)
        cov = cfg.c_b + (cfg.c_w / n) * gram
    chol = np.linalg.cholesky(cov + 1e-13 * np.trace(cov0) * np.eye(d))
    z = rng.standard_normal((size, d, 1))
    return (chol @ z)[:, :, 0]


def _batched_cholesky(s: np.ndarray) -> np.ndarray:
    jitter = 0.0
    scale = max(1.0, float(np.max(s.diagonal(axis1=1, axis2=2))))
    eye = np.eye(s.shape[1])
    for _ in range(7):
        try:
            return np.linalg.cholesky(s + jitter * eye)
        except np.linalg.LinAlgError:
            jitter = max(jitter * 100.0, 1e-13 * scale)
    raise np.linalg.LinAlgError("conditional covariance not PSD within jitter budget")


def _cond_chunk(cfg, layer, size, rng, keep_full=False):
    """Gaussian weights, any activation: propagate layers through the exact
    conditional law z^(l+1) | F_l ~ N(0, C_b + C_W/n_l * a' a) per draw.

    Needs O(size * n * d) normals per layer instead of O(size * n^2) weight
    draws.  Returns (size, rows, d) with rows = 1 at the target layer unless
    keep_full.
    """
    x = cfg.input_array()
    d = x.shape[0]
    cov1 = cfg.c_b + (cfg.c_w / cfg.n0) * (x @ x.T)
    rows = cfg.layer_width(1) if (layer > 1 or keep_full) else 1
    z = rng.standard_normal((size, rows, d)) @ _psd_cholesky(cov1).T
    for l in range(2, layer + 1):
        a = cfg.act.apply(z)
        n_prev = cfg.layer_width(l - 1)
        s = cfg.c_b + (cfg.c_w / n_prev) * np.einsum("cnd,cne->cde", a, a,
                                                     optimize=True)
        chol = _batched_cholesky(s)
        rows = cfg.layer_width(l) if (l < layer or keep_full) else 1
        g = rng.standard_normal((size, rows, d))
        z = np.matmul(g, np.swapaxes(chol, 1, 2))
    return z


def _sample_gaussian_cond(cfg, layer, size, rng):
    widest = max(cfg.layer_width(l) for l in range(0, layer + 1))
    per_draw = max(widest * cfg.n_inputs, 1)
    chunk = max(1, min(size, _CHUNK_ELEMS // per_draw))
    out = np.empty((size, cfg.n_inputs))
    done = 0
    while done < size:
        c = min(chunk, size - done)
        out[done:done + c] = _cond_chunk(cfg, layer, c, rng)[:, 0, :]
        done += c
    return out


# ---------------------------------------------------------------------------
# Rademacher + identity reduction (C_b = 0, d = 1)

def _first_layer_value_groups(cfg: NetConfig):
    """Distinct |values| of z^(1) cells and their probabilities (n0 <= 3).

    z^(1)_k = sqrt(C_W/n0) * sum_r eps_r x_r over 2^n0 equiprobable sign
    patterns; grouping by absolute value (sign symmetry) gives at most
    2^(n0-1) groups.
    """
    x = np.asarray(cfg.inputs[0], dtype=np.float64)
    c0 = math.sqrt(cfg.c_w / cfg.n0)
    combos = np.array(np.meshgrid(*[[-1.0, 1.0]] * cfg.n0)).reshape(cfg.n0, -1)
    vals = np.abs(c0 * (x @ combos))
    uniq, counts = np.unique(np.round(vals, 12), return_counts=True)
    return uniq, counts / combos.shape[1]


def _signed_binomial(rng, n, size):
    """2*Binomial(n, 1/2) - n as float64 (sum of n independent signs)."""
    return 2.0 * rng.binomial(n, 0.5, size=size) - float(n)


def _sample_rademacher_reduction(cfg, layer, size, rng):
    """Identity/Rademacher/C_b=0/d=1 reduction for targets up to layer 4.

    Writing the readout as nested vector-matrix products and absorbing signs
    (eps*W ~ W for symmetric independent factors):

    * target 2: z ~ scale * sum_r x_r * S(n1)           per input coordinate
    * target 3: z ~ scale * sum_g val_g * S(cnt_g * n2) with multinomial
      counts cnt over the first-layer value groups (a sum over n1 cells of
      i.i.d. signed Bin(n2) counts collapses groupwise: a sum of independent
      Bin piles is one Bin pile)
    * target 4: z ~ scale * <V, Y>, V_j iid S(n3), Y_j iid first-layer-valued
      signed counts; V comes from the readout-side flip, Y from the input
      side, independent because they use disjoint weight matrices

    where S(n) = 2*Binomial(n, 1/2) - n.
    """
    leff = layer - 1
    scale = math.prod(math.sqrt(cfg.c_w / cfg.layer_width(l)) for l in range(1, layer))
    if leff == 0:
        signs = rng.integers(0, 2, size=(size, cfg.n0), dtype=np.int8) * 2 - 1
        x = np.asarray(cfg.inputs[0], dtype=np.float64)
        out = math.sqrt(cfg.c_w / cfg.n0) * (signs @ x)
        return out[:, None]
    vals, probs = _first_layer_value_groups(cfg)
    single = len(vals) == 1
    n1 = cfg.layer_width(1)
    if leff == 1:
        x = np.asarray(cfg.inputs[0], dtype=np.float64)
        c0 = math.sqrt(cfg.c_w / cfg.n0)
        out = np.zeros(size)
        for xr in x:
            out += (c0 * xr) * _signed_binomial(rng, n1, size)
        return (scale * out)[:, None]
    n2 = cfg.layer_width(2)
    if leff == 2:
        if single:
            total = vals[0] * _signed_binomial(rng, n1 * n2, size)
        else:
            groups = rng.multinomial(n1, probs, size=size)
            total = np.zeros(size)
            for gi, val in enumerate(vals):
                cnt = groups[:, gi]
                total += val * (2.0 * rng.binomial(cnt * n2, 0.5) - cnt * float(n2))
        return (scale * total)[:, None]
    # leff == 3: chunk draws to bound the (chunk, n2) work arrays
    n3 = cfg.layer_width(3)
    out = np.empty(size)
    chunk = max(1, _CHUNK_ELEMS // max(n2, 1))
    done = 0
    while done < size:
        c = min(chunk, size - done)
        v = rng.binomial(n3, 0.5, size=(c, n2))
        v = 2.0 * v - float(n3)
        if single:
            y = 2.0 * rng.binomial(n1, 0.5, size=(c, n2)) - float(n1)
            y *= vals[0]
        else:
            groups = rng.multinomial(n1, probs, size=c)
            y = np.zeros((c, n2))
            for gi, val in enumerate(vals):
                cnt = groups[:, gi][:, None]
                y += val * (2.0 * rng.binomial(np.broadcast_to(cnt, (c, n2)), 0.5)
                            - cnt)
        out[done:done + c] = np.einsum("ij,ij->i", v, y)
        done += c
    return (scale * out)[:, None]


# ---------------------------------------------------------------------------
# dense path

def _dense_chunk(cfg, layer, size, rng, keep_full=False):
    x = cfg.input_array()  # (d, n0)
    d = x.shape[0]
    law = cfg.weights
    w = law.sample(rng, (size, cfg.layer_width(1), cfg.n0))
    z = math.sqrt(cfg.c_w / cfg.n0) * np.einsum("cij,dj->cid", w, x, optimize=True)
    if cfg.c_b > 0.0:
        z += math.sqrt(cfg.c_b) * rng.standard_normal((size, cfg.layer_width(1)))[:, :, None]
    for l in range(2, layer + 1):
        a = cfg.act.apply(z)
        n_prev = cfg.layer_width(l - 1)
        rows = cfg.layer_width(l) if (l < layer or keep_full) else 1
        w = law.sample(rng, (size, rows, n_prev))
        z = math.sqrt(cfg.c_w / n_prev) * (w @ a)
        if cfg.c_b > 0.0:
            z += math.sqrt(cfg.c_b) * rng.standard_normal((size, rows))[:, :, None]
    return z  # (size, rows, d)


def _sample_dense(cfg, layer, size, rng):
    # chunk so that the largest weight tensor stays within the element budget
    widest = max(cfg.layer_width(l) for l in range(0, layer + 1))
    per_draw = max(widest * widest, 1)
    chunk = max(1, min(size, _CHUNK_ELEMS // per_draw))
    out = np.empty((size, cfg.n_inputs))
    done = 0
    while done < size:
        c = min(chunk, size - done)
        z = _dense_chunk(cfg, layer, c, rng)
        out[done:done + c] = z[:, 0, :]
        done += c
    return out


_SAMPLERS = {
    "gaussian_chain": _sample_gaussian_chain,
    "gaussian_first": _sample_gaussian_first,
    "wishart_chain": _sample_wishart_chain,
    "gaussian_cond": _sample_gaussian_cond,
    "rademacher_reduction": _sample_rademacher_reduction,
    "dense": _sample_dense,
}


def _full_chunk(cfg, layer, size, rng):
    """One chunk of full-width layer values (size, n_layer, d)."""
    if cfg.weights.kind == "gaussian":
        return _cond_chunk(cfg, layer, size, rng, keep_full=True)
    return _dense_chunk(cfg, layer, size, rng, keep_full=True)


# ---------------------------------------------------------------------------
# layer statistic for the variance-gap estimators

def layer_mean_square_activity(cfg: NetConfig, layer: int, m: int, seed: int,
                               stream_count: int = 1, input_index: int = 0,
                               max_elements: int = 2 ** 28) -> np.ndarray:
    """Per-draw A_l = (C_W/n_l) * sum_j sigma(z_j^(l)(x))^2, shape (m,).

    This is the conditional variance of any layer-(l+1) neuron minus C_b; its
    deviation from the limit covariance drives every semi-empirical bound.
    Evaluated at a single input (``input_index``).
    """
    if not 1 <= layer <= cfg.depth:
        raise ValueError("statistic defined for hidden layers 1..L")
    n = cfg.layer_width(layer)
    single = cfg if cfg.n_inputs == 1 else _single_input(cfg, input_index)
    # A_l is the conditional variance of a layer-(l+1) neuron, so the chain
    # sampler applies exactly when layer l+1 itself is chain-sampleable
    # (every activation up to layer l has a closed conditional law).
    chain = sampling_path(single, layer + 1) == "gaussian_chain"
    if n * m > max_elements and not chain:
        raise MemoryError(
            f"n_l * m = {n * m} exceeds cap {max_elements}; lower m or raise cap")
    parts = []
    for stream, size in enumerate(_stream_sizes(m, stream_count)):
        if size == 0:
            continue
        rng = _stream_rng(seed, stream)
        if chain:
            v = _variance_chain(single, layer + 1, size, rng)
            parts.append(v - single.c_b)
        else:
            z = _dense_statistic(single, layer, size, rng)
            parts.append(z)
    return parts[0] if len(parts) == 1 else np.concatenate(parts)


def forward_sample_full(cfg: NetConfig, layer: int, m: int, seed: int,
                        max_elements: int = 2 ** 28) -> np.ndarray:
    """All pre-activations of one layer: shape (m, n_layer, d).

    Unlike ``forward_sample`` this materializes every neuron of the target
    layer, which the conditional-covariance estimators need.  Always uses the
    dense sampler (the statistic depends on the joint law across neurons)."""
    n = cfg.layer_width(layer)
    if m * n * cfg.n_inputs > max_elements:
        raise MemoryError(
            f"m * n_layer * d = {m * n * cfg.n_inputs} exceeds cap {max_elements}")
    rng = _stream_rng(seed, 0)
    widest = max(cfg.layer_width(l) for l in range(0, layer + 1))
    gaussian = cfg.weights.kind == "gaussian"
    per_draw = max(widest * (cfg.n_inputs if gaussian else widest), 1)
    chunk = max(1, min(m, _CHUNK_ELEMS // per_draw))
    out = np.empty((m, n, cfg.n_inputs))
    done = 0
    while done < m:
        c = min(chunk, m - done)
        out[done:done + c] = _full_chunk(cfg, layer, c, rng)
        done += c
    return out


def _single_input(cfg: NetConfig, i: int) -> NetConfig:
    from dataclasses import replace
    return replace(cfg, inputs=(cfg.inputs[i],))


def _dense_statistic(cfg, layer, size, rng):
    widest = max(cfg.layer_width(l) for l in range(0, layer + 1))
    gaussian = cfg.weights.kind == "gaussian"
    per_draw = max(widest * (cfg.n_inputs if gaussian else widest), 1)
    chunk = max(1, min(size, _CHUNK_ELEMS // per_draw))
    out = np.empty(size)
    done = 0
    n = cfg.layer_width(layer)
    while done < size:
        c = min(chunk, size - done)
        z = _full_chunk(cfg, layer, c, rng)  # (c, n, 1)
        s = cfg.act.apply(z[:, :, 0])
        out[done:done + c] = (cfg.c_w / n) * np.sum(s * s, axis=1)
        done += c
    return out
