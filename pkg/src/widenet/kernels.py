"""Infinite-width Gaussian-limit covariance matrices.

As all hidden widths grow, the pre-activations at a fixed set of d inputs
converge to a centered Gaussian family whose d x d covariance at layer l,
written K^(l), obeys the two-point recursion

    K^(l)_{ab} = C_b + C_W * E[sigma(U) sigma(V)],
    (U, V) ~ N(0, [[K^(l-1)_aa, K^(l-1)_ab], [K^(l-1)_ab, K^(l-1)_bb]])

seeded at layer 2 by the exact first-layer covariance
Sigma1_{ab} = C_b + C_W <x_a, x_b>/n0 when the weights are Gaussian (then
z^(1) is exactly Gaussian), and by a Monte Carlo estimate of
E[sigma(z^(1)_a) sigma(z^(1)_b)] otherwise.

The bivariate moment E[sigma(U) sigma(V)] has closed forms for the identity
(the covariance itself), relu (the first-order arc-cosine kernel), and the
unit step (an orthant probability); other activations use a tensorized
Gauss-Hermite rule on the Cholesky factor, collapsing to one dimension when
the pair is perfectly correlated.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .activations import ActivationSpec
from .config import NetConfig, config_to_json
from .normals import gauss_hermite, gauss_legendre, norm_cdf, norm_pdf

__all__ = ["BivariateMoment", "KernelSequence", "KernelError",
           "bivariate_sigma_moment", "expected_sigma_prime", "kernel_initial",
           "kernel_sequence", "identity_kernel_value", "relu_kernel_value",
           "perceptron_kernel_value"]

_RHO_COLLAPSE = 1.0 - 1e-12


class KernelError(ValueError):
    """Raised for non-PSD covariance inputs or invalid kernel requests."""


@dataclass(frozen=True)
class BivariateMoment:
    value: float
    abs_error: float
    method: str  # 'closed' | 'gauss_hermite' | 'monte_carlo'


def _check_cov2(cov: np.ndarray) -> tuple[float, float, float]:
    cov = np.asarray(cov, dtype=np.float64)
    if cov.shape != (2, 2):
        raise KernelError("covariance must be 2x2")
    if not math.isclose(cov[0, 1], cov[1, 0], rel_tol=1e-9, abs_tol=1e-12):
        raise KernelError("covariance must be symmetric")
    v00, v11, c01 = float(cov[0, 0]), float(cov[1, 1]), float(0.5 * (cov[0, 1] + cov[1, 0]))
    if v00 < 0 or v11 < 0:
        raise KernelError("negative variance")
    lim = math.sqrt(v00 * v11)
    if abs(c01) > lim * (1.0 + 1e-9) + 1e-15:
        raise KernelError(f"|cov| = {abs(c01)} exceeds sqrt(v00*v11) = {lim}")
    return v00, v11, min(lim, max(-lim, c01))


def bivariate_sigma_moment(act: ActivationSpec, cov, *, gh_nodes: int = 64,
                           method: str = "auto") -> BivariateMoment:
    """E[sigma(U) sigma(V)] for centered jointly Gaussian (U, V) ~ N(0, cov).

    ``method='auto'`` uses the closed form when one exists (identity, relu,
    perceptron) and quadrature otherwise.  ``method='quadrature'`` forces a
    numerical evaluation even for those three, which serves as an independent
    oracle for the closed forms: smooth activations get the tensorized
    Gauss-Hermite rule, while relu/perceptron integrate the exact conditional
    expectation over the half-line where the kink/jump disappears (a plain
    Hermite rule only converges algebraically through a kink, so it could
    never reach oracle-grade accuracy).
    """
    v00, v11, c01 = _check_cov2(cov)
    kind = act.kind
    if method not in ("auto", "closed", "quadrature"):
        raise KernelError(f"unknown method {method!r}")
    if method == "quadrature":
        if kind == "identity":
            # integrand is a degree-2 polynomial: 1-d Hermite rule is exact
            t, w = gauss_hermite(gh_nodes)
            s0, s1 = math.sqrt(v00), math.sqrt(v11)
            rho = 0.0 if s0 * s1 == 0 else c01 / (s0 * s1)
            val = float(np.dot(w, (s0 * t) * (s1 * rho * t)))
            return BivariateMoment(val, 1e-15, "gauss_hermite")
        if kind in ("relu", "perceptron"):
            return _conditional_halfline(kind, v00, v11, c01, gh_nodes)
        return _gh_bivariate(act, v00, v11, c01, gh_nodes)
    if method == "closed" and kind not in ("identity", "relu", "perceptron"):
        raise KernelError(f"no closed form for activation {kind!r}")
    if kind == "identity":
        return BivariateMoment(c01, 0.0, "closed")
    if kind == "relu":
        if v00 == 0.0 or v11 == 0.0:
            return BivariateMoment(0.0, 0.0, "closed")
        rho = min(1.0, max(-1.0, c01 / math.sqrt(v00 * v11)))
        theta = math.acos(rho)
        val = math.sqrt(v00 * v11) / (2.0 * math.pi) * (
            math.sin(theta) + (math.pi - theta) * math.cos(theta))
        return BivariateMoment(val, 0.0, "closed")
    if kind == "perceptron":
        if v00 == 0.0 and v11 == 0.0:
            return BivariateMoment(1.0, 0.0, "closed")  # sigma(0)^2 = 1
        if v00 == 0.0 or v11 == 0.0:
            return BivariateMoment(0.5, 0.0, "closed")  # sigma(0) * P(V >= 0)
        rho = min(1.0, max(-1.0, c01 / math.sqrt(v00 * v11)))
        val = 0.25 + math.asin(rho) / (2.0 * math.pi)
        return BivariateMoment(val, 0.0, "closed")
    return _gh_bivariate(act, v00, v11, c01, gh_nodes)


def _conditional_halfline(kind, v00, v11, c01, nodes):
    """Numerical E[sigma(U) sigma(V)] for relu / perceptron.

    Cholesky split U = s0*T, V = s1*(rho*T + sqrt(1-rho^2)*Z) with T, Z
    independent standard normals.  Both activations vanish on {U < 0}, and the
    inner expectation over Z has an exact smooth closed form, so

        E[sigma(U) sigma(V)] = int_0^inf outer(t) * inner(t) * phi(t) dt

    with an analytic integrand on the half-line; a Gauss-Legendre panel on
    [0, 13] (tail < 1e-30) then converges geometrically.
    """
    if v00 == 0.0 or v11 == 0.0:
        # degenerate marginals reduce to the exact constants of the closed path
        if kind == "relu":
            return BivariateMoment(0.0, 0.0, "conditional_quadrature")
        if v00 == 0.0 and v11 == 0.0:
            return BivariateMoment(1.0, 0.0, "conditional_quadrature")
        return BivariateMoment(0.5, 0.0, "conditional_quadrature")
    s0, s1 = math.sqrt(v00), math.sqrt(v11)
    rho = min(1.0, max(-1.0, c01 / (s0 * s1)))
    s_inner = s1 * math.sqrt(max(0.0, 1.0 - rho * rho))

    # When |rho| -> 1 the inner factor transitions over a boundary layer of
    # width ~ sqrt(1-rho^2)/|rho| at t = 0; split the panel there so each
    # piece stays well resolved.
    upper = 13.0
    if abs(rho) > 1e-8:
        layer_w = 40.0 * math.sqrt(max(0.0, 1.0 - rho * rho)) / abs(rho)
        breaks = [0.0, min(upper, max(1e-8, layer_w)), upper]
    else:
        breaks = [0.0, upper]
    breaks = sorted(set(breaks))

    def value(n):
        x, w = gauss_legendre(n)
        total = 0.0
        for lo, hi in zip(breaks[:-1], breaks[1:]):
            if hi <= lo:
                continue
            t = 0.5 * (hi - lo) * (x + 1.0) + lo
            wt = 0.5 * (hi - lo) * w
            mu = s1 * rho * t
            if s_inner > 1e-300:
                a = mu / s_inner
                if kind == "relu":
                    inner = mu * norm_cdf(a) + s_inner * norm_pdf(a)
                else:
                    inner = norm_cdf(a)
            else:  # |rho| = 1: the conditional law is a point mass at mu
                if kind == "relu":
                    inner = np.maximum(mu, 0.0)
                else:
                    inner = (mu >= 0.0).astype(np.float64)
            outer = s0 * t if kind == "relu" else 1.0
            total += float(np.sum(wt * outer * inner * norm_pdf(t)))
        return total

    f, f2 = value(nodes), value(max(8, nodes // 2))
    return BivariateMoment(f, abs(f - f2) + 1e-15, "conditional_quadrature")


def _gh_bivariate(act, v00, v11, c01, gh_nodes):
    s0, s1 = math.sqrt(v00), math.sqrt(v11)
    if s0 == 0.0 or s1 == 0.0:
        val = float(act.apply(np.zeros(1))[0])  # sigma(0)
        if s0 == 0.0 and s1 == 0.0:
            return BivariateMoment(val * val, 0.0, "closed")
        s = s1 if s0 == 0.0 else s0
        t, w = gauss_hermite(gh_nodes)
        other = float(np.dot(w, act.apply(s * t)))
        return BivariateMoment(val * other, 1e-15, "gauss_hermite")
    rho = c01 / (s0 * s1)
    if abs(rho) >= _RHO_COLLAPSE:
        sign = 1.0 if rho > 0 else -1.0
        t, w = gauss_hermite(gh_nodes)
        t2, w2 = gauss_hermite(max(8, gh_nodes // 2))
        f = float(np.dot(w, act.apply(s0 * t) * act.apply(sign * s1 * t)))
        f2 = float(np.dot(w2, act.apply(s0 * t2) * act.apply(sign * s1 * t2)))
        return BivariateMoment(f, abs(f - f2), "gauss_hermite")

    def tensor(n):
        t, w = gauss_hermite(n)
        u = s0 * t
        v = s1 * (rho * t[:, None] + math.sqrt(1.0 - rho * rho) * t[None, :])
        g = act.apply(u)[:, None] * act.apply(v)
        return float(w @ g @ w)

    f = tensor(gh_nodes)
    f2 = tensor(max(8, gh_nodes // 2))
    return BivariateMoment(f, abs(f - f2), "gauss_hermite")


def expected_sigma_prime(act: ActivationSpec, variance: float, *,
                         gh_nodes: int = 64) -> float:
    """E[sigma'(G)] for G ~ N(0, variance), using the a.e. derivative."""
    if variance < 0:
        raise KernelError("variance must be >= 0")
    if act.kind == "identity":
        return 1.0
    if act.kind == "relu":
        return 0.5 if variance > 0 else 0.0
    if not act.has_derivative:
        raise KernelError(f"activation {act.kind!r} admits no derivative factor")
    if variance == 0.0:
        return float(act.apply_derivative(np.zeros(1))[0])
    t, w = gauss_hermite(gh_nodes)
    return float(np.dot(w, act.apply_derivative(math.sqrt(variance) * t)))


# ---------------------------------------------------------------------------

@dataclass
class KernelSequence:
    """Limit covariances K^(2) .. K^(L+1) for one configuration."""
    matrices: tuple[np.ndarray, ...]
    first_layer_cov: np.ndarray
    initial_stderr: np.ndarray  # MC error of the layer-2 seed (zeros if exact)
    quad_error: float           # max bivariate quadrature error encountered
    initial_method: str
    cfg_json: str = field(repr=False, default="")

    @property
    def depth(self) -> int:
        return len(self.matrices)

    def matrix(self, layer: int) -> np.ndarray:
        """K^(layer) for layer in 2..L+1."""
        if not 2 <= layer <= len(self.matrices) + 1:
            raise KernelError(f"layer must be in 2..{len(self.matrices) + 1}")
        return self.matrices[layer - 2]

    def variance(self, layer: int, i: int = 0) -> float:
        return float(self.matrix(layer)[i, i])

    def to_json(self) -> str:
        obj = {
            "layers": {str(l + 2): m.tolist() for l, m in enumerate(self.matrices)},
            "first_layer_cov": self.first_layer_cov.tolist(),
            "initial_stderr": self.initial_stderr.tolist(),
            "quad_error": self.quad_error,
            "initial_method": self.initial_method,
            "cfg": json.loads(self.cfg_json) if self.cfg_json else None,
        }
        return json.dumps(obj, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "KernelSequence":
        obj = json.loads(text)
        layers = sorted(obj["layers"].items(), key=lambda kv: int(kv[0]))
        return cls(
            matrices=tuple(np.asarray(m, dtype=np.float64) for _, m in layers),
            first_layer_cov=np.asarray(obj["first_layer_cov"], dtype=np.float64),
            initial_stderr=np.asarray(obj["initial_stderr"], dtype=np.float64),
            quad_error=float(obj["quad_error"]),
            initial_method=str(obj["initial_method"]),
            cfg_json=json.dumps(obj["cfg"]) if obj.get("cfg") else "",
        )

    def save(self, path) -> None:
        with open(path, "w") as f:
            f.write(self.to_json())
            f.write("\n")

    @classmethod
    def load(cls, path) -> "KernelSequence":
        with open(path) as f:
            return cls.from_json(f.read())


def _assert_psd(mat: np.ndarray, what: str) -> None:
    eig = np.linalg.eigvalsh(0.5 * (mat + mat.T))
    tol = -1e-9 * max(1.0, float(np.max(np.abs(mat))))
    if eig.min() < tol:
        raise KernelError(f"{what} is not PSD (min eig {eig.min():.3e})")


def kernel_initial(cfg: NetConfig, *, mode: str = "auto", m: int = 200_000,
                   seed: int = 0):
    """Layer-2 covariance K^(2) and its standard error matrix.

    mode 'exact' requires Gaussian weights (first layer exactly Gaussian);
    'mc' estimates E[sigma(z^(1)_a) sigma(z^(1)_b)] from m draws of one
    first-layer cell; 'auto' picks 'exact' when available.
    """
    x = cfg.input_array()
    d = x.shape[0]
    cov1 = cfg.c_b + (cfg.c_w / cfg.n0) * (x @ x.T)
    _assert_psd(cov1, "first-layer covariance")
    if mode == "auto":
        mode = "exact" if cfg.weights.kind == "gaussian" else "mc"
    if mode == "exact":
        if cfg.weights.kind != "gaussian":
            raise KernelError("exact layer-2 seed requires Gaussian weights")
        k2 = np.empty((d, d))
        for a in range(d):
            for b in range(a, d):
                mom = bivariate_sigma_moment(cfg.act, cov1[np.ix_([a, b], [a, b])])
                k2[a, b] = k2[b, a] = cfg.c_b + cfg.c_w * mom.value
        return k2, np.zeros((d, d)), "exact"
    if mode != "mc":
        raise KernelError(f"unknown kernel seed mode {mode!r}")
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x4B32,)))
    w = cfg.weights.sample(rng, (m, cfg.n0))
    z = math.sqrt(cfg.c_w / cfg.n0) * (w @ x.T)
    if cfg.c_b > 0:
        z += math.sqrt(cfg.c_b) * rng.standard_normal((m, 1))
    s = cfg.act.apply(z)
    prod = s[:, :, None] * s[:, None, :]
    k2 = cfg.c_b + cfg.c_w * prod.mean(axis=0)
    stderr = cfg.c_w * prod.std(axis=0) / math.sqrt(m)
    return k2, stderr, "mc"


def kernel_sequence(cfg: NetConfig, *, mode: str = "auto", gh_nodes: int = 64,
                    m: int = 200_000, seed: int = 0) -> KernelSequence:
    """All limit covariances K^(2) .. K^(L+1) for cfg's depth."""
    k2, stderr, method = kernel_initial(cfg, mode=mode, m=m, seed=seed)
    d = k2.shape[0]
    mats = [k2]
    quad_err = 0.0
    for _ in range(3, cfg.depth + 2):
        prev = mats[-1]
        nxt = np.empty((d, d))
        for a in range(d):
            for b in range(a, d):
                mom = bivariate_sigma_moment(cfg.act, prev[np.ix_([a, b], [a, b])],
                                             gh_nodes=gh_nodes)
                quad_err = max(quad_err, mom.abs_error)
                nxt[a, b] = nxt[b, a] = cfg.c_b + cfg.c_w * mom.value
        mats.append(nxt)
    for i, mat in enumerate(mats):
        _assert_psd(mat, f"limit covariance at layer {i + 2}")
    return KernelSequence(matrices=tuple(mats),
                          first_layer_cov=cfg.c_b + (cfg.c_w / cfg.n0) * (cfg.input_array() @ cfg.input_array().T),
                          initial_stderr=stderr, quad_error=quad_err,
                          initial_method=method, cfg_json=config_to_json(cfg))


# ---------------------------------------------------------------------------
# closed forms (single input) used by tests and the special-case bounds

def identity_kernel_value(cfg: NetConfig, layer: int, i: int = 0) -> float:
    """K^(layer) for the identity activation:
    C_b * sum_{k=0}^{layer-1} C_W^k + C_W^layer * ||x||^2 / n0."""
    geo = sum(cfg.c_w ** k for k in range(layer))
    return cfg.c_b * geo + cfg.c_w ** layer * cfg.input_sq_norm(i) / cfg.n0


def relu_kernel_value(cfg: NetConfig, layer: int, i: int = 0) -> float:
    """K^(layer) for relu, from telescoping the halving recursion
    v_l = C_b + (C_W/2) v_{l-1}, v_1 = C_b + C_W ||x||^2/n0:

        K^(layer) = C_b * sum_{k=0}^{layer-1} (C_W/2)^k
                    + 2 * (C_W/2)^layer * ||x||^2 / n0.
    """
    half = cfg.c_w / 2.0
    geo = sum(half ** k for k in range(layer))
    return cfg.c_b * geo + 2.0 * half ** layer * cfg.input_sq_norm(i) / cfg.n0


def perceptron_kernel_value(cfg: NetConfig, layer: int, i: int = 0) -> float:
    """K^(layer) for the unit step: C_b + C_W/2 for every layer >= 2
    (requires a nondegenerate first layer)."""
    if layer < 2:
        raise KernelError("limit covariances start at layer 2")
    if cfg.first_layer_variance(i) <= 0:
        return cfg.c_b + cfg.c_w  # all cells at 0 map to 1
    return cfg.c_b + cfg.c_w / 2.0
