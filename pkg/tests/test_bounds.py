"""Bound engine: moment envelopes, variance-gap moments, distance bounds,
determinant/eigenvalue floors, special-case displays, and report mechanics.

Exact oracles used here:
  * layer-1 moment envelope with C_b = 0 collapses to
    sqrt(C_W/n0) * p/log(p) * max{||x||_2, ||x||_p} * E[W^p]^(1/p);
  * identity activation, C_b = 0, C_W = 1 makes A_1 = (1/n1) sum z_j^2 a
    scaled chi-square, so E[(A_1 - K)^2] = 2 K^2 / n1 exactly;
  * width factors are linear in the report, so power-of-two width changes
    rescale bounds exactly;
  * identity/relu derivative means are exactly 1 and 1/2, collapsing the
    eigenvalue correction and the determinant floor to closed forms.

Large frozen values (explicit one-input bound, variance-gap bound) are
regression pins: their factor decompositions were checked term by term
against the defining expressions before freezing.
"""

import json
import math

import numpy as np
import pytest

from widenet.bounds import (
    BOUND_IDS,
    BoundError,
    BoundReport,
    bounded_lipschitz_bound,
    convex_semi_bound,
    depth_for_width,
    determinant_lower_bound,
    eigenvalue_lower_bound,
    empirical_output_moment,
    evaluate_bound,
    explicit_multi_input_bound,
    explicit_one_input_bound,
    identity_kolmogorov_bound,
    identity_multi_input_bound,
    identity_wasserstein_bound,
    kolmogorov_semi_bound,
    output_moment_bound,
    perceptron_kolmogorov_bound,
    perceptron_wasserstein_bound,
    relu_kolmogorov_bound,
    relu_wasserstein_bound,
    sigma_moment_root_bound,
    special_case_bounds,
    variance_gap_bound,
    variance_gap_empirical,
    wasserstein_semi_bound,
)
from widenet.config import make_config
from widenet.kernels import kernel_sequence


def cfg_of(act="relu", widths=(16,), c_b=1.0, c_w=1.0, n0=2, weights="gaussian",
           inputs=None, **law):
    return make_config(n0=n0, widths=list(widths), c_b=c_b, c_w=c_w, act=act,
                       weights=weights, inputs=inputs, **law)


# ---------------------------------------------------------------------------
# moment envelopes


class TestOutputMomentBound:
    def test_layer1_no_bias_identity_exact(self):
        # With C_b = 0 the layer-1 envelope is sqrt(C_W/n0) * p/log p * ||x||_2
        # * E[W^p]^(1/p); for p = 2 and unit-variance weights that is fully
        # explicit. It must not depend on the Rosenthal constant.
        cfg = cfg_of("identity", widths=(64,), c_b=0.0, c_w=3.0, n0=4,
                     inputs=[[1.0, -2.0, 0.5, 1.0]])
        norm = math.sqrt(1 + 4 + 0.25 + 1)
        expected = math.sqrt(3.0 / 4) * (2.0 / math.log(2.0)) * norm
        mb = output_moment_bound(cfg, 1, 2)
        assert mb.value == pytest.approx(expected, rel=1e-12)
        assert mb.log_value == pytest.approx(math.log(expected), rel=1e-12)
        assert mb.layer == 1 and mb.p == 2
        other = output_moment_bound(cfg, 1, 2, k_rosenthal=7.0)
        assert other.value == mb.value

    def test_layer1_weight_moment_ratio(self):
        # Same config, p = 4: only E[W^4]^(1/4) differs between laws
        # (3^(1/4) for the normal law, 1 for signs).
        g = cfg_of("identity", widths=(8,), c_b=0.0, weights="gaussian")
        r = cfg_of("identity", widths=(8,), c_b=0.0, weights="rademacher")
        ratio = output_moment_bound(g, 1, 4).value / output_moment_bound(r, 1, 4).value
        assert ratio == pytest.approx(3.0 ** 0.25, rel=1e-12)

    def test_dominates_monte_carlo(self):
        cfg = cfg_of("tanh", widths=(16, 16))
        for layer in (1, 2, 3):
            for p in (2, 4):
                bound = output_moment_bound(cfg, layer, p).value
                root, err = empirical_output_moment(cfg, layer, p, 20_000,
                                                    seed=layer * 10 + p)
                assert root + 4 * err < bound, (layer, p, root, bound)

    def test_grows_with_layer(self):
        cfg = cfg_of("tanh", widths=(16, 16, 16))
        vals = [output_moment_bound(cfg, layer, 2).value for layer in (1, 2, 3, 4)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_rejects_odd_or_small_p(self):
        cfg = cfg_of()
        for p in (1, 3, 5, 0):
            with pytest.raises(BoundError, match="even"):
                output_moment_bound(cfg, 1, p)

    def test_rejects_bad_layer(self):
        cfg = cfg_of(widths=(8, 8))
        with pytest.raises(BoundError, match="layer"):
            output_moment_bound(cfg, 4, 2)
        with pytest.raises(BoundError, match="layer"):
            output_moment_bound(cfg, 0, 2)

    def test_rejects_infinite_weight_moment(self):
        cfg = cfg_of(weights="student_t", df=9.0)
        with pytest.raises(BoundError, match="not finite"):
            output_moment_bound(cfg, 1, 10)

    def test_deep_layer_needs_lipschitz(self):
        cfg = cfg_of("perceptron")
        with pytest.raises(BoundError, match="Lipschitz"):
            output_moment_bound(cfg, 2, 2)


class TestEmpiricalOutputMoment:
    def test_matches_exact_second_moment(self):
        cfg = cfg_of("identity", widths=(32,), c_b=1.0, c_w=2.0)
        root, err = empirical_output_moment(cfg, 1, 2, 40_000, seed=5)
        exact = math.sqrt(1.0 + 2.0 * 1.0)   # C_b + C_W ||x||^2/n0
        assert abs(root - exact) < 5 * err
        assert err > 0


class TestSigmaMomentRoot:
    def test_bounded_activation_uses_sup(self):
        cfg = cfg_of("tanh")
        # tanh is bounded by 1 and the Lipschitz route is far larger.
        assert sigma_moment_root_bound(cfg, 2, 6) == 1.0

    def test_unbounded_uses_lipschitz_route(self):
        cfg = cfg_of("relu", widths=(16,))
        mb = output_moment_bound(cfg, 2, 4)
        assert sigma_moment_root_bound(cfg, 2, 4) == pytest.approx(mb.value)

    def test_no_route_raises(self):
        cfg = cfg_of("perceptron", weights="student_t", df=9.0)
        # perceptron is bounded, so a route exists even for heavy tails
        assert sigma_moment_root_bound(cfg, 1, 2) == 1.0
        custom = cfg_of()
        unbounded = make_config(
            n0=2, widths=[8], c_b=1.0, c_w=1.0, act="relu",
            weights="student_t", df=9.0)
        with pytest.raises(BoundError, match="no moment route"):
            sigma_moment_root_bound(unbounded, 1, 10)
        del custom


# ---------------------------------------------------------------------------
# variance-gap moments Q


class TestVarianceGapEmpirical:
    def test_identity_chi_square_oracle(self):
        # Identity, C_b=0, C_W=1: A_1 = (1/n1) sum_j z_j^2 with z_j iid
        # N(0, K), K = ||x||^2/n0, so E[(A_1 - K)^2] = 2 K^2 / n1.
        cfg = cfg_of("identity", widths=(16, 8), c_b=0.0, c_w=1.0)
        ker = kernel_sequence(cfg)
        q = variance_gap_empirical(cfg, 1, 2, 40_000, 11, ker)
        assert abs(q.value - 2.0 / 16) < 5 * q.stderr
        assert q.layer == 1 and q.p == 2 and q.n_samples == 40_000

    def test_deterministic_in_seed(self):
        cfg = cfg_of("tanh", widths=(8,))
        ker = kernel_sequence(cfg)
        a = variance_gap_empirical(cfg, 1, 2, 2_000, 3, ker)
        b = variance_gap_empirical(cfg, 1, 2, 2_000, 3, ker)
        c = variance_gap_empirical(cfg, 1, 2, 2_000, 4, ker)
        assert a.value == b.value
        assert a.value != c.value

    def test_small_m_rejected(self):
        cfg = cfg_of()
        ker = kernel_sequence(cfg)
        with pytest.raises(BoundError, match="m must be"):
            variance_gap_empirical(cfg, 1, 1, 100, 0, ker)


class TestVarianceGapBound:
    def test_preconditions(self):
        no_bias = variance_gap_bound(cfg_of(c_b=0.0), 1, 1)
        assert not no_bias.preconditions_ok
        assert any("C_b" in r for r in no_bias.reasons)
        assert no_bias.value == math.inf

        step = variance_gap_bound(cfg_of("perceptron"), 1, 1)
        assert not step.preconditions_ok
        assert any("Lipschitz" in r for r in step.reasons)

        heavy = variance_gap_bound(cfg_of(weights="student_t", df=9.0), 1, 1)
        assert not heavy.preconditions_ok
        assert any("not finite" in r for r in heavy.reasons)

    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_exact_width_scaling(self, p):
        # The width sum is the only width-dependent factor and is linear in
        # the report, so doubling a power-of-two width divides by exactly 2^p.
        small = variance_gap_bound(cfg_of("tanh", widths=(64,), weights="rademacher"), 1, p)
        big = variance_gap_bound(cfg_of("tanh", widths=(128,), weights="rademacher"), 1, p)
        assert small.preconditions_ok and big.preconditions_ok
        assert math.isfinite(small.value)
        assert small.value / big.value == 2.0 ** p

    def test_gaussian_quadruple_width(self):
        a = variance_gap_bound(cfg_of("tanh", widths=(64,)), 1, 2)
        b = variance_gap_bound(cfg_of("tanh", widths=(256,)), 1, 2)
        assert a.value / b.value == 16.0

    def test_report_shape_and_regression_value(self):
        rep = variance_gap_bound(cfg_of("tanh", widths=(64, 64)), 2, 1)
        assert rep.bound_id == "variance_gap"
        assert rep.target == "variance_gap"
        assert rep.combination == "product"
        assert [f.name for f in rep.factors] == [
            "envelope_power", "width_sum", "lipschitz_geometric",
            "depth_polynomial", "rosenthal_core", "central_constant", "tail"]
        assert rep.extras["layer"] == 2
        assert rep.extras["p"] == 1
        assert rep.extras["q_order"] == 2
        assert rep.constants == {"k_rosenthal": 2.0}
        # Regression pin; factor-by-factor hand check recorded in the
        # module docstring note.
        assert rep.value == pytest.approx(5.829758718200736e+187, rel=1e-12)
        assert rep.recombine() == rep.value

    def test_dominates_empirical_gap(self):
        cfg = cfg_of("tanh", widths=(16,))
        ker = kernel_sequence(cfg)
        emp = variance_gap_empirical(cfg, 1, 2, 10_000, 0, ker)
        bound = variance_gap_bound(cfg, 1, 1)   # bounds the order-2 gap
        assert bound.extras["q_order"] == 2
        assert emp.value + 4 * emp.stderr < bound.value

    def test_layer_range(self):
        cfg = cfg_of(widths=(8, 8))
        with pytest.raises(BoundError, match="layer"):
            variance_gap_bound(cfg, 3, 1)
        with pytest.raises(BoundError, match="p must be"):
            variance_gap_bound(cfg, 1, 0)


# ---------------------------------------------------------------------------
# semi-empirical distance bounds


class TestSemiEmpiricalBounds:
    def setup_method(self):
        self.cfg = cfg_of("relu", widths=(32, 32), c_b=1.0, c_w=1.0)
        self.ker = kernel_sequence(self.cfg)

    def test_kolmogorov_empirical_report(self):
        rep = kolmogorov_semi_bound(self.cfg, self.ker, m=4_000, seed=1)
        assert rep.preconditions_ok
        assert rep.combination == "sum"
        assert rep.target == "kolmogorov"
        assert [f.name for f in rep.factors] == [
            "variance_gap_term", "weight_interaction_term"]
        assert math.isfinite(rep.value) and rep.value > 0
        assert rep.recombine() == rep.value
        for key in ("q2", "q2_stderr", "limit_variance", "stat_error",
                    "sigma6_root", "mode", "m"):
            assert key in rep.extras
        assert rep.extras["mode"] == "empirical"
        again = kolmogorov_semi_bound(self.cfg, self.ker, m=4_000, seed=1)
        assert again.value == rep.value
        other = kolmogorov_semi_bound(self.cfg, self.ker, m=4_000, seed=2)
        assert other.extras["q2"] != rep.extras["q2"]

    def test_wasserstein_empirical_report(self):
        rep = wasserstein_semi_bound(self.cfg, self.ker, m=4_000, seed=1)
        assert rep.preconditions_ok
        assert rep.target == "wasserstein"
        assert [f.name for f in rep.factors] == [
            "weight_interaction_term", "variance_gap_term"]
        assert "sigma4_root" in rep.extras
        assert rep.extras["stat_error"] > 0

    def test_theoretical_mode_deterministic_and_plugs_q_bound(self):
        rep = kolmogorov_semi_bound(self.cfg, self.ker, mode="theoretical")
        rep2 = kolmogorov_semi_bound(self.cfg, self.ker, mode="theoretical")
        assert rep.value == rep2.value
        assert rep.extras["mode"] == "theoretical"
        assert rep.extras["stat_error"] == 0.0
        qb = variance_gap_bound(self.cfg, self.cfg.depth, 1)
        assert rep.extras["q2"] == qb.value
        ws = wasserstein_semi_bound(self.cfg, self.ker, mode="theoretical")
        assert ws.extras["sigma4_root"] == sigma_moment_root_bound(
            self.cfg, self.cfg.depth, 4)

    def test_theoretical_mode_needs_bias(self):
        cfg0 = cfg_of("relu", widths=(32,), c_b=0.0)
        ker0 = kernel_sequence(cfg0)
        rep = kolmogorov_semi_bound(cfg0, ker0, mode="theoretical")
        assert not rep.preconditions_ok
        assert any("C_b" in r for r in rep.reasons)

    def test_unknown_mode(self):
        rep = kolmogorov_semi_bound(self.cfg, self.ker, mode="nonsense")
        assert not rep.preconditions_ok

    def test_heavy_tail_weights_rejected(self):
        cfg = cfg_of("tanh", weights="student_t", df=5.0)
        ker = kernel_sequence(cfg, m=4_000)
        krep = kolmogorov_semi_bound(cfg, ker, mode="theoretical")
        assert not krep.preconditions_ok   # needs E[W^6]
        # Wasserstein only needs E[W^4]; the theoretical Q bound then
        # requires far higher moments, so it also fails, but for its reason.
        wrep = wasserstein_semi_bound(cfg, ker, mode="theoretical")
        assert not wrep.preconditions_ok


class TestExplicitDominatesSemiTheoretical:
    @pytest.mark.parametrize("act,law", [("relu", "gaussian"),
                                         ("tanh", "rademacher")])
    @pytest.mark.parametrize("n", [64, 256, 1024])
    @pytest.mark.parametrize("depth", [1, 2, 3])
    def test_one_input_explicit_is_weaker(self, act, law, n, depth):
        # The fully explicit display must never beat the semi-empirical
        # bound evaluated with its own theoretical envelopes.
        cfg = cfg_of(act, widths=(n,) * depth, weights=law)
        ker = kernel_sequence(cfg)
        semi = kolmogorov_semi_bound(cfg, ker, mode="theoretical")
        explicit = explicit_one_input_bound(cfg)
        assert semi.preconditions_ok and explicit.preconditions_ok
        assert explicit.value >= semi.value


# ---------------------------------------------------------------------------
# fully explicit one-input bound


class TestExplicitOneInput:
    def test_regression_value_and_factors(self):
        cfg = cfg_of("identity", widths=(1_000_000,))
        rep = explicit_one_input_bound(cfg)
        assert [f.name for f in rep.factors] == [
            "prefactor", "bias_term", "envelope_power", "width_sum_sqrt",
            "lipschitz_geometric", "depth_polynomial", "rosenthal_core",
            "tail"]
        assert rep.target == "max_kw"
        assert rep.extras["moment_order"] == 20
        # Regression pin (see module docstring).
        assert rep.value == pytest.approx(9.520029074595112e+84, rel=1e-12)

    def test_monotone_in_each_width(self):
        base = explicit_one_input_bound(cfg_of("tanh", widths=(64, 64))).value
        first = explicit_one_input_bound(cfg_of("tanh", widths=(128, 64))).value
        both = explicit_one_input_bound(cfg_of("tanh", widths=(128, 128))).value
        assert base > first > both

    def test_exact_halving_at_quadruple_width(self):
        for widths in [(64,), (64, 64), (32, 128, 64)]:
            small = explicit_one_input_bound(cfg_of("tanh", widths=widths))
            big = explicit_one_input_bound(
                cfg_of("tanh", widths=tuple(4 * n for n in widths)))
            assert small.value / big.value == 2.0

    def test_rosenthal_constant_monotone(self):
        cfg = cfg_of("tanh", widths=(64,))
        lo = explicit_one_input_bound(cfg, k_rosenthal=2.0)
        hi = explicit_one_input_bound(cfg, k_rosenthal=3.0)
        assert hi.value > lo.value
        assert lo.constants == {"k_rosenthal": 2.0}
        assert hi.constants == {"k_rosenthal": 3.0}

    def test_preconditions(self):
        assert not explicit_one_input_bound(cfg_of(c_b=0.0)).preconditions_ok
        assert not explicit_one_input_bound(cfg_of("perceptron")).preconditions_ok
        heavy = explicit_one_input_bound(cfg_of(weights="student_t", df=9.0))
        assert not heavy.preconditions_ok   # needs E[W^20]
        assert heavy.value == math.inf
        assert heavy.reasons


# ---------------------------------------------------------------------------
# explicit multi-input bound


def two_input_cfg(act="relu", widths=(32, 32), c_b=1.0, c_w=1.0, **kw):
    return make_config(n0=2, widths=list(widths), c_b=c_b, c_w=c_w, act=act,
                       inputs=[[1.0, 0.0], [0.0, 1.0]], **kw)


class TestExplicitMultiInput:
    def test_log_value_finite_and_shaped(self):
        # The display involves E[W^(5*2^(L+2))]; even at L = 2 the product
        # exceeds float range, so the report keeps a finite log_value while
        # value saturates at infinity (never NaN).
        cfg = two_input_cfg()
        rep = explicit_multi_input_bound(cfg, kernel_sequence(cfg))
        assert rep.preconditions_ok
        assert rep.target == "convex"
        assert math.isfinite(rep.log_value)
        assert rep.value == math.inf
        assert rep.extras["moment_order"] == 80
        assert rep.constants == {"k_rosenthal": 2.0, "c_universal": 1.0}
        names = [f.name for f in rep.factors]
        assert "eigen_term" in names and "width_sum_sqrt" in names

    def test_eigen_term_identity_collapse(self):
        # With identity activation every derivative mean is 1, so the
        # eigenvalue correction is exactly 1 + L * lambda_min(K2)^(-2d).
        cfg = two_input_cfg("identity", widths=(16, 16, 16))
        ker = kernel_sequence(cfg)
        rep = explicit_multi_input_bound(cfg, ker)
        lam = float(np.linalg.eigvalsh(ker.matrix(2)).min())
        expected = 1.0 + 3 * lam ** (-4)
        eig = {f.name: f for f in rep.factors}["eigen_term"]
        assert math.exp(eig.log_value) == pytest.approx(expected, rel=1e-12)

    def test_eigen_term_relu_collapse(self):
        # relu derivative mean is 1/2, so layer l contributes 4^(d(l-2)).
        cfg = two_input_cfg("relu", widths=(16, 16, 16))
        ker = kernel_sequence(cfg)
        rep = explicit_multi_input_bound(cfg, ker)
        lam = float(np.linalg.eigvalsh(ker.matrix(2)).min())
        expected = 1.0 + lam ** (-4) * sum(4.0 ** (2 * (l - 2))
                                           for l in range(2, 5))
        eig = {f.name: f for f in rep.factors}["eigen_term"]
        assert math.exp(eig.log_value) == pytest.approx(expected, rel=1e-12)

    def test_universal_constant_scales_linearly(self):
        cfg = two_input_cfg()
        ker = kernel_sequence(cfg)
        one = explicit_multi_input_bound(cfg, ker, c_universal=1.0)
        three = explicit_multi_input_bound(cfg, ker, c_universal=3.0)
        assert three.log_value - one.log_value == pytest.approx(
            math.log(3.0), abs=1e-10)

    def test_preconditions(self):
        single = cfg_of()
        rep = explicit_multi_input_bound(single, kernel_sequence(single))
        assert not rep.preconditions_ok
        assert any("two distinct inputs" in r for r in rep.reasons)

        heavy = two_input_cfg(weights="student_t", df=9.0)
        rep = explicit_multi_input_bound(heavy, kernel_sequence(heavy, m=4_000))
        assert not rep.preconditions_ok
        assert any("W^80" in r for r in rep.reasons)

        step = two_input_cfg("perceptron")
        rep = explicit_multi_input_bound(step, kernel_sequence(step))
        assert not rep.preconditions_ok

    def test_duplicate_inputs_rejected(self):
        cfg = make_config(n0=2, widths=[16], c_b=0.0, c_w=1.0, act="identity",
                          inputs=[[1.0, 0.0], [1.0, 0.0]])
        rep = explicit_multi_input_bound(cfg, kernel_sequence(cfg))
        assert not rep.preconditions_ok
        assert any("vanishes" in r or "C_b" in r for r in rep.reasons)


# ---------------------------------------------------------------------------
# semi-empirical convex bound


class TestConvexSemi:
    def test_first_layer_gaussian_gap_is_zero(self):
        cfg = two_input_cfg(widths=(64,))
        ker = kernel_sequence(cfg)
        rep = convex_semi_bound(cfg, ker, m_stat=4_096, m_ref=8_192, seed=3)
        assert rep.preconditions_ok
        assert rep.extras["b_sum"] == 0.0
        assert rep.extras["min_eig_last"] > 0
        assert math.isfinite(rep.value)

    def test_stats_injection_closed_form(self):
        cfg = two_input_cfg(widths=(64,))
        ker = kernel_sequence(cfg)
        stats = {"b_sum": 0.04, "sigma6_z": 2.5, "sigma4_g": 1.5}
        rep = convex_semi_bound(cfg, ker, stats=stats)
        lam = float(np.linalg.eigvalsh(ker.matrix(cfg.depth + 1)).min())
        op_sq = max(1.0, lam ** -2)
        w6_half = math.sqrt(15.0)
        brace = 43.0 * (1.0 + 2.5 + 1.5) + math.sqrt(2.0) * 8.0 * 0.2
        expected = (541.0 * 2 ** 4 * math.sqrt(1.0) * 2.0 * op_sq * w6_half
                    / 8.0 * brace)
        assert rep.value == pytest.approx(expected, rel=1e-12)
        rep2 = convex_semi_bound(cfg, ker, stats=stats)
        assert rep2.value == rep.value

    def test_deeper_network_samples_conditional_gap(self):
        cfg = two_input_cfg(widths=(24, 24))
        ker = kernel_sequence(cfg)
        rep = convex_semi_bound(cfg, ker, m_outer=32, m_stat=4_096,
                                m_ref=8_192, m_inner=512, seed=9)
        assert rep.preconditions_ok
        assert rep.extras["b_sum"] > 0
        assert rep.extras["stat_error"] > 0
        assert rep.extras["m_outer"] == 32

    def test_singular_limit_rejected(self):
        cfg = make_config(n0=2, widths=[16], c_b=0.0, c_w=1.0, act="identity",
                          inputs=[[1.0, 0.0], [1.0, 0.0]])
        rep = convex_semi_bound(cfg, kernel_sequence(cfg), m_stat=2_000)
        assert not rep.preconditions_ok
        assert any("singular" in r for r in rep.reasons)


# ---------------------------------------------------------------------------
# determinant / eigenvalue floors


class TestDeterminantAndEigenvalue:
    def test_identity_single_input_equality_at_first_floor(self):
        # Identity recursion gives K^(l) - C_b = C_W K^(l-1); at l = 3 the
        # floor C_W * K^(2) is exact for any C_b.
        cfg = cfg_of("identity", widths=(8, 8, 8, 8), c_b=1.0, c_w=1.5)
        ker = kernel_sequence(cfg)
        actual3 = ker.variance(3, 0) - 1.0
        assert determinant_lower_bound(cfg, ker, 3) == pytest.approx(
            actual3, rel=1e-12)
        actual4 = ker.variance(4, 0) - 1.0
        assert determinant_lower_bound(cfg, ker, 4) < actual4

    def test_identity_no_bias_equality_everywhere(self):
        cfg = cfg_of("identity", widths=(8, 8, 8, 8), c_b=0.0, c_w=1.5)
        ker = kernel_sequence(cfg)
        for layer in (3, 4, 5):
            assert determinant_lower_bound(cfg, ker, layer) == pytest.approx(
                ker.variance(layer, 0), rel=1e-12)

    @pytest.mark.parametrize("act", ["identity", "relu"])
    def test_multi_input_floor_below_actual(self, act):
        cfg = make_config(n0=2, widths=[16, 16, 16], c_b=1.0, c_w=2.0,
                          act=act, inputs=[[1.0, 0.0], [0.3, 1.0]])
        ker = kernel_sequence(cfg)
        for layer in (3, 4):
            khat = ker.matrix(layer) - 1.0
            actual_det = float(np.linalg.det(khat))
            lb = determinant_lower_bound(cfg, ker, layer)
            assert lb <= actual_det * (1 + 1e-9), (act, layer)
            eig_lb = eigenvalue_lower_bound(cfg, ker, layer)
            actual_eig = float(np.linalg.eigvalsh(ker.matrix(layer)).min())
            assert eig_lb <= actual_eig * (1 + 1e-9)
            assert eig_lb == pytest.approx(lb / float(np.trace(khat)),
                                           rel=1e-12)

    def test_single_input_eigenvalue_equals_determinant(self):
        cfg = cfg_of("relu", widths=(8, 8, 8))
        ker = kernel_sequence(cfg)
        assert eigenvalue_lower_bound(cfg, ker, 3) == determinant_lower_bound(
            cfg, ker, 3)

    def test_rejections(self):
        cfg = cfg_of("relu", widths=(8, 8))
        ker = kernel_sequence(cfg)
        with pytest.raises(BoundError, match="layer 3"):
            determinant_lower_bound(cfg, ker, 2)
        with pytest.raises(BoundError, match="layer must be"):
            determinant_lower_bound(cfg, ker, 5)
        step = cfg_of("perceptron", widths=(8, 8))
        with pytest.raises(BoundError, match="derivative"):
            determinant_lower_bound(step, kernel_sequence(step), 3)


# ---------------------------------------------------------------------------
# special-case displays


class TestPerceptronDisplays:
    def test_kolmogorov_fixture(self):
        cfg = cfg_of("perceptron", widths=(100,))
        rep = perceptron_kolmogorov_bound(cfg)
        k = 1.5
        paren = (2.0 / math.sqrt(k)
                 + 2.0 * (1.0 / math.sqrt(k) + math.sqrt(2 * math.pi) / 4.0)
                 + 3.5)
        expected = 8.0 / k * paren / 10.0
        assert rep.value == pytest.approx(expected, rel=1e-12)
        assert rep.value == pytest.approx(4.276960245880749, rel=1e-12)
        assert rep.extras["limit_variance"] == k

    def test_wasserstein_formula(self):
        cfg = cfg_of("perceptron", widths=(64,), c_b=0.5, c_w=2.0)
        k = 0.5 + 1.0
        expected = (6.0 * 2.0 / math.sqrt(k)) / 8.0 * (
            3.0 * math.sqrt(2.0) / math.sqrt(k) + 1.0 / math.sqrt(2 * math.pi))
        rep = perceptron_wasserstein_bound(cfg)
        assert rep.value == pytest.approx(expected, rel=1e-12)

    def test_depends_only_on_last_width(self):
        shallow = perceptron_kolmogorov_bound(cfg_of("perceptron", widths=(100,)))
        deep = perceptron_kolmogorov_bound(
            cfg_of("perceptron", widths=(64, 64, 100)))
        assert shallow.value == deep.value

    def test_exact_width_halving(self):
        a = perceptron_kolmogorov_bound(cfg_of("perceptron", widths=(100,)))
        b = perceptron_kolmogorov_bound(cfg_of("perceptron", widths=(400,)))
        assert a.value / b.value == 2.0

    def test_requires_gaussian_weights(self):
        rep = perceptron_kolmogorov_bound(
            cfg_of("perceptron", weights="rademacher"))
        assert not rep.preconditions_ok


class TestIdentityDisplays:
    def test_kolmogorov_fixture(self):
        cfg = make_config(n0=1, widths=[64, 256], c_b=0.0, c_w=1.0,
                          act="identity")
        rep = identity_kolmogorov_bound(cfg)
        expected = (2.0 * math.sqrt(15.0) * (8.0 + math.sqrt(15.0)) ** 2
                    * math.sqrt(1 / 64 + 1 / 256))
        assert rep.value == pytest.approx(expected, rel=1e-12)

    def test_kolmogorov_general_core(self):
        cfg = cfg_of("identity", widths=(64, 256), c_b=0.0, n0=3,
                     inputs=[[1.0, 1.0, 1.0]])
        rep = identity_kolmogorov_bound(cfg)
        core = 2.0 * 3 / 3.0 + 5.0 * math.sqrt(3.0) / math.sqrt(3.0) \
            + math.sqrt(15.0) * 3.0 + 1.0
        expected = 2.0 * math.sqrt(15.0) * core ** 2 * math.sqrt(1 / 64 + 1 / 256)
        assert rep.value == pytest.approx(expected, rel=1e-12)

    def test_wasserstein_fixture(self):
        cfg = make_config(n0=1, widths=[64, 256], c_b=0.0, c_w=1.0,
                          act="identity")
        rep = identity_wasserstein_bound(cfg)
        expected = 4.0 * 5.0 * 6.0 * math.sqrt(1 / 64 + 1 / 256)
        assert rep.value == pytest.approx(expected, rel=1e-12)

    def test_requires_critical_tuning(self):
        rep = identity_kolmogorov_bound(cfg_of("identity", c_b=1.0))
        assert not rep.preconditions_ok
        assert any("C_b" in r for r in rep.reasons)
        rep = identity_kolmogorov_bound(cfg_of("identity", c_b=0.0, c_w=2.0))
        assert any("C_W" in r for r in rep.reasons)


class TestReluDisplays:
    def test_kolmogorov_formula(self):
        cfg = cfg_of("relu", widths=(64, 256), c_b=0.0, c_w=2.0)
        rep = relu_kolmogorov_bound(cfg)
        paren = (7.0 + 2.0 * 1.0
                 + math.sqrt(5.0 * math.pi) * 1.0)   # half = 1, ||x||^2 = n0
        expected = 3.0 * math.sqrt(5.0) * math.sqrt(1 / 64 + 1 / 256) * paren
        assert rep.value == pytest.approx(expected, rel=1e-12)
        assert rep.target == "kolmogorov"

    def test_wasserstein_is_normalized(self):
        cfg = cfg_of("relu", widths=(64, 256), c_b=0.0, c_w=2.0)
        rep = relu_wasserstein_bound(cfg)
        expected = 8.0 * 2.0 * math.sqrt(1 / 64 + 1 / 256)
        assert rep.value == pytest.approx(expected, rel=1e-12)
        assert rep.target == "wasserstein_normalized"
        assert rep.extras["normalized"] is True

    def test_requires_no_bias(self):
        rep = relu_kolmogorov_bound(cfg_of("relu", c_b=1.0))
        assert not rep.preconditions_ok


class TestBoundedLipschitz:
    def test_finite_and_decreasing_in_width(self):
        small = bounded_lipschitz_bound(cfg_of("tanh", widths=(64, 64), c_b=2.0))
        big = bounded_lipschitz_bound(cfg_of("tanh", widths=(256, 256), c_b=2.0))
        assert small.preconditions_ok and big.preconditions_ok
        assert math.isfinite(small.value)
        assert big.value < small.value
        assert small.combination == "sum"
        assert [f.name for f in small.factors] == [
            "last_layer_term", "variance_gap_sum_term", "first_layer_term"]
        assert small.extras["geometric_ratio"] == pytest.approx(
            6.0 / (math.pi * 2.0))

    def test_requires_bounded_lipschitz_and_bias(self):
        assert not bounded_lipschitz_bound(cfg_of("relu", c_b=2.0)).preconditions_ok
        assert not bounded_lipschitz_bound(cfg_of("tanh", c_b=0.0)).preconditions_ok
        heavy = bounded_lipschitz_bound(
            cfg_of("tanh", c_b=2.0, weights="student_t", df=5.0))
        assert not heavy.preconditions_ok    # needs E[W^6]


class TestIdentityMultiInput:
    def test_finite_and_universal_constant_linear(self):
        cfg = make_config(n0=2, widths=[32, 32], c_b=1.0, c_w=1.0,
                          act="identity", inputs=[[1.0, 0.0], [0.0, 1.0]])
        ker = kernel_sequence(cfg)
        one = identity_multi_input_bound(cfg, ker)
        assert one.preconditions_ok and math.isfinite(one.value)
        assert one.extras["lambda_k2"] > 0
        two = identity_multi_input_bound(cfg, ker, c_universal=2.0)
        assert two.value / one.value == pytest.approx(2.0, rel=1e-12)
        assert two.constants["c_universal"] == 2.0

    def test_preconditions(self):
        single = cfg_of("identity")
        rep = identity_multi_input_bound(single, kernel_sequence(single))
        assert not rep.preconditions_ok
        wrong_act = two_input_cfg("relu")
        rep = identity_multi_input_bound(wrong_act, kernel_sequence(wrong_act))
        assert any("identity" in r for r in rep.reasons)


class TestSpecialCaseSelection:
    def test_keys_per_configuration(self):
        assert sorted(special_case_bounds(cfg_of("perceptron"))) == [
            "perceptron_kolmogorov", "perceptron_wasserstein"]
        assert sorted(special_case_bounds(
            cfg_of("identity", c_b=0.0, c_w=1.0))) == [
            "identity_kolmogorov", "identity_wasserstein"]
        assert sorted(special_case_bounds(cfg_of("relu", c_b=0.0))) == [
            "relu_kolmogorov", "relu_wasserstein"]
        assert sorted(special_case_bounds(cfg_of("tanh", c_b=2.0))) == [
            "bounded_lipschitz"]

    def test_kernel_enables_identity_multi_input(self):
        cfg = make_config(n0=2, widths=[16], c_b=0.0, c_w=1.0, act="identity",
                          inputs=[[1.0, 0.0], [0.0, 1.0]])
        with_kernel = special_case_bounds(cfg, kernel_sequence(cfg))
        assert "identity_multi_input" in with_kernel

    def test_no_match_raises_with_reasons(self):
        with pytest.raises(BoundError) as err:
            special_case_bounds(cfg_of("relu", c_b=1.0))
        msg = str(err.value)
        assert "relu_kolmogorov" in msg and "bounded_lipschitz" in msg


# ---------------------------------------------------------------------------
# depth schedule


class TestDepthForWidth:
    def test_examples(self):
        assert depth_for_width(2 ** 54, 0.25) == 2
        for k in (10, 14, 18):
            assert depth_for_width(2 ** k, 0.25) == 1
        assert depth_for_width(2, 0.49) == 1    # clamped

    def test_monotone_in_width(self):
        eps = 0.1
        vals = [depth_for_width(2 ** k, eps) for k in range(1, 60)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))

    def test_rejects_bad_arguments(self):
        with pytest.raises(BoundError, match="epsilon"):
            depth_for_width(100, 0.5)
        with pytest.raises(BoundError, match="epsilon"):
            depth_for_width(100, 0.0)
        with pytest.raises(BoundError, match="n must be"):
            depth_for_width(1, 0.25)


# ---------------------------------------------------------------------------
# report mechanics and dispatch


class TestBoundReportMechanics:
    def test_product_report_roundtrip(self):
        rep = perceptron_kolmogorov_bound(cfg_of("perceptron", widths=(100,)))
        blob = json.dumps(rep.to_dict(), sort_keys=True)
        back = BoundReport.from_dict(json.loads(blob))
        assert back.value == rep.value
        assert back.log_value == rep.log_value
        assert back.bound_id == rep.bound_id
        assert back.recombine() == rep.value
        assert [f.name for f in back.factors] == [f.name for f in rep.factors]
        assert back.extras == rep.extras

    def test_sum_report_roundtrip(self):
        cfg = cfg_of("relu", widths=(32,))
        rep = kolmogorov_semi_bound(cfg, kernel_sequence(cfg), m=2_000, seed=0)
        back = BoundReport.from_dict(json.loads(json.dumps(rep.to_dict())))
        assert back.value == rep.value
        assert back.combination == "sum"
        assert back.recombine() == rep.value

    def test_failed_report_roundtrip_keeps_infinity(self):
        rep = explicit_one_input_bound(cfg_of(c_b=0.0))
        assert rep.value == math.inf
        back = BoundReport.from_dict(json.loads(json.dumps(rep.to_dict())))
        assert back.value == math.inf
        assert back.reasons == rep.reasons
        assert not back.preconditions_ok


class TestEvaluateBoundDispatch:
    def test_routes_simple_ids(self):
        cfg = cfg_of("perceptron", widths=(100,))
        rep = evaluate_bound("perceptron_kolmogorov", cfg)
        assert rep.bound_id == "perceptron_kolmogorov"
        assert rep.value == perceptron_kolmogorov_bound(cfg).value

    def test_kernel_required_ids_raise_without_kernel(self):
        cfg = two_input_cfg()
        for bid in ("kolmogorov_semi", "wasserstein_semi",
                    "explicit_multi_input", "convex_semi",
                    "identity_multi_input"):
            with pytest.raises(BoundError, match="kernel"):
                evaluate_bound(bid, cfg, None)

    def test_unknown_id(self):
        with pytest.raises(BoundError, match="unknown bound id"):
            evaluate_bound("nope", cfg_of(), None)

    def test_all_ids_return_reports(self):
        cfg = two_input_cfg()
        ker = kernel_sequence(cfg)
        for bid in BOUND_IDS:
            rep = evaluate_bound(bid, cfg, ker, m=2_000,
                                 mode="theoretical" if "semi" in bid else "empirical")
            assert rep.bound_id == bid
            assert rep.value > 0   # finite bound or inf sentinel
