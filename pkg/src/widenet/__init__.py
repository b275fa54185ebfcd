"""widenet: finite-width random fully connected networks versus their
infinite-width Gaussian limits.

The package provides seeded forward samplers for networks with general
i.i.d. weights, exact/quadrature computation of the limit covariances,
distance estimators between sampled outputs and the Gaussian limit, a
library of explicit and semi-empirical distance bounds with full factor
breakdowns, and a deterministic sweep runner with rate fitting.
"""

from .activations import ActivationSpec, activation, BUILTIN_ACTIVATIONS
from .weights import WeightLaw, weight_law, log_double_factorial_odd
from .config import NetConfig, make_config, config_to_json, config_from_json
from .normals import (norm_cdf, norm_quantile, bvn_cdf, mvn_cdf,
                      gauss_hermite, wasserstein1_centered_normals)
from .sampling import (SampleBatch, forward_sample, forward_sample_full,
                       layer_mean_square_activity, sampling_path)
from .kernels import (KernelError, BivariateMoment, KernelSequence,
                      bivariate_sigma_moment, expected_sigma_prime,
                      kernel_sequence, identity_kernel_value,
                      relu_kernel_value, perceptron_kernel_value)
from .distances import (DistanceEstimate, dkw_radius, kolmogorov_distance_1d,
                        wasserstein1_distance_1d,
                        kolmogorov_two_centered_normals,
                        multivariate_kolmogorov, halfspace_kolmogorov_sup)
from .bounds import (BoundError, BoundFactor, BoundReport, MomentBound,
                     QEstimate, BOUND_IDS, output_moment_bound,
                     sigma_moment_root_bound, empirical_output_moment,
                     variance_gap_bound, variance_gap_empirical,
                     kolmogorov_semi_bound, wasserstein_semi_bound,
                     explicit_one_input_bound, explicit_multi_input_bound,
                     convex_semi_bound, determinant_lower_bound,
                     eigenvalue_lower_bound, perceptron_kolmogorov_bound,
                     perceptron_wasserstein_bound, identity_kolmogorov_bound,
                     identity_wasserstein_bound, relu_kolmogorov_bound,
                     relu_wasserstein_bound, bounded_lipschitz_bound,
                     identity_multi_input_bound, special_case_bounds,
                     evaluate_bound, depth_for_width)
from .sweep import (SweepSpec, SweepRow, RateFit, SweepResult, run_sweep,
                    fit_rate, write_csv, write_json, write_svg, read_json,
                    sweep_spec_from_dict, check_dominance, DISTANCE_KINDS,
                    DESK_CAPS)

__version__ = "0.1.0"

__all__ = [
    "ActivationSpec", "activation", "BUILTIN_ACTIVATIONS",
    "WeightLaw", "weight_law", "log_double_factorial_odd",
    "NetConfig", "make_config", "config_to_json", "config_from_json",
    "norm_cdf", "norm_quantile", "bvn_cdf", "mvn_cdf", "gauss_hermite",
    "wasserstein1_centered_normals",
    "SampleBatch", "forward_sample", "forward_sample_full",
    "layer_mean_square_activity", "sampling_path",
    "KernelError", "BivariateMoment", "KernelSequence",
    "bivariate_sigma_moment", "expected_sigma_prime", "kernel_sequence",
    "identity_kernel_value", "relu_kernel_value", "perceptron_kernel_value",
    "DistanceEstimate", "dkw_radius", "kolmogorov_distance_1d",
    "wasserstein1_distance_1d", "kolmogorov_two_centered_normals",
    "multivariate_kolmogorov", "halfspace_kolmogorov_sup",
    "BoundError", "BoundFactor", "BoundReport", "MomentBound", "QEstimate",
    "BOUND_IDS", "output_moment_bound", "sigma_moment_root_bound",
    "empirical_output_moment", "variance_gap_bound", "variance_gap_empirical",
    "kolmogorov_semi_bound", "wasserstein_semi_bound",
    "explicit_one_input_bound", "explicit_multi_input_bound",
    "convex_semi_bound", "determinant_lower_bound", "eigenvalue_lower_bound",
    "perceptron_kolmogorov_bound", "perceptron_wasserstein_bound",
    "identity_kolmogorov_bound", "identity_wasserstein_bound",
    "relu_kolmogorov_bound", "relu_wasserstein_bound",
    "bounded_lipschitz_bound", "identity_multi_input_bound",
    "special_case_bounds", "evaluate_bound", "depth_for_width",
    "SweepSpec", "SweepRow", "RateFit", "SweepResult", "run_sweep",
    "fit_rate", "write_csv", "write_json", "write_svg", "read_json",
    "sweep_spec_from_dict", "check_dominance", "DISTANCE_KINDS", "DESK_CAPS",
    "__version__",
]
