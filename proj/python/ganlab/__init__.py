"""Numerical laboratory for norm-constrained GAN objectives.

The compiled core exposes the function classes, closed-form constants,
sup/inf distance estimation, and the generalization-gap experiment runner.
"""

from ganlab._core import (  # noqa: F401
    ConfigError,
    IoError,
    NetworkSpec,
    NumericError,
    DistributionSpec,
    __version__,
    apply_measuring,
    compute_bound_report,
    distance,
    draw_samples,
    dyadic_blocking_summary,
    empirical,
    example_config,
    fit_rate,
    forward_composed,
    forward_discriminator,
    forward_generator,
    objective_at,
    parse_config,
    pushforward,
    rademacher_estimate,
    run_experiment,
    run_verification_suites,
    sample_weights,
    uniform_ball,
    uniform_cube,
    vc_scaling,
)
