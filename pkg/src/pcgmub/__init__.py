"""Periodic coarse-grained quadrature measurements and their mutual unbiasedness.

The package simulates 1-D continuous-variable wavefunctions on a grid,
rotates them in phase space with a fractional Fourier transform, measures
them with periodic square-wave masks and checks when two or three such
measurements are mutually unbiased.  Helpers translate the dimensionless
periods to an optical bench and compare measured distributions with a random
baseline through the KL divergence.
"""

from .exceptions import (
    AbsoluteContinuityViolated,
    DegenerateAngle,
    EmptyProjection,
    EmptySample,
    EnvelopeClipped,
    ExcludedAngle,
    IndexOutOfRange,
    InvalidM,
    NonPositiveWidth,
    OutOfRange,
    PcgError,
)
from .frft import EPS_ANGLE, RotationAngle, apply_frft, frft_kernel, frft_matrix, vacuum_phase
from .grid import GridSpec, WaveFunction, gaussian_state, quadrature_variance
from .mub import (
    MubConfig,
    QuadrupleResidual,
    QuadrupleSearch,
    check_pair,
    consistency_residual,
    is_valid_m,
    pair_period,
    quadruple_residual,
    search_quadruples,
    solve_three_directions,
    triple_periods,
    valid_m_values,
)
from .optics import (
    DEFAULT_BENCH,
    BenchSpec,
    Lens,
    PeriodRow,
    Reflection,
    StageSum,
    compose_stages,
    confocal_pair,
    frft_lens_distance,
    lens_angle,
    period_table,
    period_table_csv,
    physical_periods,
    quantize_to_pixels,
    scaling_factor,
)
from .pcg import (
    MaskSpec,
    PcgMeasurement,
    RotatedOmega,
    SeriesTruncation,
    bin_index,
    fourier_coefficient,
    mask_value,
    omega_matrix_direct,
    omega_matrix_rotated,
    pcg_probabilities,
    prepare_masked_state,
    series_tail,
)
from .stats import (
    ProbabilityDistribution,
    exceedance_fraction,
    histogram_csv,
    kl_divergence,
    kl_histogram,
    kl_to_uniform,
    poissonize,
    sample_uniform_simplex,
)

__version__ = "0.1.0"
