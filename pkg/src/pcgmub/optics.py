"""Optical bench geometry for lens-based fractional Fourier transforms.

Lengths are in meters throughout.  A single lens of focal length ``f`` with
input and output planes a distance ``z`` away rotates phase space by
``theta`` with ``z = 2 f sin(theta/2)**2``.  Dimensionless coordinates are
physical ones divided by ``delta = sqrt(lambda f sin(theta) / (2 pi))``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .exceptions import DegenerateAngle, OutOfRange
from .mub import triple_periods

__all__ = [
    "Lens",
    "Reflection",
    "BenchSpec",
    "StageSum",
    "PeriodRow",
    "lens_angle",
    "frft_lens_distance",
    "scaling_factor",
    "physical_periods",
    "quantize_to_pixels",
    "pixel_count",
    "compose_stages",
    "confocal_pair",
    "period_table",
    "period_table_csv",
    "DEFAULT_BENCH",
]


@dataclass(frozen=True)
class Lens:
    focal_length: float
    distance: float

    @property
    def angle(self) -> float:
        return lens_angle(self.focal_length, self.distance)


@dataclass(frozen=True)
class Reflection:
    """Mirror reflection ``x -> -x`` (reflective SLMs)."""


@dataclass(frozen=True)
class BenchSpec:
    """Optical parameters that set the physical scale.

    ``focal_length`` and ``angle`` define the scaling factor; ``stages`` is an
    ordered list of :class:`Lens` / :class:`Reflection` elements.
    """

    wavelength: float = 635e-9
    focal_length: float = 0.400
    angle: float = math.pi / 3
    pixel_length: float = 8e-6
    stages: tuple = field(default=())

    def __post_init__(self):
        for name in ("wavelength", "focal_length", "pixel_length"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")

    @property
    def scale(self) -> float:
        return scaling_factor(self.wavelength, self.focal_length, self.angle)


DEFAULT_BENCH = BenchSpec()


def lens_angle(focal_length: float, distance: float) -> float:
    """Rotation angle in ``(0, pi]`` of a symmetric single-lens system.

    Raises
    ------
    OutOfRange
        Unless ``0 < distance <= 2 * focal_length``.
    """
    if not focal_length > 0:
        raise OutOfRange("focal length must be positive")
    ratio = distance / (2 * focal_length)
    if not 0 < ratio <= 1:
        raise OutOfRange(f"need 0 < z <= 2f, got z={distance}, f={focal_length}")
    return 2 * math.asin(math.sqrt(ratio))


def frft_lens_distance(focal_length: float, theta: float) -> float:
    """Inverse of :func:`lens_angle`: ``z = 2 f sin(theta/2)**2``."""
    if not 0 < theta <= math.pi:
        raise OutOfRange(f"theta must lie in (0, pi], got {theta}")
    return 2 * focal_length * math.sin(theta / 2) ** 2


def scaling_factor(wavelength: float, focal_length: float, theta: float) -> float:
    """``sqrt(lambda f sin(theta) / (2 pi))``."""
    s = math.sin(theta)
    if not s > 0:
        raise DegenerateAngle(f"scaling factor needs sin(theta) > 0, got {s}")
    return math.sqrt(wavelength * focal_length * s / (2 * math.pi))


def physical_periods(d: int, bench: BenchSpec = DEFAULT_BENCH, m=(1, 1, 1)):
    """Triple mask periods ``(T_x, T_r, T_s)`` in meters."""
    delta = bench.scale
    return tuple(t * delta for t in triple_periods(*m, d))


def quantize_to_pixels(period: float, pixel_length: float) -> float:
    """Nearest whole number of pixels, ties to even."""
    return pixel_length * pixel_count(period, pixel_length)


def pixel_count(period: float, pixel_length: float) -> int:
    """``round(period / pixel_length)`` with ties to even.

    The ratio is first rounded to nine decimals so that a tie such as
    ``756.0 um / 8 um`` is not broken by floating-point noise.
    """
    if not pixel_length > 0:
        raise ValueError("pixel_length must be > 0")
    return round(round(period / pixel_length, 9))


@dataclass(frozen=True)
class StageSum:
    """Net effect of a stage list.

    ``angle`` is the total rotation in ``[0, 2 pi)`` (reflections count as
    ``pi``); ``signed_angle`` is the same angle in ``(-pi, pi]``;
    ``axis_flipped`` records an odd number of reflections.
    """

    angle: float
    signed_angle: float
    axis_flipped: bool

    @property
    def effective_angle(self) -> float:
        """``|signed_angle|``; the sign convention is left to the caller."""
        return abs(self.signed_angle)


def compose_stages(stages) -> StageSum:
    total, flips = 0.0, 0
    for stage in stages:
        if isinstance(stage, Reflection):
            total += math.pi
            flips += 1
        elif isinstance(stage, Lens):
            total += stage.angle
        else:
            raise TypeError(f"unknown stage {stage!r}")
    angle = math.fmod(total, 2 * math.pi)
    if angle < 1e-12 or 2 * math.pi - angle < 1e-12:
        angle = 0.0
    signed = math.remainder(angle, 2 * math.pi)
    if abs(signed) < 1e-12:
        signed = 0.0
    return StageSum(angle, signed, bool(flips % 2))


def confocal_pair(focal_length: float) -> tuple[Lens, Lens]:
    """Two lenses sharing a focal plane: a ``pi`` rotation."""
    lens = Lens(focal_length, focal_length)
    return lens, lens


@dataclass(frozen=True)
class PeriodRow:
    d: int
    period_um: float
    period_over_pixel: float
    pixels: int

    @property
    def quantized_um(self) -> float:
        return self.pixels * self.period_um / self.period_over_pixel


def period_table(bench: BenchSpec = DEFAULT_BENCH, dims=range(2, 11)) -> list[PeriodRow]:
    """Ideal and pixel-quantized ``m = 1`` triple periods for each ``d``."""
    rows = []
    for d in dims:
        period = physical_periods(d, bench)[0]
        rows.append(
            PeriodRow(
                d=d,
                period_um=period * 1e6,
                period_over_pixel=period / bench.pixel_length,
                pixels=pixel_count(period, bench.pixel_length),
            )
        )
    return rows


def period_table_csv(rows) -> str:
    """CSV with columns ``d,T_um,T_over_l,T_exp_um`` (one decimal, integer)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["d", "T_um", "T_over_l", "T_exp_um"])
    for row in rows:
        writer.writerow(
            [
                row.d,
                f"{row.period_um:.1f}",
                f"{row.period_over_pixel:.1f}",
                f"{round(row.quantized_um):d}",
            ]
        )
    return buf.getvalue()
