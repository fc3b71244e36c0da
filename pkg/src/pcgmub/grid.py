"""Sampled one-dimensional wavefunctions over a dimensionless quadrature.

All transforms in the package act on samples ``psi[j] = psi(q_j)`` taken on a
uniform, endpoint-exclusive grid ``q_j = center - L + j * spacing``.  Norms and
inner products use the rectangle rule, which is spectrally accurate for smooth
states that vanish at the grid edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import EnvelopeClipped, NonPositiveWidth

__all__ = [
    "GridSpec",
    "WaveFunction",
    "gaussian_state",
    "quadrature_variance",
]

#: Envelope value that counts as "decayed" at the grid edges.
EDGE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid ``center - L + j * (2L / N)`` for ``j = 0 .. N-1``.

    Parameters
    ----------
    half_extent : float
        Half width ``L`` of the sampled window.
    n_points : int
        Number of samples ``N`` (at least 16).
    center : float, optional
        Midpoint of the window.  Fractional transforms rotate about ``q = 0``,
        so grids used with a reflection step must satisfy ``2 * center /
        spacing`` integral (see :attr:`is_symmetric`).
    """

    half_extent: float
    n_points: int
    center: float = 0.0

    def __post_init__(self):
        if not self.half_extent > 0:
            raise ValueError(f"half_extent must be > 0, got {self.half_extent}")
        if int(self.n_points) != self.n_points or self.n_points < 16:
            raise ValueError(f"n_points must be an integer >= 16, got {self.n_points}")
        object.__setattr__(self, "n_points", int(self.n_points))

    @classmethod
    def balanced(cls, n_points: int) -> "GridSpec":
        """Grid whose position and momentum windows coincide.

        With ``L**2 = pi * N / 2`` the FFT momentum window ``[-pi/h, pi/h)``
        equals the position window, so phase-space rotations of compact
        states stay inside the sampled square.
        """
        return cls(math.sqrt(math.pi * n_points / 2), n_points)

    @classmethod
    def aligned(
        cls, n_points: int, bin_width: float, target_spacing: float | None = None
    ) -> "GridSpec":
        """Grid whose sample midpoints fall on bin edges.

        The spacing is ``bin_width / n`` with ``n`` the integer closest to
        ``bin_width / target_spacing`` (the balanced spacing by default), and
        the grid is offset by half a sample.  Mask edges at integer multiples
        of ``bin_width`` then never cut a sample cell, which makes
        rectangle-rule bin integrals second-order accurate.
        """
        if not bin_width > 0:
            raise ValueError("bin_width must be > 0")
        h_bal = target_spacing or math.sqrt(2 * math.pi / n_points)
        per_bin = max(1, round(bin_width / h_bal))
        h = bin_width / per_bin
        return cls(n_points * h / 2, n_points, center=h / 2)

    @property
    def spacing(self) -> float:
        return 2 * self.half_extent / self.n_points

    @property
    def points(self) -> np.ndarray:
        return self.start + self.spacing * np.arange(self.n_points)

    @property
    def start(self) -> float:
        return self.center - self.half_extent

    @property
    def momenta(self) -> np.ndarray:
        """FFT-ordered angular frequencies conjugate to :attr:`points`."""
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)

    @property
    def is_symmetric(self) -> bool:
        """True when ``q -> -q`` maps the periodic grid onto itself."""
        k = 2 * self.start / self.spacing
        return abs(k - round(k)) < 1e-9

    def reflection_index(self) -> np.ndarray:
        """Index map ``j -> j'`` with ``q_j' = -q_j`` (modulo the period)."""
        if not self.is_symmetric:
            raise ValueError("grid is not symmetric about q = 0")
        k = round(2 * self.start / self.spacing)
        return np.mod(-k - np.arange(self.n_points), self.n_points)


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex amplitudes sampled on a :class:`GridSpec`.

    The amplitude array is copied and made read-only on construction.
    """

    grid: GridSpec
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} amplitudes, got shape {amps.shape}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.amplitudes) ** 2)) * self.grid.spacing)

    def normalized(self) -> "WaveFunction":
        n = self.norm()
        if n == 0:
            raise ValueError("cannot normalize the zero state")
        return WaveFunction(self.grid, self.amplitudes / n)

    def density(self) -> np.ndarray:
        """``|psi(q_j)|**2`` (not multiplied by the spacing)."""
        return np.abs(self.amplitudes) ** 2

    def inner(self, other: "WaveFunction") -> complex:
        """``<self|other>`` by the rectangle rule."""
        self._check_grid(other)
        return complex(np.vdot(self.amplitudes, other.amplitudes) * self.grid.spacing)

    def distance(self, other: "WaveFunction") -> float:
        """L2 distance ``||self - other||``."""
        self._check_grid(other)
        diff = self.amplitudes - other.amplitudes
        return math.sqrt(float(np.sum(np.abs(diff) ** 2)) * self.grid.spacing)

    def mean(self) -> float:
        w = self.density()
        return float(np.sum(self.grid.points * w) / np.sum(w))

    def variance(self) -> float:
        w = self.density()
        w = w / np.sum(w)
        q = self.grid.points
        mu = np.sum(q * w)
        return float(np.sum((q - mu) ** 2 * w))

    def _check_grid(self, other):
        if other.grid != self.grid:
            raise ValueError("wavefunctions live on different grids")


def gaussian_state(
    grid: GridSpec, center: float = 0.0, width: float = 1 / math.sqrt(2), tilt: float = 0.0
) -> WaveFunction:
    """Normalized ``exp(-(q - q0)**2 / (4 width**2)) * exp(i tilt q)``.

    ``width`` is the standard deviation of ``|psi|**2``; the vacuum is
    ``width = 1/sqrt(2)``.

    Raises
    ------
    NonPositiveWidth
        If ``width <= 0``.
    EnvelopeClipped
        If the envelope exceeds ``1e-12`` at either grid edge.
    """
    if not width > 0:
        raise NonPositiveWidth(f"width must be > 0, got {width}")
    lo, hi = grid.start, grid.center + grid.half_extent
    edge = max(abs(lo - center), abs(hi - center))
    near = min(abs(lo - center), abs(hi - center))
    if not lo < center < hi or math.exp(-(near**2) / (4 * width**2)) > EDGE_TOLERANCE:
        raise EnvelopeClipped(
            f"Gaussian (q0={center}, width={width}) is not contained in "
            f"[{lo:.3f}, {hi:.3f}]; edge distance {near:.3f}, far edge {edge:.3f}"
        )
    q = grid.points
    psi = np.exp(-((q - center) ** 2) / (4 * width**2) + 1j * tilt * q)
    return WaveFunction(grid, psi).normalized()


def quadrature_variance(psi: WaveFunction, theta: float, method: str = "shear") -> float:
    """Variance of ``cos(theta) x + sin(theta) p`` in state ``psi``.

    The state is rotated into the ``theta`` frame and the second central
    moment of ``|psi_theta|**2`` is taken on the grid.
    """
    from .frft import apply_frft

    return apply_frft(psi, theta, method=method).variance()
