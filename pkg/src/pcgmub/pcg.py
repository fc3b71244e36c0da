"""Periodic coarse-grained (PCG) measurements along a phase-space direction.

A measurement is a direction ``theta`` plus a periodic square-wave mask
family ``M_k(z; T)``, ``k = 0 .. d-1``, of period ``T`` and bin width
``s = T / d``.  Bins are half open, ``[k s, (k+1) s)`` modulo ``T``, so the
``d`` masks partition the line exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateAngle, EmptyProjection, IndexOutOfRange
from .frft import EPS_ANGLE, RotationAngle, apply_frft, frft_matrix
from .grid import GridSpec, WaveFunction

__all__ = [
    "MaskSpec",
    "PcgMeasurement",
    "SeriesTruncation",
    "mask_value",
    "bin_index",
    "fourier_coefficient",
    "series_tail",
    "prepare_masked_state",
    "pcg_probabilities",
    "omega_matrix_direct",
    "omega_matrix_rotated",
    "RotatedOmega",
]

#: Default bound on the neglected squared coefficient mass.
DEFAULT_TAIL = 1e-4


@dataclass(frozen=True)
class MaskSpec:
    """Periodic mask family with ``d`` bins per period ``T``.

    ``origin`` shifts the mask: bin ``k`` covers ``origin + [k s, (k+1) s)``
    modulo ``T``.
    """

    d: int
    period: float
    origin: float = 0.0

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"d must be an integer >= 2, got {self.d}")
        if not self.period > 0:
            raise ValueError(f"period must be > 0, got {self.period}")
        object.__setattr__(self, "d", int(self.d))

    @property
    def bin_width(self) -> float:
        return self.period / self.d


@dataclass(frozen=True)
class PcgMeasurement:
    direction: RotationAngle
    mask: MaskSpec

    def __post_init__(self):
        if not isinstance(self.direction, RotationAngle):
            object.__setattr__(self, "direction", RotationAngle(self.direction))

    @property
    def d(self) -> int:
        return self.mask.d


@dataclass(frozen=True)
class SeriesTruncation:
    """Keep Fourier terms with ``|N| <= n_max``."""

    n_max: int

    @classmethod
    def for_tail(cls, d: int, tail: float = DEFAULT_TAIL) -> "SeriesTruncation":
        """Smallest ``n_max >= d`` whose neglected ``sum |f_N|**2`` is below ``tail``.

        ``sum |f_N|`` diverges (``|f_N| ~ 1/N``), so the squared tail, which
        bounds the neglected Hilbert-Schmidt mass, is what gets controlled.
        """
        n = d
        while series_tail(n, d) >= tail:
            n = int(n * 1.25) + 1
        lo, hi = max(d, n // 2), n
        while lo < hi:
            mid = (lo + hi) // 2
            if series_tail(mid, d) < tail:
                hi = mid
            else:
                lo = mid + 1
        return cls(lo)


def _check_k(k, d):
    if int(k) != k or not 0 <= k < d:
        raise IndexOutOfRange(f"bin index {k} outside [0, {d})")
    return int(k)


def bin_index(mask: MaskSpec, z) -> np.ndarray:
    """Bin label ``k`` (0 .. d-1) occupied by each ``z``."""
    r = np.mod(np.asarray(z, dtype=float) - mask.origin, mask.period)
    k = np.floor(r / mask.bin_width).astype(int)
    # r can round up to the period itself
    return np.minimum(k, mask.d - 1)


def mask_value(mask: MaskSpec, k: int, z):
    """``M_k(z)``: 1 where ``(z - origin) mod T`` lies in ``[k s, (k+1) s)``, else 0."""
    k = _check_k(k, mask.d)
    out = (bin_index(mask, z) == k).astype(int)
    return int(out) if out.ndim == 0 else out


def fourier_coefficient(n, d: int):
    """Coefficient ``f_N = (1 - exp(-2 pi i N / d)) / (2 pi i N)``, ``f_0 = 1/d``.

    Vectorized over ``n``.  With these coefficients
    ``M_k(z) = sum_N f_N exp(-2 pi i N k / d) exp(2 pi i N z / T)``.
    """
    n_arr = np.asarray(n)
    nf = n_arr.astype(float)
    out = np.full(nf.shape, 1.0 / d, dtype=complex)
    nz = n_arr != 0
    out[nz] = (1 - np.exp(-2j * np.pi * nf[nz] / d)) / (2j * np.pi * nf[nz])
    # exact zeros for multiples of d
    out[nz & (np.mod(n_arr, d) == 0)] = 0.0
    return complex(out) if out.ndim == 0 else out


def series_tail(n_max: int, d: int) -> float:
    """``sum_{|N| > n_max} |f_N|**2``, using ``sum_N |f_N|**2 = 1/d``."""
    n = np.arange(1, n_max + 1)
    kept = 1.0 / d**2 + 2 * float(np.sum(np.abs(fourier_coefficient(n, d)) ** 2))
    return max(0.0, 1.0 / d - kept)


def _rotated_mask(psi: WaveFunction, meas: PcgMeasurement, method: str):
    rotated = apply_frft(psi, meas.direction, method=method)
    labels = bin_index(meas.mask, psi.grid.points)
    return rotated, labels


def prepare_masked_state(
    psi: WaveFunction, meas: PcgMeasurement, k: int, method: str = "shear"
) -> WaveFunction:
    """Project ``psi`` onto bin ``k`` of ``meas`` and renormalize.

    ``psi`` is given in the reference (``theta = 0``) frame; it is rotated
    into the measurement frame, multiplied by ``M_k``, renormalized, and
    rotated back.

    Raises
    ------
    IndexOutOfRange
        If ``k`` is not in ``[0, d)``.
    EmptyProjection
        If the masked norm is below ``1e-12``.
    """
    k = _check_k(k, meas.d)
    rotated, labels = _rotated_mask(psi, meas, method)
    masked = np.where(labels == k, rotated.amplitudes, 0)
    state = WaveFunction(psi.grid, masked)
    if state.norm() < 1e-12:
        raise EmptyProjection(f"bin {k} of {meas.mask} does not overlap the state")
    return apply_frft(state.normalized(), -meas.direction.value, method=method)


def pcg_probabilities(
    psi: WaveFunction, meas: PcgMeasurement, method: str = "shear"
) -> np.ndarray:
    """Outcome probabilities ``p_k = integral M_k(q) |psi_theta(q)|**2 dq``.

    Returns an array of length ``d``.  Values within ``1e-9`` outside
    ``[0, 1]`` are clamped; larger excursions raise.
    """
    rotated, labels = _rotated_mask(psi, meas, method)
    w = rotated.density() * psi.grid.spacing
    p = np.bincount(labels, weights=w, minlength=meas.d)
    if np.any(p < -1e-9) or np.any(p > 1 + 1e-9):
        raise ValueError(f"probabilities out of range: {p}")
    return np.clip(p, 0.0, 1.0)


def omega_matrix_direct(
    meas: PcgMeasurement, k: int, grid: GridSpec, frame=None
) -> np.ndarray:
    """Matrix of ``Omega_k`` built from the mask in its own frame.

    In the measurement frame the matrix is ``diag(M_k(q_j)) * spacing``.  With
    ``frame`` given, it is expressed in the ``frame`` basis as ``K^† D K``
    where ``K = frft_matrix(grid, theta - frame)`` maps the ``frame``
    representation to the measurement representation.
    """
    k = _check_k(k, meas.d)
    diag = mask_value(meas.mask, k, grid.points) * grid.spacing
    if frame is None:
        return np.diag(diag).astype(complex)
    kmat = frft_matrix(grid, meas.direction.value - float(frame))
    return kmat.conj().T @ (diag[:, None] * kmat)


@dataclass(frozen=True)
class RotatedOmega:
    """Series assembly of ``Omega_k`` in a rotated basis.

    ``dropped_weight`` is the squared Frobenius mass of series entries whose
    shifted column fell outside the grid, relative to the mass of all
    entries visited.  ``max_offset`` is the largest distance (in units of the
    spacing) between an exact shifted point and the sample it was rounded to.
    """

    matrix: np.ndarray
    n_max: int
    tau: float
    dropped_weight: float
    max_offset: float


def omega_matrix_rotated(
    meas: PcgMeasurement,
    k: int,
    frame,
    grid: GridSpec,
    trunc: SeriesTruncation | None = None,
) -> RotatedOmega:
    """Assemble ``Omega_k`` in the ``frame`` basis from its Fourier series.

    Implements

        Omega_k = sum_N f_N integral dq e^{i N phi_k^N(q)} |q><q - N tau|,
        tau = 2 pi sin(dth) / T,
        phi_k^N(q) = tau (q - N tau / 2) cot(dth) - (2 pi k / d + q_cen tau / sin(dth)),

    with ``dth = frame - theta``.  Shifted points ``q - N tau`` are rounded
    to the nearest sample; rows whose shifted point leaves the grid are
    dropped and counted in :attr:`RotatedOmega.dropped_weight`.

    Raises
    ------
    DegenerateAngle
        If ``|sin(frame - theta)| <= EPS_ANGLE``.
    """
    k = _check_k(k, meas.d)
    d = meas.d
    dth = float(frame) - meas.direction.value
    sin = math.sin(dth)
    if abs(sin) <= EPS_ANGLE:
        raise DegenerateAngle(f"frame and direction are parallel (sin = {sin:.3g})")
    cot = math.cos(dth) / sin
    if trunc is None:
        trunc = SeriesTruncation.for_tail(d)
    tau = 2 * math.pi * sin / meas.mask.period
    q, h, n = grid.points, grid.spacing, grid.n_points
    rows = np.arange(n)
    const = 2 * math.pi * k / d + meas.mask.origin * tau / sin

    mat = np.zeros((n, n), dtype=complex)
    kept = dropped = 0.0
    max_offset = 0.0
    orders = np.arange(-trunc.n_max, trunc.n_max + 1)
    coeffs = fourier_coefficient(orders, d)
    for order, f in zip(orders, coeffs):
        if f == 0:
            continue
        weight = abs(f) ** 2 * h**2
        cols_exact = rows - order * tau / h
        cols = np.rint(cols_exact).astype(np.int64)
        inside = (cols >= 0) & (cols < n)
        n_in = int(np.count_nonzero(inside))
        kept += weight * n_in
        dropped += weight * (n - n_in)
        if not n_in:
            continue
        max_offset = max(max_offset, float(np.max(np.abs(cols_exact - cols)[inside])))
        phase = order * (tau * (q - order * tau / 2) * cot - const)
        mat[rows[inside], cols[inside]] += f * np.exp(1j * phase[inside]) * h
    total = kept + dropped
    return RotatedOmega(
        matrix=mat,
        n_max=trunc.n_max,
        tau=tau,
        dropped_weight=dropped / total if total else 0.0,
        max_offset=max_offset,
    )
