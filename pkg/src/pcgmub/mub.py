"""Mutual-unbiasedness conditions for PCG measurements.

Two PCG measurements along ``theta`` and ``theta'`` with periods ``T`` and
``T'`` are unbiased when

    T T' / (2 pi) = d |sin(theta - theta')| / m

for a natural number ``m`` such that ``m n / d`` is not an integer for any
``n = 1 .. d-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateAngle, ExcludedAngle, InvalidM
from .frft import EPS_ANGLE, RotationAngle

__all__ = [
    "MubConfig",
    "QuadrupleResidual",
    "QuadrupleSearch",
    "valid_m_values",
    "is_valid_m",
    "check_pair",
    "pair_period",
    "triple_periods",
    "solve_three_directions",
    "consistency_residual",
    "quadruple_residual",
    "search_quadruples",
]

#: Angles closer than this modulo pi count as the same direction.
COINCIDENCE_TOL = 1e-7


def valid_m_values(d: int, m_max: int) -> list[int]:
    """All ``m`` in ``[1, m_max]`` with ``m n / d`` non-integral for ``n < d``.

    Direct enumeration of the definition, no number theory shortcut.
    """
    if d < 2 or m_max < 1:
        raise ValueError("need d >= 2 and m_max >= 1")
    m = np.arange(1, m_max + 1)
    n = np.arange(1, d)
    hits = (np.outer(m, n) % d) == 0
    return [int(v) for v in m[~hits.any(axis=1)]]


def is_valid_m(m: int, d: int) -> bool:
    return m >= 1 and int(m) == m and all((m * n) % d for n in range(1, d))


def _abs_sin(delta) -> float:
    s = abs(math.sin(float(delta)))
    if s <= EPS_ANGLE:
        raise DegenerateAngle(f"directions are parallel (|sin| = {s:.3g})")
    return s


def check_pair(period, other_period, delta_theta, d: int, tol: float = 1e-6):
    """Return ``m`` if the two periods satisfy the unbiasedness condition.

    ``m* = 2 pi d |sin(delta)| / (T T')`` must lie within relative ``tol``
    of a valid integer.  Returns ``None`` otherwise (including the excluded
    multiples of ``d``).
    """
    m_star = 2 * math.pi * d * _abs_sin(delta_theta) / (period * other_period)
    m = round(m_star)
    if m < 1 or abs(m_star - m) >= tol * m:
        return None
    return m if is_valid_m(m, d) else None


def pair_period(ref_period: float, delta_theta, d: int, m: int = 1) -> float:
    """Second period ``2 pi d |sin(delta)| / (m T_ref)`` completing an unbiased pair."""
    if not is_valid_m(m, d):
        raise InvalidM(f"m={m} is not allowed for d={d}")
    return 2 * math.pi * d * _abs_sin(delta_theta) / (m * ref_period)


def triple_periods(m1: int, m2: int, m3: int, d: int) -> tuple[float, float, float]:
    """Periods ``(T_x, T_r, T_s)`` for directions ``0, 2 pi/3, 4 pi/3``.

    ``m1``, ``m2``, ``m3`` label the pairs ``(x, r)``, ``(x, s)``, ``(r, s)``.
    """
    for m in (m1, m2, m3):
        if not is_valid_m(m, d):
            raise InvalidM(f"m={m} is not allowed for d={d}")
    tx = math.sqrt(math.sqrt(3) * math.pi * d * m3 / (m1 * m2))
    return tx, m2 / m3 * tx, m1 / m3 * tx


@dataclass(frozen=True)
class MubConfig:
    """A set of directions with periods, checked pairwise.

    ``m_matrix`` optionally fixes the expected ``m`` for each pair ``(i, j)``
    with ``i < j``; missing pairs accept any valid ``m``.
    """

    d: int
    directions: tuple[tuple[float, float], ...]
    m_matrix: dict = field(default_factory=dict)

    def __post_init__(self):
        dirs = tuple((RotationAngle(t).value, float(T)) for t, T in self.directions)
        for i in range(len(dirs)):
            for j in range(i + 1, len(dirs)):
                if abs(math.sin(dirs[i][0] - dirs[j][0])) <= EPS_ANGLE:
                    raise DegenerateAngle(f"directions {i} and {j} are parallel")
        object.__setattr__(self, "directions", dirs)

    def pair_m(self, tol: float = 1e-6) -> dict[tuple[int, int], int | None]:
        """``check_pair`` for every pair of directions."""
        out = {}
        for i, (ti, Ti) in enumerate(self.directions):
            for j in range(i + 1, len(self.directions)):
                tj, Tj = self.directions[j]
                out[(i, j)] = check_pair(Ti, Tj, ti - tj, self.d, tol)
        return out

    def is_unbiased(self, tol: float = 1e-6) -> bool:
        for pair, m in self.pair_m(tol).items():
            if m is None:
                return False
            want = self.m_matrix.get(pair)
            if want is not None and want != m:
                return False
        return True


def solve_three_directions(thetas, d: int) -> tuple[float, float, float]:
    """Periods making three arbitrary directions pairwise unbiased with ``m = 1``.

    Solves the single consistency condition
    ``|cot(t3 - t1) - cot(t2 - t1)| = 2 pi d / T1**2`` for ``T1`` and then
    ``T_j = 2 pi d |sin(t1 - tj)| / T1``.
    """
    t1, t2, t3 = (float(t) for t in thetas)
    for a, b in ((t1, t2), (t1, t3), (t2, t3)):
        _abs_sin(a - b)
    gap = abs(1 / math.tan(t3 - t1) - 1 / math.tan(t2 - t1))
    t1_period = math.sqrt(2 * math.pi * d / gap)
    return (
        t1_period,
        2 * math.pi * d * abs(math.sin(t1 - t2)) / t1_period,
        2 * math.pi * d * abs(math.sin(t1 - t3)) / t1_period,
    )


def consistency_residual(config: MubConfig, m: int = 1) -> float:
    """Largest ``|m* / m - 1|`` over all pairs of ``config``."""
    worst = 0.0
    dirs = config.directions
    for i in range(len(dirs)):
        for j in range(i + 1, len(dirs)):
            (ti, Ti), (tj, Tj) = dirs[i], dirs[j]
            m_star = 2 * math.pi * config.d * _abs_sin(ti - tj) / (Ti * Tj)
            worst = max(worst, abs(m_star / m - 1))
    return worst


@dataclass(frozen=True)
class QuadrupleResidual:
    """Consistency residual of a four-direction ``m = 1`` configuration.

    ``theta_1 = 0``; ``zeta_j = cot(theta_j) / cot(theta_2)``.  The residual
    vanishes iff ``|zeta3 - 1| = |zeta4 - 1| = |zeta4 - zeta3|``.
    """

    zeta3: float
    zeta4: float
    residual: float
    degenerate: bool


def _same_direction(a: float, b: float) -> bool:
    return abs(math.remainder(a - b, math.pi)) <= COINCIDENCE_TOL


def quadruple_residual(theta2, theta3, theta4) -> QuadrupleResidual:
    """Residual of the three consistency conditions with ``theta_1 = 0``.

    Raises
    ------
    ExcludedAngle
        If a direction is within ``1e-9`` of ``±x`` (angle 0 or pi), or if
        ``cot(theta2)`` vanishes (``theta2`` along ``±p``).
    """
    t2, t3, t4 = (RotationAngle(t).value for t in (theta2, theta3, theta4))
    for name, t in (("theta2", t2), ("theta3", t3), ("theta4", t4)):
        if abs(math.sin(t)) <= EPS_ANGLE:
            raise ExcludedAngle(f"{name}={t} reproduces the ±x direction")
    if abs(math.cos(t2)) <= EPS_ANGLE:
        raise ExcludedAngle("cot(theta2) = 0: theta2 reproduces the ±p direction")
    c2 = math.cos(t2) / math.sin(t2)
    z3 = math.cos(t3) / math.sin(t3) / c2
    z4 = math.cos(t4) / math.sin(t4) / c2
    a, b, c = abs(z3 - 1), abs(z4 - 1), abs(z4 - z3)
    residual = max(abs(a - b), abs(c - b))
    degenerate = (
        _same_direction(t2, t3) or _same_direction(t2, t4) or _same_direction(t3, t4)
    )
    return QuadrupleResidual(z3, z4, residual, degenerate)


@dataclass(frozen=True)
class QuadrupleSearch:
    min_residual: float
    argmin: tuple[float, float, float]
    trials: int
    n_degenerate: int
    n_excluded: int


def search_quadruples(trials: int, rng_seed: int, chunk: int = 65536) -> QuadrupleSearch:
    """Random search for a fourth ``m = 1`` direction.

    Draws ``(theta2, theta3, theta4)`` uniformly on ``[0, 2 pi)`` with
    ``theta1 = 0`` and returns the smallest residual among non-degenerate
    samples.  Samples hitting the excluded angles are skipped.

    Raises
    ------
    RuntimeError
        If a non-degenerate sample has residual below ``1e-6``; that would
        contradict the impossibility of four such directions.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(rng_seed)
    best, best_arg = math.inf, (math.nan,) * 3
    n_deg = n_exc = 0
    done = 0
    while done < trials:
        size = min(chunk, trials - done)
        t = rng.uniform(0.0, 2 * math.pi, size=(size, 3))
        done += size
        s, c = np.sin(t), np.cos(t)
        excluded = (np.abs(s) <= EPS_ANGLE).any(axis=1) | (np.abs(c[:, 0]) <= EPS_ANGLE)
        cot = c / np.where(excluded[:, None], 1.0, s)
        z3 = cot[:, 1] / cot[:, 0]
        z4 = cot[:, 2] / cot[:, 0]
        a, b, cc = np.abs(z3 - 1), np.abs(z4 - 1), np.abs(z4 - z3)
        res = np.maximum(np.abs(a - b), np.abs(cc - b))

        def coincide(x, y):
            return np.abs(np.remainder(x - y + math.pi / 2, math.pi) - math.pi / 2) <= COINCIDENCE_TOL

        degenerate = (
            coincide(t[:, 0], t[:, 1]) | coincide(t[:, 0], t[:, 2]) | coincide(t[:, 1], t[:, 2])
        )
        n_exc += int(np.count_nonzero(excluded))
        n_deg += int(np.count_nonzero(degenerate & ~excluded))
        ok = ~excluded & ~degenerate
        if not ok.any():
            continue
        i = int(np.argmin(np.where(ok, res, np.inf)))
        if res[i] < best:
            best, best_arg = float(res[i]), tuple(float(v) for v in t[i])
    if best < 1e-6:
        raise RuntimeError(
            f"non-degenerate quadruple with residual {best:.3g} at {best_arg}"
        )
    return QuadrupleSearch(best, best_arg, trials, n_deg, n_exc)
