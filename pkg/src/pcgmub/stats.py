"""Relative entropy against the uniform distribution and its random baseline."""

from __future__ import annotations

import csv
import io

import numpy as np

from .exceptions import AbsoluteContinuityViolated, EmptySample

__all__ = [
    "ProbabilityDistribution",
    "kl_divergence",
    "kl_to_uniform",
    "sample_uniform_simplex",
    "exceedance_fraction",
    "poissonize",
    "kl_histogram",
    "histogram_csv",
]


class ProbabilityDistribution(np.ndarray):
    """1-D float array with entries in ``[0, 1]`` summing to 1 (``±1e-9``)."""

    def __new__(cls, values):
        arr = np.array(values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("a distribution is a nonempty 1-D array")
        if np.any(arr < 0) or np.any(arr > 1):
            raise ValueError("entries must lie in [0, 1]")
        if abs(arr.sum() - 1) > 1e-9:
            raise ValueError(f"entries sum to {arr.sum()!r}, not 1")
        return arr.view(cls)


def kl_divergence(p, q) -> float:
    """``D(P || Q) = sum P_i log2(P_i / Q_i)`` in bits, with ``0 log 0 = 0``.

    Raises
    ------
    AbsoluteContinuityViolated
        If some ``Q_i == 0`` while ``P_i > 0``.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError("P and Q must have the same length")
    support = p > 0
    if np.any(q[support] <= 0):
        raise AbsoluteContinuityViolated("Q vanishes where P does not")
    d = float(np.sum(p[support] * np.log2(p[support] / q[support])))
    # rounding can push D(P||P) a hair below zero
    return max(d, 0.0)


def kl_to_uniform(p) -> np.ndarray:
    """KL divergence in bits from the uniform distribution, row-wise.

    Accepts a single distribution or a ``(n, d)`` stack.
    """
    p = np.asarray(p, dtype=float)
    d = p.shape[-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, p * np.log2(p * d), 0.0)
    return np.maximum(terms.sum(axis=-1), 0.0)


def sample_uniform_simplex(d: int, rng_seed, size: int | None = None):
    """Flat-Dirichlet draws on the ``(d-1)``-simplex.

    ``rng_seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    Returns one :class:`ProbabilityDistribution` when ``size`` is None,
    otherwise a ``(size, d)`` array.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    rng = np.random.default_rng(rng_seed)
    if size is None:
        return ProbabilityDistribution(rng.dirichlet(np.ones(d)))
    return rng.dirichlet(np.ones(d), size=size)


def exceedance_fraction(sample_divergences, threshold: float) -> float:
    """Fraction of samples strictly above ``threshold``."""
    values = np.asarray(sample_divergences, dtype=float)
    if values.size == 0:
        raise EmptySample("no divergences to compare against")
    return float(np.count_nonzero(values > threshold)) / values.size


def poissonize(p, total_counts: int, rng_seed):
    """Independent Poisson counts with means ``total_counts * P_i``.

    Returns ``(counts, frequencies)`` where ``frequencies`` is the counts
    renormalized to sum to one (all zeros if no count was drawn).
    """
    if total_counts < 1:
        raise ValueError("total_counts must be >= 1")
    rng = np.random.default_rng(rng_seed)
    counts = rng.poisson(total_counts * np.asarray(p, dtype=float))
    total = counts.sum()
    freqs = counts / total if total else np.zeros(len(counts))
    return counts, freqs


def kl_histogram(divergences, d: int, bins: int = 100):
    """Probability histogram of divergences on ``[0, log2 d]``.

    Returns ``(edges, probabilities)`` with ``len(edges) == bins + 1``.
    """
    counts, edges = np.histogram(divergences, bins=bins, range=(0.0, np.log2(d)))
    return edges, counts / max(1, len(divergences))


def histogram_csv(edges, probabilities) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["bin_left", "bin_right", "probability"])
    for lo, hi, p in zip(edges[:-1], edges[1:], probabilities):
        writer.writerow([f"{lo:.6g}", f"{hi:.6g}", f"{p:.8g}"])
    return buf.getvalue()
