"""Elliptical normal region over (temperature, humidity) points.

The baseline fits a sample mean and unbiased covariance over all points and
calls a point anomalous when its squared Mahalanobis distance exceeds the
chi-squared quantile with two degrees of freedom at the chosen confidence.
For two degrees of freedom the quantile has the closed form
``-2 * ln(1 - confidence)``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from entropy_eads.errors import DegenerateDataError

DEFAULT_CONFIDENCE = 0.90
MIN_POINTS = 3


@dataclass(frozen=True, slots=True)
class Point2:
    t: float
    h: float


@dataclass(frozen=True)
class EllipseModel:
    mean: tuple[float, float]
    covariance: tuple[tuple[float, float], tuple[float, float]]
    confidence: float = DEFAULT_CONFIDENCE

    def __post_init__(self) -> None:
        (a, b), (c, d) = self.covariance
        if abs(b - c) > 1e-12 * max(1.0, abs(b), abs(c)):
            raise ValueError("covariance must be symmetric")
        if not (a > 0 and a * d - b * c > 0):
            raise DegenerateDataError("covariance is not positive definite")
        threshold(self.confidence)

    @property
    def threshold(self) -> float:
        return threshold(self.confidence)

    def with_confidence(self, confidence: float) -> EllipseModel:
        return EllipseModel(self.mean, self.covariance, confidence)

    def inverse(self) -> tuple[float, float, float]:
        """Entries ``(i11, i12, i22)`` of the inverse covariance."""
        (a, b), (_, d) = self.covariance
        det = a * d - b * b
        return d / det, -b / det, a / det


def threshold(confidence: float) -> float:
    """Squared-distance cutoff for a 2-D normal at ``confidence``."""
    if not (0.0 < confidence < 1.0):
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    return -2.0 * math.log1p(-confidence)


def fit(points: Sequence[Point2], confidence: float = DEFAULT_CONFIDENCE) -> EllipseModel:
    """Fit mean and unbiased (n - 1) covariance.

    Raises:
        DegenerateDataError: fewer than three points, or a covariance whose
            determinant is at most ``1e-12 * trace**2`` (constant or collinear
            data).
    """
    n = len(points)
    if n < MIN_POINTS:
        raise DegenerateDataError(f"need at least {MIN_POINTS} points to fit, got {n}")
    mt = math.fsum(p.t for p in points) / n
    mh = math.fsum(p.h for p in points) / n
    stt = math.fsum((p.t - mt) ** 2 for p in points) / (n - 1)
    shh = math.fsum((p.h - mh) ** 2 for p in points) / (n - 1)
    sth = math.fsum((p.t - mt) * (p.h - mh) for p in points) / (n - 1)
    det = stt * shh - sth * sth
    trace = stt + shh
    if trace == 0.0:
        raise DegenerateDataError("all points identical: zero covariance")
    if det <= 1e-12 * trace * trace:
        raise DegenerateDataError(
            f"singular covariance (det={det:.3g}, trace={trace:.3g}): points are collinear"
        )
    return EllipseModel((mt, mh), ((stt, sth), (sth, shh)), confidence)


def mahalanobis_sq(p: Point2, m: EllipseModel) -> float:
    i11, i12, i22 = m.inverse()
    dt = p.t - m.mean[0]
    dh = p.h - m.mean[1]
    return i11 * dt * dt + 2.0 * i12 * dt * dh + i22 * dh * dh


def classify_point(p: Point2, m: EllipseModel) -> bool:
    """True when ``p`` is anomalous; points exactly on the boundary are normal."""
    return mahalanobis_sq(p, m) > m.threshold


def ellipse_boundary(m: EllipseModel, k: int = 128) -> list[Point2]:
    """``k`` points on the confidence ellipse, uniform in parameter angle.

    Angle ``j`` is ``2*pi*j/k``, so the points for ``k`` are a subset of the
    points for ``2*k``.
    """
    if k < 8:
        raise ValueError(f"need at least 8 boundary points, got {k}")
    evals, evecs = np.linalg.eigh(np.array(m.covariance, dtype=float))
    scale = np.sqrt(m.threshold * evals)
    angles = 2.0 * np.pi * np.arange(k) / k
    unit = np.stack([np.cos(angles), np.sin(angles)])
    pts = evecs @ (scale[:, None] * unit) + np.array(m.mean)[:, None]
    return [Point2(float(t), float(h)) for t, h in pts.T]
