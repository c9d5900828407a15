"""Generators for the planar test corpus."""

from __future__ import annotations

import numpy as np
from scipy.ndimage import gaussian_filter1d

from minksym.geometry.base import GeometryError
from minksym.geometry.star2d import DEFAULT_GRID_M, StarBody2D, grid_angles


def _check_positive(name: str, value: float) -> None:
    if not np.isfinite(value) or value <= 0:
        raise GeometryError(f"{name} must be positive, got {value}")


def gen_disc(rho: float, m: int = DEFAULT_GRID_M) -> StarBody2D:
    """Centred disc of radius ρ; ρ = 0 gives the body {0}."""
    if not np.isfinite(rho) or rho < 0:
        raise GeometryError(f"Disc radius must be nonnegative, got {rho}")
    return StarBody2D(np.full(m, float(rho)))


def gen_segment(R: float, a: int = 0, m: int = DEFAULT_GRID_M) -> StarBody2D:
    """Segment [0, R·e(2πa/m)]."""
    _check_positive("Segment length", R)
    if not 0 <= a < m:
        raise GeometryError(f"Segment grid index {a} outside [0, {m})")
    r = np.zeros(m)
    r[a] = R
    return StarBody2D(r)


def gen_spiky(
    spikes: int,
    length: float,
    base: float,
    m: int = DEFAULT_GRID_M,
    seed: int | None = None,
) -> StarBody2D:
    """Disc of radius ``base`` with ``spikes`` one-index-wide spikes of ``length``.

    Spikes sit at evenly spread grid indices; a seed rotates the pattern by a
    random number of grid steps.
    """
    if spikes < 1 or spikes > m:
        raise GeometryError(f"Spike count must lie in [1, {m}], got {spikes}")
    _check_positive("Spike length", length)
    if not np.isfinite(base) or base < 0 or base >= length:
        raise GeometryError(f"Base radius must lie in [0, length), got {base}")

    offset = 0 if seed is None else int(np.random.default_rng(seed).integers(m))
    idx = (offset + (np.arange(spikes) * m) // spikes) % m
    r = np.full(m, float(base))
    r[idx] = length
    return StarBody2D(r)


def gen_cross(arm: float, width: float, m: int = DEFAULT_GRID_M) -> StarBody2D:
    """Plus sign: union of [-arm, arm]×[-w/2, w/2] and its quarter turn."""
    _check_positive("Cross arm", arm)
    _check_positive("Cross width", width)
    if width / 2 > arm:
        raise GeometryError(f"Cross width {width} exceeds its span {2 * arm}")

    theta = grid_angles(m)
    c = np.abs(np.cos(theta))
    s = np.abs(np.sin(theta))
    half = width / 2
    with np.errstate(divide="ignore"):
        horizontal = np.minimum(arm / c, half / s)
        vertical = np.minimum(half / c, arm / s)
    return StarBody2D(np.maximum(horizontal, vertical))


def gen_random_star(
    seed: int,
    m: int = DEFAULT_GRID_M,
    bounds: tuple[float, float] = (0.5, 1.0),
    smoothing: float | None = None,
) -> StarBody2D:
    """Random star: i.i.d. radii, circularly smoothed, stretched back onto ``bounds``.

    Args:
        seed: Generator seed.
        m: Grid size.
        bounds: (low, high) range of the radial values.
        smoothing: Gaussian width in grid steps; defaults to m/24.

    Returns:
        StarBody2D with min r = low and max r = high.
    """
    low, high = bounds
    if not (np.isfinite(low) and np.isfinite(high)) or low < 0 or high <= low:
        raise GeometryError(f"Bounds must satisfy 0 <= low < high, got {bounds}")
    sigma = m / 24 if smoothing is None else smoothing
    _check_positive("Smoothing width", sigma)

    rng = np.random.default_rng(seed)
    raw = rng.uniform(low, high, m)
    smooth = gaussian_filter1d(raw, sigma=sigma, mode="wrap")
    spread = float(smooth.max() - smooth.min())
    if spread == 0.0:
        return StarBody2D(np.full(m, (low + high) / 2))
    r = low + (high - low) * (smooth - smooth.min()) / spread
    return StarBody2D(r)
