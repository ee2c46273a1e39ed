"""Small 3-vector helpers shared by the camera and cutting-plane code."""

from __future__ import annotations

import numpy as np

WORLD_UP = np.array([0.0, 1.0, 0.0])


def vec3(value) -> np.ndarray:
    """Coerce a length-3 sequence into a float64 array."""
    v = np.asarray(value, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    return v


def norm(v) -> float:
    return float(np.linalg.norm(np.asarray(v, dtype=float)))


def unit(v) -> np.ndarray:
    """Normalize, raising on (near-)zero input."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n < 1e-15:
        raise ValueError("cannot normalize a zero-length vector")
    return v / n


def lerp(a, b, t: float) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (1.0 - t) * a + t * b


def smoothstep(t: float) -> float:
    """Hermite ease in [0, 1]; clamps outside the interval."""
    t = min(1.0, max(0.0, t))
    return t * t * (3.0 - 2.0 * t)


def any_perpendicular(v) -> np.ndarray:
    """A deterministic unit vector perpendicular to v (smallest-axis cross)."""
    v = unit(v)
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(v)))] = 1.0
    return unit(np.cross(v, axis))
