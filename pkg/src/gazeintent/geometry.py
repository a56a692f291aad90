"""Quaternion composition of eye/head orientations and angular-signal primitives.

Conventions
-----------
- Quaternions are (w, x, y, z), unit norm, right-handed frame.
- The forward axis is -Z; +X points right, +Y points up.
- ``azimuth`` is yaw about +Y in degrees, in [-180, 180); ``elevation`` is
  pitch about +X in degrees, in [-90, 90]. The identity orientation looks
  along -Z and maps to (0, 0).

All functions here are pure and stateless; they are safe to call from any
number of threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyWindowError, InvalidIntervalError, InvalidSampleError

UNIT_NORM_TOL = 1e-6


@dataclass(frozen=True)
class GazeSample:
    """One tracker frame: timestamp plus eye-in-head and head-in-world rotations."""

    t_ms: float
    eye_q: np.ndarray
    head_q: np.ndarray
    selection_flag: bool = False


@dataclass(frozen=True)
class AngularPoint:
    """A direction expressed as azimuth/elevation degrees for one source."""

    azimuth_deg: float
    elevation_deg: float
    source: str = "gaze"  # "eye" | "head" | "gaze"


def _check_unit(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape != (4,):
        raise InvalidSampleError(f"quaternion must have 4 components, got shape {q.shape}")
    n = math.sqrt(float(np.dot(q, q)))
    if abs(n - 1.0) > UNIT_NORM_TOL:
        raise InvalidSampleError(f"quaternion norm {n} outside unit tolerance {UNIT_NORM_TOL}")
    return q


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product a*b (apply b first, then a)."""
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_normalize(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q / math.sqrt(float(np.dot(q, q)))


def quat_canonical(q: np.ndarray) -> np.ndarray:
    """Flip to the w >= 0 hemisphere so equal rotations compare equal."""
    return -q if q[0] < 0 else q


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vector v by unit quaternion q."""
    w, x, y, z = q
    u = np.array([x, y, z])
    return 2.0 * np.dot(u, v) * u + (w * w - np.dot(u, u)) * v + 2.0 * w * np.cross(u, v)


def compose_gaze(head_q: np.ndarray, eye_q: np.ndarray) -> np.ndarray:
    """Gaze-in-world rotation: head-in-world composed with eye-in-head."""
    head_q = _check_unit(head_q)
    eye_q = _check_unit(eye_q)
    return quat_normalize(quat_multiply(head_q, eye_q))


def to_angles(q: np.ndarray, source: str = "gaze") -> AngularPoint:
    """Azimuth/elevation of the rotated forward (-Z) axis.

    Elevation is clamped into [-90, 90]; at the poles azimuth degenerates
    and whatever atan2 returns is kept.
    """
    d = quat_rotate(np.asarray(q, dtype=float), np.array([0.0, 0.0, -1.0]))
    el = math.degrees(math.asin(max(-1.0, min(1.0, d[1]))))
    az = math.degrees(math.atan2(-d[0], -d[2]))
    if az >= 180.0:
        az -= 360.0
    return AngularPoint(az, el, source)


def quat_from_angles(azimuth_deg: float, elevation_deg: float) -> np.ndarray:
    """Inverse of to_angles: yaw about +Y, then pitch about +X in the yawed frame."""
    half_az = math.radians(azimuth_deg) / 2.0
    half_el = math.radians(elevation_deg) / 2.0
    yaw = np.array([math.cos(half_az), 0.0, math.sin(half_az), 0.0])
    pitch = np.array([math.cos(half_el), math.sin(half_el), 0.0, 0.0])
    return quat_multiply(yaw, pitch)


def unit_vector(azimuth_deg: float, elevation_deg: float) -> np.ndarray:
    """Unit direction for the given angles under the -Z-forward convention."""
    az = math.radians(azimuth_deg)
    el = math.radians(elevation_deg)
    return np.array([-math.sin(az) * math.cos(el), math.sin(el), -math.cos(az) * math.cos(el)])


def angular_distance_deg(a: AngularPoint, b: AngularPoint) -> float:
    """Great-circle angle between two directions, in degrees."""
    dot = float(np.dot(unit_vector(a.azimuth_deg, a.elevation_deg),
                       unit_vector(b.azimuth_deg, b.elevation_deg)))
    return math.degrees(math.acos(max(-1.0, min(1.0, dot))))


def angular_velocity(prev: AngularPoint, cur: AngularPoint, dt_ms: float) -> float:
    """Angular speed in deg/s between two directions dt_ms apart.

    Uses great-circle distance on unit vectors, so azimuth wrap-around
    cannot inflate the result.
    """
    if dt_ms <= 0:
        raise InvalidIntervalError(f"dt_ms must be positive, got {dt_ms}")
    return angular_distance_deg(prev, cur) / (dt_ms / 1000.0)


def dispersion(window: list[AngularPoint]) -> float:
    """I-DT dispersion: (max-min azimuth) + (max-min elevation) over the window."""
    if not window:
        raise EmptyWindowError("dispersion needs at least one point")
    az = [p.azimuth_deg for p in window]
    el = [p.elevation_deg for p in window]
    return (max(az) - min(az)) + (max(el) - min(el))


@dataclass
class DispersionWindow:
    """Running min/max tracker so candidate-fixation dispersion is O(1) per frame."""

    az_min: float = math.inf
    az_max: float = -math.inf
    el_min: float = math.inf
    el_max: float = -math.inf
    n: int = field(default=0)

    def add(self, azimuth_deg: float, elevation_deg: float) -> None:
        self.az_min = min(self.az_min, azimuth_deg)
        self.az_max = max(self.az_max, azimuth_deg)
        self.el_min = min(self.el_min, elevation_deg)
        self.el_max = max(self.el_max, elevation_deg)
        self.n += 1

    def value(self) -> float:
        if self.n == 0:
            raise EmptyWindowError("dispersion window is empty")
        return (self.az_max - self.az_min) + (self.el_max - self.el_min)

    def value_with(self, azimuth_deg: float, elevation_deg: float) -> float:
        """Dispersion if the point were added, without mutating the window."""
        az_span = max(self.az_max, azimuth_deg) - min(self.az_min, azimuth_deg)
        el_span = max(self.el_max, elevation_deg) - min(self.el_min, elevation_deg)
        return az_span + el_span
