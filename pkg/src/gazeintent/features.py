"""The 16 gaze-related features of one decision window.

A decision window covers the previous fixation (1st fixation), the saccade
between the two fixations, and the currently detected fixation (2nd
fixation), plus the ambient/focal attention index built from z-scored
fixation-duration / saccade-amplitude pairs.

Units: durations in ms, spatial spreads and amplitudes in degrees,
velocities in deg/ms (the unit shared with density parameters in model and
spec files), the attention index dimensionless. Missing context (stream's
first fixation has no predecessor) is represented as absent (None), never
as zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoWindowError
from .events import FIXATION, SACCADE, GazeEvent
from .geometry import AngularPoint, angular_distance_deg

TASKS = ("simple", "complex")
WIDTHS = ("large", "small")
DENSITIES = ("dense", "wide")


@dataclass(frozen=True, order=True)
class Condition:
    """One cell of the 2x2x2 task design."""

    task: str
    width: str
    density: str

    def __post_init__(self) -> None:
        if self.task not in TASKS or self.width not in WIDTHS or self.density not in DENSITIES:
            raise ValueError(f"unknown condition {self.task}-{self.width}-{self.density}")

    def key(self) -> str:
        return f"{self.task}-{self.width}-{self.density}"

    @classmethod
    def from_key(cls, key: str) -> "Condition":
        task, width, density = key.split("-")
        return cls(task, width, density)


ALL_CONDITIONS = tuple(
    Condition(t, w, d) for t in TASKS for w in WIDTHS for d in DENSITIES
)


@dataclass(frozen=True)
class CoeffKNorm:
    """Fixed normalization constants for the attention index z-scores."""

    mu_d: float = 250.0   # ms
    sigma_d: float = 100.0
    mu_a: float = 5.0     # deg
    sigma_a: float = 3.0

    def __post_init__(self) -> None:
        if self.sigma_d <= 0 or self.sigma_a <= 0:
            raise ValueError("normalization sigmas must be positive")


# Canonical feature order (feature-group order; selection tables and
# posterior layouts all index into this).
FEATURE_NAMES = (
    "fix1_duration_ms",
    "fix1_std_x_deg",
    "fix1_std_y_deg",
    "fix1_velocity",
    "fix2_duration_ms",
    "fix2_std_x_deg",
    "fix2_std_y_deg",
    "fix2_velocity",
    "sac_duration_ms",
    "sac_amplitude_eye_deg",
    "sac_amplitude_head_deg",
    "sac_amplitude_gaze_deg",
    "sac_velocity_eye",
    "sac_velocity_head",
    "sac_velocity_gaze",
    "coefficient_k",
)

FEATURE_GROUPS = {
    "1st_fixation": ("fix1_duration_ms", "fix1_std_x_deg", "fix1_std_y_deg", "fix1_velocity"),
    "2nd_fixation": ("fix2_duration_ms", "fix2_std_x_deg", "fix2_std_y_deg", "fix2_velocity"),
    "saccade": (
        "sac_duration_ms", "sac_amplitude_eye_deg", "sac_amplitude_head_deg",
        "sac_amplitude_gaze_deg", "sac_velocity_eye", "sac_velocity_head",
        "sac_velocity_gaze",
    ),
    "coefficient_k": ("coefficient_k",),
}

# Features whose class distributions separated in at least 6 of the 8
# conditions, in canonical order. These are the ones a Bayesian model
# carries densities for.
SELECTED_FEATURES = (
    "fix1_std_x_deg",
    "fix1_std_y_deg",
    "fix1_velocity",
    "fix2_duration_ms",
    "fix2_std_x_deg",
    "fix2_std_y_deg",
    "fix2_velocity",
    "sac_amplitude_head_deg",
    "sac_amplitude_gaze_deg",
    "sac_velocity_eye",
    "sac_velocity_head",
    "coefficient_k",
)


@dataclass
class ObservationVector:
    """Feature values of one decision window; absent context stays None."""

    condition: Condition
    label: bool | None = None  # True = select, False = non-select, None = unlabeled
    fix1_duration_ms: float | None = None
    fix1_std_x_deg: float | None = None
    fix1_std_y_deg: float | None = None
    fix1_velocity: float | None = None
    fix2_duration_ms: float | None = None
    fix2_std_x_deg: float | None = None
    fix2_std_y_deg: float | None = None
    fix2_velocity: float | None = None
    sac_duration_ms: float | None = None
    sac_amplitude_eye_deg: float | None = None
    sac_amplitude_head_deg: float | None = None
    sac_amplitude_gaze_deg: float | None = None
    sac_velocity_eye: float | None = None
    sac_velocity_head: float | None = None
    sac_velocity_gaze: float | None = None
    coefficient_k: float | None = None

    def value(self, feature: str) -> float | None:
        return getattr(self, feature)

    def values(self, names: tuple[str, ...] = FEATURE_NAMES) -> list[float | None]:
        return [getattr(self, n) for n in names]

    def to_json(self) -> str:
        d = {"schema_version": 1, "condition": self.condition.key(), "label": self.label}
        for n in FEATURE_NAMES:
            d[n] = getattr(self, n)
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "ObservationVector":
        d = json.loads(line)
        return cls(
            condition=Condition.from_key(d["condition"]),
            label=d.get("label"),
            **{n: d.get(n) for n in FEATURE_NAMES},
        )


def _track_velocities(t_ms: np.ndarray, track: np.ndarray) -> np.ndarray:
    """Per-frame angular speeds of one source, deg/ms."""
    if len(t_ms) < 2:
        return np.zeros(0)
    out = np.empty(len(t_ms) - 1)
    for i in range(1, len(t_ms)):
        d = angular_distance_deg(AngularPoint(*track[i - 1]), AngularPoint(*track[i]))
        out[i - 1] = d / (t_ms[i] - t_ms[i - 1])
    return out


def fixation_stats(event: GazeEvent, upto: int | None = None) -> tuple[float, float, float, float]:
    """(duration_ms, std_x, std_y, mean gaze speed) of a fixation event.

    ``upto`` truncates to samples [0, upto] so live windows can reflect only
    what has been seen at the trigger frame. Population std; a single-sample
    window yields zero spread and zero velocity.
    """
    if event.kind != FIXATION:
        raise ValueError(f"expected a fixation event, got {event.kind}")
    t = event.t_ms if upto is None else event.t_ms[: upto + 1]
    g = event.gaze if upto is None else event.gaze[: upto + 1]
    duration = float(t[-1] - t[0])
    std_x = float(np.std(g[:, 0]))
    std_y = float(np.std(g[:, 1]))
    vels = _track_velocities(t, g)
    velocity = float(np.mean(vels)) if len(vels) else 0.0
    return duration, std_x, std_y, velocity


def saccade_stats(event: GazeEvent) -> dict[str, float]:
    """Duration plus per-source amplitude (first-to-last) and mean speed."""
    if event.kind != SACCADE:
        raise ValueError(f"expected a saccade event, got {event.kind}")
    out = {"sac_duration_ms": float(event.duration_ms)}
    for source in ("eye", "head", "gaze"):
        track = getattr(event, source)
        amp = angular_distance_deg(AngularPoint(*track[0]), AngularPoint(*track[-1]))
        vels = _track_velocities(event.t_ms, track)
        out[f"sac_amplitude_{source}_deg"] = float(amp)
        out[f"sac_velocity_{source}"] = float(np.mean(vels)) if len(vels) else 0.0
    return out


def coefficient_k(
    fix_durations_ms: list[float],
    sac_amplitudes_deg: list[float],
    norm: CoeffKNorm,
) -> float | None:
    """Mean difference of z-scored fixation duration and following-saccade amplitude.

    Pairs are aligned by index: sac_amplitudes_deg[i] is the amplitude of
    the saccade following fixation i. Empty input marks missing context.
    """
    if len(fix_durations_ms) != len(sac_amplitudes_deg):
        raise ValueError("each fixation must pair with exactly one following saccade")
    if not fix_durations_ms:
        return None
    z = [
        (d - norm.mu_d) / norm.sigma_d - (a - norm.mu_a) / norm.sigma_a
        for d, a in zip(fix_durations_ms, sac_amplitudes_deg)
    ]
    return float(np.mean(z))


@dataclass
class WindowContext:
    """Trailing event context feeding one decision window."""

    fix1: GazeEvent | None
    saccade: GazeEvent | None
    fix2: GazeEvent


def extract_window(
    ctx: WindowContext,
    condition: Condition,
    norm: CoeffKNorm,
    label: bool | None = None,
    upto: int | None = None,
) -> ObservationVector:
    """Assemble the 16 features for a window whose 2nd fixation is ctx.fix2.

    ``upto`` truncates the 2nd-fixation track at the trigger frame (selection
    confirmations and live inference); None means the fixation ended.
    """
    if ctx.fix2 is None or ctx.fix2.kind != FIXATION:
        raise NoWindowError("no current fixation to build a window from")
    obs = ObservationVector(condition=condition, label=label)

    d2, sx2, sy2, v2 = fixation_stats(ctx.fix2, upto=upto)
    obs.fix2_duration_ms = d2
    obs.fix2_std_x_deg = sx2
    obs.fix2_std_y_deg = sy2
    obs.fix2_velocity = v2

    if ctx.fix1 is not None:
        d1, sx1, sy1, v1 = fixation_stats(ctx.fix1)
        obs.fix1_duration_ms = d1
        obs.fix1_std_x_deg = sx1
        obs.fix1_std_y_deg = sy1
        obs.fix1_velocity = v1

    if ctx.saccade is not None:
        for k, v in saccade_stats(ctx.saccade).items():
            setattr(obs, k, v)

    if ctx.fix1 is not None and ctx.saccade is not None:
        obs.coefficient_k = coefficient_k(
            [obs.fix1_duration_ms], [obs.sac_amplitude_gaze_deg], norm)
    return obs


class WindowAssembler:
    """Tracks trailing events of one stream and emits labeled windows.

    Single-owner, like the detector that feeds it. Each completed fixation
    yields exactly one labeled window: True at the first in-fixation
    selection confirmation (features truncated at that frame), otherwise
    False when the fixation ends.
    """

    def __init__(self, condition: Condition, norm: CoeffKNorm | None = None):
        self.condition = condition
        self.norm = norm or CoeffKNorm()
        self.last_fixation: GazeEvent | None = None
        self.last_saccade: GazeEvent | None = None

    def context_for(self, fix2: GazeEvent) -> WindowContext:
        sac = self.last_saccade
        if sac is not None and self.last_fixation is not None:
            if sac.start_ms < self.last_fixation.end_ms:
                sac = None  # stale: no saccade between the two fixations
        return WindowContext(fix1=self.last_fixation, saccade=sac, fix2=fix2)

    def push(self, event: GazeEvent) -> ObservationVector | None:
        """Feed one completed event; returns a labeled window for fixations."""
        if event.kind == SACCADE:
            self.last_saccade = event
            return None
        ctx = self.context_for(event)
        sel = np.flatnonzero(event.selection)
        if len(sel):
            obs = extract_window(ctx, self.condition, self.norm,
                                 label=True, upto=int(sel[0]))
        else:
            obs = extract_window(ctx, self.condition, self.norm, label=False)
        self.last_fixation = event
        return obs


def extract_windows(
    events: list[GazeEvent],
    condition: Condition,
    norm: CoeffKNorm | None = None,
) -> list[ObservationVector]:
    """Batch labeling of a segmented stream: one window per fixation event."""
    asm = WindowAssembler(condition, norm)
    out = []
    for ev in events:
        obs = asm.push(ev)
        if obs is not None:
            out.append(obs)
    return out


def all_finite(obs: ObservationVector) -> bool:
    return all(v is None or math.isfinite(v) for v in obs.values())
