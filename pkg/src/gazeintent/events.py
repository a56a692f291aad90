"""Streaming I-VDT segmentation of the angular gaze signal.

Rule order per frame, using the gaze-in-world velocity of the incoming
frame (two-point backward difference, no smoothing):

1. velocity above the saccade threshold -> the frame accumulates into a
   saccade segment;
2. velocity below the fixation threshold -> the frame joins the candidate
   fixation as long as the running window dispersion stays under the
   dispersion threshold; candidates shorter than the minimum duration are
   discarded, never merged;
3. anything in between is treated as smooth-pursuit-like motion: it closes
   an open fixation and (by default) extends an open saccade, but never
   starts one. Pursuit stretches are not emitted as events.

A completed segment is emitted when the frame classification flips. One
detector owns one stream; distinct streams need distinct detector states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyStreamError, StreamOrderError
from .geometry import (
    AngularPoint,
    DispersionWindow,
    GazeSample,
    angular_velocity,
    compose_gaze,
    to_angles,
)

FIXATION = "fixation"
SACCADE = "saccade"
_PURSUIT = "pursuit"


@dataclass
class DetectorConfig:
    saccade_velocity_thresh: float = 70.0   # deg/s
    fixation_velocity_thresh: float = 30.0  # deg/s
    fixation_dispersion_thresh: float = 1.0  # deg
    fixation_min_duration_ms: float = 30.0
    # Smooth-pursuit-band frames extend an open saccade when True; when
    # False they close it, same as they always close an open fixation.
    pursuit_extends_saccade: bool = True

    def __post_init__(self) -> None:
        for name in ("saccade_velocity_thresh", "fixation_velocity_thresh",
                     "fixation_dispersion_thresh", "fixation_min_duration_ms"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.saccade_velocity_thresh <= self.fixation_velocity_thresh:
            raise ValueError("saccade threshold must exceed fixation threshold")


@dataclass(frozen=True)
class GazeEvent:
    """A completed fixation or saccade with per-source angular tracks.

    ``eye``, ``head`` and ``gaze`` are (n, 2) arrays of azimuth/elevation
    in degrees; ``selection`` marks frames where a ground-truth selection
    confirmation was recorded.
    """

    kind: str
    t_ms: np.ndarray
    eye: np.ndarray
    head: np.ndarray
    gaze: np.ndarray
    selection: np.ndarray

    @property
    def start_ms(self) -> float:
        return float(self.t_ms[0])

    @property
    def end_ms(self) -> float:
        return float(self.t_ms[-1])

    @property
    def duration_ms(self) -> float:
        return self.end_ms - self.start_ms

    def __len__(self) -> int:
        return len(self.t_ms)


@dataclass
class _Frame:
    t_ms: float
    eye: tuple[float, float]
    head: tuple[float, float]
    gaze: tuple[float, float]
    selection: bool


@dataclass
class _Segment:
    kind: str
    frames: list[_Frame] = field(default_factory=list)
    window: DispersionWindow = field(default_factory=DispersionWindow)
    serial: int = 0

    def add(self, frame: _Frame) -> None:
        self.frames.append(frame)
        if self.kind == FIXATION:
            self.window.add(*frame.gaze)

    @property
    def duration_ms(self) -> float:
        return self.frames[-1].t_ms - self.frames[0].t_ms


def _to_event(seg: _Segment) -> GazeEvent:
    fr = seg.frames
    return GazeEvent(
        kind=seg.kind,
        t_ms=np.array([f.t_ms for f in fr]),
        eye=np.array([f.eye for f in fr]),
        head=np.array([f.head for f in fr]),
        gaze=np.array([f.gaze for f in fr]),
        selection=np.array([f.selection for f in fr], dtype=bool),
    )


@dataclass
class DetectorState:
    """Single-owner mutable state of one I-VDT detector."""

    cfg: DetectorConfig = field(default_factory=DetectorConfig)
    prev: _Frame | None = None
    segment: _Segment | None = None
    _serial: int = 0

    @property
    def current_fixation(self) -> _Segment | None:
        if self.segment is not None and self.segment.kind == FIXATION:
            return self.segment
        return None

    def fixation_confirmed(self) -> bool:
        """True once the open candidate fixation has reached minimum duration."""
        seg = self.current_fixation
        return seg is not None and seg.duration_ms >= self.cfg.fixation_min_duration_ms

    def _open(self, kind: str, frame: _Frame) -> None:
        self._serial += 1
        self.segment = _Segment(kind=kind, serial=self._serial)
        self.segment.add(frame)

    def _close(self) -> GazeEvent | None:
        seg = self.segment
        self.segment = None
        if seg is None or seg.kind == _PURSUIT:
            return None
        if seg.duration_ms <= 0:
            return None
        if seg.kind == FIXATION and seg.duration_ms < self.cfg.fixation_min_duration_ms:
            return None
        return _to_event(seg)


def ivdt_step(state: DetectorState, sample: GazeSample) -> list[GazeEvent]:
    """Feed one sample; return the events completed by it (usually none)."""
    gaze_q = compose_gaze(sample.head_q, sample.eye_q)
    frame = _Frame(
        t_ms=float(sample.t_ms),
        eye=_angles(sample.eye_q),
        head=_angles(sample.head_q),
        gaze=_angles(gaze_q),
        selection=bool(sample.selection_flag),
    )

    if state.prev is None:
        state.prev = frame
        return []

    dt = frame.t_ms - state.prev.t_ms
    if dt <= 0:
        raise StreamOrderError(
            f"timestamps must be strictly increasing ({state.prev.t_ms} -> {frame.t_ms})")
    v = angular_velocity(AngularPoint(*state.prev.gaze), AngularPoint(*frame.gaze), dt)
    cfg = state.cfg
    if v > cfg.saccade_velocity_thresh:
        cls = SACCADE
    elif v < cfg.fixation_velocity_thresh:
        cls = FIXATION
    else:
        cls = _PURSUIT

    emitted: list[GazeEvent] = []
    seg = state.segment

    if seg is None:
        # First classified frame: the stream's opening sample joins it.
        state._open(cls, state.prev)
        state.segment.add(frame)
        if cls == FIXATION and state.segment.window.value() >= cfg.fixation_dispersion_thresh:
            state.segment.kind = _PURSUIT
    elif cls == seg.kind:
        if cls == FIXATION:
            if seg.window.value_with(*frame.gaze) < cfg.fixation_dispersion_thresh:
                seg.add(frame)
            else:
                ev = state._close()
                if ev is not None:
                    emitted.append(ev)
                state._open(FIXATION, frame)
        else:
            seg.add(frame)
    elif cls == _PURSUIT and seg.kind == SACCADE and cfg.pursuit_extends_saccade:
        seg.add(frame)
    else:
        ev = state._close()
        if ev is not None:
            emitted.append(ev)
        state._open(cls, frame)

    state.prev = frame
    return emitted


def ivdt_flush(state: DetectorState) -> list[GazeEvent]:
    """Close the trailing open segment at end of stream."""
    ev = state._close()
    return [ev] if ev is not None else []


def segment(stream: list[GazeSample], cfg: DetectorConfig | None = None) -> list[GazeEvent]:
    """Batch wrapper: fold ivdt_step over the stream and flush."""
    if not stream:
        raise EmptyStreamError("cannot segment an empty stream")
    state = DetectorState(cfg=cfg or DetectorConfig())
    events: list[GazeEvent] = []
    for sample in stream:
        events.extend(ivdt_step(state, sample))
    events.extend(ivdt_flush(state))
    return events


def _angles(q: np.ndarray) -> tuple[float, float]:
    p = to_angles(q)
    return (p.azimuth_deg, p.elevation_deg)
