"""Deterministic synthetic data: feature tables drawn from class-conditional
densities, and raw gaze streams with scripted fixation/saccade schedules
plus ground-truth annotations.

Streams are built to be unambiguous under the detector thresholds (jitter
well below the dispersion limit, saccade legs well above the velocity
limit) rather than biologically realistic; the pipeline contract is what
gets exercised. Everything is pure given (config, seed).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .bayes import PDF_FLOOR, BayesianModel, PosteriorVector
from .distributions import FittedDistribution, make_dist, pdf, sample
from .errors import ScheduleError, SpecError
from .features import (
    FEATURE_NAMES,
    SELECTED_FEATURES,
    CoeffKNorm,
    Condition,
    ObservationVector,
)
from .geometry import (
    GazeSample,
    quat_conjugate,
    quat_from_angles,
    quat_multiply,
    quat_normalize,
    unit_vector,
)

SPEC_SCHEMA_VERSION = 1


@dataclass
class GenerativeSpec:
    """Per-condition, per-feature, per-class densities plus shared constants."""

    conditions: dict[str, dict[str, tuple[FittedDistribution, FittedDistribution]]]
    coeffk_norm: CoeffKNorm = field(default_factory=CoeffKNorm)
    class_ratio: tuple[int, int] = (1, 3)
    units: dict[str, str] = field(default_factory=dict)
    ledger_version: str = "v1"

    def pair(self, condition: Condition, feature: str) -> tuple[FittedDistribution, FittedDistribution]:
        cond = self.conditions.get(condition.key())
        if cond is None:
            raise SpecError(f"spec has no condition {condition.key()}")
        pair = cond.get(feature)
        if pair is None:
            raise SpecError(f"spec has no densities for {condition.key()}/{feature}")
        return pair

    def to_dict(self) -> dict:
        return {
            "schema_version": SPEC_SCHEMA_VERSION,
            "kind": "gazeintent-genspec",
            "ledger_version": self.ledger_version,
            "units": self.units,
            "coeffk_norm": {
                "mu_d": self.coeffk_norm.mu_d, "sigma_d": self.coeffk_norm.sigma_d,
                "mu_a": self.coeffk_norm.mu_a, "sigma_a": self.coeffk_norm.sigma_a,
            },
            "class_ratio": list(self.class_ratio),
            "conditions": {
                ckey: {
                    feat: {"true": t.to_dict(), "false": f.to_dict()}
                    for feat, (t, f) in feats.items()
                }
                for ckey, feats in self.conditions.items()
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GenerativeSpec":
        if d.get("schema_version") != SPEC_SCHEMA_VERSION or d.get("kind") != "gazeintent-genspec":
            raise SpecError("not a generative spec document (or unknown version)")
        kn = d["coeffk_norm"]
        conditions = {}
        for ckey, feats in d["conditions"].items():
            Condition.from_key(ckey)  # validates
            conditions[ckey] = {
                feat: (FittedDistribution.from_dict(pair["true"]),
                       FittedDistribution.from_dict(pair["false"]))
                for feat, pair in feats.items()
            }
        return cls(
            conditions=conditions,
            coeffk_norm=CoeffKNorm(kn["mu_d"], kn["sigma_d"], kn["mu_a"], kn["sigma_a"]),
            class_ratio=tuple(d.get("class_ratio", (1, 3))),
            units=d.get("units", {}),
            ledger_version=d.get("ledger_version", "v1"),
        )


def load_spec(path) -> GenerativeSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return GenerativeSpec.from_dict(json.load(fh))


def default_spec() -> GenerativeSpec:
    """The spec shipped with the package (fitted defaults for 9 features)."""
    text = resources.files("gazeintent").joinpath("data/default_spec.json").read_text()
    return GenerativeSpec.from_dict(json.loads(text))


def model_from_spec(
    spec: GenerativeSpec,
    condition: Condition,
    features=SELECTED_FEATURES,
) -> BayesianModel:
    """A Bayesian model whose densities come straight from the spec."""
    densities = tuple(spec.pair(condition, f) for f in features)
    return BayesianModel(
        condition=condition,
        selected_features=tuple(features),
        densities=densities,
        coeffk_norm=spec.coeffk_norm,
    )


def gen_features(
    spec: GenerativeSpec,
    condition: Condition,
    n_true: int,
    n_false: int,
    seed: int,
) -> list[ObservationVector]:
    """n_true + n_false labeled rows drawn i.i.d. per feature and class."""
    rng = np.random.default_rng(seed)
    cols: dict[str, np.ndarray] = {}
    for feature in FEATURE_NAMES:
        d_true, d_false = spec.pair(condition, feature)
        cols[feature] = np.concatenate([
            sample(d_true, n_true, rng),
            sample(d_false, n_false, rng),
        ])
    rows = []
    for i in range(n_true + n_false):
        rows.append(ObservationVector(
            condition=condition,
            label=i < n_true,
            **{f: float(cols[f][i]) for f in FEATURE_NAMES},
        ))
    return rows


# ---------------------------------------------------------------------------
# signal-level generation


@dataclass
class ScenarioConfig:
    condition: Condition
    sample_rate_hz: float = 60.0
    grid_cols: int = 9
    grid_rows: int = 7
    trial_count: int = 26
    seed: int = 0
    head_ratio: float = 0.3            # share of gaze motion carried by the head
    fixation_jitter_deg: float = 0.03  # per-axis sigma, clipped at 3 sigma
    saccade_speed_deg_s: float = 300.0

    def __post_init__(self) -> None:
        if not (60.0 <= self.sample_rate_hz <= 66.0):
            raise ScheduleError(f"sample rate {self.sample_rate_hz} outside 60-66 Hz")
        if not (0.0 <= self.head_ratio < 1.0):
            raise ScheduleError("head_ratio must be in [0, 1)")

    @property
    def spacing_deg(self) -> float:
        return 7.5 if self.condition.density == "dense" else 15.0

    @property
    def width_deg(self) -> float:
        return 6.0 if self.condition.width == "large" else 3.0

    def target_angles(self, col: int, row: int) -> tuple[float, float]:
        if not (0 <= col < self.grid_cols and 0 <= row < self.grid_rows):
            raise ScheduleError(f"target ({col},{row}) outside the grid")
        return ((col - self.grid_cols // 2) * self.spacing_deg,
                (row - self.grid_rows // 2) * self.spacing_deg)


@dataclass(frozen=True)
class ScheduleEntry:
    target: tuple[int, int]       # (col, row)
    duration_ms: float
    select: bool = False
    jitter_deg: float | None = None  # per-entry override of the fixation jitter


@dataclass
class GroundTruth:
    """Scripted events and trials emitted alongside a generated stream."""

    events: list[dict]
    trials: list[dict]
    objects: dict[str, tuple[float, float]]  # "col,row" -> (azimuth, elevation)
    width_deg: float

    def to_jsonl(self) -> str:
        lines = [json.dumps({"schema_version": 1, "kind": "meta",
                             "width_deg": self.width_deg,
                             "objects": {k: list(v) for k, v in self.objects.items()}},
                            sort_keys=True)]
        for ev in self.events:
            lines.append(json.dumps({"schema_version": 1, "kind": "event", **ev}, sort_keys=True))
        for tr in self.trials:
            lines.append(json.dumps({"schema_version": 1, "kind": "trial", **tr}, sort_keys=True))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "GroundTruth":
        events, trials, objects, width = [], [], {}, None
        for line in text.splitlines():
            if not line.strip():
                continue
            d = json.loads(line)
            kind = d.pop("kind")
            d.pop("schema_version", None)
            if kind == "meta":
                width = d["width_deg"]
                objects = {k: tuple(v) for k, v in d["objects"].items()}
            elif kind == "event":
                events.append(d)
            elif kind == "trial":
                trials.append(d)
        if width is None:
            raise SpecError("ground truth missing meta line")
        return cls(events=events, trials=trials, objects=objects, width_deg=width)


def _sample_from_angles(t_ms, gaze_az, gaze_el, head_ratio, selected):
    gaze_q = quat_from_angles(gaze_az, gaze_el)
    head_q = quat_from_angles(head_ratio * gaze_az, head_ratio * gaze_el)
    eye_q = quat_normalize(quat_multiply(quat_conjugate(head_q), gaze_q))
    return GazeSample(t_ms=t_ms, eye_q=eye_q, head_q=head_q, selection_flag=selected)


def gen_stream(
    scenario: ScenarioConfig,
    schedule: list[ScheduleEntry],
    seed: int | None = None,
) -> tuple[list[GazeSample], GroundTruth]:
    """Realize a fixation/saccade schedule as a quaternion sample stream.

    Fixations get clipped Gaussian jitter far below the dispersion
    threshold; connecting saccades run at the configured speed (well above
    the velocity threshold). Selection flags rise mid-fixation where
    scripted. Ground-truth events use the stream's own sample timestamps.
    """
    if not schedule:
        raise ScheduleError("empty schedule")
    for e in schedule:
        if e.duration_ms < 50.0:
            raise ScheduleError(f"fixation duration {e.duration_ms} ms below the 50 ms floor")
        scenario.target_angles(*e.target)  # validates grid membership
    for a, b in zip(schedule, schedule[1:]):
        if a.target == b.target:
            raise ScheduleError("consecutive schedule entries on the same target overlap")

    rng = np.random.default_rng(scenario.seed if seed is None else seed)
    dt = 1000.0 / scenario.sample_rate_hz
    step_deg = scenario.saccade_speed_deg_s * dt / 1000.0

    samples: list[GazeSample] = []
    events: list[dict] = []
    trials: list[dict] = []
    objects: dict[str, tuple[float, float]] = {}
    idx = 0
    prev_angles: tuple[float, float] | None = None
    prev_trial_end = 0.0

    for entry in schedule:
        az, el = scenario.target_angles(*entry.target)
        objects[f"{entry.target[0]},{entry.target[1]}"] = (az, el)

        if prev_angles is not None:
            dist = math.degrees(math.acos(max(-1.0, min(1.0, float(np.dot(
                unit_vector(*prev_angles), unit_vector(az, el)))))))
            n_int = max(1, math.ceil(dist / step_deg))
            sac_start_idx = idx
            for k in range(1, n_int):
                f = k / n_int
                a = prev_angles[0] + f * (az - prev_angles[0])
                e = prev_angles[1] + f * (el - prev_angles[1])
                samples.append(_sample_from_angles(idx * dt, a, e, scenario.head_ratio, False))
                idx += 1
            # saccade ground truth spans the moving samples plus the landing frame
            events.append({"event": "saccade", "start_ms": sac_start_idx * dt,
                           "end_ms": idx * dt, "target": None, "select_ms": None})

        jitter = entry.jitter_deg if entry.jitter_deg is not None else scenario.fixation_jitter_deg
        n_fix = max(2, round(entry.duration_ms / dt))
        select_at = None
        if entry.select:
            select_at = min(n_fix - 1, max(3, round(0.6 * n_fix)))
        fix_start_idx = idx
        for k in range(n_fix):
            ja = float(np.clip(rng.normal(0.0, jitter), -3 * jitter, 3 * jitter))
            je = float(np.clip(rng.normal(0.0, jitter), -3 * jitter, 3 * jitter))
            selected = (k == select_at)
            samples.append(_sample_from_angles(idx * dt, az + ja, el + je,
                                               scenario.head_ratio, selected))
            idx += 1
        fix_end_ms = (idx - 1) * dt
        select_ms = None if select_at is None else (fix_start_idx + select_at) * dt
        events.append({"event": "fixation", "start_ms": fix_start_idx * dt,
                       "end_ms": fix_end_ms,
                       "target": list(entry.target), "select_ms": select_ms})
        if entry.select:
            trials.append({"trial": len(trials), "start_ms": prev_trial_end,
                           "end_ms": fix_end_ms, "target": list(entry.target)})
            prev_trial_end = fix_end_ms
        prev_angles = (az, el)

    gt = GroundTruth(events=events, trials=trials, objects=objects,
                     width_deg=scenario.width_deg)
    return samples, gt


# ---------------------------------------------------------------------------
# acceptance oracle


def bayes_optimal_rate(
    spec: GenerativeSpec,
    condition: Condition,
    n_mc: int = 200_000,
    seed: int = 0,
    features=SELECTED_FEATURES,
) -> float:
    """Monte-Carlo accuracy of the exact likelihood-ratio rule with the
    class prior implied by the spec's sampling ratio.

    The generator draws features independently, so the per-feature product
    is the true joint likelihood and this is an upper bound for any
    classifier trained on the generated data.
    """
    rt, rf = spec.class_ratio
    p_true = rt / (rt + rf)
    n_true = round(n_mc * p_true)
    n_false = n_mc - n_true
    rng = np.random.default_rng(seed)

    correct = 0
    for label, n in ((True, n_true), (False, n_false)):
        log_t = np.full(n, math.log(p_true))
        log_f = np.full(n, math.log(1.0 - p_true))
        for feature in features:
            d_true, d_false = spec.pair(condition, feature)
            x = sample(d_true if label else d_false, n, rng)
            log_t += np.log(np.maximum(pdf(d_true, x), PDF_FLOOR))
            log_f += np.log(np.maximum(pdf(d_false, x), PDF_FLOOR))
        decide_true = log_t > log_f  # ties resolve to the majority class
        correct += int(np.sum(decide_true == label))
    return correct / n_mc


def posterior_rows(
    model: BayesianModel,
    rows: list[ObservationVector],
) -> list[PosteriorVector]:
    from .bayes import posterior_vector

    return [posterior_vector(model, r) for r in rows]
