"""Feature selection, class-conditional density construction, and the
posterior-vector transform.

For each selected feature the model holds a (select-class, non-select-class)
density pair. An observation maps to a 2M vector laid out as all M
select-class likelihoods followed by all M non-select likelihoods. Built
models are immutable and safe to share across inference threads.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .distributions import (
    FittedDistribution,
    make_dist,
    pdf,
    select_best_fit,
    uniform_over,
)
from .errors import (
    DegenerateTestError,
    IncompleteDataError,
    InvalidObservationError,
)
from .features import (
    ALL_CONDITIONS,
    FEATURE_NAMES,
    SELECTED_FEATURES,
    CoeffKNorm,
    Condition,
    ObservationVector,
)

PDF_FLOOR = 1e-300   # applied before logs so a zero density cannot yield -inf
PDF_CEILING = 1e300  # keeps posterior entries finite at open support boundaries


def iqr_filter(samples) -> np.ndarray:
    """Drop points outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR] (linear-interp quartiles)."""
    x = np.asarray(samples, dtype=float)
    if x.size < 4:
        warnings.warn("iqr_filter: fewer than 4 samples, passing through", stacklevel=2)
        return x
    q1, q3 = np.percentile(x, [25, 75])
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    return x[(x >= lo) & (x <= hi)]


@dataclass(frozen=True)
class WelchResult:
    t: float
    p_value: float
    cohens_d: float
    dof: float


def welch_t_test(a, b) -> WelchResult:
    """Two-sided Welch t-test plus Cohen's d with pooled standard deviation."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = a.size, b.size
    if na < 2 or nb < 2:
        raise DegenerateTestError("welch_t_test needs at least 2 samples per group")
    va, vb = float(np.var(a, ddof=1)), float(np.var(b, ddof=1))
    if va == 0.0 and vb == 0.0:
        raise DegenerateTestError("welch_t_test with zero variance in both groups")
    ma, mb = float(np.mean(a)), float(np.mean(b))
    se2 = va / na + vb / nb
    t = (ma - mb) / math.sqrt(se2)
    dof = se2 ** 2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    p = 2.0 * special.stdtr(dof, -abs(t))
    sp = math.sqrt(((na - 1) * va + (nb - 1) * vb) / (na + nb - 2))
    d = 0.0 if sp == 0.0 else (ma - mb) / sp
    return WelchResult(t=float(t), p_value=float(p), cohens_d=float(d), dof=float(dof))


def _class_values(rows: list[ObservationVector], feature: str, label: bool) -> np.ndarray:
    vals = [r.value(feature) for r in rows if r.label is label]
    return np.array([v for v in vals if v is not None], dtype=float)


def select_features(
    rows: list[ObservationVector],
    alpha: float = 0.05,
    min_conditions: int = 6,
) -> list[str]:
    """Features whose classes separate (p < alpha) in >= min_conditions cells.

    Group ordering inside the test is (non-select, select), matching the
    direction the published effect sizes use. Order of the result is the
    canonical feature order. Degenerate cells count as not significant.
    """
    by_cond: dict[Condition, list[ObservationVector]] = {c: [] for c in ALL_CONDITIONS}
    for r in rows:
        if r.label is None:
            continue
        by_cond.setdefault(r.condition, []).append(r)
    for cond in ALL_CONDITIONS:
        sub = by_cond[cond]
        if not any(r.label is True for r in sub) or not any(r.label is False for r in sub):
            raise IncompleteDataError(f"condition {cond.key()} missing a class")

    selected = []
    for feature in FEATURE_NAMES:
        count = 0
        for cond in ALL_CONDITIONS:
            sub = by_cond[cond]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                a = iqr_filter(_class_values(sub, feature, False))
                b = iqr_filter(_class_values(sub, feature, True))
            if a.size < 2 or b.size < 2:
                continue
            try:
                res = welch_t_test(a, b)
            except DegenerateTestError:
                continue
            if res.p_value < alpha:
                count += 1
        if count >= min_conditions:
            selected.append(feature)
    return selected


@dataclass(frozen=True)
class BayesianModel:
    """Per-condition class-conditional densities over the selected features."""

    condition: Condition
    selected_features: tuple[str, ...]
    densities: tuple[tuple[FittedDistribution, FittedDistribution], ...]
    coeffk_norm: CoeffKNorm = field(default_factory=CoeffKNorm)
    absent_fallback: FittedDistribution = field(
        default_factory=lambda: make_dist("none_uniform", 0.0, 1.0))

    def __post_init__(self) -> None:
        if len(self.selected_features) < 1:
            raise IncompleteDataError("a model needs at least one selected feature")
        if len(self.densities) != len(self.selected_features):
            raise IncompleteDataError("densities must align with selected features")

    @property
    def m(self) -> int:
        return len(self.selected_features)


@dataclass
class PosteriorVector:
    """2M likelihood entries: M select-class values then M non-select values."""

    values: np.ndarray
    label: bool | None = None


def build_bayes_model(
    rows: list[ObservationVector],
    condition: Condition,
    features: list[str] | tuple[str, ...] = SELECTED_FEATURES,
    coeffk_norm: CoeffKNorm | None = None,
    min_rows: int = 8,
) -> BayesianModel:
    """Fit a (select, non-select) density pair per feature from labeled rows.

    Rows are IQR-filtered per class before fitting. A feature with fewer
    than min_rows usable rows in either class falls back to a uniform pair
    (with a warning) so it carries no class evidence.
    """
    sub = [r for r in rows if r.condition == condition and r.label is not None]
    densities = []
    for feature in features:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            true_vals = iqr_filter(_class_values(sub, feature, True))
            false_vals = iqr_filter(_class_values(sub, feature, False))
        if true_vals.size < min_rows or false_vals.size < min_rows:
            warnings.warn(
                f"{condition.key()}/{feature}: insufficient rows "
                f"({true_vals.size} true / {false_vals.size} false), using uniform pair",
                stacklevel=2)
            pooled = np.concatenate([true_vals, false_vals]) if (true_vals.size + false_vals.size) \
                else np.array([0.0, 1.0])
            u = uniform_over(pooled)
            densities.append((u, u))
            continue
        f_t = select_best_fit(true_vals)
        f_f = select_best_fit(false_vals)
        densities.append((f_t, f_f))
    return BayesianModel(
        condition=condition,
        selected_features=tuple(features),
        densities=tuple(densities),
        coeffk_norm=coeffk_norm or CoeffKNorm(),
    )


def _feature_pdf(dist: FittedDistribution, value: float) -> float:
    v = pdf(dist, value)
    if v > PDF_CEILING:
        return PDF_CEILING
    return float(v)


def posterior_vector(model: BayesianModel, obs: ObservationVector) -> PosteriorVector:
    """Entry-wise likelihood evaluation of one observation under the model.

    Absent features contribute the model's uniform fallback density in both
    halves, carrying no class evidence.
    """
    m = model.m
    out = np.empty(2 * m)
    fallback = float(pdf(model.absent_fallback,
                         0.5 * (model.absent_fallback.p1 + model.absent_fallback.p2)))
    for i, (feature, (f_t, f_f)) in enumerate(zip(model.selected_features, model.densities)):
        v = obs.value(feature)
        if v is None:
            out[i] = fallback
            out[m + i] = fallback
            continue
        if not math.isfinite(v):
            raise InvalidObservationError(f"{feature} is not finite: {v}")
        out[i] = _feature_pdf(f_t, v)
        out[m + i] = _feature_pdf(f_f, v)
    return PosteriorVector(values=out, label=obs.label)


def posterior_matrix(model: BayesianModel, rows: list[ObservationVector]) -> tuple[np.ndarray, np.ndarray]:
    """Stacked posterior vectors plus a label array (nan for unlabeled)."""
    vecs = np.empty((len(rows), 2 * model.m))
    labels = np.full(len(rows), np.nan)
    for i, r in enumerate(rows):
        pv = posterior_vector(model, r)
        vecs[i] = pv.values
        if r.label is not None:
            labels[i] = 1.0 if r.label else 0.0
    return vecs, labels


def naive_argmax(model: BayesianModel, obs: ObservationVector) -> bool:
    """Log-likelihood-sum baseline; ties resolve to non-select.

    Diagnostic only: the shipped classifier works on the posterior vector
    because the features are not independent.
    """
    pv = posterior_vector(model, obs)
    m = model.m
    log_t = float(np.sum(np.log(np.maximum(pv.values[:m], PDF_FLOOR))))
    log_f = float(np.sum(np.log(np.maximum(pv.values[m:], PDF_FLOOR))))
    return log_t > log_f
