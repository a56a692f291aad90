"""Gaussian-kernel soft-margin SVM trained with sequential minimal optimization.

The solver is a simplified Platt SMO: the first working-set index is the
point with the largest KKT violation, the second maximizes the error-cache
gap. Inputs are standardized per dimension with statistics from the
training split (likelihood magnitudes differ by orders of magnitude across
features); the scaler travels with the model. Kernel convention is
``exp(-||x - y||^2 / (2 sigma^2))`` -- sigma-style, never gamma-style.

Also home to dataset sampling/splitting, evaluation metrics (accuracy, F1,
trapezoidal AUC-ROC, per-call latency), cross-validation grid search, and
the feature-group ablation harness.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bayes import BayesianModel, posterior_matrix
from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    TrainingError,
)
from .features import FEATURE_GROUPS, FEATURE_NAMES, ObservationVector

DEFAULT_SIGMA = 30.0
DEFAULT_C = 30.0
_SV_EPS = 1e-10


def gaussian_kernel(x, y, sigma: float) -> float:
    """exp(-||x-y||^2 / (2 sigma^2)) for two equal-dimension vectors."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"kernel inputs disagree: {x.shape} vs {y.shape}")
    d = x - y
    return float(np.exp(-np.dot(d, d) / (2.0 * sigma * sigma)))


def _kernel_matrix(a: np.ndarray, b: np.ndarray, sigma: float) -> np.ndarray:
    """Pairwise Gaussian kernel between row sets a (n,d) and b (m,d)."""
    sq = (
        np.sum(a * a, axis=1)[:, None]
        + np.sum(b * b, axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-sq / (2.0 * sigma * sigma))


@dataclass
class Scaler:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> "Scaler":
        mean = np.mean(x, axis=0)
        std = np.std(x, axis=0)
        std = np.where(std == 0.0, 1.0, std)
        return cls(mean=mean, std=std)

    def transform(self, x: np.ndarray) -> np.ndarray:
        return (x - self.mean) / self.std


@dataclass
class TrainedSVM:
    """Support vectors live in scaled space; predict applies the scaler."""

    support_vectors: np.ndarray      # (k, d), scaled
    coefs: np.ndarray                # alpha_i * y_i, signed
    bias: float
    sigma: float
    c: float
    scaler: Scaler
    feature_mask: tuple[str, ...] | None = None  # names of masked-out features
    kkt_residual: float = 0.0
    iterations: int = 0

    @property
    def n_support(self) -> int:
        return len(self.coefs)

    def decision(self, v: np.ndarray) -> float:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.support_vectors.shape[1],):
            raise DimensionMismatchError(
                f"expected dimension {self.support_vectors.shape[1]}, got {v.shape}")
        z = self.scaler.transform(v)
        k = _kernel_matrix(z[None, :], self.support_vectors, self.sigma)[0]
        return float(np.dot(self.coefs, k) + self.bias)

    def decision_batch(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[1] != self.support_vectors.shape[1]:
            raise DimensionMismatchError(
                f"expected dimension {self.support_vectors.shape[1]}, got {x.shape[1]}")
        z = self.scaler.transform(x)
        k = _kernel_matrix(z, self.support_vectors, self.sigma)
        return k @ self.coefs + self.bias


def predict(model: TrainedSVM, v) -> tuple[bool, float]:
    """(label, decision value); positive decisions mean the select class."""
    d = model.decision(np.asarray(v, dtype=float))
    return d > 0.0, d


def predict_batch(model: TrainedSVM, x) -> tuple[np.ndarray, np.ndarray]:
    d = model.decision_batch(np.asarray(x, dtype=float))
    return d > 0.0, d


def _kkt_violations(alpha: np.ndarray, y: np.ndarray, err: np.ndarray, c: float) -> np.ndarray:
    r = y * err  # y_i f_i - 1
    up = np.where(alpha < c - _SV_EPS, np.maximum(0.0, -r), 0.0)
    down = np.where(alpha > _SV_EPS, np.maximum(0.0, r), 0.0)
    return np.maximum(up, down)


def train_smo(
    x,
    y,
    c: float = DEFAULT_C,
    sigma: float = DEFAULT_SIGMA,
    kkt_tol: float = 1e-3,
    max_passes: int | None = None,
    feature_mask: tuple[str, ...] | None = None,
) -> TrainedSVM:
    """Train on rows x with boolean (or +-1) labels y.

    Raises TrainingError on single-class data and ConvergenceError (carrying
    the partial model) if the pair-update budget runs out before every KKT
    violation drops below kkt_tol.
    """
    x = np.asarray(x, dtype=float)
    yb = np.asarray(y)
    if yb.dtype == bool:
        ysign = np.where(yb, 1.0, -1.0)
    else:
        ysign = np.asarray(yb, dtype=float)
        if not np.all(np.isin(ysign, (-1.0, 1.0))):
            raise TrainingError("labels must be boolean or +-1")
    n = len(x)
    if n < 2 or len(np.unique(ysign)) < 2:
        raise TrainingError("training needs both classes present")
    if not np.all(np.isfinite(x)):
        raise TrainingError("training features must be finite")

    scaler = Scaler.fit(x)
    z = scaler.transform(x)
    kmat = _kernel_matrix(z, z, sigma)

    alpha = np.zeros(n)
    bias = 0.0
    err = -ysign.copy()  # f(x_i) - y_i with all-zero alphas and zero bias
    if max_passes is None:
        max_passes = 10 * n

    it = 0
    stuck = np.zeros(n, dtype=bool)
    while it < max_passes:
        viol = _kkt_violations(alpha, ysign, err, c)
        if float(np.max(viol)) <= kkt_tol:
            break
        usable = np.where(stuck, 0.0, viol)
        if float(np.max(usable)) <= kkt_tol:
            break  # every remaining violator is blocked (duplicate-point degeneracy)
        i = int(np.argmax(usable))
        # second index: largest error-cache gap; fall back through the full
        # ranking (near the optimum the top candidates often sit at bounds)
        gap = np.abs(err - err[i])
        gap[i] = -1.0

        def _candidates():
            # lazy: most steps succeed on the best few, full ranking only on demand
            if n > 24:
                top = np.argpartition(-gap, 16)[:16]
                yield from top[np.argsort(-gap[top])]
            yield from np.argsort(-gap)

        progressed = False
        for j in _candidates():
            j = int(j)
            ai_old, aj_old = alpha[i], alpha[j]
            s = ysign[i] * ysign[j]
            if s > 0:
                lo = max(0.0, ai_old + aj_old - c)
                hi = min(c, ai_old + aj_old)
            else:
                lo = max(0.0, aj_old - ai_old)
                hi = min(c, c + aj_old - ai_old)
            if hi - lo < 1e-14:
                continue
            eta = kmat[i, i] + kmat[j, j] - 2.0 * kmat[i, j]
            if eta > 1e-12:
                aj = aj_old + ysign[j] * (err[i] - err[j]) / eta
                aj = min(max(aj, lo), hi)
            else:
                # dual is linear along the constraint line: take the better endpoint
                slope = ysign[j] * (err[i] - err[j])
                if slope > 1e-14:
                    aj = hi
                elif slope < -1e-14:
                    aj = lo
                else:
                    continue
            if abs(aj - aj_old) < 1e-14:
                continue
            ai = ai_old + s * (aj_old - aj)
            d_i, d_j = ai - ai_old, aj - aj_old
            b1 = bias - err[i] - ysign[i] * d_i * kmat[i, i] - ysign[j] * d_j * kmat[i, j]
            b2 = bias - err[j] - ysign[i] * d_i * kmat[i, j] - ysign[j] * d_j * kmat[j, j]
            if _SV_EPS < ai < c - _SV_EPS:
                new_b = b1
            elif _SV_EPS < aj < c - _SV_EPS:
                new_b = b2
            else:
                new_b = 0.5 * (b1 + b2)
            err += ysign[i] * d_i * kmat[:, i] + ysign[j] * d_j * kmat[:, j] + (new_b - bias)
            alpha[i], alpha[j] = ai, aj
            bias = new_b
            progressed = True
            break
        if progressed:
            stuck[:] = False
        else:
            stuck[i] = True
        it += 1

    viol = _kkt_violations(alpha, ysign, err, c)
    residual = float(np.max(viol))
    sv = alpha > _SV_EPS
    if not np.any(sv):
        # degenerate but legal: decision is the bias everywhere
        sv = np.zeros(n, dtype=bool)
        sv[0] = True
    model = TrainedSVM(
        support_vectors=z[sv],
        coefs=(alpha * ysign)[sv],
        bias=bias,
        sigma=sigma,
        c=c,
        scaler=scaler,
        feature_mask=feature_mask,
        kkt_residual=residual,
        iterations=it,
    )
    if residual > kkt_tol:
        raise ConvergenceError(
            f"SMO stopped after {it} pair updates with KKT residual {residual:.3e} > {kkt_tol}",
            partial_model=model, worst_violation=residual)
    return model


def dual_objective(model_or_alpha, x=None, y=None, sigma=None) -> float:
    """Dual value sum(alpha) - 0.5 * sum_ij alpha_i alpha_j y_i y_j K_ij.

    Accepts either (alpha, x, y, sigma) arrays in scaled space or a raw
    alpha vector with its problem data; used to compare solvers.
    """
    alpha = np.asarray(model_or_alpha, dtype=float)
    kmat = _kernel_matrix(x, x, sigma)
    ay = alpha * y
    return float(np.sum(alpha) - 0.5 * ay @ kmat @ ay)


# ---------------------------------------------------------------------------
# dataset handling


def sample_and_split(
    labels,
    ratio_true: int = 1,
    ratio_false: int = 3,
    split: tuple[int, int, int] = (6, 2, 2),
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Index-level class rebalancing plus stratified train/val/test split.

    Downsamples the non-select class to ratio_true:ratio_false, then splits
    each class by the given proportions (train and validation take their
    floor share, test takes the rest). Returns index arrays into `labels`.
    """
    y = np.asarray(labels)
    if y.dtype != bool:
        y = y.astype(bool)
    rng = np.random.default_rng(seed)
    true_idx = np.flatnonzero(y)
    false_idx = np.flatnonzero(~y)
    n_true = len(true_idx)
    want_false = (n_true * ratio_false) // ratio_true
    if n_true == 0:
        raise TrainingError("no select-class rows to sample")
    if len(false_idx) < want_false:
        raise TrainingError(
            f"need {want_false} non-select rows for a {ratio_true}:{ratio_false} "
            f"ratio, have {len(false_idx)} (short by {want_false - len(false_idx)})")
    false_idx = rng.permutation(false_idx)[:want_false]
    true_idx = rng.permutation(true_idx)

    total = sum(split)
    parts: list[list[np.ndarray]] = [[], [], []]
    for cls_idx in (true_idx, false_idx):
        n = len(cls_idx)
        n_train = n * split[0] // total
        n_val = n * split[1] // total
        parts[0].append(cls_idx[:n_train])
        parts[1].append(cls_idx[n_train:n_train + n_val])
        parts[2].append(cls_idx[n_train + n_val:])
    out = []
    for p in parts:
        idx = np.concatenate(p)
        out.append(rng.permutation(idx))
    return out[0], out[1], out[2]


# ---------------------------------------------------------------------------
# metrics


@dataclass
class Metrics:
    tp: int
    fp: int
    fn: int
    tn: int
    accuracy: float
    f1: float
    auc_roc: float | None
    mean_inference_us: float | None = None
    p99_inference_us: float | None = None

    def as_dict(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn,
            "accuracy": self.accuracy, "f1": self.f1, "auc_roc": self.auc_roc,
            "mean_inference_us": self.mean_inference_us,
            "p99_inference_us": self.p99_inference_us,
        }


def confusion_metrics(tp: int, fp: int, fn: int, tn: int) -> tuple[float, float]:
    total = tp + fp + fn + tn
    acc = (tp + tn) / total if total else 0.0
    denom = 2 * tp + fp + fn
    f1 = 2 * tp / denom if denom else 0.0
    return acc, f1


def auc_roc(scores, labels) -> float:
    """AUC by trapezoidal integration over the sorted decision-value sweep.

    Tied scores move as one group, which matches the pairwise-comparison
    definition with half credit for ties.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels).astype(bool)
    n_pos = int(np.sum(y))
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs both classes")
    order = np.argsort(-s, kind="stable")
    s_sorted = s[order]
    y_sorted = y[order]
    tpr = [0.0]
    fpr = [0.0]
    tp = fp = 0
    i = 0
    n = len(s)
    while i < n:
        j = i
        while j < n and s_sorted[j] == s_sorted[i]:
            j += 1
        tp += int(np.sum(y_sorted[i:j]))
        fp += (j - i) - int(np.sum(y_sorted[i:j]))
        tpr.append(tp / n_pos)
        fpr.append(fp / n_neg)
        i = j
    return float(np.trapz(tpr, fpr))


def evaluate(model: TrainedSVM, x, labels, with_timing: bool = False) -> Metrics:
    """Confusion metrics plus AUC of the decision sweep on a test set.

    With timing enabled, each row is predicted one at a time and the
    wall-clock per predict call is recorded (mean and p99, microseconds).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(labels).astype(bool)
    if len(x) == 0:
        raise TrainingError("empty test set")
    pred, scores = predict_batch(model, x)
    tp = int(np.sum(pred & y))
    fp = int(np.sum(pred & ~y))
    fn = int(np.sum(~pred & y))
    tn = int(np.sum(~pred & ~y))
    acc, f1 = confusion_metrics(tp, fp, fn, tn)
    try:
        auc = auc_roc(scores, y)
    except ValueError:
        auc = None

    mean_us = p99_us = None
    if with_timing:
        lat = np.empty(len(x))
        for i in range(len(x)):
            t0 = time.perf_counter_ns()
            model.decision(x[i])
            lat[i] = (time.perf_counter_ns() - t0) / 1000.0
        mean_us = float(np.mean(lat))
        p99_us = float(np.percentile(lat, 99))
    return Metrics(tp=tp, fp=fp, fn=fn, tn=tn, accuracy=acc, f1=f1, auc_roc=auc,
                   mean_inference_us=mean_us, p99_inference_us=p99_us)


# ---------------------------------------------------------------------------
# cross-validation and ablations


def cross_validate_grid(
    x,
    y,
    sigma_grid,
    c_grid,
    k: int = 5,
    seed: int = 0,
    kkt_tol: float = 1e-3,
) -> tuple[tuple[float, float], dict]:
    """Stratified k-fold grid search; returns best (sigma, c) and fold table.

    Ties break toward smaller complexity, then smaller kernel width.
    """
    if len(sigma_grid) == 0 or len(c_grid) == 0:
        raise ValueError("empty hyperparameter grid")
    x = np.asarray(x, dtype=float)
    yb = np.asarray(y).astype(bool)
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    for cls in (True, False):
        idx = rng.permutation(np.flatnonzero(yb == cls))
        for pos, i in enumerate(idx):
            folds[pos % k].append(int(i))
    folds = [np.array(sorted(f)) for f in folds]

    table: dict[tuple[float, float], list[float]] = {}
    for sigma in sigma_grid:
        for c in c_grid:
            accs = []
            for f in range(k):
                val_idx = folds[f]
                train_idx = np.concatenate([folds[g] for g in range(k) if g != f])
                try:
                    m = train_smo(x[train_idx], yb[train_idx], c=c, sigma=sigma,
                                  kkt_tol=kkt_tol)
                except ConvergenceError as e:
                    m = e.partial_model
                pred, _ = predict_batch(m, x[val_idx])
                accs.append(float(np.mean(pred == yb[val_idx])))
            table[(float(sigma), float(c))] = accs

    def sort_key(item):
        (sigma, c), accs = item
        return (-float(np.mean(accs)), c, sigma)

    best = min(table.items(), key=sort_key)[0]
    return best, table


ABLATION_MASKS = {
    "all": (),
    "no_1st_fixation": FEATURE_GROUPS["1st_fixation"],
    "no_2nd_fixation": FEATURE_GROUPS["2nd_fixation"],
    "no_saccade": FEATURE_GROUPS["saccade"],
    "observation_data": None,  # raw features, no posterior transform
}


def _raw_matrix(rows: list[ObservationVector]) -> np.ndarray:
    mat = np.full((len(rows), len(FEATURE_NAMES)), np.nan)
    for i, r in enumerate(rows):
        for j, name in enumerate(FEATURE_NAMES):
            v = r.value(name)
            if v is not None:
                mat[i, j] = v
    return mat


def ablation_run(
    rows: list[ObservationVector],
    model: BayesianModel,
    masks=("all", "no_1st_fixation", "no_2nd_fixation", "no_saccade", "observation_data"),
    seed: int = 0,
    sigma: float = DEFAULT_SIGMA,
    c: float = DEFAULT_C,
    kkt_tol: float = 1e-3,
) -> dict[str, Metrics]:
    """Train and evaluate one SVM per feature-group mask on a shared split.

    Posterior-vector masks drop both likelihood halves of the masked
    features; the observation-data mask feeds the raw features instead
    (absent slots imputed with training-split means).
    """
    for mask in masks:
        if mask not in ABLATION_MASKS:
            raise ValueError(f"unknown ablation mask {mask!r}")
    labeled = [r for r in rows if r.label is not None]
    y = np.array([bool(r.label) for r in labeled])
    train_idx, val_idx, test_idx = sample_and_split(y, seed=seed)

    post, _ = posterior_matrix(model, labeled)
    raw = _raw_matrix(labeled)
    m = model.m

    results: dict[str, Metrics] = {}
    for mask in masks:
        excluded = ABLATION_MASKS[mask]
        if excluded is None:
            mat = raw.copy()
            train_means = np.nanmean(mat[train_idx], axis=0)
            train_means = np.where(np.isnan(train_means), 0.0, train_means)
            nan_pos = np.nonzero(np.isnan(mat))
            mat[nan_pos] = train_means[nan_pos[1]]
            feature_mask: tuple[str, ...] = ()
        else:
            keep = [i for i, f in enumerate(model.selected_features) if f not in excluded]
            cols = keep + [m + i for i in keep]
            mat = post[:, cols]
            feature_mask = tuple(f for f in model.selected_features if f in excluded)
        try:
            svm = train_smo(mat[train_idx], y[train_idx], c=c, sigma=sigma,
                            kkt_tol=kkt_tol, feature_mask=feature_mask)
        except ConvergenceError as e:
            warnings.warn(f"{mask}: {e}", stacklevel=2)
            svm = e.partial_model
        results[mask] = evaluate(svm, mat[test_idx], y[test_idx], with_timing=True)
    return results


def format_metrics_csv(results: dict[str, Metrics]) -> str:
    lines = ["schema_version,mask,acc,f1,auc,mean_us,p99_us"]
    for mask, met in results.items():
        auc = "" if met.auc_roc is None else f"{met.auc_roc:.6f}"
        mean_us = "" if met.mean_inference_us is None else f"{met.mean_inference_us:.3f}"
        p99 = "" if met.p99_inference_us is None else f"{met.p99_inference_us:.3f}"
        lines.append(f"1,{mask},{met.accuracy:.6f},{met.f1:.6f},{auc},{mean_us},{p99}")
    return "\n".join(lines) + "\n"


def format_metrics_table(results: dict[str, Metrics]) -> str:
    header = f"{'mask':<18} {'acc':>7} {'f1':>7} {'auc':>7} {'mean_us':>9} {'p99_us':>9}"
    lines = [header, "-" * len(header)]
    for mask, met in results.items():
        auc = "  n/a" if met.auc_roc is None else f"{met.auc_roc:7.3f}"
        mean_us = "      n/a" if met.mean_inference_us is None else f"{met.mean_inference_us:9.1f}"
        p99 = "      n/a" if met.p99_inference_us is None else f"{met.p99_inference_us:9.1f}"
        lines.append(f"{mask:<18} {met.accuracy:7.3f} {met.f1:7.3f} {auc} {mean_us} {p99}")
    return "\n".join(lines) + "\n"
