"""Density families, maximum-likelihood fitting, and goodness-of-fit selection.

Parameterization ledger (version ``v1``; every model file embeds this tag
so a differently-parameterized file can never be confused):

====================  ==========================  =========================
family                p1                          p2
====================  ==========================  =========================
normal                mean                        variance
gamma                 shape k                     scale theta
inverse_gamma         shape alpha                 scale beta
exponential           rate lambda                 (unused)
log_normal            mu of log                   sigma of log
logistic              location                    scale
log_logistic          shape beta                  scale alpha
frechet               shape alpha                 scale s
gumbel                location (max-type)         scale
gompertz              rate b                      shape eta
weibull               shape k                     scale lambda
beta_prime            shape alpha                 shape beta
cauchy                location                    scale
chi_squared           degrees of freedom          (unused)
f                     dof d1                      dof d2
none_uniform          support low                 support high
====================  ==========================  =========================

The Gompertz pdf is ``b*eta*exp(b*x)*exp(-eta*(exp(b*x)-1))`` for x >= 0;
this (rate, shape) order is the one under which paired class fits of the
same feature land on consistent magnitudes.

Fitting uses closed forms where they exist (normal, exponential,
log-normal, and the log-transform reductions of log-logistic and Frechet),
one-dimensional profile likelihood searches where a nuisance parameter has
a closed-form optimum (gamma, weibull, gompertz, inverse-gamma, gumbel,
chi-squared), and a Nelder-Mead polish from moment starts for the rest.
Numeric searches run to a 1e-9 log-likelihood tolerance. Samples exactly
on a support boundary are nudged 1e-12 into the interior before fitting.

All functions are pure; independent (feature, class) cells may be fitted
in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .errors import (
    DegenerateSampleError,
    FitFailureError,
    ParameterDomainError,
    SupportError,
)

LEDGER_VERSION = "v1"

# Enumeration order used for fitting and for deterministic tie-breaking.
FAMILY_ORDER = (
    "normal", "gamma", "inverse_gamma", "exponential", "log_normal",
    "logistic", "log_logistic", "frechet", "gumbel", "gompertz",
    "weibull", "beta_prime", "cauchy", "chi_squared", "f",
)

NONE_UNIFORM = "none_uniform"

_INF = math.inf
_NUDGE = 1e-12
_LL_TOL = 1e-9

# support kinds: "real", "positive" (x > 0), "nonneg" (x >= 0)
_SUPPORT_KIND = {
    "normal": "real", "logistic": "real", "gumbel": "real", "cauchy": "real",
    "gamma": "positive", "inverse_gamma": "positive", "log_normal": "positive",
    "log_logistic": "positive", "frechet": "positive", "beta_prime": "positive",
    "chi_squared": "positive", "f": "positive",
    "exponential": "nonneg", "weibull": "nonneg", "gompertz": "nonneg",
}

_ONE_PARAM = {"exponential", "chi_squared"}


@dataclass(frozen=True)
class FittedDistribution:
    family: str
    p1: float
    p2: float | None
    support: tuple[float, float]
    ks_p: float | None = None

    def __post_init__(self) -> None:
        _validate(self.family, self.p1, self.p2, self.support)

    def to_dict(self) -> dict:
        lo, hi = self.support
        return {
            "family": self.family,
            "p1": self.p1,
            "p2": self.p2,
            "support": [lo if math.isfinite(lo) else None, hi if math.isfinite(hi) else None],
            "ks_p": self.ks_p,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FittedDistribution":
        lo, hi = d["support"]
        return cls(
            family=d["family"],
            p1=float(d["p1"]),
            p2=None if d.get("p2") is None else float(d["p2"]),
            support=(-_INF if lo is None else float(lo), _INF if hi is None else float(hi)),
            ks_p=d.get("ks_p"),
        )


def make_dist(family: str, p1: float, p2: float | None = None,
              ks_p: float | None = None) -> FittedDistribution:
    """Build a FittedDistribution with the family's natural support."""
    if family == NONE_UNIFORM:
        return FittedDistribution(NONE_UNIFORM, p1, p2, (p1, p2), ks_p)
    kind = _SUPPORT_KIND[family]
    if kind == "real":
        support = (-_INF, _INF)
    else:
        support = (0.0, _INF)
    return FittedDistribution(family, p1, p2, support, ks_p)


def _validate(family: str, p1: float, p2: float | None,
              support: tuple[float, float]) -> None:
    def positive(name, v):
        if v is None or not np.isfinite(v) or v <= 0:
            raise ParameterDomainError(f"{family}: {name} must be positive, got {v}")

    def real(name, v):
        if v is None or not np.isfinite(v):
            raise ParameterDomainError(f"{family}: {name} must be finite, got {v}")

    if family == NONE_UNIFORM:
        real("low", p1)
        real("high", p2)
        if p2 <= p1:
            raise ParameterDomainError(f"none_uniform: need low < high, got [{p1}, {p2}]")
        return
    if family not in _SUPPORT_KIND:
        raise ParameterDomainError(f"unknown family {family!r}")
    if family == "normal":
        real("mean", p1)
        positive("variance", p2)
    elif family in ("logistic", "gumbel", "cauchy"):
        real("location", p1)
        positive("scale", p2)
    elif family == "log_normal":
        real("mu", p1)
        positive("sigma", p2)
    elif family in _ONE_PARAM:
        positive("p1", p1)
        if p2 not in (None, 0, 0.0):
            raise ParameterDomainError(f"{family} takes a single parameter, got p2={p2}")
    else:
        positive("p1", p1)
        positive("p2", p2)


# ---------------------------------------------------------------------------
# pdf / cdf / sampling


def _z(x, loc, scale):
    return (x - loc) / scale


def _logpdf(d: FittedDistribution, x: np.ndarray) -> np.ndarray:
    """Log density on the interior of the support; -inf elsewhere."""
    f, p1, p2 = d.family, d.p1, d.p2
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if f == "normal":
            return -0.5 * (x - p1) ** 2 / p2 - 0.5 * math.log(2 * math.pi * p2)
        if f == "gamma":
            return (p1 - 1) * np.log(x) - x / p2 - special.gammaln(p1) - p1 * math.log(p2)
        if f == "inverse_gamma":
            return p1 * math.log(p2) - special.gammaln(p1) - (p1 + 1) * np.log(x) - p2 / x
        if f == "exponential":
            return math.log(p1) - p1 * x
        if f == "log_normal":
            lx = np.log(x)
            return (-0.5 * ((lx - p1) / p2) ** 2 - lx
                    - math.log(p2) - 0.5 * math.log(2 * math.pi))
        if f == "logistic":
            z = np.abs(_z(x, p1, p2))
            return -z - 2 * np.log1p(np.exp(-z)) - math.log(p2)
        if f == "log_logistic":
            beta, alpha = p1, p2
            t = beta * (np.log(x) - math.log(alpha))
            return (math.log(beta) - np.log(x) + t
                    - 2 * (np.maximum(t, 0.0) + np.log1p(np.exp(-np.abs(t)))))
        if f == "frechet":
            alpha, s = p1, p2
            t = x / s
            return math.log(alpha / s) - (1 + alpha) * np.log(t) - t ** (-alpha)
        if f == "gumbel":
            z = _z(x, p1, p2)
            return -z - np.exp(-z) - math.log(p2)
        if f == "gompertz":
            b, eta = p1, p2
            return math.log(b * eta) + b * x - eta * np.expm1(b * x)
        if f == "weibull":
            k, lam = p1, p2
            t = x / lam
            return math.log(k / lam) + (k - 1) * np.log(t) - t ** k
        if f == "beta_prime":
            a, b = p1, p2
            return (a - 1) * np.log(x) - (a + b) * np.log1p(x) - special.betaln(a, b)
        if f == "cauchy":
            z = _z(x, p1, p2)
            return -math.log(math.pi * p2) - np.log1p(z * z)
        if f == "chi_squared":
            k = p1
            return (k / 2 - 1) * np.log(x) - x / 2 - (k / 2) * math.log(2) - special.gammaln(k / 2)
        if f == "f":
            d1, d2 = p1, p2
            return (0.5 * d1 * math.log(d1 / d2) + (0.5 * d1 - 1) * np.log(x)
                    - 0.5 * (d1 + d2) * np.log1p(d1 * x / d2)
                    - special.betaln(0.5 * d1, 0.5 * d2))
        if f == NONE_UNIFORM:
            return np.full_like(x, -math.log(p2 - p1))
    raise ParameterDomainError(f"unknown family {f!r}")


def pdf(d: FittedDistribution, x) -> np.ndarray | float:
    """Density at x; zero outside the support."""
    scalar = np.isscalar(x)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    lo, hi = d.support
    inside = (x >= lo) & (x <= hi)
    # Open-boundary families: zero at the boundary point itself when the
    # log form diverges negative; where it diverges positive the honest
    # answer is inf and callers must not feed exact boundary points.
    out = np.zeros_like(x)
    if inside.any():
        xi = x[inside]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
            li = _logpdf(d, xi)
            vals = np.exp(li)
        vals = np.where(np.isnan(vals), 0.0, vals)
        out[inside] = vals
    return float(out[0]) if scalar else out


def cdf(d: FittedDistribution, x) -> np.ndarray | float:
    """Distribution function, from the family's own closed form."""
    scalar = np.isscalar(x)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    f, p1, p2 = d.family, d.p1, d.p2
    lo, hi = d.support
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        if f == "normal":
            out = special.ndtr((x - p1) / math.sqrt(p2))
        elif f == "gamma":
            out = special.gammainc(p1, np.maximum(x, 0.0) / p2)
        elif f == "inverse_gamma":
            out = np.where(x > 0, special.gammaincc(p1, p2 / np.maximum(x, _NUDGE)), 0.0)
        elif f == "exponential":
            out = -np.expm1(-p1 * np.maximum(x, 0.0))
        elif f == "log_normal":
            out = np.where(x > 0, special.ndtr((np.log(np.maximum(x, _NUDGE)) - p1) / p2), 0.0)
        elif f == "logistic":
            out = special.expit(_z(x, p1, p2))
        elif f == "log_logistic":
            beta, alpha = p1, p2
            t = beta * (np.log(np.maximum(x, _NUDGE)) - math.log(alpha))
            out = np.where(x > 0, special.expit(t), 0.0)
        elif f == "frechet":
            alpha, s = p1, p2
            out = np.where(x > 0, np.exp(-(np.maximum(x, _NUDGE) / s) ** (-alpha)), 0.0)
        elif f == "gumbel":
            out = np.exp(-np.exp(-_z(x, p1, p2)))
        elif f == "gompertz":
            b, eta = p1, p2
            out = -np.expm1(-eta * np.expm1(b * np.maximum(x, 0.0)))
        elif f == "weibull":
            k, lam = p1, p2
            out = -np.expm1(-((np.maximum(x, 0.0) / lam) ** k))
        elif f == "beta_prime":
            a, b = p1, p2
            xp = np.maximum(x, 0.0)
            out = special.betainc(a, b, xp / (1.0 + xp))
        elif f == "cauchy":
            out = 0.5 + np.arctan(_z(x, p1, p2)) / math.pi
        elif f == "chi_squared":
            out = special.gammainc(p1 / 2, np.maximum(x, 0.0) / 2)
        elif f == "f":
            d1, d2 = p1, p2
            xp = np.maximum(x, 0.0)
            out = special.betainc(0.5 * d1, 0.5 * d2, d1 * xp / (d1 * xp + d2))
        elif f == NONE_UNIFORM:
            out = np.clip((x - lo) / (hi - lo), 0.0, 1.0)
        else:
            raise ParameterDomainError(f"unknown family {f!r}")
    out = np.clip(out, 0.0, 1.0)
    return float(out[0]) if scalar else out


def sample(d: FittedDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n i.i.d. values (inverse-CDF or numpy generator per family)."""
    f, p1, p2 = d.family, d.p1, d.p2
    if f == "normal":
        return rng.normal(p1, math.sqrt(p2), n)
    if f == "gamma":
        return rng.gamma(p1, p2, n)
    if f == "inverse_gamma":
        return 1.0 / rng.gamma(p1, 1.0 / p2, n)
    if f == "exponential":
        return rng.exponential(1.0 / p1, n)
    if f == "log_normal":
        return rng.lognormal(p1, p2, n)
    if f == "logistic":
        return rng.logistic(p1, p2, n)
    if f == "log_logistic":
        u = rng.uniform(0.0, 1.0, n)
        return p2 * (u / (1.0 - u)) ** (1.0 / p1)
    if f == "frechet":
        u = rng.uniform(0.0, 1.0, n)
        return p2 * (-np.log(u)) ** (-1.0 / p1)
    if f == "gumbel":
        return rng.gumbel(p1, p2, n)
    if f == "gompertz":
        u = rng.uniform(0.0, 1.0, n)
        return np.log1p(-np.log1p(-u) / p2) / p1
    if f == "weibull":
        return p2 * rng.weibull(p1, n)
    if f == "beta_prime":
        return rng.gamma(p1, 1.0, n) / rng.gamma(p2, 1.0, n)
    if f == "cauchy":
        return p1 + p2 * rng.standard_cauchy(n)
    if f == "chi_squared":
        return rng.chisquare(p1, n)
    if f == "f":
        return rng.f(p1, p2, n)
    if f == NONE_UNIFORM:
        return rng.uniform(p1, p2, n)
    raise ParameterDomainError(f"unknown family {f!r}")


# ---------------------------------------------------------------------------
# maximum-likelihood fitting


def _prepare(family: str, samples) -> np.ndarray:
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1:
        x = x.ravel()
    if x.size < 8:
        raise FitFailureError(f"{family}: need at least 8 samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise SupportError(f"{family}: samples must be finite")
    kind = _SUPPORT_KIND[family]
    if kind in ("positive", "nonneg"):
        if np.any(x < 0):
            raise SupportError(f"{family}: negative samples outside support")
        x = np.where(x == 0.0, _NUDGE, x)
    return x


def _loglik(d: FittedDistribution, x: np.ndarray) -> float:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        l = _logpdf(d, x)
    if np.any(~np.isfinite(l)):
        return -math.inf
    return float(np.sum(l))


def _profile_1d(nll, lo_log: float, hi_log: float) -> float:
    res = optimize.minimize_scalar(
        nll, bounds=(lo_log, hi_log), method="bounded",
        options={"xatol": 1e-11, "maxiter": 500})
    if not np.isfinite(res.fun):
        raise FitFailureError("profile likelihood search failed to converge")
    return float(res.x)


def _nelder_mead(nll, x0: np.ndarray) -> np.ndarray:
    res = optimize.minimize(
        nll, x0, method="Nelder-Mead",
        options={"fatol": _LL_TOL, "xatol": 1e-10, "maxiter": 4000, "maxfev": 4000})
    if not np.isfinite(res.fun):
        raise FitFailureError("Nelder-Mead fit failed to converge")
    return res.x


def fit_mle(family: str, samples) -> tuple[float, float | None]:
    """Maximum-likelihood parameters of one family for the given samples."""
    x = _prepare(family, samples)
    n = x.size
    mean = float(np.mean(x))
    var = float(np.var(x))

    if family == "normal":
        if var == 0.0:
            raise DegenerateSampleError("normal fit of constant data is degenerate")
        return mean, var

    if family == "exponential":
        if mean <= 0:
            raise DegenerateSampleError("exponential fit needs a positive mean")
        return 1.0 / mean, None

    if family == "log_normal":
        lx = np.log(x)
        mu, sigma = float(np.mean(lx)), float(np.std(lx))
        if sigma == 0.0:
            raise DegenerateSampleError("log-normal fit of constant data is degenerate")
        return mu, sigma

    if var == 0.0:
        raise DegenerateSampleError(f"{family} fit of constant data is degenerate")

    if family == "gamma":
        # profile: theta(k) = mean / k
        slog = float(np.sum(np.log(x)))

        def nll(logk):
            k = math.exp(logk)
            theta = mean / k
            ll = (k - 1) * slog - n * k - n * special.gammaln(k) - n * k * math.log(theta)
            return -ll

        k = math.exp(_profile_1d(nll, math.log(1e-3), math.log(1e4)))
        return k, mean / k

    if family == "inverse_gamma":
        sinv = float(np.sum(1.0 / x))
        slog = float(np.sum(np.log(x)))

        def nll(loga):
            a = math.exp(loga)
            beta = n * a / sinv
            ll = n * a * math.log(beta) - n * special.gammaln(a) - (a + 1) * slog - n * a
            return -ll

        a = math.exp(_profile_1d(nll, math.log(1e-3), math.log(1e4)))
        return a, n * a / sinv

    if family == "weibull":
        lx = np.log(x)
        slx = float(np.sum(lx))

        def nll(logk):
            # profile: lambda(k)^k = mean(x^k); sum((x/lambda)^k) = n there
            k = math.exp(logk)
            loglam = (special.logsumexp(k * lx) - math.log(n)) / k
            ll = n * math.log(k) + (k - 1) * slx - n * k * loglam - n
            return -ll

        k = math.exp(_profile_1d(nll, math.log(1e-3), math.log(1e3)))
        loglam = (special.logsumexp(k * np.log(x)) - math.log(n)) / k
        return k, math.exp(loglam)

    if family == "gompertz":
        sx = float(np.sum(x))
        bmax = min(1e6, 500.0 / float(np.max(x)))

        def nll(logb):
            b = math.exp(logb)
            s = float(np.sum(np.expm1(b * x)))
            if s <= 0 or not np.isfinite(s):
                return math.inf
            eta = n / s
            ll = n * math.log(b) + n * math.log(eta) + b * sx - n
            return -ll

        b = math.exp(_profile_1d(nll, math.log(1e-6), math.log(bmax)))
        eta = n / float(np.sum(np.expm1(b * x)))
        return b, eta

    if family == "gumbel":
        def nll(logscale):
            beta = math.exp(logscale)
            mu = -beta * (special.logsumexp(-x / beta) - math.log(n))
            ll = -n * math.log(beta) - float(np.sum(x - mu)) / beta - n
            return -ll

        std = math.sqrt(var)
        lo = math.log(max(std * 1e-3, 1e-12))
        hi = math.log(std * 1e3)
        beta = math.exp(_profile_1d(nll, lo, hi))
        mu = -beta * (special.logsumexp(-x / beta) - math.log(n))
        return mu, beta

    if family == "chi_squared":
        slog = float(np.sum(np.log(x)))
        sx = float(np.sum(x))

        def nll(logk):
            k = math.exp(logk)
            ll = (k / 2 - 1) * slog - sx / 2 - n * (k / 2) * math.log(2) \
                - n * special.gammaln(k / 2)
            return -ll

        k = math.exp(_profile_1d(nll, math.log(1e-2), math.log(1e4)))
        return k, None

    if family == "log_logistic":
        # ln X is logistic(ln alpha, 1/beta); the Jacobian does not involve
        # the parameters, so the MLEs transform directly.
        loc, scale = fit_mle("logistic", np.log(x))
        return 1.0 / scale, math.exp(loc)

    if family == "frechet":
        # ln X is Gumbel(max)(ln s, 1/alpha).
        loc, scale = fit_mle("gumbel", np.log(x))
        return 1.0 / scale, math.exp(loc)

    if family == "logistic":
        x0 = np.array([mean, math.log(max(math.sqrt(var) * math.sqrt(3) / math.pi, 1e-12))])

        def nll(p):
            loc, logs = p
            s = math.exp(logs)
            z = np.abs((x - loc) / s)
            ll = float(np.sum(-z - 2 * np.log1p(np.exp(-z)))) - n * logs
            return -ll

        loc, logs = _nelder_mead(nll, x0)
        return float(loc), math.exp(logs)

    if family == "cauchy":
        q1, q2, q3 = np.percentile(x, [25, 50, 75])
        x0 = np.array([q2, math.log(max((q3 - q1) / 2.0, 1e-12))])

        def nll(p):
            loc, logs = p
            s = math.exp(logs)
            z = (x - loc) / s
            ll = -n * math.log(math.pi) - n * logs - float(np.sum(np.log1p(z * z)))
            return -ll

        loc, logs = _nelder_mead(nll, x0)
        return float(loc), math.exp(logs)

    if family == "beta_prime":
        if var > 0 and mean > 0:
            b0 = 2.0 + mean * (mean + 1.0) / var
            a0 = mean * (b0 - 1.0)
        else:
            a0, b0 = 1.5, 3.0
        a0 = min(max(a0, 0.05), 200.0)
        b0 = min(max(b0, 0.05), 200.0)
        slog = float(np.sum(np.log(x)))
        slog1p = float(np.sum(np.log1p(x)))

        def nll(p):
            a, b = math.exp(p[0]), math.exp(p[1])
            ll = (a - 1) * slog - (a + b) * slog1p - n * special.betaln(a, b)
            return -ll

        pa, pb = _nelder_mead(nll, np.log(np.array([a0, b0])))
        return math.exp(pa), math.exp(pb)

    if family == "f":
        d2_0 = 2.0 * mean / (mean - 1.0) if mean > 1.05 else 8.0
        d2_0 = min(max(d2_0, 0.5), 500.0)
        x0 = np.log(np.array([4.0, d2_0]))
        slog = float(np.sum(np.log(x)))

        def nll(p):
            d1, d2 = math.exp(p[0]), math.exp(p[1])
            ll = (n * 0.5 * d1 * math.log(d1 / d2) + (0.5 * d1 - 1) * slog
                  - 0.5 * (d1 + d2) * float(np.sum(np.log1p(d1 * x / d2)))
                  - n * special.betaln(0.5 * d1, 0.5 * d2))
            return -ll

        p1, p2 = _nelder_mead(nll, x0)
        return math.exp(p1), math.exp(p2)

    raise ParameterDomainError(f"unknown family {family!r}")


def fit_dist(family: str, samples, ks_p: float | None = None) -> FittedDistribution:
    p1, p2 = fit_mle(family, samples)
    return make_dist(family, p1, p2, ks_p=ks_p)


# ---------------------------------------------------------------------------
# goodness of fit


def kolmogorov_sf(lam: float, terms: int = 100) -> float:
    """Asymptotic Kolmogorov survival function, series truncated at `terms`."""
    if lam <= 0:
        return 1.0
    total = 0.0
    for k in range(1, terms + 1):
        total += (-1.0) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam)
    return min(1.0, max(0.0, 2.0 * total))


def ks_test(samples, d: FittedDistribution) -> tuple[float, float]:
    """One-sample two-sided KS statistic and asymptotic p-value."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < 8:
        raise FitFailureError(f"ks_test needs at least 8 samples, got {n}")
    if float(np.var(x)) == 0.0:
        raise DegenerateSampleError("ks_test on zero-variance samples")
    f = np.asarray(cdf(d, x))
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - f)
    d_minus = np.max(f - (i - 1) / n)
    stat = float(max(d_plus, d_minus))
    return stat, kolmogorov_sf(math.sqrt(n) * stat)


def uniform_over(samples) -> FittedDistribution:
    """NoneUniform spanning the sample range (widened when degenerate)."""
    x = np.asarray(samples, dtype=float)
    lo, hi = float(np.min(x)), float(np.max(x))
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    return make_dist(NONE_UNIFORM, lo, hi)


LARGE_SAMPLE_CUTOFF = 5000


def select_best_fit(samples) -> FittedDistribution:
    """Fit all applicable families and keep the best KS-passing one.

    Above the large-sample cutoff the test cannot be run and a normal fit
    is returned untested; when nothing passes, a uniform over the sample
    range is returned so the feature carries no class evidence.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 8:
        raise FitFailureError(f"select_best_fit needs at least 8 samples, got {x.size}")

    if x.size > LARGE_SAMPLE_CUTOFF:
        try:
            return fit_dist("normal", x)
        except (DegenerateSampleError, FitFailureError, SupportError, ParameterDomainError):
            return uniform_over(x)

    best: FittedDistribution | None = None
    best_p = -1.0
    for family in FAMILY_ORDER:
        try:
            dist = fit_dist(family, x)
            stat, p = ks_test(x, dist)
        except (DegenerateSampleError, FitFailureError, SupportError, ParameterDomainError):
            continue
        if p > 0.05 and p > best_p:
            best = FittedDistribution(dist.family, dist.p1, dist.p2, dist.support, ks_p=p)
            best_p = p
    if best is None:
        return uniform_over(x)
    return best
