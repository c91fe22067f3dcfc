"""Utility metrics gating the anonymization loop.

Three numeric families compare the true table A with a candidate B:

* matrix norms of the standardized absolute-difference matrix
  (element sum, worst-record adapted L1, Frobenius);
* Pearson correlation of the two row-major flattenings;
* Kullback-Leibler divergence between Gaussians fitted to the rows.

Norms act on standardized values so that wide-ranged attributes cannot
dominate; correlation and the KL divergence act on the tables in their
original units.  A :class:`UtilityPolicy` declares which metrics are
enabled and their thresholds; pass directions are fixed per metric
(norms and KL pass when small, correlation passes when large) and the
comparisons are inclusive.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, StandardizedDataset, column_stats, standardize
from .errors import (
    ConfigError,
    ShapeMismatchError,
    SingularCovarianceError,
    StatsMismatchError,
    UndefinedCorrelationError,
)

#: Metric names accepted in policies, mapped to their pass direction.
#: "le": value <= threshold passes.  "ge": value >= threshold passes.
METRIC_DIRECTIONS = {
    "norm_sum": "le",
    "norm_l1": "le",
    "norm_frobenius": "le",
    "correlation": "ge",
    "kl": "le",
}

DEFAULT_RIDGE = 1e-6
_CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class DifferenceMatrix:
    """Element-wise |a_hat - b_hat| of two equally standardized tables."""

    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.float64)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)


def difference_matrix(a_std: StandardizedDataset,
                      b_std: StandardizedDataset) -> DifferenceMatrix:
    """|a_hat_ij - b_hat_ij|, requiring both tables to share one scale."""
    if a_std.rows.shape != b_std.rows.shape:
        raise ShapeMismatchError(
            f"shapes differ: {a_std.rows.shape} vs {b_std.rows.shape}")
    if not a_std.stats.same_as(b_std.stats):
        raise StatsMismatchError(
            "operands were standardized with different column stats")
    return DifferenceMatrix(entries=np.abs(a_std.rows - b_std.rows))


def norm_sum(d: DifferenceMatrix) -> float:
    """Sum of all difference entries."""
    return float(d.entries.sum())


def norm_l1_adapted(d: DifferenceMatrix) -> float:
    """Largest per-record sum: max over rows i of sum_j d_ij.

    The textbook L1 matrix norm maximizes over columns; here the max runs
    over records, picking out the single most distorted row.
    """
    return float(d.entries.sum(axis=1).max())


def norm_frobenius(d: DifferenceMatrix) -> float:
    """sqrt of the sum of squared entries."""
    return float(np.sqrt((d.entries ** 2).sum()))


def flatten_row_major(x: np.ndarray) -> np.ndarray:
    """Read an n x m matrix row by row into a vector of length n*m."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeMismatchError(f"expected a 2-D matrix, got ndim={x.ndim}")
    return x.reshape(-1)


def correlation(a: Dataset, b: Dataset) -> float:
    """Pearson correlation of the two row-major flattenings.

    Raises UndefinedCorrelationError when either flattening is constant.
    """
    if a.rows.shape != b.rows.shape:
        raise ShapeMismatchError(
            f"shapes differ: {a.rows.shape} vs {b.rows.shape}")
    v = flatten_row_major(a.rows)
    w = flatten_row_major(b.rows)
    dv = v - v.mean()
    dw = w - w.mean()
    sv = float(dv @ dv)
    sw = float(dw @ dw)
    if sv == 0.0 or sw == 0.0:
        side = "first" if sv == 0.0 else "second"
        raise UndefinedCorrelationError(
            f"the {side} flattening has zero variance")
    rho = float(dv @ dw) / math.sqrt(sv * sw)
    return min(1.0, max(-1.0, rho))


def gaussian_kl_from_moments(mean_a, cov_a, mean_b, cov_b) -> float:
    """Closed-form KL divergence between two Gaussians from their moments.

    Evaluates
        0.5 * [tr(R_a R_b^-1) - log(|R_a|/|R_b|) - m]
        + 0.5 * (mean_a - mean_b)^T R_b^-1 (mean_a - mean_b)
    with determinants taken in log space through Cholesky factors.
    """
    mu_a = np.atleast_1d(np.asarray(mean_a, dtype=np.float64))
    mu_b = np.atleast_1d(np.asarray(mean_b, dtype=np.float64))
    r_a = np.atleast_2d(np.asarray(cov_a, dtype=np.float64))
    r_b = np.atleast_2d(np.asarray(cov_b, dtype=np.float64))
    m = mu_a.shape[0]
    if mu_b.shape != (m,) or r_a.shape != (m, m) or r_b.shape != (m, m):
        raise ShapeMismatchError("moment dimensions are inconsistent")

    logdet_a = _chol_logdet(r_a, "first covariance")
    chol_b = _chol_factor(r_b, "second covariance")
    logdet_b = 2.0 * float(np.sum(np.log(np.diag(chol_b))))

    # tr(R_a R_b^-1) via two triangular solves with the Cholesky factor.
    half = np.linalg.solve(chol_b, r_a)
    inner = np.linalg.solve(chol_b, half.T)
    trace_term = float(np.trace(inner))

    delta = mu_a - mu_b
    y = np.linalg.solve(chol_b, delta)
    mean_term = float(y @ y)

    return 0.5 * (trace_term - (logdet_a - logdet_b) - m) + 0.5 * mean_term


def _chol_factor(r: np.ndarray, label: str) -> np.ndarray:
    try:
        return np.linalg.cholesky(r)
    except np.linalg.LinAlgError as exc:
        raise SingularCovarianceError(
            f"{label} is not positive definite") from exc


def _chol_logdet(r: np.ndarray, label: str) -> float:
    chol = _chol_factor(r, label)
    return 2.0 * float(np.sum(np.log(np.diag(chol))))


def _regularize(r: np.ndarray, ridge: float) -> np.ndarray:
    m = r.shape[0]
    return r + ridge * (np.trace(r) / m) * np.eye(m)


def gaussian_kl(a: Dataset, b: Dataset,
                ridge: float = DEFAULT_RIDGE) -> float:
    """KL divergence of Gaussians fitted to the rows of A and B.

    Means and population autocovariances are estimated from each table,
    both covariances are regularized as R + ridge*(tr(R)/m)*I, and the
    closed form is evaluated with the true table as the reference (first
    argument).  The divergence is not symmetric; callers must keep the
    argument order fixed.
    """
    if a.rows.shape != b.rows.shape:
        raise ShapeMismatchError(
            f"shapes differ: {a.rows.shape} vs {b.rows.shape}")
    if ridge < 0:
        raise ConfigError(f"ridge must be non-negative, got {ridge}")
    n, m = a.rows.shape
    if n <= m:
        warnings.warn(
            f"covariance estimated from n={n} rows for m={m} columns; "
            "expect a poorly conditioned estimate", stacklevel=2)

    mean_a = a.rows.mean(axis=0)
    mean_b = b.rows.mean(axis=0)
    r_a = _regularize(_population_cov(a.rows, mean_a), ridge)
    r_b = _regularize(_population_cov(b.rows, mean_b), ridge)
    if _condition_number(r_b) > _CONDITION_LIMIT:
        raise SingularCovarianceError(
            "candidate covariance is singular after regularization; "
            "increase the ridge")
    return gaussian_kl_from_moments(mean_a, r_a, mean_b, r_b)


def _population_cov(rows: np.ndarray, means: np.ndarray) -> np.ndarray:
    y = rows - means
    c = y.T @ y / rows.shape[0]
    return (c + c.T) / 2.0


def _condition_number(r: np.ndarray) -> float:
    try:
        return float(np.linalg.cond(r, 2))
    except np.linalg.LinAlgError:
        return math.inf


@dataclass(frozen=True)
class MetricRule:
    """Enablement and threshold for one metric."""

    enabled: bool
    threshold: float = 0.0


@dataclass(frozen=True)
class UtilityPolicy:
    """Which metrics gate the loop and where each one's floor/ceiling sits.

    Serialized form is a flat JSON object, e.g.::

        {"norm_frobenius": {"enabled": true, "threshold": 12.5},
         "correlation":    {"enabled": true, "threshold": 0.9}}

    Metrics absent from the object are disabled.
    """

    rules: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not self.rules:
            raise ConfigError("policy enables no metric")
        for name, rule in self.rules.items():
            if name not in METRIC_DIRECTIONS:
                raise ConfigError(
                    f"unknown metric {name!r}; expected one of "
                    f"{sorted(METRIC_DIRECTIONS)}")
            if not isinstance(rule, MetricRule):
                raise ConfigError(f"rule for {name!r} is not a MetricRule")
            if rule.enabled and not math.isfinite(rule.threshold):
                raise ConfigError(
                    f"threshold for {name!r} must be finite")
        if not any(r.enabled for r in self.rules.values()):
            raise ConfigError("policy enables no metric")
        corr = self.rules.get("correlation")
        if corr is not None and corr.enabled and not -1 <= corr.threshold <= 1:
            raise ConfigError(
                f"correlation threshold {corr.threshold} outside [-1, 1]")

    def enabled_metrics(self) -> list:
        return [name for name, rule in self.rules.items() if rule.enabled]

    @classmethod
    def from_json_dict(cls, obj) -> "UtilityPolicy":
        if not isinstance(obj, dict):
            raise ConfigError("policy JSON must be an object")
        rules = {}
        for name, entry in obj.items():
            if not isinstance(entry, dict) or "enabled" not in entry:
                raise ConfigError(
                    f"policy entry {name!r} must be an object with "
                    "'enabled' and 'threshold'")
            enabled = entry["enabled"]
            if not isinstance(enabled, bool):
                raise ConfigError(f"'enabled' for {name!r} must be boolean")
            threshold = entry.get("threshold", 0.0)
            if not isinstance(threshold, (int, float)) or isinstance(
                    threshold, bool):
                raise ConfigError(f"'threshold' for {name!r} must be a number")
            rules[name] = MetricRule(enabled=enabled,
                                     threshold=float(threshold))
        policy = cls(rules=rules)
        policy.validate()
        return policy

    def to_json_dict(self) -> dict:
        return {
            name: {"enabled": rule.enabled, "threshold": rule.threshold}
            for name, rule in self.rules.items()
        }


def always_pass_policy() -> UtilityPolicy:
    """A norm-only policy with thresholds no finite difference exceeds."""
    return UtilityPolicy(rules={
        "norm_frobenius": MetricRule(enabled=True, threshold=1e300),
    })


@dataclass(frozen=True)
class UtilityReport:
    """Metric values for an (A, B) pair plus pass flags.

    Values are present only for metrics the policy enables; a metric that
    could not be computed (undefined correlation) stays None and fails.
    """

    norm_sum: float | None
    norm_l1_adapted: float | None
    norm_frobenius: float | None
    correlation: float | None
    kl_divergence: float | None
    flags: dict
    passed: bool

    def value_of(self, metric: str):
        return {
            "norm_sum": self.norm_sum,
            "norm_l1": self.norm_l1_adapted,
            "norm_frobenius": self.norm_frobenius,
            "correlation": self.correlation,
            "kl": self.kl_divergence,
        }[metric]

    def to_json_dict(self) -> dict:
        out = {"metrics": {}, "passed": self.passed}
        for metric in sorted(self.flags):
            out["metrics"][metric] = {
                "value": self.value_of(metric),
                "passed": self.flags[metric],
            }
        return out


def _passes(direction: str, value: float, threshold: float) -> bool:
    if direction == "le":
        return value <= threshold
    return value >= threshold


def evaluate(a: Dataset, b: Dataset, policy: UtilityPolicy, *,
             ridge: float = DEFAULT_RIDGE) -> UtilityReport:
    """Compute every enabled metric and compare against the policy.

    Norms are computed on both tables standardized with the TRUE table's
    stats; correlation and KL act on original units.  An undefined
    correlation is recorded as a per-metric failure rather than an error.
    """
    policy.validate()
    if a.rows.shape != b.rows.shape:
        raise ShapeMismatchError(
            f"shapes differ: {a.rows.shape} vs {b.rows.shape}")
    enabled = set(policy.enabled_metrics())

    values = {
        "norm_sum": None,
        "norm_l1": None,
        "norm_frobenius": None,
        "correlation": None,
        "kl": None,
    }
    flags = {}

    if enabled & {"norm_sum", "norm_l1", "norm_frobenius"}:
        stats = column_stats(a)
        diff = difference_matrix(standardize(a, stats),
                                 standardize(b, stats))
        if "norm_sum" in enabled:
            values["norm_sum"] = norm_sum(diff)
        if "norm_l1" in enabled:
            values["norm_l1"] = norm_l1_adapted(diff)
        if "norm_frobenius" in enabled:
            values["norm_frobenius"] = norm_frobenius(diff)

    if "correlation" in enabled:
        try:
            values["correlation"] = correlation(a, b)
        except UndefinedCorrelationError:
            values["correlation"] = None

    if "kl" in enabled:
        values["kl"] = gaussian_kl(a, b, ridge=ridge)

    for metric in enabled:
        value = values[metric]
        if value is None:
            flags[metric] = False
        else:
            flags[metric] = _passes(METRIC_DIRECTIONS[metric], value,
                                    policy.rules[metric].threshold)

    return UtilityReport(
        norm_sum=values["norm_sum"],
        norm_l1_adapted=values["norm_l1"],
        norm_frobenius=values["norm_frobenius"],
        correlation=values["correlation"],
        kl_divergence=values["kl"],
        flags=flags,
        passed=all(flags.values()),
    )
