"""Principal-component machinery and the anonymization loop.

Anonymization here works backwards from the usual PCA recipe: instead of
keeping the largest components, the LARGEST component is removed first,
and the reduced data is projected back onto the original attribute axes
so that every released column still means what it meant before.  Removal
continues while a caller-supplied utility policy keeps passing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dataset import (
    ColumnStats,
    Dataset,
    StandardizedDataset,
    column_stats,
    destandardize,
    standardize,
)
from .errors import DataError, EigenConvergenceError, ShapeMismatchError
from .metrics import UtilityPolicy, UtilityReport, evaluate

_SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (descending) and orthonormal eigenvectors of a covariance.

    Column k of ``eigenvectors`` is the unit eigenvector paired with
    ``eigenvalues[k]``.  Signs follow a deterministic convention: the
    largest-magnitude entry of each eigenvector is positive, ties broken
    by the lowest index.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=np.float64).reshape(-1)
        vecs = np.asarray(self.eigenvectors, dtype=np.float64)
        p = vals.shape[0]
        if vecs.shape != (p, p):
            raise ShapeMismatchError(
                f"eigenvector matrix {vecs.shape} does not match "
                f"{p} eigenvalues")
        vals.setflags(write=False)
        vecs.setflags(write=False)
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]


class StoppedReason(enum.Enum):
    """Why the component-removal loop terminated."""

    POLICY_VIOLATED = "policy_violated"
    ALL_BUT_ONE_REMOVED = "all_but_one_removed"
    MAX_K_REACHED = "max_k_reached"


@dataclass(frozen=True)
class AnonymizationResult:
    """Outcome of the removal loop.

    ``anonymized`` corresponds to the LAST k whose utility report passed
    the policy (k=0, i.e. the input itself, when the very first removal
    already violates it).  ``history`` holds one (k, report) entry per
    loop iteration actually executed, including a failing final one.
    """

    anonymized: Dataset
    components_removed: int
    history: tuple
    stopped_reason: StoppedReason


def covariance(s: StandardizedDataset) -> np.ndarray:
    """Population covariance (1/n) X^T X of standardized rows.

    For data standardized with its own stats this is the correlation
    matrix of the original table: symmetric with a unit diagonal.
    """
    x = s.rows
    n = x.shape[0]
    if n < 2:
        raise DataError("covariance needs at least 2 rows")
    c = x.T @ x / n
    # exact symmetry keeps eigh deterministic
    return (c + c.T) / 2.0


def _centered_covariance(x: np.ndarray) -> np.ndarray:
    """Population covariance of raw rows, centering columns first."""
    y = x - x.mean(axis=0)
    c = y.T @ y / x.shape[0]
    return (c + c.T) / 2.0


def eig_sym(c: np.ndarray) -> EigenSystem:
    """Eigen-decompose a symmetric matrix into a sorted EigenSystem.

    Raises DataError if the input is not symmetric within 1e-9 and
    EigenConvergenceError if the underlying QL/QR iteration fails.
    """
    c = np.asarray(c, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got {c.shape}")
    asym = np.max(np.abs(c - c.T)) if c.size else 0.0
    if asym > _SYMMETRY_TOL:
        raise DataError(
            f"matrix is not symmetric (max |C - C^T| = {asym:.3e})")
    try:
        vals, vecs = np.linalg.eigh(c)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(
            f"symmetric eigensolver failed: {exc}") from exc
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    vecs = _fix_signs(vecs)
    return EigenSystem(eigenvalues=vals, eigenvectors=vecs)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    """Flip columns so each one's largest-magnitude entry is positive.

    np.argmax returns the first maximal index, which implements the
    lowest-index tie break.
    """
    vecs = vecs.copy()
    for k in range(vecs.shape[1]):
        idx = int(np.argmax(np.abs(vecs[:, k])))
        if vecs[idx, k] < 0:
            vecs[:, k] = -vecs[:, k]
    return vecs


def remove_top_components(s: StandardizedDataset, es: EigenSystem,
                          k: int) -> StandardizedDataset:
    """Project out the k largest components, staying on the original axes.

    Returns X W_r W_r^T where W_r holds the retained (smaller) eigenvector
    columns; the output is still expressed in standardized attribute
    coordinates, not component scores.
    """
    p = s.n_cols
    if es.size != p:
        raise ShapeMismatchError(
            f"eigensystem of size {es.size} does not match {p} columns")
    if not 0 <= k <= p - 1:
        raise DataError(
            f"k={k} out of range; must satisfy 0 <= k <= {p - 1}")
    if k == 0:
        return s
    w_r = es.eigenvectors[:, k:]
    rows = s.rows @ w_r @ w_r.T
    return StandardizedDataset(rows=rows, stats=s.stats)


def anonymize(d: Dataset, policy: UtilityPolicy, max_k=None, *,
              ridge: float = 1e-6,
              recompute_basis: bool = False) -> AnonymizationResult:
    """Remove principal components, largest first, while utility holds.

    Each iteration k removes the top-k component subspace of the
    standardized true table, projects back, restores original units and
    evaluates the utility policy on the (true, candidate) pair.  The loop
    stops at the first failing k (reverting to k-1), after all but one
    component is removed, or at ``max_k``.

    By default the eigensystem is computed once from the true table;
    ``recompute_basis=True`` instead re-decomposes the reduced data each
    iteration and strips its current largest component.  The two routes
    agree up to round-off whenever eigenvalues are distinct, because
    after an exact projection the reduced data's top component is the
    next original component.
    """
    policy.validate()
    stats = column_stats(d)
    a_std = standardize(d, stats)
    p = d.n_cols
    limit = p - 1
    if max_k is not None:
        if max_k < 0:
            raise DataError(f"max_k must be non-negative, got {max_k}")
        limit = min(limit, int(max_k))

    es = eig_sym(covariance(a_std))
    current = a_std
    accepted = d
    accepted_k = 0
    history = []
    stopped = None

    for k in range(1, limit + 1):
        if recompute_basis:
            es_k = eig_sym(_centered_covariance(current.rows))
            current = remove_top_components(current, es_k, 1)
            b_std = current
        else:
            b_std = remove_top_components(a_std, es, k)
        candidate = destandardize(b_std, column_names=d.column_names)
        report = evaluate(d, candidate, policy, ridge=ridge)
        history.append((k, report))
        if report.passed:
            accepted = candidate
            accepted_k = k
        else:
            stopped = StoppedReason.POLICY_VIOLATED
            break
    if stopped is None:
        stopped = (StoppedReason.ALL_BUT_ONE_REMOVED if limit == p - 1
                   else StoppedReason.MAX_K_REACHED)

    return AnonymizationResult(
        anonymized=accepted,
        components_removed=accepted_k,
        history=tuple(history),
        stopped_reason=stopped,
    )
