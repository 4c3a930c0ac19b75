"""Difference functions between reference and computed observation sets.

Real-valued references are scored with RMSE averaged over sample times;
binary references with 1 - ROC AUC of the computed scores against the
flags (Mann-Whitney with midrank tie handling).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .infection import ObservationSet


class ShapeMismatchError(ValueError):
    """Observation sets disagree on sample times or node count."""


class DegenerateLabelsError(ValueError):
    """AUC is undefined: the label vector is all zeros or all ones."""


@dataclass(frozen=True)
class ErrorSpec:
    """Which difference function scores a task.

    ``rmse_mean`` pairs with real references, ``one_minus_auc_last`` with
    binary references scored against real-valued computed observations.
    """

    kind: str
    per_timestep_report: bool = True

    def __post_init__(self):
        if self.kind not in ("rmse_mean", "one_minus_auc_last"):
            raise ValueError(f"unknown error kind {self.kind!r}")


def _check_aligned(reference: ObservationSet, computed: ObservationSet):
    if reference.sample_times != computed.sample_times:
        raise ShapeMismatchError(
            f"sample times differ: {reference.sample_times} vs {computed.sample_times}")
    if reference.node_count != computed.node_count:
        raise ShapeMismatchError(
            f"node counts differ: {reference.node_count} vs {computed.node_count}")


def per_timestep_errors(reference: ObservationSet, computed: ObservationSet) -> np.ndarray:
    """RMSE over nodes at each sample time, one entry per time."""
    _check_aligned(reference, computed)
    diff = reference.values - computed.values
    return np.sqrt(np.mean(diff * diff, axis=1))


def rmse_mean(reference: ObservationSet, computed: ObservationSet) -> float:
    """Mean over sample times of the per-time RMSE.  Symmetric, zero iff equal."""
    return float(per_timestep_errors(reference, computed).mean())


def roc_auc(scores, labels) -> float:
    """Probability a random positive outscores a random negative, ties 1/2.

    Computed from midranks (Mann-Whitney); raises
    :class:`DegenerateLabelsError` when labels are all 0 or all 1.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels)
    if s.shape != y.shape or s.ndim != 1:
        raise ShapeMismatchError("scores and labels must be 1-D and equally long")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    n_pos = int(np.sum(y == 1))
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabelsError("need at least one positive and one negative label")
    ranks = rankdata(s)
    rank_sum = float(ranks[y == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def error_binary_last(reference: ObservationSet, computed: ObservationSet) -> float:
    """1 - AUC of the computed values at the final sample time against the
    reference flags there; 0 means a perfect ranking."""
    _check_aligned(reference, computed)
    if reference.kind != "binary":
        raise ValueError("reference must be binary")
    return 1.0 - roc_auc(computed.values[-1], reference.values[-1])


def error_binary_mean(reference: ObservationSet, computed: ObservationSet) -> float:
    """Mean over sample times of (1 - AUC_t), skipping degenerate times.

    Extension of the last-observation score to fully observed binary
    references; a time where all flags agree carries no ranking
    information and is skipped.
    """
    _check_aligned(reference, computed)
    if reference.kind != "binary":
        raise ValueError("reference must be binary")
    terms = []
    for flags, scores in zip(reference.values, computed.values):
        try:
            terms.append(1.0 - roc_auc(scores, flags))
        except DegenerateLabelsError:
            continue
    if not terms:
        raise DegenerateLabelsError("every sample time has degenerate flags")
    return float(np.mean(terms))
