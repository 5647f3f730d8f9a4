"""Model profiles estimated from labeled prediction records.

A marked model is only ever seen through its predictions: ``p`` is its
accuracy on the normal test set, ``q`` its accuracy on the trigger set.
From a family of such profiles we fit the linear degradation coefficient
``lambda`` used by the simplified success-rate model.
"""

from __future__ import annotations

import csv
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

KINDS = ("test", "trigger")

# rounding slack for the convex-combination bounds
_ULP_SLACK = 4 * sys.float_info.epsilon


class ProfileError(ValueError):
    name = "profile-error"


class EmptySetError(ProfileError):
    name = "empty-set"


class WrongKindError(ProfileError):
    name = "wrong-kind"


class MismatchedSamplesError(ProfileError):
    name = "mismatched-samples"


class AllAlphasZeroError(ProfileError):
    name = "all-alphas-zero"


class AssumptionFailure(ProfileError):
    """The per-model coefficients disagree by more than the tolerance."""

    name = "assumption-failure"

    def __init__(self, spread, tol, coefficients):
        self.spread = spread
        self.tol = tol
        self.coefficients = coefficients
        super().__init__(f"lambda spread {spread!r} exceeds tolerance {tol!r}")


@dataclass(frozen=True)
class PredictionRecord:
    sample_id: str
    label: int
    prediction: int

    def __post_init__(self):
        if self.label < 0 or self.prediction < 0:
            raise ProfileError(f"negative class index in record {self.sample_id!r}")

    @property
    def correct(self) -> bool:
        return self.label == self.prediction


@dataclass(frozen=True)
class EvaluationSet:
    kind: str
    records: tuple[PredictionRecord, ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ProfileError(f"unknown evaluation kind {self.kind!r}")
        object.__setattr__(self, "records", tuple(self.records))
        if not self.records:
            raise EmptySetError(f"{self.kind} set has no records")

    def by_id(self) -> dict[str, PredictionRecord]:
        table = {r.sample_id: r for r in self.records}
        if len(table) != len(self.records):
            raise MismatchedSamplesError(f"duplicate sample ids in {self.kind} set")
        return table


@dataclass(frozen=True)
class ModelProfile:
    alpha: float
    p: float
    q: float

    def __post_init__(self):
        for name in ("alpha", "p", "q"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ProfileError(f"profile {name}={v!r} outside [0, 1]")

    @property
    def blended(self):
        """Accuracy mix ``(1 - alpha) p + alpha q``."""
        return (1 - self.alpha) * self.p + self.alpha * self.q


@dataclass(frozen=True)
class FidelityPolicy:
    delta: float

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ProfileError(f"fidelity threshold {self.delta!r} outside (0, 1)")

    def holds(self, rate) -> bool:
        return 1 - rate <= self.delta


@dataclass(frozen=True)
class BoundsReport:
    blended: float
    lower: float
    upper: float
    passed: bool


def _require_kind(s: EvaluationSet, kind: str):
    if s.kind != kind:
        raise WrongKindError(f"expected a {kind} set, got {s.kind}")


def _accuracy(records: Sequence[PredictionRecord]):
    return sum(r.correct for r in records) / len(records)


def agreement_rate(base: EvaluationSet, marked: EvaluationSet):
    """Fraction of test samples on which the two models predict the same class.

    Records are joined on ``sample_id``; their order in either set is
    irrelevant.
    """
    _require_kind(base, "test")
    _require_kind(marked, "test")
    a, b = base.by_id(), marked.by_id()
    if a.keys() != b.keys():
        missing = sorted(a.keys() ^ b.keys())[:5]
        raise MismatchedSamplesError(f"sample ids differ, e.g. {missing}")
    same = sum(a[k].prediction == b[k].prediction for k in a)
    return same / len(a)


def trigger_accuracy(s: EvaluationSet):
    _require_kind(s, "trigger")
    return _accuracy(s.records)


def classification_accuracy(s: EvaluationSet):
    _require_kind(s, "test")
    return _accuracy(s.records)


def estimate_profile(alpha, test: EvaluationSet, trigger: EvaluationSet) -> ModelProfile:
    return ModelProfile(alpha, classification_accuracy(test), trigger_accuracy(trigger))


def lambda_coefficients(profiles: Iterable[ModelProfile]) -> list[tuple[float, float]]:
    """Per-model coefficients solving ``blended = 1 - lambda * alpha``.

    Unmarked profiles (alpha == 0) leave the coefficient undefined and are
    skipped.
    """
    out = []
    for prof in profiles:
        if prof.alpha == 0:
            log.info("skipping profile with alpha=0 (coefficient undefined)")
            continue
        out.append((prof.alpha, (1 - prof.blended) / prof.alpha))
    if not out:
        raise AllAlphasZeroError("no profile with alpha > 0")
    return out


def lambda_spread(coefficients: Sequence[tuple[float, float]]):
    lams = [lam for _, lam in coefficients]
    mean = sum(lams) / len(lams)
    return mean, max(abs(lam - mean) for lam in lams)


def fit_lambda(profiles: Iterable[ModelProfile], tol):
    """Mean coefficient, gated on every coefficient lying within ``tol`` of it."""
    coefs = lambda_coefficients(profiles)
    mean, spread = lambda_spread(coefs)
    if spread > tol:
        raise AssumptionFailure(spread, tol, coefs)
    return mean


def bounds_check(profile: ModelProfile) -> BoundsReport:
    lo, hi = min(profile.p, profile.q), max(profile.p, profile.q)
    b = profile.blended
    return BoundsReport(b, lo, hi, lo - _ULP_SLACK <= b <= hi + _ULP_SLACK)


def read_records(path, kind: str) -> EvaluationSet:
    """Load a ``sample_id,label,prediction`` CSV as an evaluation set."""
    path = Path(path)
    records = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["sample_id", "label", "prediction"]:
            raise ProfileError(f"{path}: bad header {reader.fieldnames}")
        for lineno, row in enumerate(reader, start=2):
            try:
                label, pred = int(row["label"], 10), int(row["prediction"], 10)
            except (TypeError, ValueError):
                raise ProfileError(f"{path}:{lineno}: non-integer class index") from None
            records.append(PredictionRecord(row["sample_id"], label, pred))
    if not records:
        raise EmptySetError(f"{path}: no records")
    return EvaluationSet(kind, records)
