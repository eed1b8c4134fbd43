"""Per-category curve fitting and uniform sampling along the fitted arcs.

Augmentation never crosses category boundaries: each category's members fit
one arc, and its K augmented vectors are drawn from that arc alone, so every
sample inherits the label of the curve that produced it.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import FagcError, TooFewPoints
from .geodesic import FitConfig, FitReport, GeodesicCurve, fit_curve
from .preshape import is_preshape


@dataclass
class Category:
    """One labeled group of pre-shapes; provenance marks real vs augmented rows."""

    label: str
    members: np.ndarray  # (m, dim)
    provenance: tuple[str, ...] = ()

    def __post_init__(self):
        self.members = np.atleast_2d(np.asarray(self.members, dtype=float))
        if not self.provenance:
            self.provenance = ("real",) * len(self.members)
        if len(self.provenance) != len(self.members):
            raise ValueError(
                f"category {self.label!r}: {len(self.provenance)} provenance flags "
                f"for {len(self.members)} members"
            )


@dataclass
class LabeledDataset:
    """Categories of pre-shapes keyed by unique labels."""

    categories: list[Category]

    def __post_init__(self):
        labels = [c.label for c in self.categories]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in dataset: {labels}")
        for c in self.categories:
            if len(c.members) == 0:
                raise ValueError(f"category {c.label!r} is empty")

    def labels(self) -> list[str]:
        return [c.label for c in self.categories]

    def category(self, label: str) -> Category:
        for c in self.categories:
            if c.label == label:
                return c
        raise KeyError(label)

    def dimension(self) -> int:
        return self.categories[0].members.shape[1]

    def total_size(self) -> int:
        return sum(len(c.members) for c in self.categories)

    def validate_preshapes(self) -> None:
        for c in self.categories:
            for i, row in enumerate(c.members):
                if not is_preshape(row):
                    raise ValueError(
                        f"category {c.label!r} member {i} violates pre-shape invariants"
                    )


@dataclass(frozen=True)
class AugmentConfig:
    """How many vectors to sample per category, with which fit and seed."""

    k: int = 100
    fit: FitConfig = field(default_factory=FitConfig)
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass
class AugmentResult:
    curves: dict[str, GeodesicCurve]
    reports: dict[str, FitReport]
    augmented: dict[str, np.ndarray]  # label -> (k, dim)

    def as_dataset(self) -> LabeledDataset:
        """The augmented vectors alone, provenance-flagged, one category per label."""
        return LabeledDataset(
            [
                Category(label, rows, ("augmented",) * len(rows))
                for label, rows in self.augmented.items()
            ]
        )


def derive_subseed(seed: int, label: str) -> int:
    """Stable per-label sub-seed: the global seed mixed with a hash of the label.

    Independent of category iteration order and of Python's salted hash().
    """
    digest = hashlib.sha256(
        int(seed).to_bytes(8, "little", signed=False) + label.encode("utf-8")
    ).digest()
    return int.from_bytes(digest[:8], "little")


def sample_curve(curve: GeodesicCurve, k: int, seed: int) -> np.ndarray:
    """Draw k points at arc parameters uniform on [0, theta]; reproducible per seed."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    rng = np.random.default_rng(seed)
    s = rng.uniform(0.0, curve.theta, size=k)
    return np.cos(s)[:, None] * curve.v_star + np.sin(s)[:, None] * curve.tangent


def augment_dataset(data: LabeledDataset, config: AugmentConfig) -> AugmentResult:
    """Fit one curve per category and sample k vectors from each.

    All-or-nothing: any failing category aborts the whole run, with the
    offending label named in the propagated error.
    """
    curves: dict[str, GeodesicCurve] = {}
    reports: dict[str, FitReport] = {}
    augmented: dict[str, np.ndarray] = {}
    for cat in data.categories:
        if len(cat.members) < 3:
            raise TooFewPoints(
                f"category {cat.label!r} has {len(cat.members)} members; need >= 3"
            )
        try:
            curve, report = fit_curve(cat.members, config.fit)
        except FagcError as exc:
            raise type(exc)(f"category {cat.label!r}: {exc}") from exc
        curves[cat.label] = curve
        reports[cat.label] = report
        augmented[cat.label] = sample_curve(curve, config.k, derive_subseed(config.seed, cat.label))
    return AugmentResult(curves=curves, reports=reports, augmented=augmented)
