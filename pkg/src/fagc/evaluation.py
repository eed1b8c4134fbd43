"""Desk-scale evaluation: synthetic data, two small classifiers, gated loss.

The composite loss is L = L_real + P_g * lambda * L_aug, where P_g is a
per-step coin (1 iff a uniform draw exceeds 0.5) and lambda in [0, 1] weighs
the augmented batch. With lambda = 0, an empty augmented set, or P_g = 0 the
step is bitwise identical to plain cross-entropy on the real batch.

The softmax classifier is a linear model trained by full-batch gradient
descent from zero init, so runs are deterministic given the sigma-draw seed.
KNN uses the geodesic distance, metric-consistent with the sphere the data
lives on.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .augment import Category, LabeledDataset
from .errors import (
    DimensionMismatch,
    EmptyTrainingSet,
    LabelMismatch,
    SeparationUnreachable,
)
from .preshape import project

GATE_THRESHOLD = 0.5
MAX_PROTOTYPE_ATTEMPTS = 10_000


@dataclass(frozen=True)
class LossConfig:
    """Influence factor, gate threshold (fixed at 0.5), and sigma-draw seed."""

    lam: float = 0.5
    gate_threshold: float = GATE_THRESHOLD
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must be in [0, 1], got {self.lam}")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    epochs: int = 200


@dataclass
class SoftmaxModel:
    """Linear softmax classifier over pre-shape vectors."""

    labels: list[str]
    weights: np.ndarray  # (n_classes, dim)
    bias: np.ndarray  # (n_classes,)
    learning_rate: float
    epochs: int
    loss_trace: list[float] = field(default_factory=list)

    def scores(self, z: np.ndarray) -> np.ndarray:
        """Class probabilities for one vector; non-negative, sums to 1."""
        return _softmax(np.atleast_2d(z) @ self.weights.T + self.bias)[0]

    def predict(self, z: np.ndarray) -> str:
        return self.labels[int(np.argmax(self.scores(z)))]


@dataclass(frozen=True)
class SynthSpec:
    """Synthetic dataset shape: N categories, M samples each, raw dim n, dispersion kappa."""

    n_categories: int = 5
    samples_per_category: int = 4
    raw_dim: int = 16
    kappa: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n_categories < 2:
            raise ValueError(f"need >= 2 categories, got {self.n_categories}")
        if self.samples_per_category < 3:
            raise ValueError(f"need >= 3 samples per category, got {self.samples_per_category}")
        if self.raw_dim < 2:
            raise ValueError(f"raw dimension must be >= 2, got {self.raw_dim}")
        if self.kappa <= 0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")


def gate(sigma: float) -> int:
    """1 if sigma > 0.5, else 0 (the boundary itself gates off)."""
    if not 0.0 <= sigma <= 1.0:
        raise ValueError(f"sigma must be in [0, 1], got {sigma}")
    return 1 if sigma > GATE_THRESHOLD else 0


def fagc_loss(l_real: float, l_aug: float, p_g: int, lam: float) -> float:
    """Composite loss l_real + p_g * lam * l_aug."""
    return l_real + p_g * lam * l_aug


def cross_entropy_and_grads(
    weights: np.ndarray, bias: np.ndarray, x: np.ndarray, y: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean cross-entropy of a linear softmax over a batch, with gradients.

    y holds integer class indices. Gradients are exact; the softmax is
    computed max-shifted for stability.
    """
    probs = _softmax(x @ weights.T + bias)
    n = len(x)
    loss = float(-np.log(probs[np.arange(n), y]).mean())
    delta = probs
    delta[np.arange(n), y] -= 1.0
    grad_w = delta.T @ x / n
    grad_b = delta.sum(axis=0) / n
    return loss, grad_w, grad_b


def train_softmax(
    real: LabeledDataset,
    augmented: LabeledDataset | None,
    cfg: LossConfig | None = None,
    hyper: TrainConfig | None = None,
) -> SoftmaxModel:
    """Train the linear softmax under the gated composite loss.

    Per step: full real batch gives L_real; one sigma is drawn; if the gate
    opens and lambda > 0, the full augmented batch contributes lam * L_aug.
    The augmented term is skipped entirely whenever its coefficient is zero,
    which keeps the reduced runs bitwise identical to plain cross-entropy.
    """
    cfg = cfg or LossConfig()
    hyper = hyper or TrainConfig()
    labels = sorted(real.labels())
    x_real, y_real = _stack(real, labels)
    x_aug = y_aug = None
    if augmented is not None and augmented.total_size() > 0:
        if augmented.dimension() != real.dimension():
            raise DimensionMismatch(
                f"real dim {real.dimension()} vs augmented dim {augmented.dimension()}"
            )
        if sorted(augmented.labels()) != labels:
            raise LabelMismatch(
                f"label sets differ: {labels} vs {sorted(augmented.labels())}"
            )
        x_aug, y_aug = _stack(augmented, labels)

    dim = x_real.shape[1]
    weights = np.zeros((len(labels), dim))
    bias = np.zeros(len(labels))
    rng = np.random.default_rng(cfg.seed)
    trace: list[float] = []

    for _ in range(hyper.epochs):
        l_real, gw, gb = cross_entropy_and_grads(weights, bias, x_real, y_real)
        p_g = gate(float(rng.uniform()))
        loss = l_real
        if x_aug is not None and p_g and cfg.lam > 0.0:
            l_aug, gw_a, gb_a = cross_entropy_and_grads(weights, bias, x_aug, y_aug)
            loss = fagc_loss(l_real, l_aug, p_g, cfg.lam)
            gw = gw + cfg.lam * gw_a
            gb = gb + cfg.lam * gb_a
        weights = weights - hyper.learning_rate * gw
        bias = bias - hyper.learning_rate * gb
        trace.append(loss)

    return SoftmaxModel(
        labels=labels,
        weights=weights,
        bias=bias,
        learning_rate=hyper.learning_rate,
        epochs=hyper.epochs,
        loss_trace=trace,
    )


def knn_predict(train: LabeledDataset, query: np.ndarray, k: int = 1) -> str:
    """Majority label among the k geodesic-nearest training members.

    Vote ties break by the smaller mean distance within the k neighbors,
    then by label order.
    """
    total = train.total_size()
    if total == 0:
        raise EmptyTrainingSet("no training members")
    if not 1 <= k <= total:
        raise ValueError(f"k={k} outside [1, {total}]")
    rows = np.vstack([c.members for c in train.categories])
    labels = [c.label for c in train.categories for _ in range(len(c.members))]
    query = np.asarray(query, dtype=float)
    dists = np.arccos(np.clip(rows @ query, -1.0, 1.0))
    nearest = np.argsort(dists, kind="stable")[:k]
    by_label: dict[str, list[float]] = {}
    for i in nearest:
        by_label.setdefault(labels[i], []).append(float(dists[i]))
    return min(
        by_label,
        key=lambda lab: (-len(by_label[lab]), float(np.mean(by_label[lab])), lab),
    )


def synth_raw(
    spec: SynthSpec, counts: tuple[int, ...] | None = None
) -> list[tuple[str, np.ndarray]]:
    """Raw (pre-projection) feature draws, one (label, rows) block per count.

    Prototypes are unit directions rejection-sampled to pairwise angular
    separation >= 4*kappa; each sample displaces its prototype by roughly
    kappa radians of tangential Gaussian noise. Passing several counts
    yields several independent blocks per category (e.g. train and test)
    from a single stream, so the category geometry is shared.
    """
    counts = counts if counts is not None else (spec.samples_per_category,)
    rng = np.random.default_rng(spec.seed)
    protos = _prototypes(spec, rng)
    scale = spec.kappa / np.sqrt(spec.raw_dim - 1)
    blocks: list[tuple[str, np.ndarray]] = []
    for block_size in counts:
        for i, p in enumerate(protos):
            g = rng.standard_normal((block_size, spec.raw_dim))
            g_perp = g - np.outer(g @ p, p)
            blocks.append((f"cat{i}", p + scale * g_perp))
    return blocks


def synth_dataset(spec: SynthSpec) -> LabeledDataset:
    """Projected synthetic dataset: M pre-shapes per category."""
    return _project_blocks(synth_raw(spec))


def synth_split(spec: SynthSpec, test_per_category: int) -> tuple[LabeledDataset, LabeledDataset]:
    """Train/test pair drawn around one shared set of prototypes."""
    blocks = synth_raw(spec, (spec.samples_per_category, test_per_category))
    n = spec.n_categories
    return _project_blocks(blocks[:n]), _project_blocks(blocks[n:])


def evaluate(
    train_real: LabeledDataset,
    augmented: LabeledDataset | None,
    test: LabeledDataset,
    classifier: str = "softmax",
    loss_cfg: LossConfig | None = None,
    train_cfg: TrainConfig | None = None,
    knn_k: int = 1,
) -> float:
    """Test accuracy of the chosen classifier trained on real (+ augmented) data.

    Softmax consumes the augmented set through the gated loss; KNN pools it
    into the training set directly.
    """
    if test.dimension() != train_real.dimension():
        raise DimensionMismatch(
            f"train dim {train_real.dimension()} vs test dim {test.dimension()}"
        )
    if classifier == "softmax":
        model = train_softmax(train_real, augmented, loss_cfg, train_cfg)
        predict = model.predict
    elif classifier == "knn":
        pool = train_real
        if augmented is not None and augmented.total_size() > 0:
            pool = _pool(train_real, augmented)
        predict = lambda z: knn_predict(pool, z, knn_k)  # noqa: E731
    else:
        raise ValueError(f"unknown classifier {classifier!r}")

    hits = 0
    for cat in test.categories:
        for row in cat.members:
            hits += predict(row) == cat.label
    return hits / test.total_size()


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _stack(data: LabeledDataset, labels: list[str]) -> tuple[np.ndarray, np.ndarray]:
    index = {lab: i for i, lab in enumerate(labels)}
    xs, ys = [], []
    for cat in data.categories:
        xs.append(cat.members)
        ys.extend([index[cat.label]] * len(cat.members))
    return np.vstack(xs), np.asarray(ys, dtype=int)


def _pool(real: LabeledDataset, augmented: LabeledDataset) -> LabeledDataset:
    if sorted(real.labels()) != sorted(augmented.labels()):
        raise LabelMismatch(
            f"label sets differ: {sorted(real.labels())} vs {sorted(augmented.labels())}"
        )
    cats = []
    for c in real.categories:
        a = augmented.category(c.label)
        cats.append(
            Category(
                c.label,
                np.vstack([c.members, a.members]),
                tuple(c.provenance) + tuple(a.provenance),
            )
        )
    return LabeledDataset(cats)


def _prototypes(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    protos: list[np.ndarray] = []
    attempts = 0
    min_sep = 4.0 * spec.kappa
    while len(protos) < spec.n_categories:
        attempts += 1
        if attempts > MAX_PROTOTYPE_ATTEMPTS:
            raise SeparationUnreachable(
                f"could not place {spec.n_categories} prototypes with separation "
                f">= {min_sep:.3f} rad in {MAX_PROTOTYPE_ATTEMPTS} attempts "
                f"(placed {len(protos)})"
            )
        cand = rng.standard_normal(spec.raw_dim)
        cand /= np.linalg.norm(cand)
        angles = [float(np.arccos(np.clip(np.dot(cand, p), -1.0, 1.0))) for p in protos]
        if all(a >= min_sep for a in angles):
            protos.append(cand)
    return np.array(protos)


def _project_blocks(blocks: list[tuple[str, np.ndarray]]) -> LabeledDataset:
    return LabeledDataset(
        [Category(label, np.array([project(r) for r in rows])) for label, rows in blocks]
    )
