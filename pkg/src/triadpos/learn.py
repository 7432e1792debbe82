"""Bagged logistic regression, evaluation metrics and per-feature
significance tests."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps


@dataclass(frozen=True)
class LearnerConfig:
    bags: int = 10
    l2: float = 1e-4
    learning_rate: float = 0.1
    max_epochs: int = 500
    tol: float = 1e-8


DEFAULT_LEARNER = LearnerConfig()


class LearnError(ValueError):
    pass


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def logistic_loss(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float) -> float:
    """Mean log-loss plus ``l2/2 * ||w||^2`` (bias not penalised)."""
    z = X @ w + b
    # log(1 + e^z) - y z, stable for large |z|
    return float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w))


def logistic_grad(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float) -> tuple[np.ndarray, float]:
    r = _sigmoid(X @ w + b) - y
    return X.T @ r / len(y) + l2 * w, float(r.mean())


def fit_logistic(X: np.ndarray, y: np.ndarray, cfg: LearnerConfig = DEFAULT_LEARNER) -> tuple[np.ndarray, float]:
    """Full-batch gradient descent; a step that raises the loss is rejected
    and the learning rate halved."""
    w = np.zeros(X.shape[1])
    b = 0.0
    lr = cfg.learning_rate
    loss = logistic_loss(w, b, X, y, cfg.l2)
    for _ in range(cfg.max_epochs):
        gw, gb = logistic_grad(w, b, X, y, cfg.l2)
        w_new, b_new = w - lr * gw, b - lr * gb
        new_loss = logistic_loss(w_new, b_new, X, y, cfg.l2)
        if new_loss > loss:
            lr *= 0.5
            if lr < 1e-12:
                break
            continue
        w, b = w_new, b_new
        done = loss - new_loss < cfg.tol
        loss = new_loss
        if done:
            break
    return w, b


@dataclass
class BaggedLogisticModel:
    columns: tuple[str, ...]
    weights: np.ndarray  # (bags, d)
    biases: np.ndarray  # (bags,)
    mean: np.ndarray
    scale: np.ndarray
    seeds: tuple[int, ...]
    seed: int | None = None
    version: int = 1

    def standardize(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.scale

    def member_scores(self, X: np.ndarray) -> np.ndarray:
        Z = self.standardize(np.asarray(X, dtype=float))
        return _sigmoid(Z @ self.weights.T + self.biases)

    def to_json(self) -> str:
        return json.dumps({
            "version": self.version,
            "columns": list(self.columns),
            "weights": self.weights.tolist(),
            "biases": self.biases.tolist(),
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "seeds": list(self.seeds),
            "seed": self.seed,
        }, indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> BaggedLogisticModel:
        d = json.loads(text)
        if d.get("version") != 1:
            raise LearnError(f"unsupported model version {d.get('version')!r}")
        return cls(tuple(d["columns"]), np.array(d["weights"], dtype=float), np.array(d["biases"], dtype=float),
                   np.array(d["mean"], dtype=float), np.array(d["scale"], dtype=float), tuple(d["seeds"]), d["seed"])


def _check_matrix(X: np.ndarray, columns) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    bad = ~np.isfinite(X).all(axis=0)
    if bad.any():
        names = [c for c, b in zip(columns, bad) if b]
        raise LearnError(f"non-finite values in column(s) {names}")
    return X


def train(ds, bags: int | None = None, seed: int = 0, cfg: LearnerConfig = DEFAULT_LEARNER) -> BaggedLogisticModel:
    """Fit ``bags`` logistic regressions on bootstrap resamples of ``ds``.

    ``ds`` is anything with ``X``, ``y`` and ``columns`` (a LabeledDataset).
    Columns are standardised with the full training set's mean and standard
    deviation before fitting.
    """
    bags = cfg.bags if bags is None else bags
    if bags < 1:
        raise LearnError("need at least one bag")
    X = _check_matrix(ds.X, ds.columns)
    y = np.asarray(ds.y, dtype=float)
    if len(np.unique(y)) < 2:
        raise LearnError("training data must contain both classes")
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    Z = (X - mean) / scale
    children = np.random.SeedSequence(seed).spawn(bags)
    W = np.zeros((bags, X.shape[1]))
    B = np.zeros(bags)
    seeds = []
    for k, child in enumerate(children):
        bag_seed = int(child.generate_state(1)[0])
        seeds.append(bag_seed)
        idx = np.random.default_rng(bag_seed).integers(0, len(y), size=len(y))
        W[k], B[k] = fit_logistic(Z[idx], y[idx], cfg)
    return BaggedLogisticModel(tuple(ds.columns), W, B, mean, scale, tuple(seeds), seed)


def predict(m: BaggedLogisticModel, rows, columns=None) -> np.ndarray:
    """Mean of member probabilities. ``rows`` is a dataset (with ``columns``)
    or a matrix whose ``columns`` are given explicitly."""
    if columns is None:
        columns = getattr(rows, "columns", None)
        rows = getattr(rows, "X", rows)
    if columns is None:
        raise LearnError("column names are required to check the schema")
    columns = tuple(columns)
    if columns != m.columns:
        missing = [c for c in m.columns if c not in columns]
        extra = [c for c in columns if c not in m.columns]
        raise LearnError(f"schema mismatch: missing {missing}, unexpected {extra}, expected order {list(m.columns)}")
    X = _check_matrix(rows, columns)
    return m.member_scores(X).mean(axis=1)


@dataclass
class EvaluationReport:
    accuracy: float
    auc: float
    aupr: float
    k: int
    top_k: int
    roc: list[tuple[float, float]]
    pr: list[tuple[float, float]]
    scores: list[float] = field(repr=False)
    labels: list[int] = field(repr=False)
    ids: list = field(default_factory=list, repr=False)

    def summary(self) -> dict:
        return {"accuracy": self.accuracy, "auc": self.auc, "aupr": self.aupr, "k": self.k,
                f"top@{self.k}": self.top_k, "n": len(self.labels), "positives": int(sum(self.labels))}


def roc_auc(scores, labels) -> float:
    """Mann-Whitney U / (P * N) with mid-ranks for ties."""
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels).astype(bool)
    P, N = int(y.sum()), int((~y).sum())
    if P == 0 or N == 0:
        raise LearnError("AUC is undefined with a single class")
    ranks = sps.rankdata(s)
    u = ranks[y].sum() - P * (P + 1) / 2
    return float(u / (P * N))


def _threshold_counts(scores, labels):
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels).astype(int)
    order = np.argsort(-s, kind="mergesort")
    s, y = s[order], y[order]
    # last index of each run of tied scores
    ends = np.r_[np.nonzero(np.diff(s))[0], len(s) - 1]
    tp = np.cumsum(y)[ends]
    fp = (ends + 1) - tp
    return tp, fp


def roc_curve_points(scores, labels) -> list[tuple[float, float]]:
    tp, fp = _threshold_counts(scores, labels)
    P, N = tp[-1], fp[-1]
    pts = [(0.0, 0.0)] + [(float(f / N) if N else 0.0, float(t / P) if P else 0.0) for t, f in zip(tp, fp)]
    return pts


def pr_curve_points(scores, labels) -> list[tuple[float, float]]:
    """(recall, precision) at every distinct score threshold, high to low."""
    tp, fp = _threshold_counts(scores, labels)
    P = tp[-1]
    return [(float(t / P) if P else 0.0, float(t / (t + f))) for t, f in zip(tp, fp)]


def average_precision(scores, labels) -> float:
    """Step-wise area under the PR curve: sum of precision times recall gain
    over distinct thresholds."""
    tp, fp = _threshold_counts(scores, labels)
    P = int(tp[-1])
    if P == 0 or fp[-1] == 0:
        raise LearnError("AUPR is undefined with a single class")
    recall = tp / P
    precision = tp / (tp + fp)
    gains = np.diff(np.r_[0.0, recall])
    return float((gains * precision).sum())


def top_k_hits(scores, labels, k: int, ids=None) -> int:
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels).astype(int)
    keys = list(range(len(s))) if ids is None else list(ids)
    order = sorted(range(len(s)), key=lambda i: (-s[i], keys[i]))
    return int(sum(y[i] for i in order[:k]))


def evaluate(scores, labels, k: int = 50, ids=None) -> EvaluationReport:
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels).astype(int)
    if len(s) != len(y) or len(s) == 0:
        raise LearnError("scores and labels must be non-empty and of equal length")
    acc = float(((s >= 0.5).astype(int) == y).mean())
    return EvaluationReport(
        accuracy=acc,
        auc=roc_auc(s, y),
        aupr=average_precision(s, y),
        k=k,
        top_k=top_k_hits(s, y, k, ids),
        roc=roc_curve_points(s, y),
        pr=pr_curve_points(s, y),
        scores=s.tolist(),
        labels=y.tolist(),
        ids=list(ids) if ids is not None else [],
    )


STAR_LEVELS = ((0.001, "****"), (0.01, "***"), (0.05, "**"), (0.1, "*"))


def star_level(p: float) -> str:
    for cut, stars in STAR_LEVELS:
        if p < cut:
            return stars
    return ""


@dataclass(frozen=True)
class Significance:
    feature: str
    p_value: float
    stars: str
    constant: bool = False


def mann_whitney_p(a, b) -> float:
    """Two-sided Mann-Whitney U p-value, normal approximation with tie
    correction and no continuity correction."""
    return float(sps.mannwhitneyu(a, b, alternative="two-sided", use_continuity=False, method="asymptotic").pvalue)


def feature_significance(ds) -> list[Significance]:
    """Compare positive-class vs negative-class values of every column."""
    X = np.asarray(ds.X, dtype=float)
    y = np.asarray(ds.y).astype(bool)
    if y.all() or not y.any():
        raise LearnError("significance testing needs both classes")
    out = []
    for j, name in enumerate(ds.columns):
        col = X[:, j]
        if np.all(col == col[0]):
            out.append(Significance(name, 1.0, "", constant=True))
            continue
        p = mann_whitney_p(col[y], col[~y])
        out.append(Significance(name, p, star_level(p)))
    return out
