"""Multi-view datasets: loading, centering, label indicators, targets, PCA, splits.

Conventions used throughout the package: a view is a ``d_s x n`` float array
whose columns are samples, all views share the same column count ``n``, and
class labels are integers ``1..c`` with every class occupied.  Files on disk
store one sample per row and are transposed on load.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

TARGET_KINDS = (
    "centered_onehot",
    "sigma_invsqrt_onehot",
    "identity_n",
    "centered_normalized_label",
)


def centering_matrix(n):
    """Return H_n = I_n - (1/n) 1 1^T."""
    return np.eye(n) - np.full((n, n), 1.0 / n)


def center_columns(X):
    """Subtract the mean column of X, i.e. compute X @ H_n."""
    X = np.asarray(X, dtype=float)
    return X - X.mean(axis=1, keepdims=True)


def _check_labels(labels):
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ValueError("labels must be a one-dimensional integer array")
    if not np.issubdtype(labels.dtype, np.integer):
        raise ValueError("labels must be integers")
    uniq = np.unique(labels)
    for pos, val in enumerate(uniq, start=1):
        if val != pos:
            raise ValueError(
                f"labels must cover a contiguous range 1..c; found label {val}"
            )
    return labels.astype(np.int64)


@dataclass(frozen=True)
class MultiViewDataset:
    """Immutable bundle of ``v`` views plus optional labels.

    views
        tuple of float arrays, each of shape ``(d_s, n)``.
    labels
        int array of shape ``(n,)`` with values ``1..c``, or None.
    label_map
        optional mapping from the contiguous labels back to the original
        label values found on disk.
    """

    views: tuple
    labels: np.ndarray | None = None
    label_map: dict | None = None

    def __post_init__(self):
        if len(self.views) == 0:
            raise ValueError("a dataset needs at least one view")
        views = tuple(np.asarray(V, dtype=float) for V in self.views)
        n = views[0].shape[1] if views[0].ndim == 2 else -1
        for s, V in enumerate(views, start=1):
            if V.ndim != 2:
                raise ValueError(f"view {s} must be a 2-d matrix")
            if V.shape[1] != n:
                raise ValueError(
                    f"all views must share the sample count: view 1 has {n} "
                    f"columns, view {s} has {V.shape[1]}"
                )
            if not np.all(np.isfinite(V)):
                raise ValueError(f"view {s} contains non-finite values")
        if n < 2:
            raise ValueError("a dataset needs at least two samples")
        object.__setattr__(self, "views", views)
        if self.labels is not None:
            labels = _check_labels(self.labels)
            if labels.shape[0] != n:
                raise ValueError(
                    f"label count {labels.shape[0]} does not match sample count {n}"
                )
            object.__setattr__(self, "labels", labels)

    @property
    def n_views(self):
        return len(self.views)

    @property
    def n_samples(self):
        return self.views[0].shape[1]

    @property
    def dims(self):
        return tuple(V.shape[0] for V in self.views)

    @property
    def n_classes(self):
        if self.labels is None:
            return 0
        return int(self.labels.max())

    def subset(self, idx):
        """Dataset restricted to the sample indices ``idx`` (order kept)."""
        idx = np.asarray(idx, dtype=int)
        views = tuple(V[:, idx] for V in self.views)
        labels = None if self.labels is None else self.labels[idx]
        return MultiViewDataset(views, labels, self.label_map)


@dataclass(frozen=True)
class IndicatorMatrix:
    """One-hot label machinery: Y (c x n), class counts, and Q = Y^T S^-1 Y."""

    Y: np.ndarray
    counts: np.ndarray
    Q: np.ndarray

    @property
    def n_classes(self):
        return self.Y.shape[0]

    @property
    def sigma(self):
        """The diagonal c x c matrix of class counts, Y Y^T."""
        return np.diag(self.counts.astype(float))


def build_indicator(labels):
    """Build the IndicatorMatrix for integer labels 1..c.

    Y[r, i] = 1 iff sample i belongs to class r.  Q = Y^T Sigma^-1 Y is the
    block-averaging kernel: (Q x)_i averages x over the class of sample i.
    """
    labels = _check_labels(labels)
    n = labels.shape[0]
    c = int(labels.max())
    Y = np.zeros((c, n))
    Y[labels - 1, np.arange(n)] = 1.0
    counts = Y.sum(axis=1)
    if np.any(counts == 0):
        empty = int(np.where(counts == 0)[0][0]) + 1
        raise ValueError(f"class {empty} has no samples")
    Q = Y.T @ (Y / counts[:, None])
    Q = 0.5 * (Q + Q.T)
    return IndicatorMatrix(Y=Y, counts=counts, Q=Q)


@dataclass(frozen=True)
class TargetMatrix:
    """A target matrix (o x n) together with the kind that produced it."""

    values: np.ndarray
    kind: str


def make_target(dataset, kind):
    """Build the regression target for one of the supported kinds.

    centered_onehot            Y H_n
    sigma_invsqrt_onehot       Sigma^{-1/2} Y   (rows scaled by 1/sqrt(n_r))
    identity_n                 I_n              (label free)
    centered_normalized_label  H_c Sigma^{-1} Y (class-centered soft labels)
    """
    if kind not in TARGET_KINDS:
        raise ValueError(f"unknown target kind {kind!r}; expected one of {TARGET_KINDS}")
    n = dataset.n_samples
    if kind == "identity_n":
        return TargetMatrix(np.eye(n), kind)
    if dataset.labels is None:
        raise ValueError(f"target kind {kind!r} needs labels")
    ind = build_indicator(dataset.labels)
    if kind == "centered_onehot":
        values = center_columns(ind.Y)
    elif kind == "sigma_invsqrt_onehot":
        values = ind.Y / np.sqrt(ind.counts)[:, None]
    else:  # centered_normalized_label
        Yn = ind.Y / ind.counts[:, None]
        values = Yn - Yn.mean(axis=0, keepdims=True)
    return TargetMatrix(values, kind)


def _read_matrix(path):
    try:
        M = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except ValueError as err:
        raise ValueError(f"{path.name}: could not parse numeric data ({err})") from None
    if M.size == 0:
        raise ValueError(f"{path.name}: empty file")
    return M


def _read_labels(path):
    raw = []
    for i, line in enumerate(path.read_text().splitlines(), start=1):
        text = line.strip()
        if not text:
            continue
        try:
            raw.append(int(text))
        except ValueError:
            raise ValueError(
                f"{path.name}, line {i}: expected an integer label, got {text!r}"
            ) from None
    if not raw:
        raise ValueError(f"{path.name}: empty file")
    return np.asarray(raw, dtype=np.int64)


def load_dataset(root):
    """Load ``view_1.csv .. view_v.csv`` (sample per row) plus optional labels.csv.

    Views are transposed to the package's column-sample layout.  Label values
    are re-indexed to a contiguous 1..c; the original values are kept in
    ``label_map`` (new -> original).
    """
    root = Path(root)
    if not root.is_dir():
        raise ValueError(f"dataset directory {root} does not exist")
    paths = sorted(root.glob("view_*.csv"))
    indexed = {}
    for p in paths:
        stem = p.stem.split("_", 1)[1]
        if stem.isdigit():
            indexed[int(stem)] = p
    if not indexed:
        raise ValueError(f"no view_*.csv files found in {root}")
    v = max(indexed)
    if sorted(indexed) != list(range(1, v + 1)):
        raise ValueError(
            f"view files must be numbered consecutively from 1; found {sorted(indexed)}"
        )
    views = []
    row_counts = {}
    for s in range(1, v + 1):
        M = _read_matrix(indexed[s])
        row_counts[indexed[s].name] = M.shape[0]
        views.append(M.T)
    counts = set(row_counts.values())
    if len(counts) > 1:
        detail = ", ".join(f"{name} has {rc} rows" for name, rc in row_counts.items())
        raise ValueError(f"views disagree on the sample count: {detail}")

    labels = None
    label_map = None
    labels_path = root / "labels.csv"
    if labels_path.exists():
        raw = _read_labels(labels_path)
        if raw.shape[0] != views[0].shape[1]:
            raise ValueError(
                f"labels.csv has {raw.shape[0]} rows but views have "
                f"{views[0].shape[1]} samples"
            )
        originals = np.unique(raw)
        remap = {orig: new for new, orig in enumerate(originals, start=1)}
        labels = np.asarray([remap[x] for x in raw], dtype=np.int64)
        label_map = {new: int(orig) for orig, new in remap.items()}
    return MultiViewDataset(tuple(views), labels, label_map)


@dataclass(frozen=True)
class PcaReducer:
    """Per-view PCA loadings: orthonormal components plus the training mean."""

    components: np.ndarray  # d_s x r, orthonormal columns
    mean: np.ndarray  # (d_s,)

    def transform(self, X):
        """Project held-out columns with the training mean and components."""
        X = np.asarray(X, dtype=float)
        return self.components.T @ (X - self.mean[:, None])


def pca_reduce(dataset, energy=0.95):
    """Reduce each view to the smallest dimension keeping ``energy`` variance.

    The kept dimension per view is the smallest r whose leading eigenvalue
    mass reaches ``energy`` of the total (ties resolved by >=).  Returns the
    reduced dataset and one PcaReducer per view.
    """
    if not 0.0 < energy <= 1.0:
        raise ValueError("energy must lie in (0, 1]")
    reduced = []
    reducers = []
    for s, X in enumerate(dataset.views, start=1):
        mean = X.mean(axis=1)
        Xc = X - mean[:, None]
        cov = Xc @ Xc.T
        eigvals, eigvecs = np.linalg.eigh(cov)
        eigvals = eigvals[::-1]
        eigvecs = eigvecs[:, ::-1]
        eigvals = np.clip(eigvals, 0.0, None)
        total = eigvals.sum()
        if total <= 0.0:
            raise ValueError(f"view {s} has zero variance; PCA is undefined")
        frac = np.cumsum(eigvals) / total
        r = int(np.searchsorted(frac, energy - 1e-12)) + 1
        r = min(r, X.shape[0])
        U = eigvecs[:, :r]
        reducers.append(PcaReducer(components=U, mean=mean))
        reduced.append(U.T @ Xc)
    return MultiViewDataset(tuple(reduced), dataset.labels, dataset.label_map), reducers


def split_dataset(dataset, train_fraction, seed=0):
    """Deterministic stratified split into (train, test) datasets.

    With labels, each class contributes round(train_fraction * n_c) samples
    to the training side, clamped so both sides keep at least one sample of
    the class.  Without labels the split is a plain shuffled cut.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    n = dataset.n_samples
    if dataset.labels is None:
        perm = rng.permutation(n)
        t = int(np.floor(train_fraction * n + 0.5))
        t = min(max(t, 1), n - 1)
        train_idx, test_idx = perm[:t], perm[t:]
    else:
        train_parts = []
        test_parts = []
        for r in range(1, dataset.n_classes + 1):
            members = np.where(dataset.labels == r)[0]
            if members.size < 2:
                raise ValueError(
                    f"class {r} has a single sample and cannot appear on both "
                    "sides of the split"
                )
            perm = rng.permutation(members)
            t = int(np.floor(train_fraction * members.size + 0.5))
            t = min(max(t, 1), members.size - 1)
            train_parts.append(perm[:t])
            test_parts.append(perm[t:])
        train_idx = np.concatenate(train_parts)
        test_idx = np.concatenate(test_parts)
    train_idx = np.sort(train_idx)
    test_idx = np.sort(test_idx)
    return dataset.subset(train_idx), dataset.subset(test_idx)
