"""Glass-box additive classifier trained by cyclic gradient boosting.

The model is a generalised additive model: one lookup table of additive
contributions per feature, learned by cycling through the features each
boosting round and fitting a shallow histogram tree (contiguous bin
segments) to the softmax cross-entropy gradients. Prediction sums the
per-feature contributions, so each feature's effect can be read
directly off its table.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

_RIDGE = 1e-6
_MAX_LEAF_VALUE = 2.0


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


class CyclicAdditiveBoostingClassifier:
    """Additive boosted-tree classifier over binned features.

    Parameters mirror the usual gradient-boosting knobs: number of
    boosting rounds, learning rate, maximum leaves per per-feature tree,
    histogram bin budget, and the minimum samples a leaf may hold.
    Training is fully deterministic; random_state is accepted for
    interface symmetry with the other model families.
    """

    def __init__(
        self,
        n_rounds: int = 100,
        learning_rate: float = 0.1,
        max_leaves: int = 3,
        max_bins: int = 256,
        min_samples_leaf: int = 1,
        random_state: Optional[int] = None,
    ):
        self.n_rounds = n_rounds
        self.learning_rate = learning_rate
        self.max_leaves = max_leaves
        self.max_bins = max_bins
        self.min_samples_leaf = min_samples_leaf
        self.random_state = random_state

    # -- training ----------------------------------------------------------

    def fit(self, X: Sequence, y: Sequence) -> "CyclicAdditiveBoostingClassifier":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y)
        n, d = X.shape
        self.classes_, y_idx = np.unique(y, return_inverse=True)
        k = len(self.classes_)

        self.bin_edges_ = []
        binned = np.empty((n, d), dtype=np.int32)
        for j in range(d):
            quantiles = np.quantile(X[:, j], np.linspace(0, 1, self.max_bins + 1)[1:-1])
            edges = np.unique(quantiles)
            self.bin_edges_.append(edges)
            binned[:, j] = np.searchsorted(edges, X[:, j], side="right")
        bins_per_feature = [len(edges) + 1 for edges in self.bin_edges_]
        bin_counts = [
            np.bincount(binned[:, j], minlength=bins_per_feature[j]) for j in range(d)
        ]

        onehot = np.zeros((n, k))
        onehot[np.arange(n), y_idx] = 1.0
        priors = np.clip(onehot.mean(axis=0), 1e-12, None)
        self.intercept_ = np.log(priors)
        self.tables_ = [np.zeros((bins_per_feature[j], k)) for j in range(d)]

        scores = np.tile(self.intercept_, (n, 1))
        for _ in range(self.n_rounds):
            for j in range(d):
                probabilities = _softmax(scores)
                grad = probabilities - onehot
                hess = probabilities * (1.0 - probabilities)
                for cls in range(k):
                    g = np.bincount(
                        binned[:, j], weights=grad[:, cls], minlength=bins_per_feature[j]
                    )
                    h = np.bincount(
                        binned[:, j], weights=hess[:, cls], minlength=bins_per_feature[j]
                    )
                    update = self._axis_tree_update(g, h, bin_counts[j])
                    self.tables_[j][:, cls] += update
                    scores[:, cls] += update[binned[:, j]]
        return self

    def _axis_tree_update(
        self, g: np.ndarray, h: np.ndarray, counts: np.ndarray
    ) -> np.ndarray:
        """Per-bin additive update from one shallow tree over the bin axis."""
        g_sum = np.concatenate([[0.0], np.cumsum(g)])
        h_sum = np.concatenate([[0.0], np.cumsum(h)])
        c_sum = np.concatenate([[0], np.cumsum(counts)])

        def seg(lo: int, hi: int) -> tuple[float, float, int]:
            return (
                g_sum[hi] - g_sum[lo],
                h_sum[hi] - h_sum[lo],
                int(c_sum[hi] - c_sum[lo]),
            )

        def score(lo: int, hi: int) -> float:
            sg, sh, _ = seg(lo, hi)
            return sg * sg / (sh + _RIDGE)

        segments = [(0, len(g))]
        while len(segments) < self.max_leaves:
            best = None
            for idx, (lo, hi) in enumerate(segments):
                for cut in range(lo + 1, hi):
                    _, _, left_n = seg(lo, cut)
                    _, _, right_n = seg(cut, hi)
                    if left_n < self.min_samples_leaf or right_n < self.min_samples_leaf:
                        continue
                    gain = score(lo, cut) + score(cut, hi) - score(lo, hi)
                    if best is None or gain > best[0]:
                        best = (gain, idx, cut)
            if best is None or best[0] <= 0:
                break
            _, idx, cut = best
            lo, hi = segments.pop(idx)
            segments.extend([(lo, cut), (cut, hi)])

        update = np.zeros_like(g)
        for lo, hi in segments:
            sg, sh, _ = seg(lo, hi)
            value = -self.learning_rate * sg / (sh + _RIDGE)
            update[lo:hi] = np.clip(value, -_MAX_LEAF_VALUE, _MAX_LEAF_VALUE)
        return update

    # -- inference -----------------------------------------------------------

    def decision_scores(self, X: Sequence) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        scores = np.tile(self.intercept_, (X.shape[0], 1))
        for j, edges in enumerate(self.bin_edges_):
            bins = np.searchsorted(edges, X[:, j], side="right")
            scores += self.tables_[j][bins]
        return scores

    def predict_proba(self, X: Sequence) -> np.ndarray:
        return _softmax(self.decision_scores(X))

    def predict(self, X: Sequence) -> np.ndarray:
        return self.classes_[np.argmax(self.decision_scores(X), axis=1)]
