"""Two-stage kNN over vector sequences with DTW similarity.

Stage one shortlists the m references whose per-sequence mean frame is
closest to the query's (cheap Euclidean prefilter); stage two computes the
banded DTW distance to each shortlisted reference and takes a majority
vote over the k nearest. A distance threshold, when enabled, rejects
queries whose nearest reference is still too far: the result is then the
null action and downstream consumers issue no command.
"""
from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .dtw import dtw_distance
from .errors import ClassTooSmall, EmptySequence, ValidationError
from .features import FeatureSequence

NULL_ACTION = "__null__"


@dataclass
class ClassifierConfig:
    k: int = 5
    shortlist_size: int | None = 30   # None disables the prefilter (m = all)
    band: float = 0.2                 # 1.0 disables the DTW band
    reject_threshold: float | None = None  # None disables null-action rejection
    vote_over_shortlist: bool = False  # vote over all m instead of the k nearest

    def __post_init__(self):
        if self.k <= 0 or not 0 < self.band <= 1.0:
            raise ValidationError("k must be positive and band in (0, 1]")
        if self.shortlist_size is not None and self.shortlist_size < self.k:
            raise ValidationError("shortlist size must be >= k")


@dataclass
class ReferenceSet:
    """Labeled reference sequences with precomputed mean-frame summaries."""

    sequences: list[FeatureSequence]
    labels: list[str]
    config: ClassifierConfig = field(default_factory=ClassifierConfig)
    classes: list[str] | None = None   # registry order for tie-breaking
    summaries: np.ndarray = field(init=False)

    def __post_init__(self):
        if len(self.sequences) != len(self.labels):
            raise ValidationError("sequences and labels differ in length")
        if not self.sequences:
            raise ValidationError("empty reference set")
        if self.classes is None:
            self.classes = sorted(set(self.labels))
        unknown = set(self.labels) - set(self.classes)
        if unknown:
            raise ValidationError(f"labels outside registry: {sorted(unknown)}")
        m = self.config.shortlist_size
        if m is not None and m > len(self.sequences):
            # A shortlist larger than the set degenerates to "all".
            self.config = replace(self.config, shortlist_size=None)
        self.summaries = np.stack([s.mean_frame() for s in self.sequences])

    def __len__(self) -> int:
        return len(self.sequences)

    @property
    def layout(self) -> str:
        return self.sequences[0].layout


@dataclass
class ClassificationResult:
    label: str                                  # class label or NULL_ACTION
    neighbors: list[tuple[str, float]]          # (label, distance), ascending
    votes: dict[str, int]
    elapsed_ms: float

    @property
    def is_null(self) -> bool:
        return self.label == NULL_ACTION


def shortlist(query: FeatureSequence, refs: ReferenceSet) -> np.ndarray:
    """Indices of the m references nearest by mean-frame Euclidean distance.

    Ties break toward the smaller reference index; with the prefilter
    disabled, all indices are returned in order.
    """
    m = refs.config.shortlist_size
    if m is None or m >= len(refs):
        return np.arange(len(refs))
    d = np.linalg.norm(refs.summaries - query.mean_frame(), axis=1)
    return np.argsort(d, kind="stable")[:m]


def classify(query: FeatureSequence, refs: ReferenceSet) -> ClassificationResult:
    """Classify one query sequence against the reference set."""
    if len(query) < 2:
        raise EmptySequence(f"query has {len(query)} frames, need at least 2")
    start = time.perf_counter()
    cfg = refs.config

    candidates = shortlist(query, refs)
    dists = np.array([dtw_distance(query.values, refs.sequences[i].values, cfg.band)
                      for i in candidates])
    order = np.argsort(dists, kind="stable")

    pool = order if cfg.vote_over_shortlist else order[:cfg.k]
    pool_labels = [refs.labels[candidates[i]] for i in pool]
    pool_dists = dists[pool]
    votes = dict(Counter(pool_labels))

    top = max(votes.values())
    tied = [lbl for lbl, c in votes.items() if c == top]
    if len(tied) > 1:
        # Smaller mean DTW distance wins; registry order settles exact ties.
        means = {lbl: np.mean([d for l, d in zip(pool_labels, pool_dists) if l == lbl])
                 for lbl in tied}
        best_mean = min(means.values())
        tied = [lbl for lbl in tied if means[lbl] == best_mean]
        tied.sort(key=refs.classes.index)
    label = tied[0]

    nearest = [(refs.labels[candidates[i]], float(dists[i])) for i in order[:cfg.k]]
    if cfg.reject_threshold is not None and \
            (not nearest or nearest[0][1] > cfg.reject_threshold):
        label = NULL_ACTION

    elapsed = (time.perf_counter() - start) * 1e3
    return ClassificationResult(label=label, neighbors=nearest, votes=votes,
                                elapsed_ms=elapsed)


def calibrate_reject_threshold(refs: ReferenceSet, percentile: float = 99.0,
                               max_pairs_per_class: int = 400,
                               seed: int = 0) -> float:
    """Percentile of within-class DTW distances over the reference set.

    Queries whose nearest reference lies beyond this value are unlike
    anything seen in training and get rejected as the null action.
    """
    rng = np.random.default_rng(seed)
    by_class: dict[str, list[int]] = {}
    for i, lbl in enumerate(refs.labels):
        by_class.setdefault(lbl, []).append(i)
    dists = []
    for members in by_class.values():
        pairs = list(combinations(members, 2))
        if len(pairs) > max_pairs_per_class:
            sel = rng.choice(len(pairs), size=max_pairs_per_class, replace=False)
            pairs = [pairs[i] for i in sel]
        for i, j in pairs:
            dists.append(dtw_distance(refs.sequences[i].values,
                                      refs.sequences[j].values, refs.config.band))
    if not dists:
        raise ValidationError("no within-class pairs to calibrate on")
    return float(np.percentile(dists, percentile))


def cross_validate_k(sequences: list[FeatureSequence], labels: list[str],
                     k_candidates: list[int], folds: int = 5,
                     config: ClassifierConfig | None = None,
                     seed: int = 0) -> int:
    """Pick k by stratified f-fold accuracy; ties go to the smaller k.

    Every class must have at least ``folds`` members so each fold sees
    every class on the training side.
    """
    if folds < 2:
        raise ValidationError(f"need at least 2 folds, got {folds}")
    base = config or ClassifierConfig()
    by_class: dict[str, list[int]] = {}
    for i, lbl in enumerate(labels):
        by_class.setdefault(lbl, []).append(i)
    for lbl, members in by_class.items():
        if len(members) < folds:
            raise ClassTooSmall(f"class {lbl} has {len(members)} < {folds} members")

    rng = np.random.default_rng(seed)
    fold_of = np.empty(len(labels), dtype=int)
    for members in by_class.values():
        members = rng.permutation(members)
        for pos, idx in enumerate(members):
            fold_of[idx] = pos % folds

    k_max = max(k_candidates)
    correct = {k: 0 for k in k_candidates}
    for fold in range(folds):
        train_idx = [i for i in range(len(labels)) if fold_of[i] != fold]
        val_idx = [i for i in range(len(labels)) if fold_of[i] == fold]
        fold_k = min(k_max, len(train_idx))
        fold_m = base.shortlist_size
        if fold_m is not None:
            fold_m = max(fold_m, fold_k)
        fold_cfg = replace(base, k=fold_k, shortlist_size=fold_m)
        refs = ReferenceSet([sequences[i] for i in train_idx],
                            [labels[i] for i in train_idx], config=fold_cfg)
        for i in val_idx:
            result = classify(sequences[i], refs)
            # One DTW pass serves every candidate k: re-vote on prefixes.
            for k in k_candidates:
                sub = result.neighbors[:k]
                votes = Counter(lbl for lbl, _ in sub)
                top = max(votes.values())
                tied = [lbl for lbl, c in votes.items() if c == top]
                if len(tied) > 1:
                    means = {lbl: np.mean([d for l, d in sub if l == lbl])
                             for lbl in tied}
                    best = min(means.values())
                    tied = [lbl for lbl in tied if means[lbl] == best]
                    tied.sort(key=refs.classes.index)
                if tied[0] == labels[i]:
                    correct[k] += 1

    best_k = max(k_candidates, key=lambda k: (correct[k], -k))
    return best_k
