"""Linear-chain CRF over the sparse feature template.

Emission scores are sums of per-feature tag weights; the chain adds a
tag-to-tag transition matrix plus start and end weights.  The likelihood
gradient comes from forward-backward marginals.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .. import kernels
from ..corpus import Corpus, CorpusError, Sentence, tag_inventory
from ..features import Interner, TemplateConfig, build_vocabulary, extract_features
from .linear import TrainingError

log = logging.getLogger(__name__)


@dataclass
class CrfModel:
    tags: list[str]
    emission: np.ndarray  # (n_features, n_tags)
    transition: np.ndarray  # (n_tags, n_tags), [prev, next]
    start: np.ndarray
    end: np.ndarray
    interner: Interner
    template: TemplateConfig = field(default_factory=TemplateConfig)
    objective_history: list[float] = field(default_factory=list)

    def __post_init__(self):
        T = len(self.tags)
        if self.transition.shape != (T, T):
            raise ValueError("transition matrix must be |tags| x |tags|")
        if self.emission.shape != (len(self.interner), T):
            raise ValueError("emission matrix does not match vocabulary/tagset")
        if self.template.autoregressive:
            raise ValueError("CRF models use non-autoregressive templates")

    def feature_ids(self, sentence: Sentence) -> list[list[int]]:
        return [list(extract_features(sentence, i, None, self.template,
                                      self.interner).ids)
                for i in range(len(sentence))]

    def emissions(self, sentence: Sentence) -> np.ndarray:
        return _emit(self.emission, self.feature_ids(sentence))

    def tag(self, sentence: Sentence) -> list[str]:
        return viterbi(self, sentence)[0]


def _emit(W: np.ndarray, ids: Sequence[Sequence[int]]) -> np.ndarray:
    out = np.zeros((len(ids), W.shape[1]))
    for i, row in enumerate(ids):
        if len(row):
            out[i] = W[row].sum(axis=0)
    return out


def sequence_score(model: CrfModel, sentence: Sentence,
                   path: Sequence[int]) -> float:
    """Left-to-right score of a tag-index path."""
    return path_score(model.emissions(sentence), model.transition,
                      model.start, model.end, path)


def path_score(emit, trans, start, end, path) -> float:
    if len(path) == 0:
        return 0.0
    s = float(start[path[0]]) + float(emit[0, path[0]])
    for i in range(1, len(path)):
        s += float(trans[path[i - 1], path[i]]) + float(emit[i, path[i]])
    return s + float(end[path[-1]])


def viterbi(model: CrfModel, sentence: Sentence,
            template: TemplateConfig | None = None) -> tuple[list[str], float]:
    """Maximum-scoring tag sequence and its score.  Among tied sequences
    the lexicographically first one (position by position) wins."""
    if template is not None and template.autoregressive:
        raise ValueError("CRF decoding takes a non-autoregressive template")
    emit = model.emissions(sentence)
    path = kernels.viterbi(emit, model.transition, model.start, model.end)
    score = path_score(emit, model.transition, model.start, model.end, path)
    return [model.tags[k] for k in path], score


def brute_force_decode(emit, trans, start, end) -> tuple[tuple[int, ...], float]:
    """Exhaustive search over all tag paths; reference for :func:`viterbi`.
    ``itertools.product`` enumerates in lexicographic order, and only a
    strictly better score replaces the incumbent."""
    n, T = emit.shape
    best, best_score = (), -np.inf
    for path in itertools.product(range(T), repeat=n):
        s = path_score(emit, trans, start, end, path)
        if s > best_score:
            best, best_score = path, s
    return best, (best_score if n else 0.0)


def brute_force_log_partition(emit, trans, start, end) -> float:
    n, T = emit.shape
    scores = [path_score(emit, trans, start, end, p)
              for p in itertools.product(range(T), repeat=n)]
    m = max(scores)
    return m + float(np.log(np.sum(np.exp(np.array(scores) - m))))


class CrfObjective:
    """Mean negative log-likelihood plus ``l2/2 * ||theta||^2`` over a
    fixed set of (feature-id lists, gold tag indices) instances, with the
    parameter vector flattened as [emission, transition, start, end]."""

    def __init__(self, data: Sequence[tuple[Sequence[Sequence[int]], Sequence[int]]],
                 n_features: int, n_tags: int, l2: float):
        self.data = [(ids, np.asarray(y, dtype=np.int64)) for ids, y in data]
        self.F, self.T, self.l2 = n_features, n_tags, l2

    @property
    def size(self) -> int:
        return self.F * self.T + self.T * self.T + 2 * self.T

    def unpack(self, theta: np.ndarray):
        F, T = self.F, self.T
        a = F * T
        W = theta[:a].reshape(F, T)
        A = theta[a:a + T * T].reshape(T, T)
        s = theta[a + T * T:a + T * T + T]
        e = theta[a + T * T + T:]
        return W, A, s, e

    def pack(self, W, A, s, e) -> np.ndarray:
        return np.concatenate([W.ravel(), A.ravel(), s, e])

    def value(self, theta: np.ndarray) -> float:
        W, A, s, e = self.unpack(theta)
        total = 0.0
        for ids, y in self.data:
            emit = _emit(W, ids)
            total += (kernels.log_partition(emit, A, s, e)
                      - path_score(emit, A, s, e, y))
        n = max(len(self.data), 1)
        return total / n + 0.5 * self.l2 * float(theta @ theta)

    def value_and_grad(self, theta: np.ndarray) -> tuple[float, np.ndarray]:
        W, A, s, e = self.unpack(theta)
        gW, gA = np.zeros_like(W), np.zeros_like(A)
        gs, ge = np.zeros_like(s), np.zeros_like(e)
        total = 0.0
        for ids, y in self.data:
            if len(y) == 0:
                continue
            emit = _emit(W, ids)
            logz, marg, pair = kernels.forward_backward(emit, A, s, e)
            total += logz - path_score(emit, A, s, e, y)
            _accumulate(gW, gA, gs, ge, ids, y, marg, pair)
        n = max(len(self.data), 1)
        grad = self.pack(gW, gA, gs, ge) / n + self.l2 * theta
        return total / n + 0.5 * self.l2 * float(theta @ theta), grad


def _accumulate(gW, gA, gs, ge, ids, y, marg, pair, scale=1.0):
    """Add ``scale * (expected - observed)`` feature counts."""
    resid = marg.copy()
    resid[np.arange(len(y)), y] -= 1.0
    for i, row in enumerate(ids):
        if len(row):
            gW[row] += scale * resid[i]
    obs = np.zeros_like(gA)
    np.add.at(obs, (y[:-1], y[1:]), 1.0)
    gA += scale * (pair - obs)
    gs += scale * resid[0]
    ge += scale * resid[-1]


def _instances(sentences, interner, template, tag_index):
    data = []
    for sent in sentences:
        ids = [list(extract_features(sent, i, None, template, interner).ids)
               for i in range(len(sent))]
        data.append((ids, [tag_index[t] for t in sent.gold_tags]))
    return data


def _accuracy(model: CrfModel, corpus: Iterable[Sentence]) -> float:
    correct = total = 0
    for sent in corpus:
        pred, _ = viterbi(model, sent)
        correct += sum(p == g for p, g in zip(pred, sent.gold_tags))
        total += len(sent)
    return correct / total if total else 0.0


def train_crf(train: Corpus | Iterable[Sentence],
              template: TemplateConfig | None = None,
              l2_strength: float = 1e-4, epochs: int = 30, seed: int = 0,
              dev: Corpus | None = None, learning_rate: float = 0.2,
              patience: int = 5) -> CrfModel:
    """Per-sentence SGD on the regularized negative log-likelihood.

    Epochs that raise the full objective are rolled back with the step
    halved.  With a ``dev`` corpus, training stops once dev accuracy has
    not improved for ``patience`` epochs and the best model is returned.
    """
    template = template or TemplateConfig()
    if template.autoregressive:
        raise ValueError("CRF training requires a non-autoregressive template")
    sentences = [s for s in train if len(s)]
    if not sentences:
        raise CorpusError("cannot train on an empty corpus")
    tags = tag_inventory(sentences)
    tag_index = {t: i for i, t in enumerate(tags)}
    interner = build_vocabulary(sentences, template)
    F, T = len(interner), len(tags)
    data = _instances(sentences, interner, template, tag_index)
    objective = CrfObjective(data, F, T, l2_strength)

    W, A = np.zeros((F, T)), np.zeros((T, T))
    s, e = np.zeros(T), np.zeros(T)
    model = CrfModel(tags, W, A, s, e, interner, template)
    rng = np.random.default_rng(seed)
    n = len(data)
    obj = objective.value(objective.pack(W, A, s, e))
    history = [obj]
    factor = 1.0
    best_acc, best_params, stale = -1.0, None, 0
    for epoch in range(epochs):
        lr = learning_rate * factor / np.sqrt(1.0 + epoch)
        saved = (W.copy(), A.copy(), s.copy(), e.copy())
        decay = 1.0 - lr * l2_strength
        for idx in rng.permutation(n):
            ids, y = objective.data[idx]
            emit = _emit(W, ids)
            _, marg, pair = kernels.forward_backward(emit, A, s, e)
            if decay != 1.0:
                W *= decay
                A *= decay
                s *= decay
                e *= decay
            _accumulate(W, A, s, e, ids, y, marg, pair, scale=-lr)
        new = objective.value(objective.pack(W, A, s, e))
        if not np.isfinite(new):
            raise TrainingError(
                f"non-finite CRF loss at epoch {epoch} (learning rate {lr:g}, "
                f"max |weight| {np.abs(W).max() if W.size else 0:g})")
        if new > obj:
            W[...], A[...], s[...], e[...] = saved
            factor *= 0.5
            history.append(obj)
            log.debug("epoch %d: objective rose to %.6g, halving step", epoch, new)
        else:
            obj = new
            history.append(obj)
        if dev is not None:
            acc = _accuracy(model, dev)
            log.debug("epoch %d: dev accuracy %.4f", epoch, acc)
            if acc > best_acc:
                best_acc, stale = acc, 0
                best_params = (W.copy(), A.copy(), s.copy(), e.copy())
            else:
                stale += 1
                if stale >= patience:
                    break
    if best_params is not None:
        W[...], A[...], s[...], e[...] = best_params
    model.objective_history = history
    return model
