"""MaxEnt (logistic) and linear SVM (squared hinge) supertaggers.

Training is per-token SGD over sparse binary features with an inverse
square-root learning-rate decay.  After every epoch the full objective is
evaluated; an epoch that increases it is rolled back and the step size
halved, so the recorded objective history never goes up.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import asdict, dataclass, field
from typing import Iterable

import numpy as np

from .. import kernels
from ..corpus import Corpus, CorpusError, Sentence, tag_inventory
from ..features import (Interner, TemplateConfig, build_vocabulary,
                        extract_features, previous_tags, training_matrix)

log = logging.getLogger(__name__)

LOSSES = ("logistic", "squared_hinge")
SCHEMES = ("ovr", "multinomial")
REGS = ("l1", "l2")


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    loss: str = "logistic"
    scheme: str = "ovr"
    reg: str = "l2"
    reg_strength: float = 1.0  # C: inverse regularization strength
    max_iter: int = 100
    learning_rate: float = 0.5
    seed: int = 0
    autoregressive: bool = False
    tol: float | None = None

    def __post_init__(self):
        if self.loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}")
        if self.reg not in REGS:
            raise ValueError(f"reg must be one of {REGS}")
        if self.loss == "squared_hinge" and self.scheme != "ovr":
            raise ValueError("squared hinge loss is one-vs-rest only")
        if not self.reg_strength > 0:
            raise ValueError("reg_strength must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")

    @classmethod
    def svm(cls, **kw) -> "TrainConfig":
        """Linear SVM defaults: L2 squared hinge, C=1, OVR, 1000 iterations."""
        base = dict(loss="squared_hinge", scheme="ovr", reg="l2",
                    reg_strength=1.0, max_iter=1000, learning_rate=0.1)
        base.update(kw)
        return cls(**base)

    @classmethod
    def maxent(cls, **kw) -> "TrainConfig":
        """The baseline MaxEnt choice: non-autoregressive OVR with L1."""
        base = dict(loss="logistic", scheme="ovr", reg="l1", reg_strength=1.0)
        base.update(kw)
        return cls(**base)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "TrainConfig":
        return cls(**d)


def model_grid(**kw) -> dict[str, TrainConfig]:
    """Named configurations of the MaxEnt/SVM model-selection grid.

    SAG and SAGA differ only in solver internals; both map onto the same
    SGD optimizer here, so names sharing everything but the solver yield
    identical configurations.
    """
    grid = {}
    for scheme, reg, solver in [("multinomial", "l2", "SAG"), ("ovr", "l2", "SAG"),
                                ("multinomial", "l2", "SAGA"), ("ovr", "l2", "SAGA"),
                                ("ovr", "l1", "SAGA"), ("multinomial", "l1", "SAGA")]:
        for auto in (False, True):
            name = f"{'OVR' if scheme == 'ovr' else 'multinomial'} {reg.upper()} {solver}"
            if auto:
                name += " autoreg"
            grid[name] = TrainConfig(loss="logistic", scheme=scheme, reg=reg,
                                     autoregressive=auto, **kw)
    grid["liblinear SVM"] = TrainConfig.svm(**kw)
    return grid


@dataclass
class LinearModel:
    tags: list[str]
    weights: np.ndarray  # (n_features, n_tags)
    bias: np.ndarray
    interner: Interner
    config: TrainConfig
    template: TemplateConfig
    objective_history: list[float] = field(default_factory=list)

    def __post_init__(self):
        if self.weights.shape != (len(self.interner), len(self.tags)):
            raise ValueError("weight matrix does not match vocabulary/tagset")

    def token_scores(self, sentence: Sentence, index: int,
                     prev_tags: tuple[str, str] | None = None) -> np.ndarray:
        fv = extract_features(sentence, index, prev_tags, self.template,
                              self.interner)
        return self.weights[list(fv.ids)].sum(axis=0) + self.bias

    def tag(self, sentence: Sentence) -> list[str]:
        return [t for t, _ in predict_greedy(self, sentence)]


def _score_matrix(W, b, indptr, indices):
    N = len(indptr) - 1
    rows = np.repeat(np.arange(N), np.diff(indptr))
    scores = np.zeros((N, W.shape[1]))
    np.add.at(scores, rows, W[indices])
    return scores + b


def _objective(W, b, indptr, indices, labels, loss_code, multinomial, reg, lam):
    data = kernels.data_loss(_score_matrix(W, b, indptr, indices), labels,
                             loss_code, multinomial)
    if reg == "l2":
        return data + 0.5 * lam * float(np.sum(W * W))
    return data + lam * float(np.abs(W).sum())


def _flush_l1(W, Q, u):
    pos = W > 0
    neg = W < 0
    new = W.copy()
    new[pos] = np.maximum(0.0, W[pos] - (u + Q[pos]))
    new[neg] = np.minimum(0.0, W[neg] + (u - Q[neg]))
    Q += new - W
    W[...] = new


def train_linear(train: Corpus | Iterable[Sentence], config: TrainConfig,
                 template: TemplateConfig | None = None) -> LinearModel:
    sentences = list(train)
    if template is None:
        template = TemplateConfig(autoregressive=config.autoregressive)
    if template.autoregressive != config.autoregressive:
        raise ValueError("TrainConfig and TemplateConfig disagree on "
                         "autoregressive decoding")
    if not any(len(s) for s in sentences):
        raise CorpusError("cannot train on an empty corpus")
    tags = tag_inventory(sentences)
    if len(tags) == 1:
        warnings.warn(f"training corpus has a single tag {tags[0]!r}; "
                      "the model is degenerate", stacklevel=2)
    tag_index = {t: i for i, t in enumerate(tags)}
    interner = build_vocabulary(sentences, template)
    indptr, indices, labels = training_matrix(sentences, template, interner,
                                              tag_index)
    N, F, T = len(labels), len(interner), len(tags)
    lam = 1.0 / (config.reg_strength * N)
    loss_code = (kernels.LOSS_LOGISTIC if config.loss == "logistic"
                 else kernels.LOSS_SQUARED_HINGE)
    reg_code = kernels.REG_L1 if config.reg == "l1" else kernels.REG_L2
    multinomial = config.scheme == "multinomial"

    W = np.zeros((F, T))
    b = np.zeros(T)
    Q = np.zeros((F, T))
    u = 0.0
    rng = np.random.default_rng(config.seed)
    obj = _objective(W, b, indptr, indices, labels, loss_code, multinomial,
                     config.reg, lam)
    history = [obj]
    factor = 1.0
    for epoch in range(config.max_iter):
        order = rng.permutation(N).astype(np.int64)
        lr = config.learning_rate * factor / np.sqrt(1.0 + epoch)
        saved = (W.copy(), b.copy(), Q.copy(), u)
        wscale, u = kernels.sgd_epoch(W, b, Q, indptr, indices, labels, order,
                                      lr, loss_code, multinomial, reg_code,
                                      lam, 1.0, u)
        if wscale != 1.0:
            W *= wscale
        if reg_code == kernels.REG_L1:
            _flush_l1(W, Q, u)
        new = _objective(W, b, indptr, indices, labels, loss_code, multinomial,
                         config.reg, lam)
        if not np.isfinite(new):
            raise TrainingError(f"non-finite objective at epoch {epoch} "
                                f"(learning rate {lr:g})")
        if new > obj:
            W, b, Q, u = saved
            factor *= 0.5
            history.append(obj)
            log.debug("epoch %d: objective rose to %.6g, halving step", epoch, new)
            if factor < 1e-10:
                break
            continue
        improvement = obj - new
        obj = new
        history.append(obj)
        log.debug("epoch %d: objective %.6g", epoch, obj)
        if config.tol is not None and improvement <= config.tol * max(1.0, abs(obj)):
            break
    return LinearModel(tags, W, b, interner, config, template, history)


def _softmax(s):
    e = np.exp(s - s.max())
    return e / e.sum()


def predict_greedy(model: LinearModel, sentence: Sentence,
                   template: TemplateConfig | None = None
                   ) -> list[tuple[str, float]]:
    """Left-to-right tagging.  Autoregressive models condition on their
    own two previous predictions.  Scores are softmax probabilities for
    multinomial models and raw decision values otherwise; ties go to the
    lexicographically smallest tag."""
    if template is not None and template.autoregressive != model.template.autoregressive:
        raise ValueError("template disagrees with the model on autoregressive decoding")
    multinomial = model.config.scheme == "multinomial"
    out: list[tuple[str, float]] = []
    if model.template.autoregressive:
        chosen: list[str] = []
        for i in range(len(sentence)):
            s = model.token_scores(sentence, i, previous_tags(chosen, i))
            k = int(np.argmax(s))
            chosen.append(model.tags[k])
            out.append((model.tags[k], float(_softmax(s)[k] if multinomial else s[k])))
        return out
    for i in range(len(sentence)):
        s = model.token_scores(sentence, i)
        k = int(np.argmax(s))
        out.append((model.tags[k], float(_softmax(s)[k] if multinomial else s[k])))
    return out


def tag_probabilities(model: LinearModel, sentence: Sentence) -> np.ndarray:
    """Per-token softmax-normalized tag scores, shape (n, n_tags)."""
    rows = []
    chosen: list[str] = []
    for i in range(len(sentence)):
        prev = previous_tags(chosen, i) if model.template.autoregressive else None
        s = model.token_scores(sentence, i, prev)
        chosen.append(model.tags[int(np.argmax(s))])
        rows.append(_softmax(s))
    return np.array(rows).reshape(len(sentence), len(model.tags))


def training_accuracy(model: LinearModel, corpus: Iterable[Sentence]) -> float:
    correct = total = 0
    for sent in corpus:
        for (tag, _), gold in zip(predict_greedy(model, sent), sent.gold_tags):
            correct += tag == gold
            total += 1
    return correct / total if total else 0.0
