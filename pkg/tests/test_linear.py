from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stparse.corpus import Corpus, CorpusError
from stparse.features import Interner, TemplateConfig
from stparse.taggers import (LinearModel, TrainConfig, model_grid, predict_greedy,
                             tag_probabilities, train_linear)
from stparse.taggers.linear import training_accuracy

from conftest import sent


@pytest.mark.parametrize("cfg", [TrainConfig.maxent(), TrainConfig.svm(max_iter=200),
                                 TrainConfig(scheme="multinomial", reg="l2")])
def test_separable_reaches_full_accuracy(separable_corpus, cfg):
    model = train_linear(separable_corpus, cfg)
    assert training_accuracy(model, separable_corpus) == 1.0


def test_objective_never_increases(toy_splits):
    model = train_linear(toy_splits["train"], TrainConfig.svm(max_iter=30))
    h = model.objective_history
    assert all(b <= a + 1e-12 for a, b in zip(h, h[1:]))
    assert h[-1] < h[0]


def test_svm_beats_majority_baseline(toy_splits):
    train = toy_splits["train"]
    counts = Counter(t for s in train for t in s.gold_tags)
    majority = counts.most_common(1)[0][1] / sum(counts.values())
    model = train_linear(train, TrainConfig.svm())
    assert training_accuracy(model, train) >= majority + 0.20


def test_deterministic_given_seed(toy_splits):
    a = train_linear(toy_splits["dev"], TrainConfig.maxent(max_iter=10, seed=7))
    b = train_linear(toy_splits["dev"], TrainConfig.maxent(max_iter=10, seed=7))
    assert np.array_equal(a.weights, b.weights) and np.array_equal(a.bias, b.bias)


def test_multinomial_distribution(toy_splits):
    model = train_linear(toy_splits["dev"], TrainConfig(scheme="multinomial", max_iter=5))
    for s in list(toy_splits["test"])[:20]:
        p = tag_probabilities(model, s)
        assert np.allclose(p.sum(axis=1), 1.0, atol=1e-9)


def test_empty_corpus_errors():
    with pytest.raises(CorpusError):
        train_linear(Corpus("e"), TrainConfig.maxent())


def test_single_tag_warns():
    c = Corpus("one", (sent("1", "a b", tags=["t", "t"]),))
    with pytest.warns(UserWarning, match="single tag"):
        model = train_linear(c, TrainConfig.maxent(max_iter=3))
    assert model.tag(c.sentences[0]) == ["t", "t"]


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(loss="squared_hinge", scheme="multinomial")
    with pytest.raises(ValueError):
        TrainConfig(reg_strength=0)
    with pytest.raises(ValueError):
        train_linear(Corpus("x", (sent("1", "a", tags=["t"]),)), TrainConfig(),
                     TemplateConfig(autoregressive=True))
    assert TrainConfig.svm().max_iter == 1000
    assert TrainConfig.svm().reg_strength == 1.0


def test_model_grid_names():
    grid = model_grid()
    assert grid["OVR L1 SAGA"] == TrainConfig(reg="l1", scheme="ovr")
    assert grid["OVR L2 SAG autoreg"].autoregressive
    assert grid["liblinear SVM"].loss == "squared_hinge"


def _hand_model(auto):
    strings = ["w0=p", "w0=q", "w0=r"] + (["t-1=B"] if auto else [])
    it = Interner(strings).freeze()
    W = np.zeros((len(strings), 2))
    W[0, 1] = 1.0  # p -> B
    W[1, 0] = 1.0  # q -> A
    if auto:
        W[3, 1] = 2.0  # after B, prefer B
    cfg = TrainConfig(autoregressive=auto)
    return LinearModel(["A", "B"], W, np.zeros(2), it, cfg,
                       TemplateConfig(autoregressive=auto))


def test_autoregressive_flips_decision():
    s = sent("x", "p q r")
    auto = [t for t, _ in predict_greedy(_hand_model(True), s)]
    plain = [t for t, _ in predict_greedy(_hand_model(False), s)]
    # token 2: q alone votes A; t-1=B adds 2 for B
    assert plain == ["B", "A", "A"]
    assert auto == ["B", "B", "B"]


def test_tie_goes_to_smallest_tag():
    assert [t for t, _ in predict_greedy(_hand_model(False), sent("z", "zz"))] == ["A"]


def test_empty_sentence_prediction():
    from stparse.corpus import Sentence
    assert predict_greedy(_hand_model(False), Sentence("e", "", ())) == []


def test_template_mismatch_rejected():
    with pytest.raises(ValueError):
        predict_greedy(_hand_model(False), sent("x", "p"), TemplateConfig(autoregressive=True))


@pytest.fixture(scope="module")
def small_model(toy_splits):
    return train_linear(toy_splits["train"], TrainConfig.maxent(max_iter=15))


def test_nonautoregressive_is_per_token_argmax(small_model, toy_splits):
    for s in list(toy_splits["test"])[:20]:
        got = small_model.tag(s)
        for i, tag in enumerate(got):
            sc = small_model.token_scores(s, i)
            assert tag == small_model.tags[int(np.argmax(sc))]


@settings(max_examples=25, deadline=None)
@given(st.permutations(range(10)))
def test_prediction_batch_order_irrelevant(small_model, toy_splits, perm):
    sents = list(toy_splits["test"])[:10]
    base = {s.id: small_model.tag(s) for s in sents}
    assert {sents[i].id: small_model.tag(sents[i]) for i in perm} == base
