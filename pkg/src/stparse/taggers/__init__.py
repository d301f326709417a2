from .crf import CrfModel, CrfObjective, sequence_score, train_crf, viterbi
from .external import (AlignmentError, ExternalPredictions,
                       load_external_predictions, write_predictions)
from .linear import (LinearModel, TrainConfig, TrainingError, model_grid,
                     predict_greedy, tag_probabilities, train_linear)
from .persist import (ModelFormatError, ModelTypeError, load_crf_model,
                      load_linear_model, load_model, save_model)


def tag_sentence(model, sentence):
    """Tags from any tagger handle: a linear model, a CRF, or external
    predictions."""
    return model.tag(sentence)
