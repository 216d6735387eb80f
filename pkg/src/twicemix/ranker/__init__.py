from .estimator import TwiceMixingRanker
from .model import (FORMAT_VERSION, AdamState, RankerConfig, RankerModel, adam_step, backward,
                    forward, forward_cached, init_model, margin_rank_loss, pair_loss,
                    pair_loss_and_grads, param_shapes, prepare_image, score_gradient,
                    score_images)
from .serialization import (ModelFormatError, ModelVersionError, dumps_model, load_model,
                            save_model)
from .training import TrainingLog, train

__all__ = [
    "FORMAT_VERSION", "AdamState", "RankerConfig", "RankerModel", "TrainingLog",
    "TwiceMixingRanker", "ModelFormatError", "ModelVersionError", "adam_step", "backward",
    "dumps_model", "forward", "forward_cached", "init_model", "load_model",
    "margin_rank_loss", "pair_loss", "pair_loss_and_grads", "param_shapes", "prepare_image",
    "save_model", "score_gradient", "score_images", "train",
]
