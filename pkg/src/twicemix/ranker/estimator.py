"""scikit-learn style wrapper around the scorer and its training loop."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..evaluation import evaluate_groups, group_rows
from .model import RankerConfig, init_model, score_images
from .training import train


class TwiceMixingRanker(BaseEstimator):
    """No-reference quality ranker trained from ``(x_hq, x_lq)`` image pairs.

    ``fit(X)`` takes a sequence of ``(x_hq, x_lq)`` pairs (no labels needed:
    the ranking labels come from the mixing ratios). ``predict(images)`` returns
    one score per image, higher meaning better quality.
    """

    def __init__(self, conv_channels=(8, 16, 32), kernel_size=3, fc_widths=(32, 16),
                 epsilon=0.5, learning_rate=1e-6, betas=(0.9, 0.999), adam_eps=1e-8,
                 epochs=30, seed=0, max_side=128):
        self.conv_channels = conv_channels
        self.kernel_size = kernel_size
        self.fc_widths = fc_widths
        self.epsilon = epsilon
        self.learning_rate = learning_rate
        self.betas = betas
        self.adam_eps = adam_eps
        self.epochs = epochs
        self.seed = seed
        self.max_side = max_side

    def _config(self) -> RankerConfig:
        return RankerConfig(**self.get_params())

    def fit(self, X, y=None):
        config = self._config()
        self.model_, self.training_log_ = train(init_model(config), X, config)
        self.loss_curve_ = list(self.training_log_.epoch_losses)
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "model_")
        return score_images(self.model_, X)

    def score(self, X, y, groups=None) -> float:
        """Mean KRCC of predicted scores against ground-truth ranks ``y``.

        ``groups`` assigns each image to a ranking group; without it all images
        form one group.
        """
        scores = self.predict(X)
        groups = ["all"] * len(scores) if groups is None else list(groups)
        rows = [(g, str(i), s, r) for i, (g, s, r) in enumerate(zip(groups, scores, y))]
        return evaluate_groups(group_rows(rows)).mean_krcc

    @classmethod
    def from_model(cls, model):
        """Wrap an already-trained model (e.g. from ``load_model``)."""
        est = cls(**model.config.to_dict())
        est.model_ = model
        return est
