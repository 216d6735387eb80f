"""Siamese training loop: one fresh ratio pair per iteration, batch size 1."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..mixing import RatioSampler, make_ranked_pair
from .model import (AdamState, RankerConfig, RankerModel, adam_step, pair_loss_and_grads,
                    prepare_image)

log = logging.getLogger(__name__)


@dataclass
class TrainingLog:
    epoch_losses: list = field(default_factory=list)
    steps: int = 0

    def to_csv(self) -> str:
        lines = ["epoch,mean_loss"]
        lines += [f"{i},{loss!r}" for i, loss in enumerate(self.epoch_losses, start=1)]
        return "\n".join(lines) + "\n"


def _streams(seed: int):
    order_seq, ratio_seq = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(order_seq), RatioSampler(np.random.default_rng(ratio_seq))


def train(model: RankerModel, dataset, config: RankerConfig | None = None):
    """Fit ``model`` on ``(x_hq, x_lq)`` pairs; returns ``(model, TrainingLog)``.

    Each epoch visits the pairs in a seeded random order. Every iteration draws
    a new ratio pair, mixes the endpoints twice, and takes one Adam step on the
    margin-ranking loss. Deterministic given ``config.seed``.
    """
    config = config or model.config
    dataset = list(dataset)
    if not dataset:
        raise ValueError("training dataset is empty")
    pairs = []
    for hq, lq in dataset:
        hq, lq = prepare_image(config, hq), prepare_image(config, lq)
        if hq.shape != lq.shape:
            raise ValueError(f"pair endpoints differ in size: {hq.shape} vs {lq.shape}")
        pairs.append((hq, lq))

    order_rng, sampler = _streams(config.seed)
    state = AdamState.zeros(model)
    history = TrainingLog()
    for epoch in range(config.epochs):
        total = 0.0
        for idx in order_rng.permutation(len(pairs)):
            hq, lq = pairs[idx]
            ranked = make_ranked_pair(hq, lq, sampler())
            loss, grads, _ = pair_loss_and_grads(model, ranked, config.epsilon)
            total += loss
            # Inactive pairs give zero gradients but still advance the Adam moments.
            model, state = adam_step(model, grads, state, config.learning_rate,
                                     config.betas, config.adam_eps)
            history.steps += 1
        history.epoch_losses.append(total / len(pairs))
        log.info("epoch %d/%d mean loss %.6f", epoch + 1, config.epochs, history.epoch_losses[-1])
    return model, history
