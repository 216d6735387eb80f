"""Rank-learning quality assessment for enhanced underwater images via twice mixing."""
from .evaluation import RankingReport, evaluate_groups, krcc, srcc
from .imgcore import load_image, save_image
from .metrics import MetricBreakdown, MetricScorer, UciqeWeights, UiqmWeights, score_image
from .mixing import MixRatioPair, RankedPair, build_synthetic_testset, make_ranked_pair, mix
from .ranker import RankerConfig, TwiceMixingRanker, init_model, load_model, save_model, train

__version__ = "0.1.0"

__all__ = [
    "MetricBreakdown", "MetricScorer", "MixRatioPair", "RankedPair", "RankerConfig",
    "RankingReport", "TwiceMixingRanker", "UciqeWeights", "UiqmWeights",
    "build_synthetic_testset", "evaluate_groups", "init_model", "krcc", "load_image",
    "load_model", "make_ranked_pair", "mix", "save_image", "save_model", "score_image",
    "srcc", "train",
]
