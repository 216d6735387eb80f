"""Twice-mixing: ranked virtual pairs from one high/low quality image pair."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_GAP = 0.1
MAX_ATTEMPTS = 1000
DEFAULT_KS = (0.0, 0.2, 0.4, 0.6, 0.8)


@dataclass(frozen=True)
class MixRatioPair:
    k1: float
    k2: float
    gamma: int

    def __post_init__(self):
        if not (0.0 <= self.k1 <= 1.0 and 0.0 <= self.k2 <= 1.0):
            raise ValueError(f"mixing ratios must lie in [0, 1], got ({self.k1}, {self.k2})")
        if abs(self.k1 - self.k2) < MIN_GAP:
            raise ValueError(f"|k1 - k2| must be >= {MIN_GAP}, got ({self.k1}, {self.k2})")
        if self.gamma != ranking_label(self.k1, self.k2):
            raise ValueError("gamma inconsistent with the ratio ordering")

    @classmethod
    def from_ratios(cls, k1: float, k2: float) -> "MixRatioPair":
        return cls(float(k1), float(k2), ranking_label(k1, k2))

    def swapped(self) -> "MixRatioPair":
        return MixRatioPair(self.k2, self.k1, -self.gamma)


@dataclass(frozen=True)
class RankedPair:
    x1: np.ndarray
    x2: np.ndarray
    gamma: int


@dataclass(frozen=True)
class SyntheticGrade:
    source_id: str
    k: float
    image: np.ndarray
    gt_rank: int


def ranking_label(k1: float, k2: float) -> int:
    """+1 when the second image carries more of the high-quality endpoint."""
    if k1 < k2:
        return 1
    if k1 > k2:
        return -1
    raise ValueError("ranking label undefined for equal ratios")


def accept_ratios(k1: float, k2: float, min_gap: float = MIN_GAP) -> bool:
    return abs(k1 - k2) >= min_gap


class RatioSampler:
    """Draws ratio pairs i.i.d. uniform on [0, 1], rejecting pairs closer than ``min_gap``.

    The sampler owns its generator; do not share one across threads.
    """

    def __init__(self, rng=None, min_gap: float = MIN_GAP):
        self.rng = np.random.default_rng(rng)
        self.min_gap = min_gap

    def __call__(self) -> MixRatioPair:
        for _ in range(MAX_ATTEMPTS):
            k1, k2 = self.rng.uniform(0.0, 1.0, size=2)
            if accept_ratios(k1, k2, self.min_gap):
                return MixRatioPair.from_ratios(k1, k2)
        raise RuntimeError(
            f"no ratio pair with gap >= {self.min_gap} after {MAX_ATTEMPTS} draws; "
            "random source looks broken")


def sample_ratio_pair(rng) -> MixRatioPair:
    """One accepted ratio pair drawn from ``rng`` (a ``numpy`` Generator or seed)."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return RatioSampler(rng)()


def _check_pair(x_hq, x_lq) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(x_hq, dtype=np.float64)
    b = np.asarray(x_lq, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def mix(x_hq, x_lq, k: float) -> np.ndarray:
    """Convex combination ``k * x_hq + (1 - k) * x_lq``.

    The endpoints are returned as copies so ``k=1`` and ``k=0`` are bit-exact.
    """
    a, b = _check_pair(x_hq, x_lq)
    if not 0.0 <= k <= 1.0:
        raise ValueError(f"mixing ratio must lie in [0, 1], got {k}")
    if k == 1.0:
        return a.copy()
    if k == 0.0:
        return b.copy()
    out = k * a + (1.0 - k) * b
    # Guard the bound against rounding; a convex combination never leaves [min, max].
    return np.clip(out, np.minimum(a, b), np.maximum(a, b))


def make_ranked_pair(x_hq, x_lq, ratios: MixRatioPair) -> RankedPair:
    """Mix the endpoints twice; ``gamma`` is copied from ``ratios``."""
    _check_pair(x_hq, x_lq)
    return RankedPair(
        x1=mix(x_hq, x_lq, ratios.k1),
        x2=mix(x_hq, x_lq, ratios.k2),
        gamma=ratios.gamma,
    )


def validate_ks(ks) -> list[float]:
    ks = [float(k) for k in ks]
    if not ks:
        raise ValueError("ks must not be empty")
    if any(not 0.0 <= k <= 1.0 for k in ks):
        raise ValueError(f"every k must lie in [0, 1], got {ks}")
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError(f"ks must be strictly increasing, got {ks}")
    return ks


def build_synthetic_testset(entries, ks=DEFAULT_KS) -> list[SyntheticGrade]:
    """Fixed-ratio graded versions of each source.

    ``entries`` yields ``(source_id, x_hq, x_low)`` triples, where ``x_low`` is
    the low-quality endpoint (LQ or raw). ``gt_rank`` is the 1-based position
    of ``k`` in ``ks``, so larger ratios rank higher.
    """
    ks = validate_ks(ks)
    grades = []
    for source_id, x_hq, x_low in entries:
        for rank, k in enumerate(ks, start=1):
            grades.append(SyntheticGrade(str(source_id), k, mix(x_hq, x_low, k), rank))
    return grades


__all__ = [
    "MIN_GAP", "DEFAULT_KS", "MixRatioPair", "RankedPair", "SyntheticGrade",
    "RatioSampler", "ranking_label", "accept_ratios", "sample_ratio_pair", "mix",
    "make_ranked_pair", "validate_ks", "build_synthetic_testset",
]
