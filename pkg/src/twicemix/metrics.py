"""UIQM and UCIQE underwater quality baselines.

Component measures are computed on the 0-255 intensity scale so the
community-standard combination weights apply unchanged. Block measures use
non-overlapping ``block x block`` tiles; partial tiles at the right and bottom
edges are dropped.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np
from scipy import ndimage
from sklearn.base import BaseEstimator, TransformerMixin

from .imgcore import check_image, luminance, rgb_to_hsv, rgb_to_lab

# PLIP gamma / k for 8-bit data.
PLIP_GAMMA = 1026.0
CHANNEL_WEIGHTS = (0.299, 0.587, 0.114)
UICM_MEAN_COEF = -0.0268
UICM_STD_COEF = 0.1586


class UiqmWeights(NamedTuple):
    c1: float = 0.0282
    c2: float = 0.2953
    c3: float = 3.5753


class UciqeWeights(NamedTuple):
    c1: float = 0.4680
    c2: float = 0.2745
    c3: float = 0.2576


@dataclass(frozen=True)
class MetricBreakdown:
    uicm: float
    uism: float
    uiconm: float
    sigma_chroma: float
    con_l: float
    mu_s: float
    uiqm: float
    uciqe: float

    def to_dict(self) -> dict:
        return asdict(self)


def _as_weights(w, cls):
    if w is None:
        return cls()
    w = cls(*(float(v) for v in w))
    if not all(np.isfinite(w)):
        raise ValueError(f"{cls.__name__} must be finite, got {tuple(w)}")
    return w


def trimmed_stats(values: np.ndarray, alpha_low: float = 0.1,
                  alpha_high: float = 0.1) -> tuple[float, float]:
    """Asymmetric alpha-trimmed mean and variance.

    ``ceil(alpha_low * n)`` smallest and ``floor(alpha_high * n)`` largest
    samples are discarded; the variance is taken about the trimmed mean over
    the retained samples.
    """
    x = np.sort(np.asarray(values, dtype=np.float64).ravel())
    n = x.size
    lo = int(np.ceil(alpha_low * n))
    hi = int(np.floor(alpha_high * n))
    kept = x[lo:n - hi]
    if kept.size == 0:
        kept = x
    mu = kept.mean()
    return float(mu), float(np.mean((kept - mu) ** 2))


def uicm(img, alpha: float = 0.1) -> float:
    """Colourfulness from the RG / YB opponent channels."""
    rgb = check_image(img) * 255.0
    rg = rgb[..., 0] - rgb[..., 1]
    yb = 0.5 * (rgb[..., 0] + rgb[..., 1]) - rgb[..., 2]
    mu_rg, var_rg = trimmed_stats(rg, alpha, alpha)
    mu_yb, var_yb = trimmed_stats(yb, alpha, alpha)
    return float(UICM_MEAN_COEF * np.sqrt(mu_rg ** 2 + mu_yb ** 2)
                 + UICM_STD_COEF * np.sqrt(var_rg + var_yb))


def _blocks(channel: np.ndarray, block: int) -> np.ndarray:
    """Stack of full ``block x block`` tiles, shape ``(n_tiles, block * block)``."""
    h, w = channel.shape
    nh, nw = h // block, w // block
    if nh == 0 or nw == 0:
        return np.empty((0, block * block))
    tiles = channel[:nh * block, :nw * block].reshape(nh, block, nw, block)
    return tiles.transpose(0, 2, 1, 3).reshape(nh * nw, block * block)


def sobel_magnitude(channel: np.ndarray) -> np.ndarray:
    gx = ndimage.sobel(channel, axis=1, mode="nearest")
    gy = ndimage.sobel(channel, axis=0, mode="nearest")
    return np.hypot(gx, gy)


def eme(channel: np.ndarray, block: int = 8) -> float:
    """Block log-contrast measure ``2/(k1 k2) * sum log(max / min)``.

    Block extrema below one grey level are floored at 1, so flat or all-zero
    tiles contribute nothing.
    """
    tiles = _blocks(channel, block)
    if tiles.shape[0] == 0:
        return 0.0
    bmax = np.maximum(tiles.max(axis=1), 1.0)
    bmin = np.maximum(tiles.min(axis=1), 1.0)
    return float(2.0 / tiles.shape[0] * np.sum(np.log(bmax / bmin)))


def uism(img, block: int = 8) -> float:
    """Sharpness: EME of each edge-weighted channel, luma-weighted."""
    rgb = check_image(img) * 255.0
    total = 0.0
    for c, weight in enumerate(CHANNEL_WEIGHTS):
        ch = rgb[..., c]
        # Sobel response normalised to [0, 1] per unit step, as a mask on the channel.
        edges = sobel_magnitude(ch / 255.0) / (4.0 * np.sqrt(2.0))
        total += weight * eme(ch * edges, block)
    return float(total)


def plip_add(a, b, gamma: float = PLIP_GAMMA):
    return a + b - a * b / gamma


def plip_sub(a, b, k: float = PLIP_GAMMA):
    return k * (a - b) / (k - b)


def plip_scalar_mul(c, a, gamma: float = PLIP_GAMMA):
    return gamma - gamma * (1.0 - a / gamma) ** c


def logamee(channel: np.ndarray, block: int = 8) -> float:
    """PLIP log-AMEE contrast over ``block x block`` tiles of an 8-bit-scale channel."""
    tiles = _blocks(channel, block)
    if tiles.shape[0] == 0:
        return 0.0
    bmax = tiles.max(axis=1)
    bmin = tiles.min(axis=1)
    top = plip_sub(bmax, bmin)
    bottom = plip_add(bmax, bmin)
    ratio = np.divide(top, bottom, out=np.zeros_like(top), where=bottom != 0)
    terms = np.zeros_like(ratio)
    pos = ratio > 0
    terms[pos] = ratio[pos] * np.log(ratio[pos])
    return float(plip_scalar_mul(1.0 / tiles.shape[0], terms.sum()))


def uiconm(img, block: int = 8) -> float:
    """Contrast: log-AMEE of the luminance channel."""
    return logamee(luminance(check_image(img)) * 255.0, block)


def chroma_std(lab: np.ndarray) -> float:
    chroma = np.hypot(lab[..., 1], lab[..., 2])
    if np.ptp(chroma) == 0.0:
        return 0.0
    return float(np.std(chroma))


def luminance_contrast(lab: np.ndarray, low: float = 1.0, high: float = 99.0) -> float:
    lo, hi = np.percentile(lab[..., 0], [low, high])
    return float(hi - lo)


def uiqm(img, w=None) -> MetricBreakdown:
    """UIQM breakdown; the UCIQE fields are filled with default weights."""
    return score_image(img, uiqm_weights=w)


def uciqe(img, w=None) -> MetricBreakdown:
    """UCIQE breakdown; the UIQM fields are filled with default weights."""
    return score_image(img, uciqe_weights=w)


def score_image(img, uiqm_weights=None, uciqe_weights=None,
                percentiles: tuple[float, float] = (1.0, 99.0)) -> MetricBreakdown:
    """All six components plus both combined scores for one image."""
    img = check_image(img)
    wq = _as_weights(uiqm_weights, UiqmWeights)
    wc = _as_weights(uciqe_weights, UciqeWeights)

    colour = uicm(img)
    sharp = uism(img)
    contrast = uiconm(img)

    lab = rgb_to_lab(img)
    sigma_c = chroma_std(lab)
    con_l = luminance_contrast(lab, *percentiles)
    mu_s = float(rgb_to_hsv(img)[..., 1].mean())

    return MetricBreakdown(
        uicm=colour, uism=sharp, uiconm=contrast,
        sigma_chroma=sigma_c, con_l=con_l, mu_s=mu_s,
        uiqm=wq.c1 * colour + wq.c2 * sharp + wq.c3 * contrast,
        uciqe=wc.c1 * sigma_c + wc.c2 * con_l + wc.c3 * mu_s,
    )


class MetricScorer(BaseEstimator, TransformerMixin):
    """Stateless transformer mapping a sequence of images to baseline scores.

    ``metric`` selects the output column: ``"uiqm"``, ``"uciqe"`` or
    ``"all"`` (the eight breakdown fields, in ``MetricBreakdown`` order).
    """

    def __init__(self, metric: str = "uiqm", uiqm_weights=None, uciqe_weights=None):
        self.metric = metric
        self.uiqm_weights = uiqm_weights
        self.uciqe_weights = uciqe_weights

    def fit(self, X=None, y=None):
        if self.metric not in ("uiqm", "uciqe", "all"):
            raise ValueError(f"unknown metric {self.metric!r}")
        return self

    def transform(self, X) -> np.ndarray:
        self.fit()
        rows = [score_image(img, self.uiqm_weights, self.uciqe_weights) for img in X]
        if self.metric == "all":
            return np.array([list(asdict(r).values()) for r in rows], dtype=np.float64)
        return np.array([getattr(r, self.metric) for r in rows], dtype=np.float64)

    predict = transform


__all__ = [
    "UiqmWeights", "UciqeWeights", "MetricBreakdown", "MetricScorer",
    "uicm", "uism", "uiconm", "uiqm", "uciqe", "score_image", "trimmed_stats",
    "eme", "logamee", "sobel_magnitude", "plip_add", "plip_sub", "plip_scalar_mul",
]
