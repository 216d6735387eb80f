"""Compact quality scorer: conv blocks -> global average pool -> three FC layers -> scalar.

Parameter layout (fixed order, also the serialised layer order)::

    conv0.weight, conv0.bias, ..., conv{B-1}.weight, conv{B-1}.bias,
    fc0.weight, fc0.bias, fc1.weight, fc1.bias, fc2.weight, fc2.bias

Conv kernels are ``(k, k, c_in, c_out)``, FC weights ``(n_in, n_out)``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..imgcore import MIN_SIDE, area_downscale, check_image
from . import layers

FORMAT_VERSION = 1


@dataclass(frozen=True)
class RankerConfig:
    conv_channels: tuple = (8, 16, 32)
    kernel_size: int = 3
    fc_widths: tuple = (32, 16)
    epsilon: float = 0.5
    learning_rate: float = 1e-6
    betas: tuple = (0.9, 0.999)
    adam_eps: float = 1e-8
    epochs: int = 30
    seed: int = 0
    max_side: int | None = 128

    def __post_init__(self):
        object.__setattr__(self, "conv_channels", tuple(int(c) for c in self.conv_channels))
        object.__setattr__(self, "fc_widths", tuple(int(c) for c in self.fc_widths))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if not self.conv_channels or any(c <= 0 for c in self.conv_channels):
            raise ValueError("conv_channels must be a non-empty list of positive integers")
        if self.kernel_size <= 0 or self.kernel_size % 2 == 0:
            raise ValueError("kernel_size must be a positive odd integer")
        if len(self.fc_widths) != 2 or any(c <= 0 for c in self.fc_widths):
            raise ValueError("fc_widths must hold exactly two positive widths (three FC layers in total)")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be > 0")
        if not self.learning_rate >= 0:
            raise ValueError("learning_rate must be >= 0")
        if len(self.betas) != 2 or not all(0.0 <= b < 1.0 for b in self.betas):
            raise ValueError("betas must be two values in [0, 1)")
        if not self.adam_eps > 0:
            raise ValueError("adam_eps must be > 0")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.max_side is not None and self.max_side < self.min_side:
            raise ValueError(f"max_side must be >= {self.min_side}")

    @property
    def min_side(self) -> int:
        return max(MIN_SIDE, 2 ** (len(self.conv_channels) - 1))

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("conv_channels", "fc_widths", "betas"):
            d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RankerConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**d)


def param_shapes(config: RankerConfig) -> dict:
    shapes = {}
    k = config.kernel_size
    c_in = 3
    for i, c_out in enumerate(config.conv_channels):
        shapes[f"conv{i}.weight"] = (k, k, c_in, c_out)
        shapes[f"conv{i}.bias"] = (c_out,)
        c_in = c_out
    widths = [c_in, *config.fc_widths, 1]
    for i in range(3):
        shapes[f"fc{i}.weight"] = (widths[i], widths[i + 1])
        shapes[f"fc{i}.bias"] = (widths[i + 1],)
    return shapes


@dataclass
class RankerModel:
    config: RankerConfig
    params: dict
    version: int = FORMAT_VERSION

    def __post_init__(self):
        expected = param_shapes(self.config)
        if list(self.params) != list(expected):
            raise ValueError(f"parameter names/order {list(self.params)} do not match config")
        for name, shape in expected.items():
            arr = np.asarray(self.params[name], dtype=np.float64)
            if arr.shape != shape:
                raise ValueError(f"{name}: shape {arr.shape}, expected {shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name}: non-finite weights")
            self.params[name] = arr

    @property
    def n_params(self) -> int:
        return sum(p.size for p in self.params.values())

    def copy(self) -> "RankerModel":
        return RankerModel(self.config, {k: v.copy() for k, v in self.params.items()}, self.version)

    def with_params(self, params: dict) -> "RankerModel":
        return RankerModel(self.config, params, self.version)


def init_model(config: RankerConfig | None = None) -> RankerModel:
    """Seeded fan-in-scaled normal weights (He for ReLU layers, LeCun for the output); zero biases."""
    config = config or RankerConfig()
    rng = np.random.default_rng(config.seed)
    params = {}
    last = "fc2.weight"
    for name, shape in param_shapes(config).items():
        if name.endswith(".bias"):
            params[name] = np.zeros(shape)
            continue
        fan_in = int(np.prod(shape[:-1]))
        gain = 1.0 if name == last else 2.0
        params[name] = rng.normal(0.0, np.sqrt(gain / fan_in), size=shape)
    return RankerModel(config, params)


def zeros_like_params(model: RankerModel) -> dict:
    return {k: np.zeros_like(v) for k, v in model.params.items()}


def _check_input(model: RankerModel, img) -> np.ndarray:
    return check_image(img, min_side=model.config.min_side)


def forward_cached(model: RankerModel, img):
    """Score one image; also return the activation caches needed by :func:`score_gradient`."""
    x = _check_input(model, img)
    p = model.params
    n_blocks = len(model.config.conv_channels)
    caches = []
    for i in range(n_blocks):
        if i > 0:
            x, c = layers.maxpool2_forward(x)
            caches.append(("pool", c))
        x, c = layers.conv2d_forward(x, p[f"conv{i}.weight"], p[f"conv{i}.bias"])
        caches.append((f"conv{i}", c))
        x, c = layers.relu_forward(x)
        caches.append(("relu", c))
    x, c = layers.gap_forward(x)
    caches.append(("gap", c))
    for i in range(3):
        x, c = layers.dense_forward(x, p[f"fc{i}.weight"], p[f"fc{i}.bias"])
        caches.append((f"fc{i}", c))
        if i < 2:
            x, c = layers.relu_forward(x)
            caches.append(("relu", c))
    return float(x[0]), caches


def forward(model: RankerModel, img) -> float:
    """Quality score of a single image (higher means better)."""
    return forward_cached(model, img)[0]


def score_gradient(model: RankerModel, caches, upstream: float = 1.0) -> dict:
    """Reverse pass: ``upstream * d(score)/d(theta)`` for every parameter."""
    grads = {}
    g = np.array([upstream], dtype=np.float64)
    for kind, c in reversed(caches):
        if kind == "relu":
            g = layers.relu_backward(g, c)
        elif kind == "pool":
            g = layers.maxpool2_backward(g, c)
        elif kind == "gap":
            g = layers.gap_backward(g, c)
        elif kind.startswith("fc"):
            g, grads[f"{kind}.weight"], grads[f"{kind}.bias"] = layers.dense_backward(g, c)
        else:
            g, grads[f"{kind}.weight"], grads[f"{kind}.bias"] = layers.conv2d_backward(
                g, c, need_input_grad=kind != "conv0")
    return {name: grads[name] for name in model.params}


def _check_gamma(gamma) -> int:
    if gamma not in (-1, 1):
        raise ValueError(f"gamma must be -1 or +1, got {gamma!r}")
    return int(gamma)


def margin_rank_loss(s1: float, s2: float, gamma: int, epsilon: float) -> float:
    """Hinge ``max(0, (s1 - s2) * gamma + epsilon)``."""
    gamma = _check_gamma(gamma)
    if not epsilon > 0:
        raise ValueError("epsilon must be > 0")
    return max(0.0, (s1 - s2) * gamma + epsilon)


def pair_loss_and_grads(model: RankerModel, pair, epsilon: float):
    """Loss of one ranked pair and its gradient through both weight-shared branches.

    At the hinge kink (loss exactly 0) the zero subgradient is used.
    """
    gamma = _check_gamma(pair.gamma)
    s1, c1 = forward_cached(model, pair.x1)
    s2, c2 = forward_cached(model, pair.x2)
    loss = margin_rank_loss(s1, s2, gamma, epsilon)
    if loss <= 0.0:
        return loss, zeros_like_params(model), (s1, s2)
    g1 = score_gradient(model, c1, float(gamma))
    g2 = score_gradient(model, c2, float(-gamma))
    return loss, {k: g1[k] + g2[k] for k in g1}, (s1, s2)


def backward(model: RankerModel, pair, epsilon: float) -> dict:
    """Gradient of the margin-ranking loss of ``pair`` with respect to every parameter."""
    return pair_loss_and_grads(model, pair, epsilon)[1]


def pair_loss(model: RankerModel, pair, epsilon: float) -> float:
    return margin_rank_loss(forward(model, pair.x1), forward(model, pair.x2), pair.gamma, epsilon)


@dataclass
class AdamState:
    m: dict
    v: dict
    t: int = 0

    @classmethod
    def zeros(cls, model: RankerModel) -> "AdamState":
        return cls(zeros_like_params(model), zeros_like_params(model), 0)


def adam_step(model: RankerModel, grads: dict, state: AdamState, lr: float,
              betas=(0.9, 0.999), eps: float = 1e-8):
    """One bias-corrected Adam update. Inputs are left untouched; returns ``(model, state)``."""
    if list(grads) != list(model.params):
        raise ValueError("gradient names do not match model parameters")
    b1, b2 = betas
    t = state.t + 1
    new_params, new_m, new_v = {}, {}, {}
    for name, theta in model.params.items():
        g = np.asarray(grads[name], dtype=np.float64)
        if g.shape != theta.shape or state.m[name].shape != theta.shape:
            raise ValueError(f"{name}: shape mismatch")
        m = b1 * state.m[name] + (1.0 - b1) * g
        v = b2 * state.v[name] + (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1 ** t)
        v_hat = v / (1.0 - b2 ** t)
        new_params[name] = theta - lr * m_hat / (np.sqrt(v_hat) + eps)
        new_m[name], new_v[name] = m, v
    return model.with_params(new_params), AdamState(new_m, new_v, t)


def prepare_image(config: RankerConfig, img) -> np.ndarray:
    """Apply the configured downscale; used identically for training and scoring."""
    img = check_image(img, min_side=config.min_side)
    if config.max_side is not None:
        img = area_downscale(img, config.max_side)
    return img


def score_images(model: RankerModel, images) -> np.ndarray:
    return np.array([forward(model, prepare_image(model.config, im)) for im in images])
