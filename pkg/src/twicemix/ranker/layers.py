"""Single-image layer primitives with explicit reverse-mode passes.

Activations are ``(H, W, C)`` float64 arrays; conv kernels are stored
``(kh, kw, c_in, c_out)``. Each ``*_forward`` returns ``(output, cache)`` and the
matching ``*_backward`` consumes the cache plus the upstream gradient.
"""
from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def conv2d_forward(x, weight, bias):
    """Stride-1 'same' convolution (zero padding ``k // 2``)."""
    k = weight.shape[0]
    pad = k // 2
    h, w, c_in = x.shape
    xp = np.pad(x, ((pad, pad), (pad, pad), (0, 0)))
    # (H, W, C_in, k, k) -> (H*W, k*k*C_in) in (kh, kw, c_in) order to match the kernel layout.
    windows = sliding_window_view(xp, (k, k), axis=(0, 1))
    cols = windows.transpose(0, 1, 3, 4, 2).reshape(h * w, k * k * c_in)
    out = cols @ weight.reshape(-1, weight.shape[3]) + bias
    return out.reshape(h, w, -1), (cols, x.shape, weight)


def conv2d_backward(dout, cache, need_input_grad=True):
    cols, x_shape, weight = cache
    h, w, c_in = x_shape
    k = weight.shape[0]
    pad = k // 2
    d2 = dout.reshape(h * w, -1)
    dweight = (cols.T @ d2).reshape(weight.shape)
    dbias = d2.sum(axis=0)
    if not need_input_grad:
        return None, dweight, dbias
    dcols = (d2 @ weight.reshape(-1, weight.shape[3]).T).reshape(h, w, k, k, c_in)
    dxp = np.zeros((h + 2 * pad, w + 2 * pad, c_in))
    for i in range(k):
        for j in range(k):
            dxp[i:i + h, j:j + w] += dcols[:, :, i, j]
    return dxp[pad:pad + h, pad:pad + w], dweight, dbias


def relu_forward(x):
    mask = x > 0
    return x * mask, mask


def relu_backward(dout, mask):
    return dout * mask


def maxpool2_forward(x):
    """2x2 max pool, stride 2; odd trailing rows/columns are dropped."""
    h, w, c = x.shape
    h2, w2 = h // 2, w // 2
    win = x[:2 * h2, :2 * w2].reshape(h2, 2, w2, 2, c).transpose(0, 2, 4, 1, 3).reshape(h2, w2, c, 4)
    idx = win.argmax(axis=-1)
    out = np.take_along_axis(win, idx[..., None], axis=-1)[..., 0]
    return out, (idx, x.shape)


def maxpool2_backward(dout, cache):
    idx, (h, w, c) = cache
    h2, w2 = h // 2, w // 2
    dwin = np.zeros((h2, w2, c, 4))
    np.put_along_axis(dwin, idx[..., None], dout[..., None], axis=-1)
    dx = np.zeros((h, w, c))
    dx[:2 * h2, :2 * w2] = dwin.reshape(h2, w2, c, 2, 2).transpose(0, 3, 1, 4, 2).reshape(2 * h2, 2 * w2, c)
    return dx


def gap_forward(x):
    return x.mean(axis=(0, 1)), x.shape


def gap_backward(dout, shape):
    h, w, _ = shape
    return np.broadcast_to(dout / (h * w), shape).copy()


def dense_forward(x, weight, bias):
    return x @ weight + bias, (x, weight)


def dense_backward(dout, cache):
    x, weight = cache
    return weight @ dout, np.outer(x, dout), dout
