"""Independent reference computations used as test oracles.

Deliberately written as plain loops / third-party calls so they share no code
path with the package under test.
"""
import math
from itertools import combinations

import numpy as np
from skimage import color


def kendall_pairs(scores, gt):
    nc = nd = 0
    for i, j in combinations(range(len(scores)), 2):
        a = scores[i] - scores[j]
        b = gt[i] - gt[j]
        if a * b > 0:
            nc += 1
        elif a * b < 0:
            nd += 1
    return (nc - nd) / (len(scores) * (len(scores) - 1) / 2)


def ranks_of(values):
    order = sorted(range(len(values)), key=lambda i: values[i])
    r = [0.0] * len(values)
    for pos, i in enumerate(order, start=1):
        r[i] = float(pos)
    return r


def pearson(x, y):
    n = len(x)
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def mix_loop(a, b, k):
    out = np.empty_like(a)
    for idx in np.ndindex(a.shape):
        out[idx] = k * a[idx] + (1 - k) * b[idx]
    return out


def uicm_loop(img255, alpha=0.1):
    h, w, _ = img255.shape
    rg, yb = [], []
    for y in range(h):
        for x in range(w):
            r, g, b = img255[y, x]
            rg.append(r - g)
            yb.append((r + g) / 2 - b)

    def stats(vals):
        vals = sorted(vals)
        n = len(vals)
        lo = math.ceil(alpha * n)
        hi = math.floor(alpha * n)
        kept = vals[lo:n - hi]
        mu = sum(kept) / len(kept)
        return mu, sum((v - mu) ** 2 for v in kept) / len(kept)

    mrg, vrg = stats(rg)
    myb, vyb = stats(yb)
    return -0.0268 * math.sqrt(mrg ** 2 + myb ** 2) + 0.1586 * math.sqrt(vrg + vyb)


def iter_blocks(ch, block):
    h, w = ch.shape
    for by in range(h // block):
        for bx in range(w // block):
            yield ch[by * block:(by + 1) * block, bx * block:(bx + 1) * block]


def eme_loop(ch, block=8):
    blocks = list(iter_blocks(ch, block))
    total = 0.0
    for blk in blocks:
        mx = max(float(blk.max()), 1.0)
        mn = max(float(blk.min()), 1.0)
        total += math.log(mx / mn)
    return 2.0 / len(blocks) * total


def logamee_loop(ch, block=8, gamma=1026.0):
    blocks = list(iter_blocks(ch, block))
    s = 0.0
    for blk in blocks:
        mx, mn = float(blk.max()), float(blk.min())
        top = gamma * (mx - mn) / (gamma - mn)
        bottom = mx + mn - mx * mn / gamma
        m = top / bottom if bottom != 0 else 0.0
        if m > 0:
            s += m * math.log(m)
    c = 1.0 / len(blocks)
    return gamma - gamma * (1 - s / gamma) ** c


def sobel_loop(ch):
    """3x3 Sobel magnitude with edge replication."""
    h, w = ch.shape
    p = np.pad(ch, 1, mode="edge")
    kx = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]]
    out = np.zeros_like(ch)
    for y in range(h):
        for x in range(w):
            gx = gy = 0.0
            for i in range(3):
                for j in range(3):
                    v = p[y + i, x + j]
                    gx += kx[i][j] * v
                    gy += kx[j][i] * v
            out[y, x] = math.hypot(gx, gy)
    return out


def uism_loop(img255, block=8):
    total = 0.0
    for c, wgt in enumerate((0.299, 0.587, 0.114)):
        ch = img255[..., c]
        edges = sobel_loop(ch / 255.0) / (4 * math.sqrt(2))
        total += wgt * eme_loop(ch * edges, block)
    return total


def uciqe_skimage(img, c=(0.4680, 0.2745, 0.2576)):
    lab = color.rgb2lab(img)
    chroma = np.sqrt(lab[..., 1] ** 2 + lab[..., 2] ** 2)
    sigma_c = float(np.sqrt(np.mean((chroma - chroma.mean()) ** 2)))
    lo, hi = np.percentile(lab[..., 0], [1, 99])
    mu_s = float(color.rgb2hsv(img)[..., 1].mean())
    return sigma_c, float(hi - lo), mu_s, c[0] * sigma_c + c[1] * (hi - lo) + c[2] * mu_s


def numeric_grad(f, params, h=1e-5):
    """Central differences of scalar ``f()`` w.r.t. every entry of every array in ``params``."""
    grads = {}
    for name, arr in params.items():
        g = np.zeros_like(arr)
        for idx in np.ndindex(arr.shape):
            old = arr[idx]
            arr[idx] = old + h
            fp = f()
            arr[idx] = old - h
            fm = f()
            arr[idx] = old
            g[idx] = (fp - fm) / (2 * h)
        grads[name] = g
    return grads


def max_rel_error(analytic, numeric, floor=1e-6):
    worst = 0.0
    for name in analytic:
        a, n = analytic[name], numeric[name]
        err = np.abs(a - n) / np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(err.max()))
    return worst


def forward_reference(params, n_blocks, img):
    """Scorer forward pass built from scipy correlations and explicit pooling loops."""
    from scipy.signal import correlate

    x = np.asarray(img, dtype=np.float64)
    for b in range(n_blocks):
        if b > 0:
            h, w, c = x.shape
            pooled = np.zeros((h // 2, w // 2, c))
            for y in range(h // 2):
                for xx in range(w // 2):
                    pooled[y, xx] = x[2 * y:2 * y + 2, 2 * xx:2 * xx + 2].max(axis=(0, 1))
            x = pooled
        kern = params[f"conv{b}.weight"]
        k = kern.shape[0]
        xp = np.pad(x, ((k // 2, k // 2), (k // 2, k // 2), (0, 0)))
        out = np.zeros(x.shape[:2] + (kern.shape[3],))
        for o in range(kern.shape[3]):
            out[..., o] = correlate(xp, kern[..., o], mode="valid")[..., 0]
        x = np.maximum(out + params[f"conv{b}.bias"], 0.0)
    v = x.mean(axis=(0, 1))
    for i in range(3):
        v = v @ params[f"fc{i}.weight"] + params[f"fc{i}.bias"]
        if i < 2:
            v = np.maximum(v, 0.0)
    return float(v[0])
