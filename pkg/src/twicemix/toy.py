"""Procedurally generated raw/HQ/LQ corpora for desk-scale experiments.

HQ images are clean colour gradients overlaid with an oriented sinusoidal
texture. Two low-quality variants are available:

``hazy``
    contrast crushed towards the mean under a spatially varying blue-green
    colour cast (stronger towards one side of the frame, like distance haze).
``overenhanced``
    a reddish colour shift with excessive contrast and over-saturation, the
    typical failure of aggressive enhancement operators.
``dark``
    the scene scaled down towards black under a blue-green cast, as in
    poorly lit deep water.

The raw image is the half-strength version of the same degradation.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .dataset import ManifestEntry, write_manifest
from .imgcore import save_image

KINDS = ("hazy", "overenhanced", "dark")


def _ramp(rng: np.random.Generator, size: int) -> np.ndarray:
    yy, xx = np.mgrid[0:size, 0:size] / (size - 1)
    theta = rng.uniform(0, 2 * np.pi)
    t = np.cos(theta) * xx + np.sin(theta) * yy
    return (t - t.min()) / max(np.ptp(t), 1e-12)


def clean_scene(rng: np.random.Generator, size: int = 64) -> np.ndarray:
    yy, xx = np.mgrid[0:size, 0:size] / (size - 1)
    t = _ramp(rng, size)
    c0, c1 = rng.uniform(0.15, 0.95, size=(2, 3))
    img = c0 + t[..., None] * (c1 - c0)
    freq = rng.uniform(2.0, 8.0)
    phi = rng.uniform(0, np.pi)
    phase = rng.uniform(0, 2 * np.pi)
    wave = np.sin(2 * np.pi * freq * (np.cos(phi) * xx + np.sin(phi) * yy) + phase)
    img = img + rng.uniform(0.15, 0.3) * wave[..., None]
    return np.clip(img, 0.0, 1.0)


def hazy(img: np.ndarray, rng: np.random.Generator, strength: float = 1.0) -> np.ndarray:
    """Contrast crush plus a spatially varying colour cast."""
    size = img.shape[0]
    mean = img.mean(axis=(0, 1), keepdims=True)
    out = mean + (1.0 - strength * rng.uniform(0.3, 0.5)) * (img - mean)
    t = _ramp(rng, size)[..., None]
    near = np.array([rng.uniform(0.3, 0.6), rng.uniform(0.7, 0.9), rng.uniform(0.6, 0.8)])
    far = np.array([rng.uniform(0.0, 0.1), rng.uniform(0.5, 0.8), rng.uniform(0.7, 1.0)])
    cast = near + t * (far - near)
    a = strength * rng.uniform(0.5, 0.7)
    out = (1.0 - a) * out + a * cast * (0.4 + 0.6 * out.mean(axis=-1, keepdims=True))
    return np.clip(out, 0.0, 1.0)


def overenhanced(img: np.ndarray, rng: np.random.Generator, strength: float = 1.0) -> np.ndarray:
    """Reddish shift, contrast stretch and saturation boost."""
    mean = img.mean(axis=(0, 1), keepdims=True)
    out = mean + (1.0 + strength * rng.uniform(0.8, 1.5)) * (img - mean)
    grey = out.mean(axis=-1, keepdims=True)
    out = grey + (1.0 + strength * rng.uniform(0.8, 1.5)) * (out - grey)
    shift = strength * np.array([rng.uniform(0.15, 0.3), -rng.uniform(0.05, 0.15), -rng.uniform(0.1, 0.2)])
    return np.clip(out + shift, 0.0, 1.0)


def dark(img: np.ndarray, rng: np.random.Generator, strength: float = 1.0) -> np.ndarray:
    """Light loss with a blue-green cast."""
    gain = 1.0 - strength * rng.uniform(0.5, 0.7)
    tint = np.array([1.0 - strength * rng.uniform(0.4, 0.6), 1.0, 1.0 - strength * rng.uniform(0.0, 0.2)])
    return np.clip(gain * img * tint, 0.0, 1.0)


_DEGRADE = {"hazy": hazy, "overenhanced": overenhanced, "dark": dark}


def make_triplet(rng: np.random.Generator, size: int = 64, kind: str = "hazy"):
    """One ``(raw, hq, lq)`` triplet degraded with ``kind``."""
    if kind not in _DEGRADE:
        raise ValueError(f"unknown degradation {kind!r}; choose from {KINDS}")
    degrade = _DEGRADE[kind]
    hq = clean_scene(rng, size)
    state = rng.bit_generator.state
    lq = degrade(hq, rng, 1.0)
    # Raw shares the LQ degradation parameters at half strength.
    rng.bit_generator.state = state
    raw = degrade(hq, rng, 0.5)
    return raw, hq, lq


def make_corpus(n: int, seed: int = 0, size: int = 64, kinds=("hazy",)):
    """``n`` triplets; each source draws its degradation uniformly from ``kinds``."""
    rng = np.random.default_rng(seed)
    kinds = tuple(kinds)
    out = []
    for _ in range(n):
        kind = kinds[rng.integers(len(kinds))] if len(kinds) > 1 else kinds[0]
        out.append(make_triplet(rng, size, kind))
    return out


def write_corpus(out_dir, n: int, seed: int = 0, size: int = 64, kinds=("hazy",),
                 drop_lq=()) -> Path:
    """Write a toy corpus as PNGs plus ``manifest.csv``; returns the manifest path.

    Ids listed in ``drop_lq`` get no LQ image, mimicking sources where none was selected.
    """
    out_dir = Path(out_dir)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    entries = []
    for i, (raw, hq, lq) in enumerate(make_corpus(n, seed, size, kinds)):
        sid = f"s{i:04d}"
        paths = {}
        for role, img in (("raw", raw), ("hq", hq), ("lq", lq)):
            if role == "lq" and sid in drop_lq:
                continue
            paths[role] = out_dir / "images" / f"{sid}_{role}.png"
            save_image(img, paths[role])
        entries.append(ManifestEntry(sid, paths["raw"], paths["hq"], paths.get("lq")))
    manifest = out_dir / "manifest.csv"
    write_manifest(entries, manifest)
    return manifest
