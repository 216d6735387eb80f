"""Image container helpers, 8-bit file I/O and colour-space conversions.

Images are plain ``numpy`` arrays of shape ``(H, W, 3)`` holding float64
values in ``[0, 1]``. Quantisation to 8 bits happens only at file boundaries.
"""
from __future__ import annotations

import io
from pathlib import Path

import numpy as np
from PIL import Image

MIN_SIDE = 8

# sRGB primaries, D65 white.
_RGB_TO_XYZ = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])
_D65_WHITE = _RGB_TO_XYZ.sum(axis=1)

_LAB_EPS = 216.0 / 24389.0
_LAB_KAPPA = 24389.0 / 27.0

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class ImageFormatError(ValueError):
    """Raised for unreadable, unsupported or corrupt image files."""


def check_image(img, min_side: int = MIN_SIDE, name: str = "img") -> np.ndarray:
    """Validate an RGB image and return it as a float64 array.

    Raises ``ValueError`` on a wrong shape, non-finite or out-of-range values,
    or a side shorter than ``min_side``.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"{name} must have shape (H, W, 3), got {arr.shape}")
    h, w = arr.shape[:2]
    if h < min_side or w < min_side:
        raise ValueError(f"{name} is {h}x{w}; minimum side is {min_side}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError(f"{name} values must lie in [0, 1]")
    return arr


def to_bytes(img: np.ndarray) -> np.ndarray:
    """Quantise a [0, 1] image to uint8 with round-half-up and clamping."""
    q = np.floor(np.asarray(img, dtype=np.float64) * 255.0 + 0.5)
    return np.clip(q, 0, 255).astype(np.uint8)


def from_bytes(data: np.ndarray) -> np.ndarray:
    return np.asarray(data, dtype=np.float64) / 255.0


def _read_ppm(raw: bytes) -> np.ndarray:
    # Header: magic, width, height, maxval separated by whitespace; '#' comments.
    fields: list[bytes] = []
    pos = 0
    n = len(raw)
    while len(fields) < 4:
        while pos < n and raw[pos:pos + 1].isspace():
            pos += 1
        if pos < n and raw[pos:pos + 1] == b"#":
            while pos < n and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not raw[pos:pos + 1].isspace() and raw[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ImageFormatError("truncated PPM header")
        fields.append(raw[start:pos])
    if pos >= n or not raw[pos:pos + 1].isspace():
        raise ImageFormatError("corrupt PPM header")
    pos += 1
    if fields[0] != b"P6":
        raise ImageFormatError("only binary PPM (P6) is supported")
    try:
        width, height, maxval = (int(f) for f in fields[1:])
    except ValueError as exc:
        raise ImageFormatError(f"corrupt PPM header: {exc}") from None
    if width <= 0 or height <= 0:
        raise ImageFormatError("PPM dimensions must be positive")
    if maxval != 255:
        raise ImageFormatError(f"unsupported PPM maxval {maxval}; only 255")
    body = raw[pos:pos + width * height * 3]
    if len(body) != width * height * 3:
        raise ImageFormatError("PPM pixel data is truncated")
    return np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3)


def _read_png(raw: bytes) -> np.ndarray:
    try:
        with Image.open(io.BytesIO(raw)) as im:
            im.load()
            if im.mode == "L":
                im = im.convert("RGB")
            if im.mode != "RGB":
                raise ImageFormatError(f"unsupported PNG mode {im.mode!r}; need 8-bit RGB")
            return np.array(im, dtype=np.uint8)
    except ImageFormatError:
        raise
    except Exception as exc:  # Pillow raises a zoo of types on corrupt data
        raise ImageFormatError(f"corrupt PNG: {exc}") from None


def load_image(path, min_side: int = MIN_SIDE) -> np.ndarray:
    """Read an 8-bit PNG or binary PPM (P6) file into a float image.

    Byte value ``v`` maps to ``v / 255`` exactly.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image file: {path}")
    raw = path.read_bytes()
    if raw.startswith(_PNG_MAGIC):
        data = _read_png(raw)
    elif raw.startswith(b"P6"):
        data = _read_ppm(raw)
    else:
        raise ImageFormatError(f"{path}: unsupported format (expected PNG or P6 PPM)")
    img = from_bytes(data)
    h, w = img.shape[:2]
    if h < min_side or w < min_side:
        raise ImageFormatError(f"{path}: image is {h}x{w}; minimum side is {min_side}")
    return img


def save_image(img, path) -> None:
    """Write ``img`` as PNG, or as P6 PPM when the suffix is ``.ppm``."""
    path = Path(path)
    data = to_bytes(check_image(img, min_side=1))
    if not path.parent.is_dir():
        raise FileNotFoundError(f"parent directory does not exist: {path.parent}")
    if path.suffix.lower() == ".ppm":
        h, w = data.shape[:2]
        payload = f"P6\n{w} {h}\n255\n".encode("ascii") + data.tobytes()
    else:
        buf = io.BytesIO()
        Image.fromarray(data, mode="RGB").save(buf, format="PNG")
        payload = buf.getvalue()
    try:
        with open(path, "wb") as fh:
            fh.write(payload)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def list_images(directory) -> list[Path]:
    """PNG and PPM files in ``directory``, sorted by file name."""
    directory = Path(directory)
    return sorted(
        p for p in directory.iterdir()
        if p.is_file() and p.suffix.lower() in (".png", ".ppm")
    )


def srgb_to_linear(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64)
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def rgb_to_xyz(img) -> np.ndarray:
    return srgb_to_linear(img) @ _RGB_TO_XYZ.T


def rgb_to_lab(img) -> np.ndarray:
    """sRGB -> linear RGB -> XYZ (D65) -> CIELab.

    Returns an ``(H, W, 3)`` array of ``(L, a, b)`` with L in [0, 100].
    """
    img = check_image(img, min_side=1)
    xyz = rgb_to_xyz(img) / _D65_WHITE
    f = np.where(xyz > _LAB_EPS, np.cbrt(xyz), (_LAB_KAPPA * xyz + 16.0) / 116.0)
    fx, fy, fz = f[..., 0], f[..., 1], f[..., 2]
    lab = np.empty_like(xyz)
    lab[..., 0] = np.clip(116.0 * fy - 16.0, 0.0, 100.0)
    lab[..., 1] = 500.0 * (fx - fy)
    lab[..., 2] = 200.0 * (fy - fz)
    return lab


def rgb_to_hsv(img) -> np.ndarray:
    """Hexcone HSV with h in degrees [0, 360), s and v in [0, 1]."""
    img = check_image(img, min_side=1)
    r, g, b = img[..., 0], img[..., 1], img[..., 2]
    v = img.max(axis=-1)
    mn = img.min(axis=-1)
    delta = v - mn
    s = np.divide(delta, v, out=np.zeros_like(v), where=v > 0)

    safe = np.where(delta > 0, delta, 1.0)
    h = np.zeros_like(v)
    is_r = (v == r) & (delta > 0)
    is_g = (v == g) & (delta > 0) & ~is_r
    is_b = (delta > 0) & ~is_r & ~is_g
    h[is_r] = (60.0 * ((g - b) / safe))[is_r] % 360.0
    h[is_g] = (60.0 * ((b - r) / safe) + 120.0)[is_g]
    h[is_b] = (60.0 * ((r - g) / safe) + 240.0)[is_b]
    h = np.where(h >= 360.0, h - 360.0, h)
    return np.stack([h, s, v], axis=-1)


def luminance(img) -> np.ndarray:
    """Per-pixel luma ``0.299 R + 0.587 G + 0.114 B``."""
    img = check_image(img, min_side=1)
    return img[..., 0] * 0.299 + img[..., 1] * 0.587 + img[..., 2] * 0.114


def area_downscale(img: np.ndarray, max_side: int) -> np.ndarray:
    """Box-average ``img`` by an integer factor so its longer side is at most ``max_side``.

    Trailing rows/columns that do not fill a whole box are dropped.
    """
    h, w = img.shape[:2]
    factor = -(-max(h, w) // max_side)
    if factor <= 1:
        return img
    hh, ww = h // factor, w // factor
    cropped = img[:hh * factor, :ww * factor]
    return cropped.reshape(hh, factor, ww, factor, -1).mean(axis=(1, 3))


__all__ = [
    "MIN_SIDE", "ImageFormatError", "check_image", "to_bytes", "from_bytes",
    "load_image", "save_image", "list_images", "rgb_to_lab", "rgb_to_hsv",
    "rgb_to_xyz", "srgb_to_linear", "luminance", "area_downscale",
]
