import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from skimage import color

from twicemix.imgcore import (ImageFormatError, check_image, load_image, luminance,
                              rgb_to_hsv, rgb_to_lab, save_image, to_bytes)


def write_ppm(path, data, header=None):
    h, w = data.shape[:2]
    header = header if header is not None else f"P6\n{w} {h}\n255\n".encode()
    path.write_bytes(header + data.astype(np.uint8).tobytes())


def test_ppm_all_255_loads_as_ones(tmp_path):
    p = tmp_path / "white.ppm"
    write_ppm(p, np.full((2, 2, 3), 255))
    img = load_image(p, min_side=1)
    assert img.shape == (2, 2, 3)
    assert np.all(img == 1.0)


def test_byte_128_maps_exactly(tmp_path):
    p = tmp_path / "mid.ppm"
    write_ppm(p, np.full((8, 8, 3), 128))
    assert load_image(p)[0, 0, 0] == 128 / 255


def test_ppm_header_comments(tmp_path):
    p = tmp_path / "c.ppm"
    data = np.arange(8 * 9 * 3).reshape(8, 9, 3) % 256
    write_ppm(p, data, b"P6 # comment\n9 8\n# another\n255\n")
    assert np.array_equal(to_bytes(load_image(p)), data)


@pytest.mark.parametrize("suffix", [".png", ".ppm"])
def test_round_trip_is_byte_identical(tmp_path, rng, suffix):
    for i in range(5):
        data = rng.integers(0, 256, size=(8 + i, 11, 3), dtype=np.uint8)
        first = tmp_path / f"a{i}{suffix}"
        second = tmp_path / f"b{i}{suffix}"
        save_image(data / 255.0, first)
        save_image(load_image(first), second)
        assert first.read_bytes() == second.read_bytes()
        assert np.array_equal(to_bytes(load_image(second)), data)


def test_save_quantisation_rule():
    assert to_bytes(np.array([0.0, 1.0, 0.5, 1.2, -0.1])).tolist() == [0, 255, 128, 255, 0]


def test_save_quantisation_error_bound(tmp_path, rng):
    img = rng.random((16, 16, 3))
    p = tmp_path / "q.png"
    save_image(img, p)
    assert np.abs(load_image(p) - img).max() <= 1 / 510 + 1e-15


def test_load_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_image(tmp_path / "missing.png")
    bad = tmp_path / "bad.bmp"
    bad.write_bytes(b"BM....")
    with pytest.raises(ImageFormatError, match="unsupported"):
        load_image(bad)
    p3 = tmp_path / "ascii.ppm"
    p3.write_bytes(b"P3\n8 8\n255\n")
    with pytest.raises(ImageFormatError):
        load_image(p3)
    trunc = tmp_path / "trunc.ppm"
    trunc.write_bytes(b"P6\n8 8\n255\n" + b"\x00" * 10)
    with pytest.raises(ImageFormatError, match="truncated"):
        load_image(trunc)
    hdr = tmp_path / "hdr.ppm"
    hdr.write_bytes(b"P6\n8 x\n255\n")
    with pytest.raises(ImageFormatError, match="header"):
        load_image(hdr)
    small = tmp_path / "small.ppm"
    write_ppm(small, np.zeros((4, 4, 3)))
    with pytest.raises(ImageFormatError, match="minimum"):
        load_image(small)
    png = tmp_path / "corrupt.png"
    png.write_bytes(b"\x89PNG\r\n\x1a\n" + b"garbage")
    with pytest.raises(ImageFormatError):
        load_image(png)


def test_rgba_png_rejected(tmp_path):
    from PIL import Image
    p = tmp_path / "rgba.png"
    Image.new("RGBA", (8, 8)).save(p)
    with pytest.raises(ImageFormatError, match="mode"):
        load_image(p)


def test_save_to_missing_directory(tmp_path):
    with pytest.raises(FileNotFoundError):
        save_image(np.zeros((8, 8, 3)), tmp_path / "nope" / "x.png")


def test_check_image_rejects_bad_input():
    with pytest.raises(ValueError):
        check_image(np.zeros((8, 8)))
    with pytest.raises(ValueError):
        check_image(np.full((8, 8, 3), 1.5))
    with pytest.raises(ValueError):
        check_image(np.full((8, 8, 3), np.nan))
    with pytest.raises(ValueError):
        check_image(np.zeros((7, 8, 3)))


def test_lab_white_and_black():
    white = rgb_to_lab(np.ones((1, 1, 3)))[0, 0]
    assert white[0] == pytest.approx(100.0, abs=1e-9)
    assert abs(white[1]) < 0.01 and abs(white[2]) < 0.01
    assert np.allclose(rgb_to_lab(np.zeros((1, 1, 3))), 0.0)


def test_lab_matches_skimage(rng):
    # skimage uses slightly different sRGB matrix digits; agreement to 1e-2 Lab units.
    red = np.array([[[1.0, 0.0, 0.0]]])
    assert np.allclose(rgb_to_lab(red), color.rgb2lab(red), atol=1e-2)
    img = rng.random((10, 12, 3))
    assert np.allclose(rgb_to_lab(img), color.rgb2lab(img), atol=1e-2)


def test_hsv_examples():
    gray = rgb_to_hsv(np.array([[[0.5, 0.5, 0.5]]]))[0, 0]
    assert gray[1] == 0.0 and gray[2] == 0.5
    assert rgb_to_hsv(np.array([[[1.0, 0.0, 0.0]]]))[0, 0].tolist() == [0.0, 1.0, 1.0]
    h, s, v = rgb_to_hsv(np.array([[[0.2, 0.4, 0.6]]]))[0, 0]
    assert h == pytest.approx(210.0)
    assert s == pytest.approx(2 / 3)
    assert v == pytest.approx(0.6)


def test_hsv_matches_skimage(rng):
    img = rng.random((10, 12, 3))
    ours = rgb_to_hsv(img)
    ref = color.rgb2hsv(img)
    assert np.allclose(ours[..., 0], ref[..., 0] * 360.0, atol=1e-9)
    assert np.allclose(ours[..., 1:], ref[..., 1:], atol=1e-12)


def test_luminance(rng):
    assert np.all(luminance(np.ones((8, 8, 3))) == pytest.approx(1.0))
    assert luminance(np.array([[[1.0, 0.0, 0.0]]]))[0, 0] == pytest.approx(0.299)
    img = rng.random((9, 8, 3))
    lum = luminance(img)
    for y in range(9):
        for x in range(8):
            r, g, b = img[y, x]
            assert lum[y, x] == pytest.approx(0.299 * r + 0.587 * g + 0.114 * b, abs=1e-15)


unit_images = arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6), st.just(3)),
                     elements=st.floats(0.0, 1.0))


@settings(max_examples=200, deadline=None)
@given(unit_images)
def test_conversions_preserve_shape_and_stay_finite(img):
    lab = rgb_to_lab(img)
    hsv = rgb_to_hsv(img)
    assert lab.shape == hsv.shape == img.shape
    assert np.all(np.isfinite(lab)) and np.all(np.isfinite(hsv))
    assert np.all((lab[..., 0] >= 0) & (lab[..., 0] <= 100))
    assert np.all((hsv[..., 0] >= 0) & (hsv[..., 0] < 360))
    assert np.all((hsv[..., 1:] >= 0) & (hsv[..., 1:] <= 1))


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 1.0))
def test_achromatic_pixels(v):
    img = np.full((1, 1, 3), v)
    lab = rgb_to_lab(img)[0, 0]
    assert abs(lab[1]) < 0.01 and abs(lab[2]) < 0.01
    assert rgb_to_hsv(img)[0, 0, 1] == 0.0
