import os

import cv2
import numpy as np
import pytest
from PIL import Image

from sigscore.ingest import (
    CorruptImageError,
    image_to_stream,
    load_directory,
    load_image,
    preprocess,
    resize,
    scan_directory,
    to_grayscale,
)
from sigscore.signature import stream_signature
from sigscore.tensor_algebra import ContractError, unit


def save_gray(path, arr):
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.asarray(arr, np.uint8), mode="L").save(path)
    return path


class TestScan:
    def test_empty(self, tmp_path):
        assert scan_directory(tmp_path) == []

    def test_byte_order(self, tmp_path):
        for name in ("b.png", "a.png", "B.png", "c.txt", "d.JPG"):
            (tmp_path / name).write_bytes(b"")
        names = [p.name for p in scan_directory(tmp_path)]
        assert names == ["B.png", "a.png", "b.png", "d.JPG"]

    def test_nested(self, tmp_path):
        for rel in ("z.png", "a/y.png", "a/b/x.png", "c/w.jpeg"):
            (tmp_path / rel).parent.mkdir(parents=True, exist_ok=True)
            (tmp_path / rel).write_bytes(b"")
        rels = [p.relative_to(tmp_path).as_posix() for p in scan_directory(tmp_path)]
        assert rels == ["a/b/x.png", "a/y.png", "c/w.jpeg", "z.png"]

    def test_missing(self, tmp_path):
        with pytest.raises(OSError):
            scan_directory(tmp_path / "nope")


class TestGrayscale:
    def test_white_and_red(self):
        assert to_grayscale(np.ones((2, 2, 3)))[0, 0] == 1.0
        assert to_grayscale(np.array([[[1.0, 0, 0]]]))[0, 0] == pytest.approx(0.299, abs=1e-15)
        assert to_grayscale(np.array([[[0, 0, 1.0]]]))[0, 0] == pytest.approx(0.114, abs=1e-15)

    def test_weights(self, rng):
        p = rng.random((4, 5, 3))
        ref = 0.299 * p[..., 0] + 0.587 * p[..., 1] + 0.114 * p[..., 2]
        np.testing.assert_allclose(to_grayscale(p), ref, atol=1e-15)

    def test_single_channel_untouched(self, rng):
        p = rng.random((3, 3, 1))
        assert to_grayscale(p).tobytes() == p[:, :, 0].tobytes()

    def test_bad_channels(self):
        with pytest.raises(ContractError):
            to_grayscale(np.zeros((2, 2, 4)))


class TestResize:
    def test_checkerboard_centre(self):
        assert resize(np.array([[0.0, 1.0], [1.0, 0.0]]), 1)[0, 0] == 0.5

    def test_identity(self, rng):
        a = rng.random((8, 8))
        np.testing.assert_array_equal(resize(a, 8), a)

    def test_constant_round_trip(self):
        a = np.full((13, 29), 0.375)
        up = resize(a, 64)
        np.testing.assert_array_equal(up, 0.375)
        np.testing.assert_array_equal(resize(up, (13, 29)), a)

    @pytest.mark.parametrize("shape,size", [((100, 100), 64), ((37, 53), 64),
                                            ((64, 64), 32), ((10, 7), 64)])
    def test_matches_opencv_bilinear(self, rng, shape, size):
        a = rng.random(shape)
        ref = cv2.resize(a, (size, size), interpolation=cv2.INTER_LINEAR)
        np.testing.assert_allclose(resize(a, size), ref, rtol=0, atol=1e-12)

    def test_range(self, rng):
        out = resize(rng.random((20, 30)), 64)
        assert out.min() >= 0.0 and out.max() <= 1.0

    def test_bad_target(self):
        with pytest.raises(ContractError):
            resize(np.zeros((4, 4)), 0)


class TestDecode:
    def test_8bit(self, tmp_path):
        path = save_gray(tmp_path / "g.png", [[0, 51], [255, 102]])
        np.testing.assert_array_equal(load_image(path).pixels[:, :, 0], [[0, 0.2], [1, 0.4]])

    def test_16bit(self, tmp_path):
        raw = np.array([[0, 65535], [32768, 1]], np.uint16)
        Image.fromarray(raw).save(tmp_path / "d.png")
        np.testing.assert_array_equal(load_image(tmp_path / "d.png").pixels[:, :, 0],
                                      raw / 65535.0)

    def test_rgb_png(self, tmp_path):
        Image.fromarray(np.full((3, 3, 3), 255, np.uint8), "RGB").save(tmp_path / "w.png")
        rec = load_image(tmp_path / "w.png")
        assert rec.pixels.shape == (3, 3, 3)
        assert preprocess(rec.pixels, 4).min() == 1.0

    def test_corrupt(self, tmp_path):
        bad = tmp_path / "bad.png"
        bad.write_bytes(b"\x89PNG\r\n\x1a\nnot really")
        with pytest.raises(CorruptImageError, match="bad.png"):
            load_image(bad)


class TestStream:
    def test_constant_image_gives_unit(self):
        s = image_to_stream(np.full((4, 4), 0.3))
        assert stream_signature(s, 3).allclose(unit(4, 3), atol=0)

    def test_rows_are_points(self):
        s = image_to_stream(np.array([[0.0, 0.0], [1.0, 1.0]]))
        np.testing.assert_array_equal(s.points, [[0, 0], [1, 1]])

    def test_transpose_equals_column_mode(self, rng):
        img = rng.random((5, 5))
        np.testing.assert_array_equal(image_to_stream(img.T).points,
                                      image_to_stream(img, column_mode=True).points)

    def test_contract(self, rng):
        with pytest.raises(ContractError):
            image_to_stream(rng.random((4, 5)))
        with pytest.raises(ContractError):
            image_to_stream(rng.random((4, 4, 3)))


class TestLoadDirectory:
    @pytest.fixture
    def folder(self, tmp_path, rng):
        for i in range(5):
            save_gray(tmp_path / "set" / f"{i}.png", rng.integers(0, 256, (20, 30)))
        return tmp_path / "set"

    def test_loads_in_scan_order(self, folder):
        s = load_directory(folder, size=8)
        assert len(s) == 5 and s.images.shape == (5, 8, 8)
        assert s.relative_ids() == [f"{i}.png" for i in range(5)]
        assert np.all((s.images >= 0) & (s.images <= 1))

    def test_descriptor_full_resolution(self, folder):
        s = load_directory(folder, size=8)
        raw = np.asarray(Image.open(folder / "3.png"), float) / 255
        assert s.descriptors[3] == pytest.approx(raw.mean(), abs=1e-15)

    def test_threads_and_order_do_not_matter(self, folder, tmp_path, rng):
        a = load_directory(folder, size=8, threads=1)
        b = load_directory(folder, size=8, threads=3)
        assert a.images.tobytes() == b.images.tobytes()
        # same content written in a different creation order
        other = tmp_path / "other"
        for i in reversed(range(5)):
            save_gray(other / f"{i}.png", np.asarray(Image.open(folder / f"{i}.png")))
        c = load_directory(other, size=8)
        assert a.images.tobytes() == c.images.tobytes()

    def test_corrupt_aborts_or_skips(self, folder):
        (folder / "2b.png").write_bytes(b"garbage")
        with pytest.raises(CorruptImageError, match="2b.png"):
            load_directory(folder, size=8)
        s = load_directory(folder, size=8, skip_corrupt=True)
        assert len(s) == 5
        assert [os.path.basename(p) for p in s.skipped] == ["2b.png"]
