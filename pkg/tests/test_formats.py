"""On-disk format round trips and error reporting."""

import numpy as np
import pytest

from depthclick.errors import FormatError, IoError
from depthclick.formats import (read_pfm, read_pgm_mask, read_ppm, write_pfm,
                                write_pgm_mask, write_ppm)


def test_ppm_roundtrip_byte_identical(tmp_path):
    rng = np.random.default_rng(0)
    rgb = rng.random((3, 5, 7))
    p1 = tmp_path / "a.ppm"
    p2 = tmp_path / "b.ppm"
    write_ppm(str(p1), rgb)
    back = read_ppm(str(p1))
    write_ppm(str(p2), back)
    assert p1.read_bytes() == p2.read_bytes()
    assert np.abs(back - rgb).max() <= 0.5 / 255 + 1e-12


def test_pgm_mask_roundtrip_and_one_pixel():
    import tempfile, os
    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "m.pgm")
        write_pgm_mask(path, np.array([[1.0]]))
        assert np.array_equal(read_pgm_mask(path), [[1.0]])
        write_pgm_mask(path, np.array([[0.0]]))
        assert np.array_equal(read_pgm_mask(path), [[0.0]])


def test_pgm_mask_rejects_gray_values(tmp_path):
    path = tmp_path / "m.pgm"
    path.write_bytes(b"P5\n2 1\n255\n" + bytes([0, 127]))
    with pytest.raises(FormatError) as err:
        read_pgm_mask(str(path))
    assert err.value.offset is not None


def test_pfm_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(1)
    depth = rng.uniform(0.1, 30, size=(6, 4)).astype(np.float32).astype(np.float64)
    path = tmp_path / "d.pfm"
    write_pfm(str(path), depth)
    assert np.array_equal(read_pfm(str(path)), depth)
    # rewriting the re-read map is byte-identical
    path2 = tmp_path / "d2.pfm"
    write_pfm(str(path2), read_pfm(str(path)))
    assert path.read_bytes() == path2.read_bytes()


def test_pfm_rejects_nan_on_read(tmp_path):
    path = tmp_path / "bad.pfm"
    body = np.array([[1.0, np.nan]], dtype="<f4").tobytes()
    path.write_bytes(b"Pf\n2 1\n-1.0\n" + body)
    with pytest.raises(FormatError):
        read_pfm(str(path))


def test_pfm_rejects_nan_on_write(tmp_path):
    with pytest.raises(FormatError):
        write_pfm(str(tmp_path / "x.pfm"), np.array([[np.nan]]))


def test_malformed_headers_carry_offsets(tmp_path):
    cases = [
        (b"P7\n2 2\n255\n" + b"\0" * 12, read_ppm),
        (b"P6\n2 x\n255\n" + b"\0" * 12, read_ppm),
        (b"P6\n2 2\n255\n" + b"\0" * 5, read_ppm),  # truncated payload
        (b"Pf\n2 1\n1.0\n" + b"\0" * 8, read_pfm),  # big-endian scale
    ]
    for blob, reader in cases:
        path = tmp_path / "bad.bin"
        path.write_bytes(blob)
        with pytest.raises(FormatError):
            reader(str(path))


def test_missing_file_is_io_error(tmp_path):
    with pytest.raises(IoError):
        read_ppm(str(tmp_path / "absent.ppm"))


def test_ppm_out_of_range_rejected(tmp_path):
    with pytest.raises(FormatError):
        write_ppm(str(tmp_path / "x.ppm"), np.full((3, 2, 2), 1.5))
