"""Binary image formats and atomic file writes.

RGB images are 8-bit binary PPM (P6), masks binary PGM (P5, {0, 255}), float
maps are little-endian single-channel PFM (scale -1.0). All writers are
byte-deterministic and all readers reject malformed payloads with the byte
offset of the failure. See docs/FORMATS.md for the exact grammars.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

from .errors import FormatError, IoError


def atomic_write_bytes(path: str, payload: bytes) -> None:
    """Write-temp-then-rename so readers never observe partial files."""
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(payload)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise IoError(str(exc), path=path) from exc


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    while pos < len(data) and data[pos:pos + 1].isspace():
        pos += 1
    start = pos
    while pos < len(data) and not data[pos:pos + 1].isspace():
        pos += 1
    if start == pos:
        raise FormatError("unexpected end of header", offset=start)
    return data[start:pos], pos


def _parse_netpbm_header(data: bytes, magic: bytes):
    if data[:2] != magic:
        raise FormatError(f"bad magic, expected {magic.decode()}", offset=0)
    pos = 2
    fields = []
    for _ in range(3):
        token, pos = _read_token(data, pos)
        if not token.isdigit():
            raise FormatError("non-numeric header field", offset=pos - len(token))
        fields.append(int(token))
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise FormatError("missing whitespace after header", offset=pos)
    pos += 1
    w, h, maxval = fields
    if w <= 0 or h <= 0:
        raise FormatError("non-positive image extent", offset=2)
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval}", offset=2)
    return w, h, pos


def write_ppm(path: str, rgb: np.ndarray) -> None:
    """RGB [3, H, W] in [0, 1], quantized to 8 bits."""
    if rgb.ndim != 3 or rgb.shape[0] != 3:
        raise FormatError("write_ppm expects [3, H, W]")
    if rgb.min() < 0 or rgb.max() > 1:
        raise FormatError("RGB values must lie in [0, 1]")
    q = np.round(rgb * 255.0).astype(np.uint8)
    h, w = rgb.shape[1:]
    header = f"P6\n{w} {h}\n255\n".encode()
    atomic_write_bytes(path, header + q.transpose(1, 2, 0).tobytes())


def read_ppm(path: str) -> np.ndarray:
    data = _read_file(path)
    w, h, pos = _parse_netpbm_header(data, b"P6")
    expect = w * h * 3
    body = data[pos:pos + expect]
    if len(body) != expect or len(data) != pos + expect:
        raise FormatError(f"payload length {len(data) - pos}, expected {expect}", offset=pos)
    arr = np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3)
    return arr.transpose(2, 0, 1).astype(np.float64) / 255.0


def write_pgm_mask(path: str, mask: np.ndarray) -> None:
    """Binary mask [H, W]; foreground stored as 255."""
    m = np.asarray(mask)
    if m.ndim != 2:
        raise FormatError("write_pgm_mask expects [H, W]")
    q = np.where(m > 0.5, 255, 0).astype(np.uint8)
    h, w = m.shape
    header = f"P5\n{w} {h}\n255\n".encode()
    atomic_write_bytes(path, header + q.tobytes())


def read_pgm_mask(path: str) -> np.ndarray:
    data = _read_file(path)
    w, h, pos = _parse_netpbm_header(data, b"P5")
    expect = w * h
    body = data[pos:pos + expect]
    if len(body) != expect or len(data) != pos + expect:
        raise FormatError(f"payload length {len(data) - pos}, expected {expect}", offset=pos)
    arr = np.frombuffer(body, dtype=np.uint8).reshape(h, w)
    bad = ~np.isin(arr, (0, 255))
    if bad.any():
        offset = pos + int(np.flatnonzero(bad.reshape(-1))[0])
        raise FormatError("mask value outside {0, 255}", offset=offset)
    return (arr == 255).astype(np.float64)


def write_pfm(path: str, values: np.ndarray) -> None:
    """Single-channel float map, little-endian PFM (scale -1.0, bottom-up rows)."""
    v = np.asarray(values, dtype=np.float32)
    if v.ndim != 2:
        raise FormatError("write_pfm expects [H, W]")
    if not np.isfinite(v).all():
        raise FormatError("PFM payload must be finite")
    h, w = v.shape
    header = f"Pf\n{w} {h}\n-1.0\n".encode()
    atomic_write_bytes(path, header + v[::-1].tobytes())


def read_pfm(path: str) -> np.ndarray:
    data = _read_file(path)
    if data[:2] != b"Pf":
        raise FormatError("bad magic, expected Pf", offset=0)
    pos = 2
    wtok, pos = _read_token(data, pos)
    htok, pos = _read_token(data, pos)
    stok, pos = _read_token(data, pos)
    try:
        w, h = int(wtok), int(htok)
        scale = float(stok)
    except ValueError:
        raise FormatError("malformed PFM header", offset=2) from None
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise FormatError("missing whitespace after header", offset=pos)
    pos += 1
    if scale >= 0:
        raise FormatError("only little-endian PFM (negative scale) is supported", offset=2)
    expect = w * h * 4
    body = data[pos:pos + expect]
    if len(body) != expect or len(data) != pos + expect:
        raise FormatError(f"payload length {len(data) - pos}, expected {expect}", offset=pos)
    arr = np.frombuffer(body, dtype="<f4").reshape(h, w)[::-1]
    if not np.isfinite(arr).all():
        offset = pos + int(np.flatnonzero(~np.isfinite(arr[::-1]).reshape(-1))[0]) * 4
        raise FormatError("non-finite value in PFM payload", offset=offset)
    return arr.astype(np.float64)


def _read_file(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise IoError(str(exc), path=path) from exc
