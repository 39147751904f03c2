"""Image file I/O (PFM, PPM) and the end-of-file payload trailer.

PFM: 3-channel 32-bit float, "PF" magic, scale field sign giving endianness,
rows stored bottom-up. A header comment line ("# colorspace <primaries>
<transfer>") carries the color-space tag; files without one load as linear
BT.709. Writing then reading a buffer is bit-identical.

PPM: binary P6 with maxval 255 (one byte per sample) or 65535 (two bytes,
big-endian per the PNM spec). Loaded buffers are tagged BT.709 sRGB.

Both readers ignore trailing bytes past the declared raster, which is what
makes the payload trailer work: ``embed_payload`` appends a container after
the image data followed by a fixed 20-byte suffix, the 16-byte marker
"GMAP-TRAILER-V1\\0" plus the payload length as a little-endian u32, so any
plain PNM/PFM parser still reads the image, while ``extract_payload`` recovers
the payload byte-for-byte from the end of the file.
"""

from __future__ import annotations

import struct

import numpy as np

from .color import ColorSpace, ImageBuffer, Primaries, Transfer
from .errors import (
    CorruptStreamError,
    DomainError,
    NotEmbeddedError,
    PreconditionError,
)

__all__ = [
    "load_image",
    "save_image",
    "embed_payload",
    "extract_payload",
    "TRAILER_MARKER",
]

TRAILER_MARKER = b"GMAP-TRAILER-V1\x00"

_PRIMARIES_NAMES = {p.value: p for p in Primaries}
_TRANSFER_NAMES = {t.value: t for t in Transfer}


class _HeaderReader:
    """Whitespace/comment-aware tokenizer over a PNM-style binary header."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0
        self.comments: list[str] = []

    def next_token(self) -> str:
        n = len(self.data)
        while self.pos < n:
            ch = self.data[self.pos]
            if ch in b" \t\r\n":
                self.pos += 1
            elif ch == ord("#"):
                end = self.data.find(b"\n", self.pos)
                end = n if end < 0 else end
                self.comments.append(self.data[self.pos + 1 : end].decode("ascii", "replace").strip())
                self.pos = end
            else:
                break
        start = self.pos
        while self.pos < n and self.data[self.pos] not in b" \t\r\n":
            self.pos += 1
        if start == self.pos:
            raise CorruptStreamError("unexpected end of header")
        return self.data[start : self.pos].decode("ascii", "replace")

    def skip_single_whitespace(self) -> None:
        if self.pos >= len(self.data) or self.data[self.pos] not in b" \t\r\n":
            raise CorruptStreamError("missing whitespace before raster data")
        self.pos += 1


def _space_from_comments(comments: list[str]) -> ColorSpace:
    for line in comments:
        parts = line.split()
        if len(parts) == 3 and parts[0] == "colorspace":
            primaries = _PRIMARIES_NAMES.get(parts[1])
            transfer = _TRANSFER_NAMES.get(parts[2])
            if primaries is None or transfer is None:
                raise CorruptStreamError(f"unknown colorspace sidecar {line!r}")
            return ColorSpace(primaries, transfer)
    return ColorSpace(Primaries.BT709, Transfer.LINEAR)


def _parse_dims(reader: _HeaderReader) -> tuple[int, int]:
    try:
        width = int(reader.next_token())
        height = int(reader.next_token())
    except ValueError as exc:
        raise CorruptStreamError("non-integer image dimensions") from exc
    if width < 1 or height < 1:
        raise CorruptStreamError(f"bad dimensions {width}x{height}")
    return width, height


def _load_pfm(data: bytes) -> ImageBuffer:
    reader = _HeaderReader(data)
    magic = reader.next_token()
    if magic != "PF":
        raise CorruptStreamError(f"unsupported PFM magic {magic!r} (only color PF)")
    width, height = _parse_dims(reader)
    try:
        scale = float(reader.next_token())
    except ValueError as exc:
        raise CorruptStreamError("non-numeric PFM scale field") from exc
    if scale == 0.0:
        raise CorruptStreamError("PFM scale field must be non-zero")
    reader.skip_single_whitespace()
    count = width * height * 3
    raster = data[reader.pos : reader.pos + count * 4]
    if len(raster) < count * 4:
        raise CorruptStreamError("truncated PFM raster")
    dtype = "<f4" if scale < 0.0 else ">f4"
    samples = np.frombuffer(raster, dtype=dtype, count=count).astype(np.float32)
    if abs(scale) != 1.0:
        samples = (samples.astype(np.float64) * abs(scale)).astype(np.float32)
    rows = samples.reshape(height, width, 3)
    interleaved = rows[::-1]  # PFM stores rows bottom-up
    return ImageBuffer.from_interleaved(interleaved, _space_from_comments(reader.comments))


def _save_pfm(img: ImageBuffer) -> bytes:
    header = (
        f"PF\n# colorspace {img.space.primaries.value} {img.space.transfer.value}\n"
        f"{img.width} {img.height}\n-1.0\n"
    ).encode("ascii")
    interleaved = img.interleaved()[::-1]
    return header + np.ascontiguousarray(interleaved, dtype="<f4").tobytes()


def _load_ppm(data: bytes) -> ImageBuffer:
    reader = _HeaderReader(data)
    magic = reader.next_token()
    if magic != "P6":
        raise CorruptStreamError(f"unsupported PNM magic {magic!r} (only binary P6)")
    width, height = _parse_dims(reader)
    try:
        maxval = int(reader.next_token())
    except ValueError as exc:
        raise CorruptStreamError("non-integer maxval") from exc
    if maxval not in (255, 65535):
        raise CorruptStreamError(f"unsupported maxval {maxval} (expected 255 or 65535)")
    reader.skip_single_whitespace()
    count = width * height * 3
    if maxval == 255:
        raster = data[reader.pos : reader.pos + count]
        if len(raster) < count:
            raise CorruptStreamError("truncated PPM raster")
        samples = np.frombuffer(raster, dtype=np.uint8, count=count).astype(np.float64)
    else:
        raster = data[reader.pos : reader.pos + count * 2]
        if len(raster) < count * 2:
            raise CorruptStreamError("truncated PPM raster")
        samples = np.frombuffer(raster, dtype=">u2", count=count).astype(np.float64)
    values = (samples / maxval).reshape(height, width, 3).astype(np.float32)
    return ImageBuffer.from_interleaved(values, ColorSpace(Primaries.BT709, Transfer.SRGB))


def _save_ppm(img: ImageBuffer, maxval: int) -> bytes:
    if maxval not in (255, 65535):
        raise PreconditionError(f"maxval must be 255 or 65535, got {maxval}")
    data = img.interleaved().astype(np.float64)
    if data.min() < -1e-6 or data.max() > 1.0 + 1e-6:
        raise DomainError("PPM output requires values in [0, 1]")
    q = np.floor(np.clip(data, 0.0, 1.0) * maxval + 0.5).astype(np.uint32)
    header = f"P6\n{img.width} {img.height}\n{maxval}\n".encode("ascii")
    if maxval == 255:
        return header + q.astype(np.uint8).tobytes()
    return header + q.astype(">u2").tobytes()


def load_image(path: str) -> ImageBuffer:
    """Read a .pfm or .ppm file (format chosen by extension)."""
    with open(path, "rb") as fh:
        data = fh.read()
    lower = str(path).lower()
    if lower.endswith(".pfm"):
        return _load_pfm(data)
    if lower.endswith(".ppm"):
        return _load_ppm(data)
    raise PreconditionError(f"unsupported image extension on {path!r} (use .pfm or .ppm)")


def save_image(img: ImageBuffer, path: str, maxval: int = 255) -> None:
    """Write a .pfm (float) or .ppm (8/16-bit) file, chosen by extension."""
    lower = str(path).lower()
    if lower.endswith(".pfm"):
        payload = _save_pfm(img)
    elif lower.endswith(".ppm"):
        payload = _save_ppm(img, maxval)
    else:
        raise PreconditionError(f"unsupported image extension on {path!r} (use .pfm or .ppm)")
    with open(path, "wb") as fh:
        fh.write(payload)


def _split_trailer(data: bytes) -> tuple[bytes, bytes | None]:
    """Return (file without trailer, payload or None)."""
    if len(data) < len(TRAILER_MARKER) + 4:
        return data, None
    marker_at = len(data) - 20
    if data[marker_at : marker_at + 16] != TRAILER_MARKER:
        return data, None
    (length,) = struct.unpack_from("<I", data, marker_at + 16)
    if length > marker_at:
        raise CorruptStreamError("embedded payload length exceeds file size")
    return data[: marker_at - length], data[marker_at - length : marker_at]


def embed_payload(sdr_path: str, payload: bytes, out_path: str) -> None:
    """Append a payload + trailer to a copy of the image file.

    Any payload already embedded in the source is replaced. The output grows
    by len(payload) + 20 bytes relative to the bare image.
    """
    with open(sdr_path, "rb") as fh:
        data = fh.read()
    base, _ = _split_trailer(data)
    suffix = TRAILER_MARKER + struct.pack("<I", len(payload))
    with open(out_path, "wb") as fh:
        fh.write(base + payload + suffix)


def extract_payload(path: str) -> bytes:
    """Recover the embedded payload, byte-identical to what was embedded."""
    with open(path, "rb") as fh:
        data = fh.read()
    _, payload = _split_trailer(data)
    if payload is None:
        raise NotEmbeddedError(f"no payload trailer found in {path!r}")
    return payload
