"""Conventional compressed residual codec: downsample + 8-bit + block DCT.

The encode path mirrors what shipping gain-map containers do to the residual:

1. normalize the residual to [0, 1] (log2 bounds go to metadata),
2. bicubic-downsample by a rational scale (Catmull-Rom, a = -0.5),
3. quantize to 8 bits,
4. 8x8 orthonormal DCT-II per block with JPEG-style quality-scaled
   quantization, zigzag scan, and a run-length/varint entropy code.

Decode inverts each stage and bicubic-upsamples back to the original
dimensions, returning a normalized residual map plus its metadata, ready for
denormalization and reconstruction.

The serialized container ("GMRC") carries kind, quality, scale, original
dimensions, normalization bounds, and the offset, followed by the entropy-coded
payload. All multi-byte fields are little-endian.

An :class:`ExternalCodecAdapter` can replace stage 4 with callbacks into a real
image codec; containers written with an adapter must be decoded with the same
adapter.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .color import ColorSpace, ImageBuffer, Primaries, Transfer
from .errors import CorruptStreamError, DomainError, PreconditionError, ShapeError
from .residual import (
    ResidualKind,
    ResidualMap,
    ResidualMetadata,
    normalize_residual,
)

__all__ = [
    "CodecConfig",
    "CompressedResidual",
    "ExternalCodecAdapter",
    "resize_bicubic",
    "resize_bicubic_to",
    "quantize8",
    "dequantize8",
    "encode_conventional",
    "decode_conventional",
    "serialize_compressed",
    "deserialize_compressed",
    "JPEG_LUMA_TABLE",
    "ZIGZAG",
    "dct_matrix",
    "quality_scaled_table",
]


# --- bicubic resampling ----------------------------------------------------


def _catmull_rom(t: np.ndarray) -> np.ndarray:
    a = -0.5
    t = np.abs(t)
    near = (a + 2.0) * t**3 - (a + 3.0) * t**2 + 1.0
    far = a * t**3 - 5.0 * a * t**2 + 8.0 * a * t - 4.0 * a
    return np.where(t <= 1.0, near, np.where(t < 2.0, far, 0.0))


def _resample_matrix(src_n: int, dst_n: int) -> np.ndarray:
    """(dst_n, src_n) float64 row-stochastic Catmull-Rom weights, edge-clamped."""
    out = np.zeros((dst_n, src_n), dtype=np.float64)
    ratio = src_n / dst_n
    centers = (np.arange(dst_n, dtype=np.float64) + 0.5) * ratio - 0.5
    base = np.floor(centers).astype(np.int64)
    for k in range(-1, 3):
        idx = np.clip(base + k, 0, src_n - 1)
        w = _catmull_rom(centers - (base + k))
        np.add.at(out, (np.arange(dst_n), idx), w)
    return out


_RESIZE_SCALES = (
    Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), Fraction(1),
    Fraction(2), Fraction(4), Fraction(8),
)


def resize_bicubic_to(img: ImageBuffer, width: int, height: int) -> ImageBuffer:
    """Separable Catmull-Rom resample to exactly (width, height)."""
    if width < 1 or height < 1:
        raise ShapeError(f"target dimensions must be positive, got {width}x{height}")
    if (width, height) == (img.width, img.height):
        return img.with_data(img.data.copy())
    rv = _resample_matrix(img.height, height)
    rh = _resample_matrix(img.width, width)
    out = np.empty((3, height, width), dtype=np.float64)
    for c in range(3):
        out[c] = rv @ img.data[c].astype(np.float64) @ rh.T
    return ImageBuffer.from_planar(out.astype(np.float32), img.space)


def resize_bicubic(img: ImageBuffer, scale: Fraction) -> ImageBuffer:
    """Resample by a power-of-two rational scale; dimensions round up (ceil)."""
    scale = Fraction(scale)
    if scale not in _RESIZE_SCALES:
        raise PreconditionError(
            f"scale must be one of {{1/8, 1/4, 1/2, 1, 2, 4, 8}}, got {scale}"
        )
    w, h = _scaled_dims(img.width, img.height, scale)
    return resize_bicubic_to(img, w, h)


def _scaled_dims(width: int, height: int, scale: Fraction) -> tuple[int, int]:
    w = -((-width * scale.numerator) // scale.denominator)  # ceil division
    h = -((-height * scale.numerator) // scale.denominator)
    return int(w), int(h)


# --- 8-bit quantization ----------------------------------------------------


def quantize8(values: np.ndarray) -> np.ndarray:
    """[0, 1] float -> uint8 with round-half-up: floor(v * 255 + 0.5)."""
    v = np.asarray(values, dtype=np.float64)
    if v.size and (v.min() < -1e-6 or v.max() > 1.0 + 1e-6):
        raise DomainError(
            f"quantize8 input must lie in [0, 1], got range [{v.min()}, {v.max()}]"
        )
    v = np.clip(v, 0.0, 1.0)
    return np.floor(v * 255.0 + 0.5).clip(0, 255).astype(np.uint8)


def dequantize8(raster: np.ndarray) -> np.ndarray:
    return raster.astype(np.float64) / 255.0


# --- 8x8 DCT codec ---------------------------------------------------------

# Standard JPEG luminance quantization table, applied to all three residual
# channels (they are not chroma).
JPEG_LUMA_TABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)

# Row-major flat indices of the 8x8 zigzag scan.
ZIGZAG = np.array(
    [
        0, 1, 8, 16, 9, 2, 3, 10,
        17, 24, 32, 25, 18, 11, 4, 5,
        12, 19, 26, 33, 40, 48, 41, 34,
        27, 20, 13, 6, 7, 14, 21, 28,
        35, 42, 49, 56, 57, 50, 43, 36,
        29, 22, 15, 23, 30, 37, 44, 51,
        58, 59, 52, 45, 38, 31, 39, 46,
        53, 60, 61, 54, 47, 55, 62, 63,
    ],
    dtype=np.int64,
)

_EOB = 64  # end-of-block token (also legal as an empty block)
_ZRUN = 65  # run of consecutive all-zero blocks; varint count follows


def dct_matrix() -> np.ndarray:
    """Orthonormal 8x8 DCT-II basis M; block transform is M @ B @ M.T."""
    n = np.arange(8, dtype=np.float64)
    k = n[:, None]
    m = np.cos((2.0 * n[None, :] + 1.0) * k * np.pi / 16.0)
    m[0] *= np.sqrt(1.0 / 8.0)
    m[1:] *= np.sqrt(2.0 / 8.0)
    return m


def quality_scaled_table(quality: int) -> np.ndarray:
    """JPEG table scaled by the libjpeg quality rule, clamped to [1, 255]."""
    if not 1 <= quality <= 100:
        raise PreconditionError(f"quality must be in [1, 100], got {quality}")
    scale = 5000.0 / quality if quality < 50 else 200.0 - 2.0 * quality
    tbl = np.floor((JPEG_LUMA_TABLE * scale + 50.0) / 100.0)
    return np.clip(tbl, 1.0, 255.0)


def _to_blocks(plane: np.ndarray) -> tuple[np.ndarray, int, int]:
    """Edge-pad a 2-D array to block multiples and return (n, 8, 8) blocks."""
    h, w = plane.shape
    bh, bw = -(-h // 8), -(-w // 8)
    pad = np.pad(plane, ((0, bh * 8 - h), (0, bw * 8 - w)), mode="edge")
    blocks = pad.reshape(bh, 8, bw, 8).transpose(0, 2, 1, 3).reshape(-1, 8, 8)
    return blocks, bh, bw


def _from_blocks(blocks: np.ndarray, bh: int, bw: int, h: int, w: int) -> np.ndarray:
    full = blocks.reshape(bh, bw, 8, 8).transpose(0, 2, 1, 3).reshape(bh * 8, bw * 8)
    return full[:h, :w]


def _varint_append(buf: bytearray, value: int) -> None:
    if value < 0:
        raise ValueError("varint cannot encode negatives")
    while True:
        b = value & 0x7F
        value >>= 7
        if value:
            buf.append(b | 0x80)
        else:
            buf.append(b)
            return


def _svarint_append(buf: bytearray, value: int) -> None:
    _varint_append(buf, (value << 1) if value >= 0 else ((-value << 1) - 1))


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def varint(self) -> int:
        shift = 0
        value = 0
        while True:
            if self.pos >= len(self.data):
                raise CorruptStreamError("truncated varint in payload")
            b = self.data[self.pos]
            self.pos += 1
            value |= (b & 0x7F) << shift
            if not b & 0x80:
                return value
            shift += 7
            if shift > 63:
                raise CorruptStreamError("varint overflow in payload")

    def svarint(self) -> int:
        u = self.varint()
        return (u >> 1) if not u & 1 else -((u + 1) >> 1)


def _dct_encode_plane(plane_u8: np.ndarray, table: np.ndarray, out: bytearray) -> None:
    blocks, _, _ = _to_blocks(plane_u8.astype(np.float64) - 128.0)
    m = dct_matrix()
    coefs = np.einsum("ij,njk,lk->nil", m, blocks, m)
    q = coefs / table
    levels = (np.sign(q) * np.floor(np.abs(q) + 0.5)).astype(np.int64)
    scan = levels.reshape(-1, 64)[:, ZIGZAG]

    zero_run = 0
    for row in scan:
        nz = np.flatnonzero(row)
        if nz.size == 0:
            zero_run += 1
            continue
        if zero_run:
            _varint_append(out, _ZRUN)
            _varint_append(out, zero_run)
            zero_run = 0
        prev = -1
        for i in nz:
            _varint_append(out, int(i - prev - 1))
            _svarint_append(out, int(row[i]))
            prev = int(i)
        _varint_append(out, _EOB)
    if zero_run:
        _varint_append(out, _ZRUN)
        _varint_append(out, zero_run)


def _dct_decode_plane(reader: _Reader, table: np.ndarray, h: int, w: int) -> np.ndarray:
    bh, bw = -(-h // 8), -(-w // 8)
    n_blocks = bh * bw
    scan = np.zeros((n_blocks, 64), dtype=np.float64)
    bi = 0
    while bi < n_blocks:
        tok = reader.varint()
        if tok == _ZRUN:
            run = reader.varint()
            if run < 1 or bi + run > n_blocks:
                raise CorruptStreamError("zero-block run exceeds plane")
            bi += run
            continue
        pos = -1
        while tok != _EOB:
            if tok > 63:
                raise CorruptStreamError(f"bad run token {tok}")
            pos += tok + 1
            if pos > 63:
                raise CorruptStreamError("coefficient index beyond block")
            scan[bi, pos] = reader.svarint()
            tok = reader.varint()
        bi += 1
    levels = np.zeros((n_blocks, 64), dtype=np.float64)
    levels[:, ZIGZAG] = scan
    coefs = levels.reshape(-1, 8, 8) * table
    m = dct_matrix()
    blocks = np.einsum("ji,njk,kl->nil", m, coefs, m) + 128.0
    plane = _from_blocks(blocks, bh, bw, h, w)
    return np.clip(np.floor(plane + 0.5), 0, 255).astype(np.uint8)


# --- codec configuration and container --------------------------------------


_CODEC_SCALES = (Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), Fraction(1))


@dataclass(frozen=True)
class CodecConfig:
    """Rate controls for the conventional path. Channels are always coded 4:4:4."""

    quality: int = 80
    scale: Fraction = field(default_factory=lambda: Fraction(1, 4))

    def __post_init__(self) -> None:
        if not 1 <= self.quality <= 100:
            raise PreconditionError(f"quality must be in [1, 100], got {self.quality}")
        if Fraction(self.scale) not in _CODEC_SCALES:
            raise PreconditionError(
                f"scale must be one of {{1/8, 1/4, 1/2, 1}}, got {self.scale!r}"
            )

    @classmethod
    def recommended(cls, quality: int = 80, scale: Fraction = Fraction(1, 4)) -> "CodecConfig":
        """Deployment-profile config: quality capped at 90."""
        if quality > 90:
            raise PreconditionError(
                f"the recommended pipeline caps quality at 90, got {quality}"
            )
        return cls(quality=quality, scale=scale)


@dataclass
class ExternalCodecAdapter:
    """Byte-stream callbacks that replace the built-in DCT entropy stage.

    ``encode(raster, quality) -> bytes`` receives the (3, h, w) uint8 raster;
    ``decode(payload, width, height) -> raster`` must return the same shape.
    """

    encode: Callable[[np.ndarray, int], bytes]
    decode: Callable[[bytes, int, int], np.ndarray]


@dataclass
class CompressedResidual:
    """Entropy-coded residual plus everything needed to reverse it."""

    config: CodecConfig
    width: int  # original residual dimensions, pre-downsample
    height: int
    meta: ResidualMetadata
    payload: bytes

    def coded_dims(self) -> tuple[int, int]:
        return _scaled_dims(self.width, self.height, self.config.scale)


def encode_conventional(
    r: ResidualMap,
    config: CodecConfig | None = None,
    adapter: ExternalCodecAdapter | None = None,
) -> CompressedResidual:
    """Compress a residual map (raw maps are normalized first)."""
    config = config or CodecConfig()
    if not r.normalized:
        r = normalize_residual(r)
    cw, ch = _scaled_dims(r.map.width, r.map.height, config.scale)
    small = resize_bicubic_to(r.map, cw, ch)
    # Catmull-Rom lobes can overshoot [0, 1] slightly; clip before quantizing.
    raster = quantize8(np.clip(small.data, 0.0, 1.0))
    if adapter is not None:
        payload = adapter.encode(raster, config.quality)
    else:
        table = quality_scaled_table(config.quality)
        out = bytearray()
        for c in range(3):
            _dct_encode_plane(raster[c], table, out)
        payload = bytes(out)
    return CompressedResidual(
        config=config,
        width=r.map.width,
        height=r.map.height,
        meta=r.meta,
        payload=payload,
    )


def decode_conventional(
    c: CompressedResidual,
    adapter: ExternalCodecAdapter | None = None,
) -> ResidualMap:
    """Decode back to a normalized residual map at the original dimensions."""
    cw, ch = c.coded_dims()
    if adapter is not None:
        raster = np.asarray(adapter.decode(c.payload, cw, ch), dtype=np.uint8)
        if raster.shape != (3, ch, cw):
            raise CorruptStreamError(
                f"adapter returned shape {raster.shape}, expected {(3, ch, cw)}"
            )
    else:
        table = quality_scaled_table(c.config.quality)
        reader = _Reader(c.payload)
        planes = [_dct_decode_plane(reader, table, ch, cw) for _ in range(3)]
        if reader.pos != len(c.payload):
            raise CorruptStreamError("trailing bytes after final plane")
        raster = np.stack(planes)
    space = ColorSpace(Primaries.BT2020, Transfer.LINEAR)
    small = ImageBuffer.from_planar(dequantize8(raster).astype(np.float32), space)
    full = resize_bicubic_to(small, c.width, c.height)
    clipped = ImageBuffer.from_planar(np.clip(full.data, 0.0, 1.0), space)
    return ResidualMap(clipped, c.meta.kind, c.meta, normalized=True)


# --- GMRC container ---------------------------------------------------------

_GMRC_MAGIC = b"GMRC"
_GMRC_VERSION = 1
_GMRC_HEAD = struct.Struct("<4sBBBBBII")
_GMRC_META = struct.Struct("<6ffI")

_KIND_CODE = {ResidualKind.GAIN: 0, ResidualKind.GAMMA: 1}
_CODE_KIND = {v: k for k, v in _KIND_CODE.items()}


def serialize_compressed(c: CompressedResidual) -> bytes:
    head = _GMRC_HEAD.pack(
        _GMRC_MAGIC,
        _GMRC_VERSION,
        _KIND_CODE[c.meta.kind],
        c.config.quality,
        c.config.scale.numerator,
        c.config.scale.denominator,
        c.width,
        c.height,
    )
    bounds = [float(v) for v in c.meta.log2_min] + [float(v) for v in c.meta.log2_max]
    meta = _GMRC_META.pack(*bounds, float(c.meta.epsilon), len(c.payload))
    return head + meta + c.payload


def deserialize_compressed(data: bytes) -> CompressedResidual:
    if len(data) < _GMRC_HEAD.size + _GMRC_META.size:
        raise CorruptStreamError("container shorter than fixed header")
    magic, version, kind_code, quality, num, den, width, height = _GMRC_HEAD.unpack_from(data, 0)
    if magic != _GMRC_MAGIC:
        raise CorruptStreamError(f"bad magic {magic!r}")
    if version != _GMRC_VERSION:
        raise CorruptStreamError(f"unsupported container version {version}")
    if kind_code not in _CODE_KIND:
        raise CorruptStreamError(f"unknown residual kind code {kind_code}")
    if den == 0:
        raise CorruptStreamError("scale denominator is zero")
    *bounds, epsilon, payload_len = _GMRC_META.unpack_from(data, _GMRC_HEAD.size)
    start = _GMRC_HEAD.size + _GMRC_META.size
    if len(data) != start + payload_len:
        raise CorruptStreamError(
            f"payload length field {payload_len} does not match container size"
        )
    lo = np.array(bounds[:3], dtype=np.float64)
    hi = np.array(bounds[3:], dtype=np.float64)
    meta = ResidualMetadata(
        kind=_CODE_KIND[kind_code],
        epsilon=float(epsilon),
        log2_min=lo,
        log2_max=hi,
        degenerate=(hi - lo) < 1e-9,
    )
    meta.validate()
    try:
        config = CodecConfig(quality=quality, scale=Fraction(num, den))
    except PreconditionError as exc:
        raise CorruptStreamError(str(exc)) from exc
    if width < 1 or height < 1:
        raise CorruptStreamError("container dimensions must be positive")
    return CompressedResidual(
        config=config,
        width=width,
        height=height,
        meta=meta,
        payload=data[start:],
    )
