"""End-to-end encode/decode paths tying the codecs to shared-domain images.

Both codecs relate an HDR image to the SDR image a display would show, so
the two must live in the same representation before any residual is formed.
The working domain is PQ-encoded BT.2020: the HDR side arrives there
natively, and the SDR side is mapped by ``sdr_to_working``: decode sRGB,
scale diffuse white to 100 cd/m2 on the PQ absolute scale, rotate into the
BT.2020 gamut, and PQ-encode. The SDR signal is additionally snapped to the
8-bit grid first so the encoder sees exactly what a decoder reading an 8-bit
file will see.

``encode_pair`` dispatches on method name and returns a self-contained
payload; ``decode_payload`` sniffs the container magic, so a decoder needs
only the SDR image and the payload bytes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import baseline, mlp
from .color import ColorSpace, ImageBuffer, Primaries, Transfer, convert_gamut, pq_encode, srgb_decode
from .errors import CorruptStreamError, PreconditionError
from .mlp import MetaInit, OutputMode, TrainConfig
from .residual import (
    DEFAULT_EPSILON,
    ResidualKind,
    ResidualMap,
    compute_gain,
    compute_gamma,
    denormalize_residual,
    normalize_residual,
    reconstruct,
)

__all__ = [
    "METHODS",
    "EncodeSettings",
    "EncodeResult",
    "sdr_to_working",
    "snap_to_8bit",
    "encode_pair",
    "decode_payload",
    "SDR_DIFFUSE_WHITE_LINEAR",
]

# 100 cd/m2 diffuse white on the PQ absolute scale where 1.0 is 10,000 cd/m2.
SDR_DIFFUSE_WHITE_LINEAR = 0.01

METHODS = ("Gain-DCT", "Gamma-DCT", "Gain-MLP", "Gamma-MLP", "Direct-MLP")

_WORKING_SPACE = ColorSpace(Primaries.BT2020, Transfer.PQ)


def snap_to_8bit(img: ImageBuffer) -> ImageBuffer:
    """Quantize encoded values to the 256-level grid an 8-bit file stores."""
    data = img.data.astype(np.float64)
    snapped = np.floor(data * 255.0 + 0.5) / 255.0
    return img.with_data(snapped.astype(np.float32))


def sdr_to_working(sdr: ImageBuffer) -> ImageBuffer:
    """Map a BT.709 sRGB image into the PQ BT.2020 working domain."""
    if sdr.space.transfer is not Transfer.SRGB:
        raise PreconditionError(f"SDR input must be sRGB-encoded, got {sdr.space.transfer.value}")
    snapped = snap_to_8bit(sdr)
    linear = srgb_decode(snapped.data.astype(np.float64)) * SDR_DIFFUSE_WHITE_LINEAR
    linear_img = ImageBuffer.from_planar(
        linear, ColorSpace(sdr.space.primaries, Transfer.LINEAR)
    )
    wide = convert_gamut(linear_img, Primaries.BT2020)
    encoded = pq_encode(np.clip(wide.data.astype(np.float64), 0.0, 1.0))
    return ImageBuffer.from_planar(encoded, _WORKING_SPACE)


def _require_working(hdr: ImageBuffer) -> ImageBuffer:
    if hdr.space.transfer is not Transfer.PQ:
        raise PreconditionError(f"HDR input must be PQ-encoded, got {hdr.space.transfer.value}")
    if hdr.space.primaries is not Primaries.BT2020:
        raise PreconditionError("HDR input must carry BT.2020 primaries")
    return hdr


@dataclass(frozen=True)
class EncodeSettings:
    """Per-method knobs; fields irrelevant to a method are ignored by it."""

    quality: int = 80
    scale: Fraction = Fraction(1, 4)
    epsilon: float = DEFAULT_EPSILON
    hidden_width: int = 16
    iterations: int = 1000
    batch_size: int = 65536
    learning_rate: float = 1e-2
    seed: int = 0
    coordinate_only: bool = False
    meta_init: MetaInit | None = None
    adapter: baseline.ExternalCodecAdapter | None = None

    def codec_config(self) -> baseline.CodecConfig:
        return baseline.CodecConfig(quality=self.quality, scale=self.scale)

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            iterations=self.iterations,
            batch=self.batch_size,
            lr=self.learning_rate,
            seed=self.seed,
        )


@dataclass
class EncodeResult:
    payload: bytes
    train_seconds: float = 0.0
    loss_history: list[float] = field(default_factory=list)


def _mlp_payload(
    hdr: ImageBuffer, sdr_working: ImageBuffer, mode: OutputMode, settings: EncodeSettings
) -> EncodeResult:
    arity = 2 if settings.coordinate_only else 5
    if mode is OutputMode.DIRECT_HDR:
        target: ResidualMap | ImageBuffer = hdr
    else:
        kind = ResidualKind.GAIN if mode is OutputMode.GAIN_MAP else ResidualKind.GAMMA
        compute = compute_gain if kind is ResidualKind.GAIN else compute_gamma
        raw = compute(hdr, sdr_working, epsilon=settings.epsilon)
        target = normalize_residual(raw)
    started = time.perf_counter()
    model = mlp.train(
        sdr_working,
        target,
        config=settings.train_config(),
        init=settings.meta_init,
        hidden_width=settings.hidden_width,
        input_arity=arity,
    )
    elapsed = time.perf_counter() - started
    history = list(model.loss_history) if model.loss_history is not None else []
    return EncodeResult(mlp.serialize(model), elapsed, history)


def _dct_payload(
    hdr: ImageBuffer, sdr_working: ImageBuffer, kind: ResidualKind, settings: EncodeSettings
) -> EncodeResult:
    compute = compute_gain if kind is ResidualKind.GAIN else compute_gamma
    raw = compute(hdr, sdr_working, epsilon=settings.epsilon)
    compressed = baseline.encode_conventional(raw, settings.codec_config(), adapter=settings.adapter)
    return EncodeResult(baseline.serialize_compressed(compressed))


def encode_pair(
    hdr: ImageBuffer, sdr: ImageBuffer, method: str, settings: EncodeSettings | None = None
) -> EncodeResult:
    """Encode the HDR/SDR pair with one of the named methods.

    ``hdr`` must be PQ-encoded; ``sdr`` must be sRGB-encoded BT.709. The
    payload is self-describing and decodes with ``decode_payload``.
    """
    settings = settings or EncodeSettings()
    hdr = _require_working(hdr)
    working = sdr_to_working(sdr)
    if hdr.data.shape != working.data.shape:
        raise PreconditionError(
            f"HDR {hdr.height}x{hdr.width} and SDR {working.height}x{working.width} differ in size"
        )
    if method == "Gain-DCT":
        return _dct_payload(hdr, working, ResidualKind.GAIN, settings)
    if method == "Gamma-DCT":
        return _dct_payload(hdr, working, ResidualKind.GAMMA, settings)
    if method == "Gain-MLP":
        return _mlp_payload(hdr, working, OutputMode.GAIN_MAP, settings)
    if method == "Gamma-MLP":
        return _mlp_payload(hdr, working, OutputMode.GAMMA_MAP, settings)
    if method == "Direct-MLP":
        return _mlp_payload(hdr, working, OutputMode.DIRECT_HDR, settings)
    raise PreconditionError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")


def decode_payload(sdr: ImageBuffer, payload: bytes) -> ImageBuffer:
    """Reconstruct the HDR image from the SDR image plus a payload.

    The container magic selects the decode path; the result is PQ-encoded
    BT.2020 at the SDR image's resolution.
    """
    working = sdr_to_working(sdr)
    if len(payload) < 4:
        raise CorruptStreamError("payload too short to carry a container magic")
    magic = payload[:4]
    if magic == b"GMRC":
        compressed = baseline.deserialize_compressed(payload)
        residual = denormalize_residual(baseline.decode_conventional(compressed))
        if (residual.map.width, residual.map.height) != (working.width, working.height):
            raise PreconditionError(
                "embedded residual dimensions do not match the SDR image"
            )
        return reconstruct(working, residual)
    if magic == b"GMLP":
        model = mlp.deserialize(payload)
        return mlp.predict_map(model, working)
    raise CorruptStreamError(f"unrecognized payload magic {magic!r}")
