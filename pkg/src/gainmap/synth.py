"""Synthetic HDR/SDR corpus: chromatic noise with natural-image statistics.

Each image starts as three opponent-channel noise fields with amplitude
spectra proportional to 1/f^(beta/2) (power slope -beta, default beta 1.8).
The achromatic field keeps full bandwidth; the two chromatic fields are
low-passed at half Nyquist, mimicking the reduced chromatic acuity of natural
scenes. The chromatic directions are built orthogonal to the BT.2020 luma
vector, so image luminance carries exactly the achromatic field's spectrum.

The combined RGB field is affine-mapped into linear BT.2020 [0, peak] (peak
0.1 = 1,000 cd/m^2 on the PQ scale). The HDR half of a pair is that field
PQ-encoded; the SDR half is tone-mapped (Reinhard global by default), gamut-
mapped to BT.709, sRGB-encoded, and snapped to the 8-bit grid, the same
footing as an SDR image stored in an 8-bit file.

Generation is deterministic: image i of seed s uses the counter-based stream
keyed by (s, i), independent of corpus size.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .baseline import dequantize8, quantize8
from .color import (
    ColorSpace,
    ImageBuffer,
    Primaries,
    Transfer,
    convert_gamut,
    luma_coefficients,
    pq_encode,
    srgb_encode,
)
from .errors import PreconditionError

__all__ = [
    "ToneMapper",
    "CorpusSpec",
    "generate_noise_corpus",
    "tone_map",
    "noise_field_linear",
]

# Chromatic fields get less energy than the achromatic field, as in natural
# opponent-channel statistics.
_CHROMA_GAIN = 0.35


class ToneMapper(enum.Enum):
    REINHARD_GLOBAL = "reinhard-global"
    DRAGO_LOG = "drago-log"


@dataclass(frozen=True)
class CorpusSpec:
    count: int
    width: int
    height: int
    seed: int = 0
    spectral_beta: float = 1.8
    tone_mapper: ToneMapper = ToneMapper.REINHARD_GLOBAL
    gamut: Primaries = Primaries.BT2020
    peak: float = 0.1  # linear ceiling on the PQ scale; 0.1 = 1,000 cd/m^2

    def __post_init__(self) -> None:
        if self.count < 0 or self.width < 1 or self.height < 1:
            raise PreconditionError("count must be >= 0 and dimensions positive")
        if self.gamut != Primaries.BT2020:
            raise PreconditionError("corpus generation is defined over BT.2020")
        if not 0.0 < self.peak <= 1.0:
            raise PreconditionError(f"peak must be in (0, 1], got {self.peak}")
        if self.spectral_beta <= 0.0:
            raise PreconditionError("spectral_beta must be positive")


def _spectrum_filter(height: int, width: int, beta: float) -> np.ndarray:
    fy = np.fft.fftfreq(height)[:, None]
    fx = np.fft.fftfreq(width)[None, :]
    f = np.hypot(fy, fx)
    with np.errstate(divide="ignore"):
        amp = np.where(f > 0.0, f ** (-beta / 2.0), 0.0)
    return amp


def _chroma_lowpass(height: int, width: int) -> np.ndarray:
    fy = np.fft.fftfreq(height)[:, None]
    fx = np.fft.fftfreq(width)[None, :]
    # Half of the 0.5 cycles/sample Nyquist limit.
    return (np.hypot(fy, fx) <= 0.25).astype(np.float64)


def _shaped_noise(rng: np.random.Generator, amp: np.ndarray) -> np.ndarray:
    white = rng.standard_normal(amp.shape)
    shaped = np.fft.ifft2(np.fft.fft2(white) * amp).real
    std = shaped.std()
    return shaped / std if std > 0.0 else shaped


def _opponent_basis() -> np.ndarray:
    """Rows: achromatic direction, two zero-luminance chromatic directions."""
    luma = luma_coefficients(Primaries.BT2020)
    achro = np.ones(3) / np.sqrt(3.0)
    c1 = np.array([1.0, -luma[0] / luma[1], 0.0])
    c1 /= np.linalg.norm(c1)
    c2 = np.cross(luma, c1)
    c2 /= np.linalg.norm(c2)
    return np.stack([achro, c1, c2])


def noise_field_linear(
    height: int, width: int, rng: np.random.Generator, beta: float, peak: float
) -> np.ndarray:
    """One linear BT.2020 noise image, shape (3, height, width), range [0, peak]."""
    amp = _spectrum_filter(height, width, beta)
    lowpass = _chroma_lowpass(height, width)
    fields = np.stack(
        [
            _shaped_noise(rng, amp),
            _CHROMA_GAIN * _shaped_noise(rng, amp * lowpass),
            _CHROMA_GAIN * _shaped_noise(rng, amp * lowpass),
        ]
    )
    basis = _opponent_basis()
    rgb = np.einsum("ck,khw->chw", basis.T, fields)
    lo, hi = rgb.min(), rgb.max()
    if hi - lo < 1e-12:
        return np.full_like(rgb, peak / 2.0)
    return (rgb - lo) / (hi - lo) * peak


def tone_map(
    hdr_linear: ImageBuffer, method: ToneMapper, params: dict | None = None
) -> ImageBuffer:
    """Compress linear HDR luminance into SDR range; output linear BT.709 [0, 1].

    ReinhardGlobal: s = a * L / geomean(L), display luminance s / (1 + s) with
    key a = 0.18 and the geometric mean taken over L + 1e-6 (defined even for
    black frames). DragoLog: adaptive logarithmic mapping with bias b = 0.85
    and L_dmax = 100, exact 1.0 at the frame's peak luminance. Both rescale
    RGB by the luminance ratio and clamp to [0, 1] after gamut conversion.
    """
    if hdr_linear.space.transfer != Transfer.LINEAR:
        raise PreconditionError("tone mapping requires a linear-light input")
    params = params or {}
    rgb = hdr_linear.data.astype(np.float64)
    luma = luma_coefficients(hdr_linear.space.primaries)
    lum = np.einsum("c,chw->hw", luma, rgb)
    lum = np.maximum(lum, 0.0)

    if method == ToneMapper.REINHARD_GLOBAL:
        key = float(params.get("key", 0.18))
        geomean = float(np.exp(np.mean(np.log(lum + 1e-6))))
        scaled = key * lum / geomean
        display = scaled / (1.0 + scaled)
    elif method == ToneMapper.DRAGO_LOG:
        bias = float(params.get("bias", 0.85))
        l_dmax = float(params.get("l_dmax", 100.0))
        l_max = float(lum.max())
        if l_max <= 0.0:
            display = np.zeros_like(lum)
        else:
            exponent = np.log(bias) / np.log(0.5)
            denom = np.log10(1.0 + l_max) * np.log(
                2.0 + 8.0 * (lum / l_max) ** exponent
            )
            display = 0.01 * l_dmax * np.log(1.0 + lum) / denom
    else:
        raise PreconditionError(f"unknown tone mapper {method!r}")

    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(lum > 0.0, display / lum, 0.0)
    mapped = np.clip(rgb * ratio, 0.0, 1.0).astype(np.float32)
    mapped_buf = ImageBuffer.from_planar(
        mapped, ColorSpace(hdr_linear.space.primaries, Transfer.LINEAR)
    )
    out = convert_gamut(mapped_buf, Primaries.BT709)
    return ImageBuffer.from_planar(np.clip(out.data, 0.0, 1.0), out.space)


def generate_noise_corpus(spec: CorpusSpec) -> list[tuple[ImageBuffer, ImageBuffer]]:
    """Deterministic list of (HDR BT.2020 PQ, SDR BT.709 sRGB 8-bit-snapped) pairs."""
    pairs = []
    for i in range(spec.count):
        rng = np.random.Generator(np.random.Philox(key=[spec.seed, i]))
        linear = noise_field_linear(spec.height, spec.width, rng, spec.spectral_beta, spec.peak)
        linear_buf = ImageBuffer.from_planar(
            linear.astype(np.float32), ColorSpace(Primaries.BT2020, Transfer.LINEAR)
        )
        hdr = ImageBuffer.from_planar(
            pq_encode(linear).astype(np.float32), ColorSpace(Primaries.BT2020, Transfer.PQ)
        )
        sdr_linear = tone_map(linear_buf, spec.tone_mapper)
        sdr_encoded = srgb_encode(sdr_linear.data)
        sdr_8bit = dequantize8(quantize8(sdr_encoded)).astype(np.float32)
        sdr = ImageBuffer.from_planar(sdr_8bit, ColorSpace(Primaries.BT709, Transfer.SRGB))
        pairs.append((hdr, sdr))
    return pairs
