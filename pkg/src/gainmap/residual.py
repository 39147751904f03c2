"""Multiplicative (gain) and exponential (gamma) HDR residual maps.

Both residual kinds relate an HDR image H and an SDR rendition S that have
already been aligned into the same color space (same primaries, same transfer;
in the benchmark pipeline that space is BT.2020 PQ, with the SDR leg encoded
at its 100 cd/m^2 peak so values stay well below 1):

* gain:  f = (H + eps) / (S + eps),   reconstruction H' = (S + eps) * f - eps
* gamma: f = ln(H + eps) / ln(S + eps), reconstruction H' = (S + eps)^f - eps

The offset eps (default 1/64) keeps both forms finite at black. Residual maps
are stored per channel and normalized to [0, 1] via per-channel log2 bounds so
they can be quantized or regressed; the bounds travel in ``ResidualMetadata``.

Gamma-specific guards: the log denominator is kept away from zero by clamping
S + eps to at most 1 - 1e-4, and the resulting exponents are clamped to
[1/16, 16]. Inside that clamp range the gamma round trip is exact up to float
precision; pixels that hit the clamp trade exactness for stability.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .color import ColorSpace, ImageBuffer, Transfer
from .errors import DomainError, MetadataError, PreconditionError, ShapeError, StateError

__all__ = [
    "ResidualKind",
    "ResidualMetadata",
    "ResidualMap",
    "DEFAULT_EPSILON",
    "GAMMA_CLAMP",
    "compute_gain",
    "compute_gamma",
    "normalize_residual",
    "denormalize_residual",
    "reconstruct",
]

DEFAULT_EPSILON = 1.0 / 64.0

# Exponent clamp for the gamma form and the matching denominator guard.
GAMMA_CLAMP = (1.0 / 16.0, 16.0)
_LOG_DENOM_CEILING = 1.0 - 1e-4

# Channels whose log2 span falls below this are constant for normalization
# purposes and are stored as the flat value 0.5 plus a degenerate flag.
_DEGENERATE_SPAN = 1e-9


class ResidualKind(enum.Enum):
    GAIN = "gain"
    GAMMA = "gamma"


@dataclass
class ResidualMetadata:
    """Everything a decoder needs to undo normalization and reconstruct."""

    kind: ResidualKind
    epsilon: float
    log2_min: np.ndarray  # (3,) float64
    log2_max: np.ndarray  # (3,) float64
    degenerate: np.ndarray  # (3,) bool

    def validate(self) -> None:
        if not (np.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise MetadataError(f"epsilon must be finite and positive, got {self.epsilon}")
        for name, arr in (("log2_min", self.log2_min), ("log2_max", self.log2_max)):
            a = np.asarray(arr, dtype=np.float64)
            if a.shape != (3,):
                raise ShapeError(f"{name} must have shape (3,)")
            if not np.all(np.isfinite(a)):
                raise MetadataError(f"{name} contains non-finite values")
        if np.any(np.asarray(self.log2_max) < np.asarray(self.log2_min)):
            raise MetadataError("log2_max < log2_min")


@dataclass
class ResidualMap:
    """A per-channel residual raster plus its metadata and normalization state.

    ``normalized`` distinguishes raw residual values (directly usable by
    :func:`reconstruct`) from their [0, 1] normalized form (what codecs store).
    """

    map: ImageBuffer
    kind: ResidualKind
    meta: ResidualMetadata
    normalized: bool

    def __post_init__(self) -> None:
        self.meta.validate()
        if self.meta.kind != self.kind:
            raise MetadataError("metadata kind does not match residual kind")


def _check_pair(hdr: ImageBuffer, sdr: ImageBuffer) -> None:
    if (hdr.width, hdr.height) != (sdr.width, sdr.height):
        raise ShapeError(
            f"dimension mismatch: {hdr.width}x{hdr.height} vs {sdr.width}x{sdr.height}"
        )
    if hdr.space != sdr.space:
        raise PreconditionError(
            f"inputs must share one color space, got {hdr.space} vs {sdr.space}"
        )
    if hdr.data.min() < 0.0 or sdr.data.min() < 0.0:
        raise DomainError("residual inputs must be non-negative")


def _check_epsilon(epsilon: float) -> None:
    if not (np.isfinite(epsilon) and epsilon > 0.0):
        raise DomainError(f"epsilon must be finite and positive, got {epsilon}")


def _bounds(values: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    logs = np.log2(values)
    lo = logs.min(axis=(1, 2))
    hi = logs.max(axis=(1, 2))
    degenerate = (hi - lo) < _DEGENERATE_SPAN
    return lo, hi, degenerate


def _residual_space(source: ColorSpace) -> ColorSpace:
    # Residual values are unitless scalars, not colors; tag them linear.
    return ColorSpace(source.primaries, Transfer.LINEAR)


def compute_gain(hdr: ImageBuffer, sdr: ImageBuffer,
                 epsilon: float = DEFAULT_EPSILON) -> ResidualMap:
    """Raw multiplicative residual (H + eps) / (S + eps), one value per channel."""
    _check_pair(hdr, sdr)
    _check_epsilon(epsilon)
    h = hdr.data.astype(np.float64)
    s = sdr.data.astype(np.float64)
    f = (h + epsilon) / (s + epsilon)
    lo, hi, degenerate = _bounds(f)
    meta = ResidualMetadata(ResidualKind.GAIN, float(epsilon), lo, hi, degenerate)
    buf = ImageBuffer.from_planar(f.astype(np.float32), _residual_space(hdr.space))
    return ResidualMap(buf, ResidualKind.GAIN, meta, normalized=False)


def compute_gamma(hdr: ImageBuffer, sdr: ImageBuffer,
                  epsilon: float = DEFAULT_EPSILON) -> ResidualMap:
    """Raw exponential residual ln(H + eps) / ln(S + eps), clamped to [1/16, 16]."""
    _check_pair(hdr, sdr)
    _check_epsilon(epsilon)
    h = hdr.data.astype(np.float64)
    s = sdr.data.astype(np.float64)
    num = np.log(h + epsilon)
    den = np.log(np.minimum(s + epsilon, _LOG_DENOM_CEILING))
    f = np.clip(num / den, GAMMA_CLAMP[0], GAMMA_CLAMP[1])
    lo, hi, degenerate = _bounds(f)
    meta = ResidualMetadata(ResidualKind.GAMMA, float(epsilon), lo, hi, degenerate)
    buf = ImageBuffer.from_planar(f.astype(np.float32), _residual_space(hdr.space))
    return ResidualMap(buf, ResidualKind.GAMMA, meta, normalized=False)


def normalize_residual(r: ResidualMap) -> ResidualMap:
    """Map a raw residual to [0, 1] per channel via its log2 range.

    Bounds are recomputed from the data at call time and written into fresh
    metadata. Channels with no spread (span < 1e-9 in log2) normalize to a
    flat 0.5 and set their degenerate flag.
    """
    if r.normalized:
        raise StateError("residual is already normalized")
    values = r.map.data.astype(np.float64)
    if values.min() <= 0.0:
        raise DomainError("raw residual values must be positive for log2 normalization")
    logs = np.log2(values)
    lo, hi, degenerate = _bounds(values)
    span = hi - lo
    out = np.empty_like(logs)
    for c in range(3):
        if degenerate[c]:
            out[c] = 0.5
        else:
            out[c] = (logs[c] - lo[c]) / span[c]
    out = np.clip(out, 0.0, 1.0)
    meta = ResidualMetadata(r.kind, r.meta.epsilon, lo, hi, degenerate)
    buf = ImageBuffer.from_planar(out.astype(np.float32), r.map.space)
    return ResidualMap(buf, r.kind, meta, normalized=True)


def denormalize_residual(r: ResidualMap) -> ResidualMap:
    """Invert :func:`normalize_residual` using the metadata bounds."""
    if not r.normalized:
        raise StateError("residual is not normalized")
    n = r.map.data.astype(np.float64)
    if n.min() < -1e-6 or n.max() > 1.0 + 1e-6:
        raise DomainError("normalized residual values must lie in [0, 1]")
    n = np.clip(n, 0.0, 1.0)
    lo = np.asarray(r.meta.log2_min, dtype=np.float64)
    hi = np.asarray(r.meta.log2_max, dtype=np.float64)
    out = np.empty_like(n)
    for c in range(3):
        if r.meta.degenerate[c]:
            out[c] = np.exp2(lo[c])
        else:
            out[c] = np.exp2(n[c] * (hi[c] - lo[c]) + lo[c])
    buf = ImageBuffer.from_planar(out.astype(np.float32), r.map.space)
    return ResidualMap(buf, r.kind, r.meta, normalized=False)


def reconstruct(sdr: ImageBuffer, r: ResidualMap) -> ImageBuffer:
    """Apply a raw residual to the aligned SDR image, recovering HDR values.

    Gain multiplies, gamma exponentiates; both subtract the offset afterwards
    and clamp the result to [0, 1] (the encoded-signal range of the pipeline).
    """
    if r.normalized:
        raise StateError("residual must be denormalized before reconstruction")
    if (sdr.width, sdr.height) != (r.map.width, r.map.height):
        raise ShapeError(
            f"dimension mismatch: SDR {sdr.width}x{sdr.height} vs "
            f"residual {r.map.width}x{r.map.height}"
        )
    eps = r.meta.epsilon
    s = sdr.data.astype(np.float64)
    f = r.map.data.astype(np.float64)
    if r.kind == ResidualKind.GAIN:
        out = (s + eps) * f - eps
    else:
        out = np.power(s + eps, f) - eps
    out = np.clip(out, 0.0, 1.0)
    return ImageBuffer.from_planar(out.astype(np.float32), sdr.space)
