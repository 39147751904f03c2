"""Color primitives: tagged image buffers, transfer curves, and gamut conversion.

Conventions
-----------
* Pixel data is planar ``float32`` with shape ``(3, height, width)``.
* Every buffer carries exactly one ``ColorSpace`` tag (primaries + transfer).
* Transfer curves and matrix math run in float64 internally and are cast back
  to float32 at the buffer boundary.
* PQ uses the absolute convention: encoded 1.0 corresponds to 10,000 cd/m^2,
  so a linear value of 0.01 is the 100 cd/m^2 SDR reference white.
* Gamut conversion is a bare 3x3 linear-light matrix multiply. Out-of-gamut
  results may be negative; they are reported by ``ImageBuffer.stats`` and are
  never clipped here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PreconditionError, ShapeError

__all__ = [
    "Primaries",
    "Transfer",
    "ColorSpace",
    "ImageBuffer",
    "srgb_encode",
    "srgb_decode",
    "pq_encode",
    "pq_decode",
    "gamma24_encode",
    "gamma24_decode",
    "apply_transfer",
    "rgb_to_xyz_matrix",
    "xyz_to_rgb_matrix",
    "gamut_matrix",
    "convert_gamut",
    "luma_coefficients",
    "D65_WHITE_XY",
]


class Primaries(enum.Enum):
    BT709 = "bt709"
    BT2020 = "bt2020"
    P3D65 = "p3d65"


class Transfer(enum.Enum):
    LINEAR = "linear"
    SRGB = "srgb"
    PQ = "pq"
    GAMMA24 = "gamma24"


@dataclass(frozen=True)
class ColorSpace:
    """Immutable tag pairing a primary set with a transfer curve."""

    primaries: Primaries
    transfer: Transfer


# CIE 1931 xy chromaticities. All three sets share the D65 white point, so
# gamut conversion needs no chromatic adaptation step.
D65_WHITE_XY = (0.3127, 0.3290)

_CHROMATICITIES = {
    Primaries.BT709: ((0.640, 0.330), (0.300, 0.600), (0.150, 0.060)),
    Primaries.BT2020: ((0.708, 0.292), (0.170, 0.797), (0.131, 0.046)),
    Primaries.P3D65: ((0.680, 0.320), (0.265, 0.690), (0.150, 0.060)),
}


@dataclass
class ImageBuffer:
    """Planar float32 RGB raster with a color-space tag.

    ``data`` has shape ``(3, height, width)``. Construction validates shape,
    dtype, and finiteness; values outside [0, 1] are legal (linear HDR light,
    out-of-gamut negatives) and are surfaced via :meth:`stats`.
    """

    width: int
    height: int
    data: np.ndarray
    space: ColorSpace

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ShapeError(f"image dimensions must be positive, got {self.width}x{self.height}")
        if not isinstance(self.data, np.ndarray) or self.data.dtype != np.float32:
            raise ShapeError("image data must be a float32 ndarray")
        if self.data.shape != (3, self.height, self.width):
            raise ShapeError(
                f"data shape {self.data.shape} does not match (3, {self.height}, {self.width})"
            )
        if not np.all(np.isfinite(self.data)):
            raise DomainError("image data contains NaN or Inf samples")

    @classmethod
    def from_planar(cls, data: np.ndarray, space: ColorSpace) -> "ImageBuffer":
        data = np.ascontiguousarray(data, dtype=np.float32)
        if data.ndim != 3 or data.shape[0] != 3:
            raise ShapeError(f"expected (3, h, w) array, got shape {data.shape}")
        return cls(width=data.shape[2], height=data.shape[1], data=data, space=space)

    @classmethod
    def from_interleaved(cls, data: np.ndarray, space: ColorSpace) -> "ImageBuffer":
        data = np.asarray(data)
        if data.ndim != 3 or data.shape[2] != 3:
            raise ShapeError(f"expected (h, w, 3) array, got shape {data.shape}")
        planar = np.ascontiguousarray(np.moveaxis(data, 2, 0), dtype=np.float32)
        return cls(width=data.shape[1], height=data.shape[0], data=planar, space=space)

    def interleaved(self) -> np.ndarray:
        """Return an (h, w, 3) float32 copy."""
        return np.ascontiguousarray(np.moveaxis(self.data, 0, 2))

    def stats(self) -> dict:
        return {
            "min": float(self.data.min()),
            "max": float(self.data.max()),
            "has_negative": bool(self.data.min() < 0.0),
        }

    def with_data(self, data: np.ndarray, space: ColorSpace | None = None) -> "ImageBuffer":
        return ImageBuffer.from_planar(data, self.space if space is None else space)


def _as_f64(values: np.ndarray | float) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("transfer input contains NaN or Inf")
    return arr


def _check_unit_range(arr: np.ndarray, what: str) -> np.ndarray:
    # Tolerate float32 round-off at the boundaries, nothing more.
    if arr.size and (arr.min() < -1e-6 or arr.max() > 1.0 + 1e-6):
        raise DomainError(f"{what} values must lie in [0, 1], got range [{arr.min()}, {arr.max()}]")
    return np.clip(arr, 0.0, 1.0)


# --- sRGB (IEC 61966-2-1 piecewise curve) ---------------------------------

_SRGB_LINEAR_KNEE = 0.0031308
_SRGB_ENCODED_KNEE = 0.04045


def srgb_encode(linear: np.ndarray | float) -> np.ndarray:
    v = _check_unit_range(_as_f64(linear), "linear sRGB")
    return np.where(v <= _SRGB_LINEAR_KNEE, v * 12.92, 1.055 * np.power(v, 1.0 / 2.4) - 0.055)


def srgb_decode(encoded: np.ndarray | float) -> np.ndarray:
    v = _check_unit_range(_as_f64(encoded), "encoded sRGB")
    return np.where(v <= _SRGB_ENCODED_KNEE, v / 12.92, np.power((v + 0.055) / 1.055, 2.4))


# --- PQ (SMPTE ST 2084) ----------------------------------------------------

_PQ_M1 = 2610.0 / 16384.0
_PQ_M2 = 2523.0 / 32.0
_PQ_C1 = 3424.0 / 4096.0
_PQ_C2 = 2413.0 / 128.0
_PQ_C3 = 2392.0 / 128.0


def pq_encode(linear: np.ndarray | float) -> np.ndarray:
    """Linear normalized luminance (1.0 = 10,000 cd/m^2) to PQ signal."""
    v = _check_unit_range(_as_f64(linear), "linear PQ")
    y = np.power(v, _PQ_M1)
    return np.power((_PQ_C1 + _PQ_C2 * y) / (1.0 + _PQ_C3 * y), _PQ_M2)


def pq_decode(encoded: np.ndarray | float) -> np.ndarray:
    v = _check_unit_range(_as_f64(encoded), "encoded PQ")
    p = np.power(v, 1.0 / _PQ_M2)
    num = np.maximum(p - _PQ_C1, 0.0)
    return np.power(num / (_PQ_C2 - _PQ_C3 * p), 1.0 / _PQ_M1)


# --- pure power 2.4 --------------------------------------------------------


def gamma24_encode(linear: np.ndarray | float) -> np.ndarray:
    v = _check_unit_range(_as_f64(linear), "linear gamma-2.4")
    return np.power(v, 1.0 / 2.4)


def gamma24_decode(encoded: np.ndarray | float) -> np.ndarray:
    v = _check_unit_range(_as_f64(encoded), "encoded gamma-2.4")
    return np.power(v, 2.4)


_DECODERS = {
    Transfer.SRGB: srgb_decode,
    Transfer.PQ: pq_decode,
    Transfer.GAMMA24: gamma24_decode,
}
_ENCODERS = {
    Transfer.SRGB: srgb_encode,
    Transfer.PQ: pq_encode,
    Transfer.GAMMA24: gamma24_encode,
}


def apply_transfer(img: ImageBuffer, target: Transfer) -> ImageBuffer:
    """Re-encode ``img`` with a different transfer curve.

    Decodes the current curve to linear, then encodes ``target``. Purely the
    curve math: PQ's absolute-luminance meaning versus display-relative sRGB
    is the caller's bookkeeping (see the 100 cd/m^2 scaling in the pipeline).
    """
    src = img.space.transfer
    if src == target:
        raise PreconditionError(f"buffer already uses transfer {target.value}")
    if src not in _DECODERS and src != Transfer.LINEAR:
        raise PreconditionError(f"unknown source transfer {src!r}")
    if target not in _ENCODERS and target != Transfer.LINEAR:
        raise PreconditionError(f"unknown target transfer {target!r}")

    values = img.data.astype(np.float64)
    if src != Transfer.LINEAR:
        values = _DECODERS[src](values)
    if target != Transfer.LINEAR:
        values = _ENCODERS[target](values)
    return ImageBuffer.from_planar(
        values.astype(np.float32), ColorSpace(img.space.primaries, target)
    )


# --- primaries and gamut ---------------------------------------------------


def _xy_to_xyz(xy: tuple[float, float]) -> np.ndarray:
    x, y = xy
    return np.array([x / y, 1.0, (1.0 - x - y) / y], dtype=np.float64)


def rgb_to_xyz_matrix(primaries: Primaries) -> np.ndarray:
    """3x3 float64 matrix taking linear RGB to CIE XYZ (D65 white, Y=1)."""
    r, g, b = (_xy_to_xyz(c) for c in _CHROMATICITIES[primaries])
    white = _xy_to_xyz(D65_WHITE_XY)
    cols = np.stack([r, g, b], axis=1)
    scale = np.linalg.solve(cols, white)
    return cols * scale


def xyz_to_rgb_matrix(primaries: Primaries) -> np.ndarray:
    return np.linalg.inv(rgb_to_xyz_matrix(primaries))


def gamut_matrix(src: Primaries, dst: Primaries) -> np.ndarray:
    """3x3 float64 matrix converting linear RGB between primary sets."""
    return xyz_to_rgb_matrix(dst) @ rgb_to_xyz_matrix(src)


def luma_coefficients(primaries: Primaries) -> np.ndarray:
    """Per-channel contribution of linear RGB to luminance Y (the matrix Y row)."""
    return rgb_to_xyz_matrix(primaries)[1].copy()


def convert_gamut(img: ImageBuffer, target: Primaries) -> ImageBuffer:
    """Matrix-convert a linear-light buffer to different primaries.

    Requires ``img.space.transfer == Transfer.LINEAR``; results are not
    clipped, so out-of-gamut colors come back negative (see ``stats``).
    """
    if img.space.transfer != Transfer.LINEAR:
        raise PreconditionError("gamut conversion requires a linear-light buffer")
    if img.space.primaries == target:
        return img.with_data(img.data.copy())
    m = gamut_matrix(img.space.primaries, target)
    flat = img.data.reshape(3, -1).astype(np.float64)
    out = (m @ flat).reshape(img.data.shape)
    return ImageBuffer.from_planar(out.astype(np.float32), ColorSpace(target, Transfer.LINEAR))
