"""Reconstruction quality metrics: PSNR, SSIM, CIEDE2000, and IPT color error.

PSNR and SSIM operate directly on the buffers' encoded values in [0, 1] (for
the benchmark these are PQ-encoded HDR images, so the scores are computed in
the images' native encoding). The two color-difference metrics decode PQ to
linear light internally, convert to CIE XYZ, and anchor diffuse white at the
1,000 cd/m^2 mastering peak (PQ linear 0.1), i.e. that luminance maps to
L* = 100 / IPT white.

All math runs in float64. Each metric is symmetric in its two arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .color import ImageBuffer, Transfer, pq_decode, rgb_to_xyz_matrix
from .errors import DomainError, PreconditionError, ShapeError

__all__ = [
    "MetricReport",
    "PSNR_CAP_DB",
    "psnr",
    "ssim",
    "delta_e00",
    "delta_e_ipt",
    "report",
]

PSNR_CAP_DB = 99.0

# Diffuse-white anchor: 1,000 cd/m^2 on the 10,000 cd/m^2 PQ scale.
_WHITE_LINEAR = 0.1

_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03

# Hunt-Pointer-Estevez cone responses and the Ebner-Fairchild IPT transform.
_M_HPE = np.array(
    [
        [0.4002, 0.7075, -0.0807],
        [-0.2280, 1.1500, 0.0612],
        [0.0, 0.0, 0.9184],
    ],
    dtype=np.float64,
)
_M_IPT = np.array(
    [
        [0.4000, 0.4000, 0.2000],
        [4.4550, -4.8510, 0.3960],
        [0.8056, 0.3572, -1.1628],
    ],
    dtype=np.float64,
)


@dataclass
class MetricReport:
    psnr_db: float
    ssim: float
    de00_mean: float
    de_ipt_mean: float


def _check_pair(a: ImageBuffer, b: ImageBuffer) -> None:
    if (a.width, a.height) != (b.width, b.height):
        raise ShapeError(
            f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}"
        )


def _check_unit(img: ImageBuffer) -> None:
    if img.data.min() < -1e-6 or img.data.max() > 1.0 + 1e-6:
        raise DomainError("metric inputs must hold encoded values in [0, 1]")


def psnr(a: ImageBuffer, b: ImageBuffer) -> float:
    """10 log10(1 / MSE) over all samples, capped at the 99 dB sentinel."""
    _check_pair(a, b)
    _check_unit(a)
    _check_unit(b)
    diff = a.data.astype(np.float64) - b.data.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(10.0 * np.log10(1.0 / mse), PSNR_CAP_DB)


def _gaussian_kernel() -> np.ndarray:
    r = (_SSIM_WINDOW - 1) // 2
    x = np.arange(-r, r + 1, dtype=np.float64)
    k = np.exp(-(x**2) / (2.0 * _SSIM_SIGMA**2))
    return k / k.sum()


def _filter_valid(plane: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Separable correlation keeping only fully-covered (valid) positions."""
    r = kernel.size
    h, w = plane.shape
    tmp = np.zeros((h, w - r + 1), dtype=np.float64)
    for i in range(r):
        tmp += kernel[i] * plane[:, i : i + w - r + 1]
    out = np.zeros((h - r + 1, w - r + 1), dtype=np.float64)
    for i in range(r):
        out += kernel[i] * tmp[i : i + h - r + 1, :]
    return out


def ssim(a: ImageBuffer, b: ImageBuffer) -> float:
    """Mean structural similarity, Gaussian-windowed, per channel then averaged.

    11x11 window, sigma 1.5, K1=0.01, K2=0.03, dynamic range 1.0; window
    statistics are plain weighted moments (no sample-covariance correction),
    and only fully-covered window positions contribute to the mean.
    """
    _check_pair(a, b)
    _check_unit(a)
    _check_unit(b)
    if min(a.width, a.height) < _SSIM_WINDOW:
        raise PreconditionError(
            f"image must be at least {_SSIM_WINDOW} pixels on each side"
        )
    kernel = _gaussian_kernel()
    c1 = (_SSIM_K1 * 1.0) ** 2
    c2 = (_SSIM_K2 * 1.0) ** 2
    scores = []
    for c in range(3):
        x = a.data[c].astype(np.float64)
        y = b.data[c].astype(np.float64)
        ux = _filter_valid(x, kernel)
        uy = _filter_valid(y, kernel)
        uxx = _filter_valid(x * x, kernel)
        uyy = _filter_valid(y * y, kernel)
        uxy = _filter_valid(x * y, kernel)
        vx = uxx - ux * ux
        vy = uyy - uy * uy
        vxy = uxy - ux * uy
        s = ((2.0 * ux * uy + c1) * (2.0 * vxy + c2)) / (
            (ux * ux + uy * uy + c1) * (vx + vy + c2)
        )
        scores.append(s.mean())
    return float(np.mean(scores))


def _to_relative_xyz(img: ImageBuffer) -> np.ndarray:
    """PQ buffer -> (3, n) XYZ scaled so the 1,000-nit white has Y = 1."""
    if img.space.transfer != Transfer.PQ:
        raise PreconditionError("color-difference metrics require PQ-encoded inputs")
    linear = pq_decode(img.data.astype(np.float64))
    m = rgb_to_xyz_matrix(img.space.primaries)
    return (m @ linear.reshape(3, -1)) / _WHITE_LINEAR


def _white_xyz(img: ImageBuffer) -> np.ndarray:
    m = rgb_to_xyz_matrix(img.space.primaries)
    return m @ np.ones(3)


def _lab_f(t: np.ndarray) -> np.ndarray:
    delta = 6.0 / 29.0
    return np.where(t > delta**3, np.cbrt(t), t / (3.0 * delta**2) + 4.0 / 29.0)


def _to_lab(img: ImageBuffer) -> np.ndarray:
    xyz = _to_relative_xyz(img)
    white = _white_xyz(img)
    fx = _lab_f(xyz[0] / white[0])
    fy = _lab_f(xyz[1] / white[1])
    fz = _lab_f(xyz[2] / white[2])
    l = 116.0 * fy - 16.0
    a = 500.0 * (fx - fy)
    b = 200.0 * (fy - fz)
    return np.stack([l, a, b])


def _ciede2000(lab1: np.ndarray, lab2: np.ndarray) -> np.ndarray:
    """Vectorized CIEDE2000 with the chroma compensation and hue rotation terms."""
    l1, a1, b1 = lab1
    l2, a2, b2 = lab2
    c1 = np.hypot(a1, b1)
    c2 = np.hypot(a2, b2)
    cbar = 0.5 * (c1 + c2)
    g = 0.5 * (1.0 - np.sqrt(cbar**7 / (cbar**7 + 25.0**7)))
    a1p = (1.0 + g) * a1
    a2p = (1.0 + g) * a2
    c1p = np.hypot(a1p, b1)
    c2p = np.hypot(a2p, b2)

    h1p = np.degrees(np.arctan2(b1, a1p)) % 360.0
    h1p = np.where((b1 == 0.0) & (a1p == 0.0), 0.0, h1p)
    h2p = np.degrees(np.arctan2(b2, a2p)) % 360.0
    h2p = np.where((b2 == 0.0) & (a2p == 0.0), 0.0, h2p)

    dlp = l2 - l1
    dcp = c2p - c1p
    zero_chroma = (c1p * c2p) == 0.0
    hdiff = h2p - h1p
    dhp = np.where(
        zero_chroma,
        0.0,
        np.where(
            np.abs(hdiff) <= 180.0, hdiff, np.where(hdiff > 180.0, hdiff - 360.0, hdiff + 360.0)
        ),
    )
    dbig_hp = 2.0 * np.sqrt(c1p * c2p) * np.sin(np.radians(dhp) / 2.0)

    lbar = 0.5 * (l1 + l2)
    cbarp = 0.5 * (c1p + c2p)
    hsum = h1p + h2p
    habs = np.abs(h1p - h2p)
    hbar = np.where(
        zero_chroma,
        hsum,
        np.where(
            habs <= 180.0,
            0.5 * hsum,
            np.where(hsum < 360.0, 0.5 * (hsum + 360.0), 0.5 * (hsum - 360.0)),
        ),
    )

    t = (
        1.0
        - 0.17 * np.cos(np.radians(hbar - 30.0))
        + 0.24 * np.cos(np.radians(2.0 * hbar))
        + 0.32 * np.cos(np.radians(3.0 * hbar + 6.0))
        - 0.20 * np.cos(np.radians(4.0 * hbar - 63.0))
    )
    dtheta = 30.0 * np.exp(-(((hbar - 275.0) / 25.0) ** 2))
    rc = 2.0 * np.sqrt(cbarp**7 / (cbarp**7 + 25.0**7))
    sl = 1.0 + (0.015 * (lbar - 50.0) ** 2) / np.sqrt(20.0 + (lbar - 50.0) ** 2)
    sc = 1.0 + 0.045 * cbarp
    sh = 1.0 + 0.015 * cbarp * t
    rt = -np.sin(np.radians(2.0 * dtheta)) * rc

    return np.sqrt(
        (dlp / sl) ** 2
        + (dcp / sc) ** 2
        + (dbig_hp / sh) ** 2
        + rt * (dcp / sc) * (dbig_hp / sh)
    )


def delta_e00(a: ImageBuffer, b: ImageBuffer) -> float:
    """Mean CIEDE2000 over all pixels (unit weighting factors)."""
    _check_pair(a, b)
    return float(np.mean(_ciede2000(_to_lab(a), _to_lab(b))))


def _to_ipt(img: ImageBuffer) -> np.ndarray:
    xyz = _to_relative_xyz(img)
    white = _white_xyz(img)
    lms = _M_HPE @ xyz
    # Von Kries step: divide out the white's cone response so neutral colors
    # land exactly on the I axis (P = T = 0).
    lms /= (_M_HPE @ white)[:, None]
    lms_p = np.sign(lms) * np.abs(lms) ** 0.43
    return _M_IPT @ lms_p


def delta_e_ipt(a: ImageBuffer, b: ImageBuffer) -> float:
    """Mean Euclidean distance in IPT, scaled x100 to the usual I-axis range."""
    _check_pair(a, b)
    diff = _to_ipt(a) - _to_ipt(b)
    return float(np.mean(100.0 * np.sqrt(np.sum(diff * diff, axis=0))))


def report(a: ImageBuffer, b: ImageBuffer) -> MetricReport:
    return MetricReport(
        psnr_db=psnr(a, b),
        ssim=ssim(a, b),
        de00_mean=delta_e00(a, b),
        de_ipt_mean=delta_e_ipt(a, b),
    )
