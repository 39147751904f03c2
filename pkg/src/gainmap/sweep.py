"""Rate-distortion harness: run every method over a budget grid, tabulate, plot.

One sweep walks image x method x budget, encodes, decodes the payload back
(so the measured quality is what a receiver of those bytes would see), and
scores the reconstruction against the HDR reference. Results land in a
RunManifest: the echoed configuration with its hash, every rate-distortion
point, per-cell wall-clock timings, and the reasons for any failed cells.
Failures are recorded and skipped, never fatal to the run.

CSV output is deterministic byte-for-byte for a fixed seed: rows are sorted,
floats use fixed formats, and the train_seconds column defaults to a zero
placeholder because wall-clock times differ between otherwise identical runs
(``include_timings=True`` substitutes the measured values, giving up the
byte-identity guarantee). Measured timings are always in the manifest.

Plots are self-contained SVG scatter charts, one per metric, bits-per-pixel
on a log axis, one color per method.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .color import ImageBuffer
from .errors import GainmapError, PreconditionError
from .metrics import report
from .mlp import MetaInit
from .pipeline import METHODS, EncodeSettings, decode_payload, encode_pair

__all__ = [
    "SweepBudgets",
    "RdPoint",
    "RunManifest",
    "run_rd_sweep",
    "write_csv",
    "write_svg",
    "CSV_COLUMNS",
]

CSV_COLUMNS = (
    "image_id",
    "method",
    "budget",
    "payload_bytes",
    "bpp",
    "psnr_db",
    "ssim",
    "de00",
    "de_ipt",
    "train_seconds",
)

_DCT_METHODS = ("Gain-DCT", "Gamma-DCT")


@dataclass(frozen=True)
class SweepBudgets:
    """Operating points per method family.

    Transform methods take one point per downsampling scale at a fixed
    quality; network methods take one point per hidden width at fixed
    iteration and batch counts.
    """

    scales: tuple[Fraction, ...] = (Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), Fraction(1, 1))
    widths: tuple[int, ...] = (8, 16, 64, 128)
    quality: int = 80
    iterations: int = 1000
    batch: int = 65536

    def labels(self, method: str) -> list[str]:
        if method in _DCT_METHODS:
            return [f"scale-{s.numerator}/{s.denominator}" for s in self.scales]
        return [f"width-{w}" for w in self.widths]

    def to_config(self) -> dict:
        return {
            "scales": [f"{s.numerator}/{s.denominator}" for s in self.scales],
            "widths": list(self.widths),
            "quality": self.quality,
            "iterations": self.iterations,
            "batch": self.batch,
        }


@dataclass
class RdPoint:
    image_id: str
    method: str
    budget: str
    payload_bytes: int
    width: int
    height: int
    psnr_db: float
    ssim: float
    de00: float
    de_ipt: float
    train_seconds: float

    @property
    def bpp(self) -> float:
        return self.payload_bytes * 8.0 / (self.width * self.height * 3.0)

    def to_dict(self) -> dict:
        d = {c: getattr(self, c) for c in CSV_COLUMNS if c != "bpp"}
        d["bpp"] = self.bpp
        d["width"] = self.width
        d["height"] = self.height
        return d


@dataclass
class RunManifest:
    config: dict
    config_hash: str
    seed: int
    points: list[RdPoint] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    payloads: dict = field(default_factory=dict)  # cell key -> payload bytes

    def to_json(self) -> str:
        doc = {
            "config": self.config,
            "config_hash": self.config_hash,
            "seed": self.seed,
            "points": [p.to_dict() for p in self.points],
            "errors": self.errors,
            "timings": self.timings,
            "payload_sha256": {
                key: hashlib.sha256(blob).hexdigest() for key, blob in self.payloads.items()
            },
        }
        return json.dumps(doc, sort_keys=True, indent=2)


def _config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("ascii")).hexdigest()


def _cell_seed(seed: int, image_index: int, method: str, budget_index: int) -> int:
    # Distinct deterministic stream per cell, all reachable from one seed.
    material = f"{seed}:{image_index}:{method}:{budget_index}".encode("ascii")
    return int.from_bytes(hashlib.sha256(material).digest()[:8], "little") >> 1


def _cell_settings(
    budgets: SweepBudgets,
    method: str,
    budget_index: int,
    cell_seed: int,
    meta_inits: dict | None,
) -> EncodeSettings:
    if method in _DCT_METHODS:
        return EncodeSettings(
            quality=budgets.quality,
            scale=budgets.scales[budget_index],
            seed=cell_seed,
        )
    width = budgets.widths[budget_index]
    init = None
    if meta_inits is not None:
        init = meta_inits.get((width, method))
    return EncodeSettings(
        hidden_width=width,
        iterations=budgets.iterations,
        batch_size=budgets.batch,
        seed=cell_seed,
        meta_init=init,
    )


def run_rd_sweep(
    corpus: list[tuple[ImageBuffer, ImageBuffer]],
    methods: tuple[str, ...] = METHODS,
    budgets: SweepBudgets = SweepBudgets(),
    seed: int = 0,
    meta_inits: dict[tuple[int, str], MetaInit] | None = None,
    extra_config: dict | None = None,
) -> RunManifest:
    """Encode/decode/score every (image, method, budget) cell.

    ``corpus`` holds (HDR PQ BT.2020, SDR sRGB BT.709) pairs. A failed cell
    contributes an entry to ``manifest.errors`` instead of aborting the run.
    Optional ``meta_inits`` maps (hidden_width, method) to a MetaInit used as
    the starting point for that method's trainings. ``extra_config`` is merged
    into the echoed configuration (and its hash) for provenance.
    """
    for m in methods:
        if m not in METHODS:
            raise PreconditionError(f"unknown method {m!r}; expected one of {', '.join(METHODS)}")
    config = {
        "methods": list(methods),
        "budgets": budgets.to_config(),
        "images": len(corpus),
        "meta_init": sorted(f"w{w}:{m}" for w, m in meta_inits) if meta_inits else [],
    }
    if extra_config:
        config.update(extra_config)
    manifest = RunManifest(config=config, config_hash=_config_hash(config), seed=seed)
    total_start = time.perf_counter()
    for i, (hdr, sdr) in enumerate(corpus):
        image_id = f"img{i:03d}"
        for method in methods:
            for b, budget in enumerate(budgets.labels(method)):
                key = f"{image_id}/{method}/{budget}"
                settings = _cell_settings(budgets, method, b, _cell_seed(seed, i, method, b), meta_inits)
                try:
                    result = encode_pair(hdr, sdr, method, settings)
                    recon = decode_payload(sdr, result.payload)
                    scores = report(hdr, recon)
                except GainmapError as exc:
                    manifest.errors.append(
                        {"image_id": image_id, "method": method, "budget": budget, "error": str(exc)}
                    )
                    continue
                manifest.payloads[key] = result.payload
                manifest.timings[key] = result.train_seconds
                manifest.points.append(
                    RdPoint(
                        image_id=image_id,
                        method=method,
                        budget=budget,
                        payload_bytes=len(result.payload),
                        width=hdr.width,
                        height=hdr.height,
                        psnr_db=scores.psnr_db,
                        ssim=scores.ssim,
                        de00=scores.de00_mean,
                        de_ipt=scores.de_ipt_mean,
                        train_seconds=result.train_seconds,
                    )
                )
    manifest.timings["total_seconds"] = time.perf_counter() - total_start
    return manifest


def write_csv(manifest: RunManifest, include_timings: bool = False) -> str:
    """Render the manifest's points as CSV text with a stable row order.

    train_seconds is written as 0.000000 unless ``include_timings`` is set;
    wall-clock values vary run to run and would break byte-identical output.
    """
    out = io.StringIO()
    out.write(",".join(CSV_COLUMNS) + "\n")
    for p in sorted(manifest.points, key=lambda p: (p.image_id, p.method, p.budget)):
        seconds = p.train_seconds if include_timings else 0.0
        out.write(
            f"{p.image_id},{p.method},{p.budget},{p.payload_bytes},{p.bpp:.6f},"
            f"{p.psnr_db:.4f},{p.ssim:.6f},{p.de00:.6f},{p.de_ipt:.6f},{seconds:.6f}\n"
        )
    return out.getvalue()


_SVG_COLORS = {
    "Gain-DCT": "#1f77b4",
    "Gamma-DCT": "#ff7f0e",
    "Gain-MLP": "#2ca02c",
    "Gamma-MLP": "#d62728",
    "Direct-MLP": "#9467bd",
}

_METRIC_ATTRS = {
    "psnr_db": ("psnr_db", "PSNR (dB)"),
    "ssim": ("ssim", "SSIM"),
    "de00": ("de00", "Mean CIEDE2000"),
    "de_ipt": ("de_ipt", "Mean IPT distance x100"),
}


def write_svg(manifest: RunManifest, metric: str) -> str:
    """Scatter plot of one quality metric against bits per pixel (log x)."""
    if metric not in _METRIC_ATTRS:
        raise PreconditionError(f"unknown metric {metric!r}; expected one of {sorted(_METRIC_ATTRS)}")
    attr, label = _METRIC_ATTRS[metric]
    width, height = 640, 480
    left, right, top, bottom = 70, 20, 20, 50
    pw, ph = width - left - right, height - top - bottom

    points = [(p.method, p.bpp, getattr(p, attr)) for p in manifest.points if p.bpp > 0.0]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#888"/>',
    ]
    if points:
        xs = [math.log10(x) for _, x, _ in points]
        ys = [y for _, _, y in points]
        x_lo, x_hi = min(xs), max(xs)
        y_lo, y_hi = min(ys), max(ys)
        if x_hi - x_lo < 1e-9:
            x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
        if y_hi - y_lo < 1e-9:
            y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

        def px(x: float) -> float:
            return left + (x - x_lo) / (x_hi - x_lo) * pw

        def py(y: float) -> float:
            return top + ph - (y - y_lo) / (y_hi - y_lo) * ph

        for tick in range(math.floor(x_lo), math.ceil(x_hi) + 1):
            if x_lo <= tick <= x_hi:
                x = px(tick)
                parts.append(
                    f'<line x1="{x:.2f}" y1="{top + ph}" x2="{x:.2f}" y2="{top + ph + 5}" stroke="#444"/>'
                )
                parts.append(
                    f'<text x="{x:.2f}" y="{top + ph + 20}" font-size="12" text-anchor="middle" '
                    f'fill="#222">1e{tick}</text>'
                )
        for k in range(5):
            y_val = y_lo + (y_hi - y_lo) * k / 4.0
            y = py(y_val)
            parts.append(
                f'<line x1="{left - 5}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="#444"/>'
            )
            parts.append(
                f'<text x="{left - 8}" y="{y + 4:.2f}" font-size="12" text-anchor="end" '
                f'fill="#222">{y_val:.3g}</text>'
            )
        for method, bpp, value in sorted(points):
            color = _SVG_COLORS.get(method, "#000000")
            parts.append(
                f'<circle cx="{px(math.log10(bpp)):.2f}" cy="{py(value):.2f}" r="4" '
                f'fill="{color}" fill-opacity="0.7"/>'
            )
    seen = sorted({m for m, _, _ in points})
    for k, method in enumerate(seen):
        y = top + 14 + 18 * k
        color = _SVG_COLORS.get(method, "#000000")
        parts.append(f'<circle cx="{left + 12}" cy="{y - 4}" r="4" fill="{color}"/>')
        parts.append(f'<text x="{left + 22}" y="{y}" font-size="12" fill="#222">{method}</text>')
    parts.append(
        f'<text x="{left + pw / 2:.0f}" y="{height - 12}" font-size="13" text-anchor="middle" '
        f'fill="#222">bits per pixel (log scale)</text>'
    )
    parts.append(
        f'<text x="18" y="{top + ph / 2:.0f}" font-size="13" text-anchor="middle" fill="#222" '
        f'transform="rotate(-90 18 {top + ph / 2:.0f})">{label}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
