"""Command-line front end.

Subcommands:
  gen-corpus   write a synthetic (HDR, SDR) image corpus to a directory
  encode       compress one HDR/SDR pair into a payload file
  decode       reconstruct HDR from an SDR image plus a payload
  metrics      score a reconstruction against a reference
  sweep        rate-distortion sweep over methods and budgets
  meta-init    pre-optimize network starting weights over a synthetic corpus

Every stochastic path derives from the subcommand's single --seed flag, so
repeated invocations with the same arguments produce identical payloads and
CSV files. The sweep's train_seconds CSV column is a placeholder for that
reason; pass --csv-timings to write measured times instead (timings always
appear in manifest.json, which is not covered by the byte-identity guarantee).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import fileio, mlp, sweep as sweep_mod, synth
from .color import ImageBuffer
from .errors import GainmapError
from .metrics import report
from .pipeline import METHODS, EncodeSettings, decode_payload, encode_pair, sdr_to_working
from .residual import DEFAULT_EPSILON, ResidualKind

__all__ = ["main"]


def _parse_scale(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad scale {text!r} (use forms like 1/4)") from exc


def _parse_size(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"bad size {text!r} (use WIDTHxHEIGHT, e.g. 256x256)")
    try:
        w, h = int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad size {text!r}") from exc
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("size components must be positive")
    return w, h


def _corpus_pair_paths(directory: str) -> list[tuple[str, str]]:
    names = sorted(n for n in os.listdir(directory) if n.endswith("_hdr.pfm"))
    pairs = []
    for name in names:
        sdr = os.path.join(directory, name[: -len("_hdr.pfm")] + "_sdr.ppm")
        if not os.path.exists(sdr):
            raise GainmapError(f"missing SDR counterpart for {name}")
        pairs.append((os.path.join(directory, name), sdr))
    if not pairs:
        raise GainmapError(f"no *_hdr.pfm images found in {directory!r}")
    return pairs


def _load_corpus(directory: str) -> list[tuple[ImageBuffer, ImageBuffer]]:
    return [
        (fileio.load_image(h), fileio.load_image(s)) for h, s in _corpus_pair_paths(directory)
    ]


def _cmd_gen_corpus(args: argparse.Namespace) -> int:
    width, height = args.size
    spec = synth.CorpusSpec(
        count=args.count,
        width=width,
        height=height,
        seed=args.seed,
        spectral_beta=args.beta,
        tone_mapper=synth.ToneMapper(args.tone_mapper),
        peak=args.peak,
    )
    os.makedirs(args.out, exist_ok=True)
    files = []
    for i, (hdr, sdr) in enumerate(synth.generate_noise_corpus(spec)):
        hdr_name, sdr_name = f"img{i:03d}_hdr.pfm", f"img{i:03d}_sdr.ppm"
        fileio.save_image(hdr, os.path.join(args.out, hdr_name))
        fileio.save_image(sdr, os.path.join(args.out, sdr_name))
        files.append([hdr_name, sdr_name])
    doc = {
        "count": spec.count,
        "width": spec.width,
        "height": spec.height,
        "seed": spec.seed,
        "spectral_beta": spec.spectral_beta,
        "tone_mapper": spec.tone_mapper.value,
        "peak": spec.peak,
        "files": files,
    }
    with open(os.path.join(args.out, "corpus.json"), "w", encoding="ascii") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"wrote {spec.count} image pairs to {args.out}")
    return 0


def _encode_settings(args: argparse.Namespace) -> EncodeSettings:
    meta = mlp.load_meta_init(args.meta_init) if args.meta_init else None
    return EncodeSettings(
        quality=args.quality,
        scale=args.scale,
        epsilon=args.epsilon,
        hidden_width=args.width,
        iterations=args.iterations,
        batch_size=args.batch,
        learning_rate=args.lr,
        seed=args.seed,
        coordinate_only=args.coordinate_only,
        meta_init=meta,
    )


def _cmd_encode(args: argparse.Namespace) -> int:
    hdr = fileio.load_image(args.hdr)
    sdr = fileio.load_image(args.sdr)
    result = encode_pair(hdr, sdr, args.method, _encode_settings(args))
    with open(args.out, "wb") as fh:
        fh.write(result.payload)
    bpp = len(result.payload) * 8.0 / (hdr.width * hdr.height * 3.0)
    print(f"{args.method}: {len(result.payload)} bytes ({bpp:.4f} bpp)")
    if result.train_seconds > 0.0:
        print(f"training time: {result.train_seconds:.2f} s")
    if args.embed:
        fileio.embed_payload(args.sdr, result.payload, args.embed)
        print(f"embedded payload into {args.embed}")
    return 0


def _cmd_decode(args: argparse.Namespace) -> int:
    sdr = fileio.load_image(args.sdr)
    if args.payload:
        with open(args.payload, "rb") as fh:
            payload = fh.read()
    else:
        payload = fileio.extract_payload(args.sdr)
    recon = decode_payload(sdr, payload)
    fileio.save_image(recon, args.out)
    print(f"wrote reconstruction to {args.out}")
    return 0


def _cmd_metrics(args: argparse.Namespace) -> int:
    ref = fileio.load_image(args.ref)
    test = fileio.load_image(args.test)
    scores = report(ref, test)
    doc = {
        "psnr_db": round(scores.psnr_db, 4),
        "ssim": round(scores.ssim, 6),
        "de00": round(scores.de00_mean, 6),
        "de_ipt": round(scores.de_ipt_mean, 6),
    }
    if args.json:
        with open(args.json, "w", encoding="ascii") as fh:
            json.dump(doc, fh, sort_keys=True, indent=2)
            fh.write("\n")
    print(f"PSNR   {scores.psnr_db:.4f} dB")
    print(f"SSIM   {scores.ssim:.6f}")
    print(f"dE00   {scores.de00_mean:.6f}")
    print(f"dE IPT {scores.de_ipt_mean:.6f}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    if args.corpus:
        corpus = _load_corpus(args.corpus)
        source = {"corpus_dir": os.path.basename(os.path.normpath(args.corpus))}
    else:
        width, height = args.size
        spec = synth.CorpusSpec(
            count=args.count, width=width, height=height, seed=args.seed
        )
        corpus = synth.generate_noise_corpus(spec)
        source = {
            "generated": {
                "count": spec.count,
                "width": spec.width,
                "height": spec.height,
                "tone_mapper": spec.tone_mapper.value,
            }
        }
    methods = tuple(args.methods.split(","))
    budgets = sweep_mod.SweepBudgets(
        scales=tuple(args.scales),
        widths=tuple(args.widths),
        quality=args.quality,
        iterations=args.iterations,
        batch=args.batch,
    )
    manifest = sweep_mod.run_rd_sweep(
        corpus, methods, budgets, seed=args.seed, extra_config={"source": source, "seed": args.seed}
    )
    os.makedirs(args.out, exist_ok=True)
    payload_dir = os.path.join(args.out, "payloads")
    os.makedirs(payload_dir, exist_ok=True)
    for key, blob in manifest.payloads.items():
        name = key.replace("/", "_") + ".bin"
        with open(os.path.join(payload_dir, name), "wb") as fh:
            fh.write(blob)
    csv_text = sweep_mod.write_csv(manifest, include_timings=args.csv_timings)
    with open(os.path.join(args.out, "rd.csv"), "w", encoding="ascii") as fh:
        fh.write(csv_text)
    with open(os.path.join(args.out, "manifest.json"), "w", encoding="ascii") as fh:
        fh.write(manifest.to_json())
        fh.write("\n")
    for metric in ("psnr_db", "ssim", "de00", "de_ipt"):
        with open(os.path.join(args.out, f"rd_{metric}.svg"), "w", encoding="ascii") as fh:
            fh.write(sweep_mod.write_svg(manifest, metric))
    done = len(manifest.points)
    failed = len(manifest.errors)
    print(f"{done} cells scored, {failed} failed; results in {args.out}")
    return 0 if failed == 0 else 1


def _cmd_meta_init(args: argparse.Namespace) -> int:
    width, height = args.size
    spec = synth.CorpusSpec(count=args.count, width=width, height=height, seed=args.seed)
    pairs = [
        (hdr, sdr_to_working(sdr)) for hdr, sdr in synth.generate_noise_corpus(spec)
    ]
    init = mlp.meta_initialize(
        args.width,
        pairs,
        kind=ResidualKind(args.kind),
        iterations=args.iterations,
        seed=args.seed,
        inner_steps=args.inner_steps,
        outer_lr=args.outer_lr,
        inner_batch=args.inner_batch,
    )
    mlp.save_meta_init(init, args.out)
    print(f"wrote width-{args.width} {args.kind} initialization to {args.out}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gainmap",
        description="HDR reconstruction metadata: encode, decode, and benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-corpus", help="write a synthetic HDR/SDR corpus")
    p.add_argument("--count", type=int, default=8)
    p.add_argument("--size", type=_parse_size, default=(256, 256), help="WIDTHxHEIGHT")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta", type=float, default=1.8, help="spectral slope of the noise")
    p.add_argument(
        "--tone-mapper",
        choices=[t.value for t in synth.ToneMapper],
        default=synth.ToneMapper.REINHARD_GLOBAL.value,
    )
    p.add_argument("--peak", type=float, default=0.1, help="linear peak on the PQ scale")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_gen_corpus)

    p = sub.add_parser("encode", help="compress one HDR/SDR pair")
    p.add_argument("--hdr", required=True, help="PQ-encoded BT.2020 reference (.pfm)")
    p.add_argument("--sdr", required=True, help="sRGB BT.709 image (.ppm)")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--out", required=True, help="payload file to write")
    p.add_argument("--quality", type=int, default=80)
    p.add_argument("--scale", type=_parse_scale, default=Fraction(1, 4))
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--width", type=int, default=16, help="hidden layer width")
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--batch", type=int, default=65536)
    p.add_argument("--lr", type=float, default=1e-2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--coordinate-only",
        action="store_true",
        help="2-input network over (x, y) instead of (x, y, r, g, b)",
    )
    p.add_argument("--meta-init", help="starting weights file from the meta-init subcommand")
    p.add_argument("--embed", help="also write an SDR copy with the payload embedded")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="reconstruct HDR from SDR + payload")
    p.add_argument("--sdr", required=True)
    p.add_argument("--payload", help="payload file; omit to read one embedded in the SDR file")
    p.add_argument("--out", required=True, help="reconstruction to write (.pfm)")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("metrics", help="score a reconstruction against a reference")
    p.add_argument("--ref", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--json", help="also write the scores as JSON")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("sweep", help="rate-distortion sweep")
    p.add_argument("--corpus", help="directory from gen-corpus; omit to synthesize in memory")
    p.add_argument("--count", type=int, default=4, help="images to synthesize when no --corpus")
    p.add_argument("--size", type=_parse_size, default=(256, 256))
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument(
        "--scales", type=_parse_scale, nargs="+", default=[Fraction(1, 8), Fraction(1, 4), Fraction(1, 2), Fraction(1, 1)]
    )
    p.add_argument("--widths", type=int, nargs="+", default=[8, 16, 64, 128])
    p.add_argument("--quality", type=int, default=80)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--batch", type=int, default=65536)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument(
        "--csv-timings",
        action="store_true",
        help="write measured train_seconds instead of the deterministic placeholder",
    )
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("meta-init", help="pre-optimize network starting weights")
    p.add_argument("--width", type=int, required=True, choices=list(mlp.SUPPORTED_WIDTHS))
    p.add_argument("--kind", choices=[k.value for k in ResidualKind], default=ResidualKind.GAIN.value)
    p.add_argument("--count", type=int, default=16, help="synthetic corpus size")
    p.add_argument("--size", type=_parse_size, default=(128, 128))
    p.add_argument("--iterations", type=int, default=10000, help="outer loop iterations")
    p.add_argument("--inner-steps", type=int, default=16)
    p.add_argument("--outer-lr", type=float, default=0.1)
    p.add_argument("--inner-batch", type=int, default=16384)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help=".npz file to write")
    p.set_defaults(func=_cmd_meta_init)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GainmapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
