"""Small rate-distortion sweep: every method over a budget grid, CSV + SVG out.

Sweeps two synthetic images over two operating points per method family and
writes the result table, the run manifest, and one scatter plot per metric
into demos/output/. A few minutes on one core; shrink sizes to go faster.
"""

import os
from fractions import Fraction

from gainmap.pipeline import METHODS
from gainmap.sweep import SweepBudgets, run_rd_sweep, write_csv, write_svg
from gainmap.synth import CorpusSpec, generate_noise_corpus

corpus = generate_noise_corpus(CorpusSpec(count=2, width=128, height=128, seed=11))
budgets = SweepBudgets(
    scales=(Fraction(1, 4), Fraction(1, 1)),
    widths=(8, 16),
    quality=80,
    iterations=400,
    batch=16384,
)

manifest = run_rd_sweep(corpus, methods=METHODS, budgets=budgets, seed=0)

out_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "output")
os.makedirs(out_dir, exist_ok=True)
csv_text = write_csv(manifest)
with open(os.path.join(out_dir, "rd.csv"), "w") as fh:
    fh.write(csv_text)
with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
    fh.write(manifest.to_json() + "\n")
for metric in ("psnr_db", "ssim", "de00", "de_ipt"):
    with open(os.path.join(out_dir, f"rd_{metric}.svg"), "w") as fh:
        fh.write(write_svg(manifest, metric))

print(csv_text)
print(f"{len(manifest.points)} cells scored, {len(manifest.errors)} failed")
print(f"artifacts in {out_dir}")
