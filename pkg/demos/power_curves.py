"""
Minimal power along the signal norm
===================================

Writes the two reproduction curves to ./out and prints their end points.
"""
# %%
import sys
from pathlib import Path

from qcod.cli import reproduce_figure2

out = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
summary = reproduce_figure2(out, seed=0, svg=True)

for tag, c in summary["curves"].items():
    print(f"{tag}: j*={c['testing_index']}  power {c['power_at_zero']:.3f} -> {c['power_at_max']:.3f}")
print("files in", out.resolve())
