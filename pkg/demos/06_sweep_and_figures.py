"""Drive the sweep runner end to end and point at its artifacts.

Equivalent to ``dwis run standard_sweep.toml --out demo_out/sweep --jobs 2``.
Each sweep cell writes a trajectory CSV; the six SVG figures are rebuilt from
those CSVs, which stay the single source of truth. Expect a few minutes at
the full 5000-sensor scale.
"""

from pathlib import Path

from dwis.cli import main

spec = Path(__file__).with_name("standard_sweep.toml")
out = Path("demo_out") / "sweep"

status = main(["run", str(spec), "--out", str(out), "--jobs", "2"])
print(f"\nexit status {status}")
print("trajectories:", *sorted(p.name for p in (out / "runs").glob("*.csv")), sep="\n  ")
print("figures:", *sorted(p.name for p in (out / "figures").glob("*.svg")), sep="\n  ")
print(f"manifest: {out / 'manifest.json'}")
