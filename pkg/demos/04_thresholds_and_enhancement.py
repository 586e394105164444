"""
Steering threshold and enhancement
==================================

Find the smallest p3 for which the output state violates the witness, check
it against the concurrence-1/2 crossing, then scan the enhancement of the
steering measure along p1 = p3, theta1 = theta3.
"""
import csv
import io

from steerlab import cli
from steerlab.optimize import OptimizerConfig, grid_sweep

report = cli.threshold_report(0.1, 0.1, 1e-4, OptimizerConfig(multistarts=16))
for key, value in report.items():
    print(f"{key:>18}: {value:.6f}")

rows = grid_sweep(cli.enhancement_grid(5), cli.sweep_row)
text = cli.render_csv(rows)
for row in csv.DictReader(io.StringIO(text)):
    print(f"p={float(row['p1']):.2f} theta={float(row['theta1']):.3f} "
          f"sgen1={float(row['sgen1']):.4f} sgen4={float(row['sgen4']):.4f}")
