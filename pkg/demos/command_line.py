"""
Running selection from a CSV file
=================================

The ``gfiselect`` command reads a CSV whose first column is the response and
writes a JSON result. The same entry point is callable from Python.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from gfiselect.cli import main, write_csv

rng = np.random.default_rng(8)
X = rng.standard_normal((50, 6)) * [1.0, 4.0, 0.5, 1.0, 2.0, 1.0] + 3.0
y = 1.0 + 2.0 * X[:, 0] - 0.5 * X[:, 1] + rng.standard_normal(50)

work = Path(tempfile.mkdtemp())
write_csv(work / "data.csv", y, X)

#%%
# Equivalent shell call:
# ``gfiselect --mode select --input data.csv --output result.json --steps 2000 --burn-in 500 --p-o 1``
code = main(["--mode", "select", "--input", str(work / "data.csv"), "--output", str(work / "result.json"),
             "--steps", "2000", "--burn-in", "500", "--p-o", "1"])
doc = json.loads((work / "result.json").read_text())
print("exit", code)
print("MAP", doc["map_model"]["names"], doc["map_model"]["coefficients"], "intercept", doc["map_model"]["intercept"])
for row in doc["top_models"][:3]:
    print(row["names"], round(row["r_hat"], 3))
