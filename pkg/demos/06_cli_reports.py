"""
Command line and reports
========================

Each command returns a JSON report; exit status 0 means every check held,
1 a failed check, 2 a bad configuration and 3 a numerical failure.
"""

import json
import os
import tempfile

from isosing.cli import main

tmp = tempfile.mkdtemp()

# %% a config document
cfg = os.path.join(tmp, "classify.json")
with open(cfg, "w") as fh:
    json.dump({"command": "classify", "map": "ring", "alpha": 0.5, "n": 2, "expect": "essential"}, fh)
out = os.path.join(tmp, "report.json")
code = main(["run", "--config", cfg, "--out", out, "--plot-data", os.path.join(tmp, "plot.tsv")])
rep = json.load(open(out))
print("exit", code, "verdict", rep["results"]["verdict"], "checks", rep["checks"])
print(open(os.path.join(tmp, "plot.tsv")).read().splitlines()[:3])

# %% exit codes
for argv in (
    ["classify", "--map", "identity", "--expect", "pole", "--out", os.devnull],
    ["dilatation", "--map", "ring", "--x", "0.1,0"],
    ["dilatation", "--map", "ring", "--alpha", "2", "--q", "1", "--r-inner", "1e-8", "--r-outer", "0.5"],
):
    print(" ".join(argv[:3]), "->", main(argv))
