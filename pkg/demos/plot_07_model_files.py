"""
Model files and the command line
================================

Models can be written as JSON and run through the ``gapqi`` command, which
prints deterministic JSON reports.  The same entry point is callable from
Python.
"""

import io
import json
from pathlib import Path

from gapqi import load_model
from gapqi.cli import run_command

MODELS = Path(__file__).resolve().parents[1] / "models"

# %%
# A model file names the points, the map, the potential and any measures.
mf = load_model(MODELS / "m0.json")
print("points:", mf.points, "| measures:", sorted(mf.measures))

# %%
# ``verify-qi`` runs the all-level check for a named measure.  The exit code
# is 0 when the verdict holds and 1 when it does not.
for name in ("mu1", "delta1"):
    out = io.StringIO()
    code = run_command(["verify-qi", "--model", str(MODELS / "m0.json"),
                        "--measure", name, "--depth", "2"], stdout=out)
    print(name, "-> exit", code, "| verdicts:", json.loads(out.getvalue())["result"]["verdicts"])

# %%
# Usage mistakes exit with 2 and write to stderr.
err = io.StringIO()
print("exit", run_command(["verify-qi", "--model", str(MODELS / "m0.json")],
                          stdout=io.StringIO(), stderr=err), "|", err.getvalue().strip())
