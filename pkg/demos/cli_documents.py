# The command line tool on the JSON documents in demos/data.
import json
from pathlib import Path

from atlasdescent import cli

DATA = Path(__file__).resolve().parent / "data"

for argv in (
    ["check-atlas", "basic_atlas.json"],
    ["check-atlas", "discrete_pair.json"],
    ["check-descent", "discrete_pair.json"],
    ["check-hypercover", "line_cech_labeled.json"],
    ["homology", "circle.json", "--maxdeg", "1"],
):
    status, rep = cli.run([argv[0], str(DATA / argv[1]), *argv[2:]])
    print(" ".join(argv), "-> exit", status)
    print(" ", json.dumps(rep, sort_keys=True)[:160])
