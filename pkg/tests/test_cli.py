import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from atlasdescent import cli
from atlasdescent.hypercover import check_hypercover
from atlasdescent.lifting import LiftingProblem, discrete_cone, local_lifting_check, subset_cone

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"


def write(tmp_path, doc, name="doc.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def load(name):
    return json.loads((DATA / name).read_text())


class TestExitCodes:
    def test_atlas_passes(self):
        status, rep = cli.run(["check-atlas", str(DATA / "basic_atlas.json")])
        assert status == 0 and rep["verdict"]["passed"]

    @pytest.mark.parametrize("mode", ["basic", "finite_sets", "subsets"])
    def test_non_atlas_fails(self, mode):
        status, rep = cli.run(["check-atlas", str(DATA / "discrete_pair.json"), "--mode", mode])
        assert status == 1 and rep["verdict"]["witness"]["residue"] == ["m"]

    def test_cech_hypercover(self):
        status, rep = cli.run(["check-hypercover", str(DATA / "line_cech_labeled.json")])
        assert status == 0 and rep["agree"]

    def test_descent(self):
        assert cli.run(["check-descent", str(DATA / "basic_atlas.json")])[0] == 0
        status, rep = cli.run(["check-descent", str(DATA / "discrete_pair.json")])
        assert status == 1
        assert (rep["target_sections"], rep["limit_size"]) == (2, 4)
        assert rep["atlas"]["witness"]["residue"] == ["m"]

    def test_equivalence_report(self):
        status, rep = cli.run(["equivalence-report", str(DATA / "discrete_pair.json"), "--nmax", "2"])
        assert status == 1 and rep["consistent"] and set(rep["conditions"]) == {"1", "2", "3", "4", "5", "6"}

    def test_homology(self):
        status, rep = cli.run(["homology", str(DATA / "circle.json"), "--maxdeg", "1"])
        assert status == 0 and [g["betti"] for g in rep["homology"]] == [1, 1]

    def test_nerve_listing(self):
        status, rep = cli.run(["nerve", str(DATA / "basic_atlas.json"), "--truncation", "1", "--list"])
        assert status == 0 and rep["sizes"] == [3, 11] and len(rep["simplices"][1]) == 11

    def test_refine_round_trip(self, tmp_path):
        _, rep = cli.run(["refine", str(DATA / "discrete_pair.json"), "--truncation", "2"])
        doc = {"space": load("discrete_pair.json")["space"], "labeled_sset": rep["labeled_sset"]}
        status, out = cli.run(["check-hypercover", write(tmp_path, doc)])
        assert status == 1 and out["fill"]["witness"]["residue"] == ["m"]

    def test_corpus(self):
        status, rep = cli.run(["corpus", "--count", "20", "--seed", "4", "--truncation", "2", "--nmax", "2"])
        assert status == 0 and rep["diagrams"] == 20 and rep["options"]["seed"] == 4


class TestInputErrors:
    def test_missing_file(self):
        status, rep = cli.run(["check-atlas", "/nonexistent/doc.json"])
        assert status == 2 and rep["path"] == "$"

    def test_bad_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{")
        assert cli.run(["check-atlas", str(p)])[0] == 2

    def test_schema_path(self, tmp_path):
        doc = load("basic_atlas.json")
        doc["space"]["points"] = [1, 2]
        status, rep = cli.run(["check-atlas", write(tmp_path, doc)])
        assert status == 2 and rep["path"].startswith("$.space.points")

    def test_unknown_section(self, tmp_path):
        doc = load("basic_atlas.json")
        doc["extra"] = {}
        assert cli.run(["check-atlas", write(tmp_path, doc)])[0] == 2

    def test_missing_section(self, tmp_path):
        doc = load("basic_atlas.json")
        del doc["diagram"]
        status, rep = cli.run(["check-atlas", write(tmp_path, doc)])
        assert status == 2 and "diagram" in rep["error"]

    def test_non_monotone_diagram(self, tmp_path):
        doc = load("basic_atlas.json")
        doc["diagram"]["assignment"]["w"] = ["l", "m", "r"]
        status, rep = cli.run(["check-atlas", write(tmp_path, doc)])
        assert status == 2 and "monotone" in rep["error"]

    def test_cyclic_poset(self, tmp_path):
        doc = load("basic_atlas.json")
        doc["poset"]["relations"].append(["u", "w"])
        assert cli.run(["check-atlas", write(tmp_path, doc)])[0] == 2

    def test_broken_labeled_sset(self, tmp_path):
        doc = load("line_cech_labeled.json")
        doc["labeled_sset"]["faces"][1][0][0] = 1
        assert cli.run(["check-hypercover", write(tmp_path, doc)])[0] == 2

    def test_bad_option_range(self):
        assert cli.run(["check-atlas", str(DATA / "basic_atlas.json"), "--truncation", "-1"])[0] == 2

    def test_homology_degree_too_high(self):
        status, rep = cli.run(["homology", str(DATA / "circle.json"), "--truncation", "2", "--maxdeg", "2"])
        assert status == 2

    def test_sheaf_not_open(self, tmp_path):
        doc = load("basic_atlas.json")
        doc["sheaf"] = {"sections": {"{l}": ["x"]}}
        assert cli.run(["check-descent", write(tmp_path, doc)])[0] == 2


class TestReports:
    @pytest.mark.parametrize(
        "argv",
        [
            ["check-atlas", "discrete_pair.json", "--mode", "subsets"],
            ["check-descent", "discrete_pair.json"],
            ["nerve", "circle.json", "--truncation", "2", "--list"],
            ["check-hypercover", "line_cech_labeled.json"],
        ],
    )
    def test_byte_for_byte(self, tmp_path, argv):
        argv = [argv[0], str(DATA / argv[1]), *argv[2:]]
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        cli.main(argv + ["--output", str(a)])
        cli.main(argv + ["--output", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_corpus_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        argv = ["corpus", "--count", "10", "--seed", "9", "--truncation", "2", "--nmax", "2"]
        cli.main(argv + ["--output", str(a)])
        cli.main(argv + ["--output", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_timing_only_on_request(self):
        _, rep = cli.run(["check-atlas", str(DATA / "basic_atlas.json")])
        assert "seconds" not in rep
        _, rep = cli.run(["check-atlas", str(DATA / "basic_atlas.json"), "--timing"])
        assert rep["seconds"] >= 0

    def test_options_echoed(self):
        _, rep = cli.run(["check-atlas", str(DATA / "basic_atlas.json"), "--seed", "17"])
        assert rep["options"] == {"truncation": 3, "nmax": 3, "kmax": 4, "seed": 17}

    def test_document_options(self, tmp_path):
        doc = load("circle.json")
        doc["options"] = {"truncation": 2}
        _, rep = cli.run(["homology", write(tmp_path, doc)])
        assert rep["options"]["truncation"] == 2 and len(rep["homology"]) == 2

    @pytest.mark.parametrize("mode", ["basic", "finite_sets", "subsets"])
    def test_witness_revalidates(self, tmp_path, mode):
        """A failing report's witness, rebuilt as a lifting problem, fails in the library too."""
        doc = load("discrete_pair.json")
        _, rep = cli.run(["check-atlas", write(tmp_path, doc), "--mode", mode, "--nmax", "2"])
        w = rep["verdict"]["witness"]
        D = cli._diagram(doc)
        small = w["problem"]["small"]
        shapes = [discrete_cone(k) for k in range(5)] + [subset_cone(n) for n in range(4)]
        K, L = next((K, L) for K, L in shapes if sorted(K.elements) == small)
        v = local_lifting_check(D, LiftingProblem(K, L, w["problem"]["sigma"]))
        assert not v.passed
        assert list(v.witness.residue) == w["residue"] and sorted(v.witness.region) == w["region"]

    def test_hypercover_witness_revalidates(self, tmp_path):
        _, rep = cli.run(["refine", str(DATA / "discrete_pair.json"), "--truncation", "2"])
        doc = {"space": load("discrete_pair.json")["space"], "labeled_sset": rep["labeled_sset"]}
        _, out = cli.run(["check-hypercover", write(tmp_path, doc)])
        w = out["fill"]["witness"]
        H = cli._labeled(doc, cli._frame(doc))
        n = w["problem"]["level"]
        assert not check_hypercover(H, n).passed
        if n:
            assert check_hypercover(H, n - 1).passed

    def test_stdin_and_entry_point(self):
        text = (DATA / "basic_atlas.json").read_text()
        proc = subprocess.run(
            [sys.executable, "-m", "atlasdescent.cli", "check-atlas", "-"], input=text, capture_output=True, text=True
        )
        assert proc.returncode == 0 and json.loads(proc.stdout)["verdict"]["passed"]

    def test_deterministic_across_hash_seeds(self):
        outs = set()
        for seed in ("1", "2"):
            proc = subprocess.run(
                [sys.executable, "-m", "atlasdescent.cli", "check-descent", str(DATA / "discrete_pair.json")],
                capture_output=True,
                env={**os.environ, "PYTHONHASHSEED": seed},
            )
            outs.add(proc.stdout)
        assert len(outs) == 1
