"""Command line front end: read one JSON document, run a check, print a JSON report.

Exit status: 0 when the check passes, 1 when it fails (the report carries a
certificate), 2 when the input is malformed.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any, Sequence

import jsonschema
import numpy as np

from . import corpus
from .descent import check_descent, is_sheaf, limit_over_diagram, sections_sheaf
from .hypercover import LabeledSSet, cech_nerve, check_hypercover, check_hypercover_dhi
from .lifting import CONDITIONS, LiftingProblem, OpenDiagram, Verdict, check_atlas, equivalence_report
from .nerve import homology, nerve_truncated, refine_diagram
from .order import FiniteFrame, FinitePoset, FinitePreorder, open_id, specialization_preorder
from .semirep import SetPresheaf
from .simplicial import TruncatedSSet

COMMANDS = (
    "check-atlas",
    "equivalence-report",
    "nerve",
    "refine",
    "check-hypercover",
    "cech",
    "homology",
    "check-descent",
    "corpus",
)

_points = {"type": "array", "items": {"type": "string"}}
_relations = {"type": "array", "items": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2}}
_int_lists = {"type": "array", "items": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}}}}

SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "space": {
            "type": "object",
            "properties": {"points": _points, "opens": {"type": "array", "items": _points}},
            "required": ["points", "opens"],
            "additionalProperties": False,
        },
        "poset": {
            "type": "object",
            "properties": {"elements": _points, "relations": _relations},
            "required": ["elements"],
            "additionalProperties": False,
        },
        "diagram": {
            "type": "object",
            "properties": {"assignment": {"type": "object", "additionalProperties": _points}, "target": _points},
            "required": ["assignment"],
            "additionalProperties": False,
        },
        "sheaf": {
            "type": "object",
            "properties": {
                "sections": {"type": "object", "additionalProperties": _points},
                "restrictions": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "properties": {
                            "from": _points,
                            "to": _points,
                            "map": {"type": "object", "additionalProperties": {"type": "string"}},
                        },
                        "required": ["from", "to", "map"],
                        "additionalProperties": False,
                    },
                },
                "bundle": {
                    "type": "object",
                    "properties": {
                        "total": {
                            "type": "object",
                            "properties": {"elements": _points, "relations": _relations},
                            "required": ["elements"],
                        },
                        "projection": {"type": "object", "additionalProperties": {"type": "string"}},
                    },
                    "required": ["total", "projection"],
                },
            },
            "additionalProperties": False,
        },
        "labeled_sset": {
            "type": "object",
            "properties": {
                "sizes": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
                "faces": _int_lists,
                "degeneracies": _int_lists,
                "labels": {"type": "array", "items": {"type": "array", "items": _points}},
                "target": _points,
            },
            "required": ["sizes", "faces", "degeneracies", "labels"],
            "additionalProperties": False,
        },
        "cover": {"type": "array", "items": _points},
        "open": _points,
        "options": {"type": "object"},
    },
    "additionalProperties": False,
}

_NEEDS = {
    "check-atlas": ("space", "poset", "diagram"),
    "equivalence-report": ("space", "poset", "diagram"),
    "nerve": ("poset",),
    "refine": ("space", "poset", "diagram"),
    "check-hypercover": ("space", "labeled_sset"),
    "cech": ("space", "cover"),
    "homology": (),
    "check-descent": ("space", "poset", "diagram", "sheaf"),
    "corpus": (),
}


class InputError(Exception):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


# ---------------------------------------------------------------------------
# documents -> library objects


def _frame(doc) -> FiniteFrame:
    sp = doc["space"]
    return FiniteFrame.generated(sp["points"], sp["opens"])


def _poset(doc) -> FinitePoset:
    p = doc["poset"]
    return FinitePoset.from_relations(p["elements"], [tuple(r) for r in p.get("relations", [])])


def _diagram(doc) -> OpenDiagram:
    frame, I = _frame(doc), _poset(doc)
    d = doc["diagram"]
    return OpenDiagram(frame, I, d["assignment"], d.get("target"))


def _labeled(doc, frame: FiniteFrame) -> LabeledSSet:
    h = doc["labeled_sset"]
    sizes = tuple(h["sizes"])
    N = len(sizes) - 1
    faces = tuple(tuple(np.array(a, dtype=np.int64) for a in lv) for lv in h["faces"])
    degs = tuple(tuple(np.array(a, dtype=np.int64) for a in lv) for lv in h["degeneracies"])
    S = TruncatedSSet(N, sizes, faces, degs)
    S.validate()
    return LabeledSSet.from_opens(S, h["labels"], frame, h.get("target"))


def _sheaf(doc, frame: FiniteFrame):
    sh = doc["sheaf"]
    if "bundle" in sh:
        b = sh["bundle"]
        E = FinitePreorder.from_relations(b["total"]["elements"], [tuple(r) for r in b["total"].get("relations", [])])
        X = specialization_preorder(frame)
        return sections_sheaf(E, X, b["projection"]).presheaf
    if "sections" not in sh:
        raise InputError("$.sheaf", "give either 'bundle' or 'sections' with 'restrictions'")
    by_id = {open_id(U): U for U in frame.opens}
    secs = {}
    for key, vals in sh["sections"].items():
        if key not in by_id:
            raise InputError(f"$.sheaf.sections.{key}", "not an open of the space")
        secs[by_id[key]] = tuple(vals)
    res = {(W, W): {s: s for s in secs.get(W, ())} for W in frame.opens}
    for k, r in enumerate(sh.get("restrictions", [])):
        res[(frozenset(r["from"]), frozenset(r["to"]))] = dict(r["map"])
    try:
        return SetPresheaf(frame, secs, res)
    except ValueError as exc:
        raise InputError("$.sheaf", str(exc)) from None


# ---------------------------------------------------------------------------
# library objects -> documents


def _jsonable(x):
    if isinstance(x, frozenset):
        return sorted(_jsonable(v) for v in x)
    if isinstance(x, Verdict):
        return _verdict(x)
    if isinstance(x, LiftingProblem):
        return {"small": sorted(x.small.elements), "sigma": {k: x.sigma[k] for k in sorted(x.sigma)}}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def _verdict(v: Verdict) -> dict:
    out: dict[str, Any] = {"passed": v.passed, "checked": v.checked, "condition": v.condition}
    if v.witness is not None:
        w = v.witness
        out["witness"] = {
            "problem": _jsonable(w.problem),
            "region": sorted(w.region),
            "achieved": sorted(w.achieved),
            "residue": list(w.residue),
            "filler_regions": [sorted(f) for f in w.filler_regions],
        }
    return out


def labeled_document(H: LabeledSSet) -> dict:
    S = H.shape
    return {
        "sizes": list(S.sizes),
        "faces": [[a.tolist() for a in lv] for lv in S.faces],
        "degeneracies": [[a.tolist() for a in lv] for lv in S.degeneracies],
        "labels": [[sorted(H.label(n, x)) for x in range(S.sizes[n])] for n in range(S.N + 1)],
        "target": sorted(H.target),
    }


# ---------------------------------------------------------------------------
# commands


def _cmd_check_atlas(doc, args):
    D = _diagram(doc)
    v = check_atlas(D, args.mode, args.kmax, args.nmax)
    return (0 if v.passed else 1), {"verdict": _verdict(v)}


def _cmd_equivalence(doc, args):
    D = _diagram(doc)
    r = equivalence_report(D, args.nmax, args.kmax)
    table = {str(c): {"description": CONDITIONS[c], **_verdict(v)} for c, v in r.verdicts.items()}
    return (0 if all(r.values) else 1), {"conditions": table, "consistent": r.consistent}


def _cmd_nerve(doc, args):
    nv = nerve_truncated(_poset(doc), args.truncation)
    S = nv.sset
    rep: dict[str, Any] = {
        "sizes": list(S.sizes),
        "nondegenerate": [int(len(S.nondegenerate(n))) for n in range(S.N + 1)],
    }
    if args.list:
        rep["simplices"] = [[nv.simplex(n, x).as_dict() for x in range(S.sizes[n])] for n in range(S.N + 1)]
        rep["simplices"] = [[{",".join(map(str, T)): v for T, v in s.items()} for s in lv] for lv in rep["simplices"]]
    return 0, rep


def _cmd_refine(doc, args):
    H = refine_diagram(_diagram(doc), args.truncation)
    return 0, {"labeled_sset": labeled_document(H)}


def _cmd_check_hypercover(doc, args):
    frame = _frame(doc)
    H = _labeled(doc, frame)
    nmax = min(args.nmax if args.nmax is not None else H.shape.N, H.shape.N)
    out: dict[str, Any] = {}
    if args.method in ("fill", "both"):
        out["fill"] = _verdict(check_hypercover(H, nmax))
    if args.method in ("dhi", "both"):
        out["dhi"] = _verdict(check_hypercover_dhi(H, nmax))
    passed = all(v["passed"] for v in out.values())
    if args.method == "both":
        out["agree"] = out["fill"]["passed"] == out["dhi"]["passed"]
    return (0 if passed else 1), out


def _cmd_cech(doc, args):
    frame = _frame(doc)
    V = doc.get("open", sorted(frame.top))
    H = cech_nerve(frame, doc["cover"], V, args.truncation)
    return 0, {"labeled_sset": labeled_document(H)}


def _cmd_homology(doc, args):
    if "labeled_sset" in doc:
        if "space" not in doc:
            raise InputError("$", "'labeled_sset' needs a 'space' section")
        S = _labeled(doc, _frame(doc)).shape
    elif "poset" in doc:
        S = nerve_truncated(_poset(doc), args.truncation).sset
    else:
        raise InputError("$", "give a 'poset' or a 'labeled_sset'")
    maxdeg = S.N - 1 if args.maxdeg is None else args.maxdeg
    groups = homology(S, maxdeg)
    return 0, {"homology": [{"degree": k, "betti": g.betti, "torsion": list(g.torsion)} for k, g in enumerate(groups)]}


def _cmd_check_descent(doc, args):
    D = _diagram(doc)
    F = _sheaf(doc, D.frame)
    v = check_descent(F, D)
    lim = limit_over_diagram(F, D)
    rep: dict[str, Any] = {
        "passed": v.passed,
        "is_sheaf": is_sheaf(F),
        "target_sections": v.source_size,
        "limit_size": v.limit_size,
    }
    if not v.passed:
        rep["failure"] = v.failure
        rep["elements"] = _jsonable(list(v.elements))
        rep["atlas"] = _verdict(check_atlas(D))
    rep["limit_index"] = list(lim.index)
    return (0 if v.passed else 1), rep


def _cmd_corpus(doc, args):
    count = args.count
    diagrams = corpus.random_diagrams(args.seed, count)
    eq_bad, nerve_bad, fill_bad = [], [], []
    atlases = 0
    for k, D in enumerate(diagrams):
        r = equivalence_report(D, args.nmax, args.kmax)
        atlases += r.values[0]
        if not r.consistent:
            eq_bad.append(k)
        H = refine_diagram(D, args.truncation)
        h = check_hypercover(H, args.truncation).passed
        if h != r.values[0]:
            nerve_bad.append(k)
        if h != check_hypercover_dhi(H, args.truncation).passed:
            fill_bad.append(k)
    labeled = corpus.random_labeled_ssets(args.seed, max(1, count // 2))
    for k, H in enumerate(labeled):
        if check_hypercover(H, H.shape.N).passed != check_hypercover_dhi(H, H.shape.N).passed:
            fill_bad.append(f"labeled-{k}")
    rep = {
        "diagrams": count,
        "atlases": atlases,
        "labeled_objects": len(labeled),
        "equivalence_disagreements": eq_bad,
        "nerve_disagreements": nerve_bad,
        "fill_disagreements": fill_bad,
    }
    return (0 if not (eq_bad or nerve_bad or fill_bad) else 1), rep


_HANDLERS = {
    "check-atlas": _cmd_check_atlas,
    "equivalence-report": _cmd_equivalence,
    "nerve": _cmd_nerve,
    "refine": _cmd_refine,
    "check-hypercover": _cmd_check_hypercover,
    "cech": _cmd_cech,
    "homology": _cmd_homology,
    "check-descent": _cmd_check_descent,
    "corpus": _cmd_corpus,
}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="atlasdescent", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("input", nargs="?", default=None, help="JSON document ('-' for stdin); not needed for 'corpus'")
    ap.add_argument("--truncation", type=int, default=3, help="truncation level N (default 3)")
    ap.add_argument("--nmax", type=int, default=None, help="largest boundary dimension (default 3)")
    ap.add_argument("--kmax", type=int, default=None, help="largest discrete cone (default nmax + 1)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=100, help="random diagrams for 'corpus'")
    ap.add_argument("--mode", choices=("basic", "finite_sets", "subsets"), default="basic")
    ap.add_argument("--method", choices=("fill", "dhi", "both"), default="both")
    ap.add_argument("--maxdeg", type=int, default=None)
    ap.add_argument("--list", action="store_true", help="list nerve simplices")
    ap.add_argument("--timing", action="store_true", help="include elapsed seconds in the report")
    ap.add_argument("--output", default=None, help="write the report here instead of stdout")
    return ap


def _load(args) -> dict:
    if args.input is None:
        if args.command == "corpus":
            return {}
        raise InputError("$", "an input document is required")
    try:
        if args.input == "-":
            doc = json.load(sys.stdin)
        else:
            with open(args.input, encoding="utf-8") as fh:
                doc = json.load(fh)
    except OSError as exc:
        raise InputError("$", f"cannot read input: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError("$", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    errors = sorted(jsonschema.Draft202012Validator(SCHEMA).iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise InputError(e.json_path, e.message)
    for section in _NEEDS[args.command]:
        if section not in doc:
            raise InputError("$", f"'{args.command}' needs a '{section}' section")
    return doc


def _apply_options(args, doc: dict) -> None:
    opts = doc.get("options", {})
    for name in ("truncation", "nmax", "kmax", "seed", "mode", "method", "maxdeg", "count"):
        if name in opts and getattr(args, name) == build_parser().get_default(name):
            setattr(args, name, opts[name])
    if args.nmax is None:
        args.nmax = 3
    if args.kmax is None:
        args.kmax = args.nmax + 1
    if args.truncation < 0 or args.nmax < 1 or args.kmax < 0:
        raise InputError("$.options", "truncation must be >= 0, nmax >= 1, kmax >= 0")


def run(argv: Sequence[str] | None = None) -> tuple[int, dict]:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        doc = _load(args)
        _apply_options(args, doc)
        status, report = _HANDLERS[args.command](doc, args)
    except InputError as exc:
        status, report = 2, {"error": exc.message, "path": exc.path}
    except (ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else type(exc).__name__
        status, report = 2, {"error": str(msg), "path": "$"}
    report = {
        "command": args.command,
        "status": status,
        "options": {
            "truncation": args.truncation,
            "nmax": args.nmax,
            "kmax": args.kmax,
            "seed": args.seed,
        },
        **report,
    }
    if args.timing:
        report["seconds"] = round(time.perf_counter() - start, 6)
    return status, report


def main(argv: Sequence[str] | None = None) -> int:
    status, report = run(argv)
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    args = build_parser().parse_args(argv)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
