"""Command line interface: ``toricprevar <command> FILE [options]``.

Every command builds a result dictionary.  Text mode prints it as flattened
``key: value`` lines (lists indexed as ``key[k]``, nested keys joined by dots);
``--json`` prints the same dictionary as JSON.  Exit codes: 0 success, 1 domain
error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cone import format_cone
from .cox import NotAffineIntersection, categorical_presentation, certify, good_presentation, make_irredundant
from .docformat import Document, DocumentError, parse
from .lattice import LatticeError, LatticeMap, Sublattice
from .quotient import (
    QuotientError,
    check_good_prequotient,
    prequotient,
    toric_quotient,
    toric_separation,
)
from .sysfan import (
    FanSystemError,
    SystemOfFans,
    is_affine_intersection,
    is_separated,
    to_affine_system,
    validate,
)
from .sysmap import MapError, SystemMap, fiber, induced_from_index_map, map_to_fan, validate_map

DOMAIN_ERRORS = (DocumentError, FanSystemError, LatticeError, MapError, QuotientError, ValueError)


class CommandFailed(Exception):
    """A command ran but its answer is negative (exit code 1)."""


# ------------------------------------------------------------ rendering


def flatten(value, prefix: str = "") -> list[str]:
    if isinstance(value, dict):
        out = []
        for k in sorted(value):
            out += flatten(value[k], f"{prefix}.{k}" if prefix else str(k))
        return out
    if isinstance(value, list):
        if not value:
            return [f"{prefix}: []"]
        out = []
        for k, v in enumerate(value):
            out += flatten(v, f"{prefix}[{k}]")
        return out
    if isinstance(value, bool):
        value = "true" if value else "false"
    elif value is None:
        value = "null"
    return [f"{prefix}: {value}"]


def render(result: dict, as_json: bool) -> str:
    if as_json:
        return json.dumps(result, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    return "\n".join(flatten(result)) + "\n"


def _matrix(F: LatticeMap) -> list[str]:
    return ["(" + ",".join(str(a) for a in row) + ")" for row in F.matrix]


def _system(S: SystemOfFans) -> dict:
    out = {"rank": S.rank, "charts": {}, "glue": {}}
    for i, j in S.pairs():
        cones = [format_cone(c) for c in S.delta_max(i, j)]
        if i == j:
            out["charts"][str(i)] = cones
        else:
            out["glue"][f"{i} {j}"] = cones
    return out


def _classes(S: SystemOfFans) -> list[str]:
    return [f"{cl.id} {format_cone(cl.cone)} charts={','.join(map(str, sorted(cl.charts)))}"
            for cl in S.omega().classes]


def _class_map(m: SystemMap) -> list[str]:
    return [f"{a} -> {b}" for a, b in sorted(m.class_map.items())]


# ------------------------------------------------------------ helpers


def _load(path: str) -> tuple[Document, SystemOfFans]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None
    doc = parse(text)
    return doc, doc.system()


def _checked(S: SystemOfFans) -> SystemOfFans:
    problems = validate(S)
    if problems:
        raise CommandFailed("invalid system: " + "; ".join(str(p) for p in problems))
    return S


def _affine(S: SystemOfFans, result: dict) -> SystemOfFans:
    """Affine version of S; records whether a conversion happened."""
    _checked(S)
    if S.is_affine:
        result["converted_to_affine"] = False
        return S
    A, _ = to_affine_system(S)
    result["converted_to_affine"] = True
    return A


def _sublattice(doc: Document, name: str) -> Sublattice:
    if name not in doc.sublattices:
        known = ", ".join(sorted(doc.sublattices)) or "none"
        raise DocumentError(f"unknown sublattice {name!r} (defined: {known})")
    return doc.sublattices[name].sublattice(doc.rank)


# ------------------------------------------------------------ commands


def cmd_validate(doc, S, args) -> dict:
    problems = validate(S)
    res = {"valid": not problems, "violations": [str(p) for p in problems],
           "charts": len(S.charts), "rank": S.rank}
    if problems:
        res["_exit"] = 1
    return res


def cmd_orbits(doc, S, args) -> dict:
    _checked(S)
    om = S.omega()
    return {"classes": len(om), "nodes": _classes(S),
            "edges": [f"{a} -> {b}" for a, b in om.covers()],
            "maximal": [str(c) for c in om.maximal()]}


def cmd_affine(doc, S, args) -> dict:
    _checked(S)
    A, relabel = to_affine_system(S)
    return {"system": _system(A), "relabel": [f"{a} -> {b}" for a, b in sorted(relabel.items())]}


def cmd_separate(doc, S, args) -> dict:
    _checked(S)
    fan, m = toric_separation(S)
    return {"fan": _system(fan), "lattice_map": _matrix(m.F), "class_map": _class_map(m)}


def cmd_prequotient(doc, S, args) -> dict:
    res = {}
    A = _affine(S, res)
    out = prequotient(A, _sublattice(doc, args.sublattice))
    res.update({"target": _system(out.target), "lattice_map": _matrix(out.map.F),
                "loop1_steps": out.loop1_steps, "loop2_steps": out.loop2_steps,
                "trace": out.trace})
    return res


def cmd_check_good(doc, S, args) -> dict:
    res = {}
    A = _affine(S, res)
    rep = check_good_prequotient(A, _sublattice(doc, args.sublattice))
    res.update({"holds": rep.holds,
                "witnesses": [f"{w.i} {w.j} {format_cone(w.cone)} condition {w.condition}"
                              + (f" image {format_cone(w.detail)}" if w.condition == "i"
                                 else f" preimage {format_cone(w.detail)}")
                              for w in rep.witnesses],
                "L_hat": str(rep.L_hat) if rep.L_hat is not None else None})
    if rep.holds:
        res["summary"] = f"holds; L_hat = {rep.L_hat}"
    else:
        conds = sorted({w.condition for w in rep.witnesses})
        res["summary"] = "fails condition " + " and ".join(conds)
    return res


def cmd_quotient(doc, S, args) -> dict:
    res = {}
    A = _affine(S, res)
    fan, m = toric_quotient(A, _sublattice(doc, args.sublattice))
    res.update({"fan": _system(fan), "lattice_map": _matrix(m.F), "class_map": _class_map(m)})
    return res


def cmd_cox(doc, S, args) -> dict:
    res = {}
    A = _affine(S, res)
    if not A.is_fan_system():
        raise CommandFailed("presentations need strictly convex cones")
    A = make_irredundant(A)
    try:
        p = categorical_presentation(A) if args.mode == "categorical" else good_presentation(A)
    except NotAffineIntersection as exc:
        raise CommandFailed(f"NotAffineIntersection: {exc}") from None
    cert = certify(p, A)
    ambient = p.ambient_fan
    res.update({
        "mode": p.kind,
        "ambient_rank": p.ambient_rank,
        "basis": p.basis_labels,
        "charts": [f"{lab}: {format_cone(ambient.chart_cone(i))}"
                   for lab, i in zip(p.chart_labels, ambient.charts)],
        "Q": _matrix(p.Q),
        "H": str(p.H),
        "q_affine": cert.affine,
        "q_surjective": cert.surjective,
        "reproduces_system": cert.reproduces,
    })
    return res


def cmd_affine_intersection(doc, S, args) -> dict:
    res = {}
    A = _affine(S, res)
    res["affine_intersection"] = is_affine_intersection(A)
    res["separated"] = is_separated(S)
    return res


def _document_map(doc: Document, S: SystemOfFans, name: str) -> SystemMap:
    if name not in doc.maps:
        known = ", ".join(sorted(doc.maps)) or "none"
        raise DocumentError(f"unknown map {name!r} (defined: {known})")
    decl = doc.maps[name]
    T = doc.targets[decl.target].system()
    _checked(T)
    F = decl.lattice_map(doc.rank)
    if decl.index is None:
        if len(T.charts) != 1:
            raise DocumentError(f"map {name} targets a system with several charts; give an index map")
        m = map_to_fan(F, S, T)
    else:
        m = induced_from_index_map(F, decl.index, S, T)
    problems = validate_map(m)
    if problems:
        raise CommandFailed("invalid map: " + "; ".join(str(p) for p in problems))
    return m


def cmd_fiber(doc, S, args) -> dict:
    _checked(S)
    m = _document_map(doc, S, args.map)
    om_t = m.target.omega()
    if not 0 <= args.class_id < len(om_t):
        raise DocumentError(f"target has classes 0..{len(om_t) - 1}, not {args.class_id}")
    fib = fiber(m, args.class_id)
    om = S.omega()
    return {"target_class": f"{args.class_id} {format_cone(om_t[args.class_id].cone)}",
            "components": [f"{a} {format_cone(om[a].cone)} charts="
                           f"{','.join(map(str, sorted(om[a].charts)))} stabilizer={L}"
                           for a, L in fib.components],
            "in_image": bool(fib.components)}


def cmd_plot(doc, S, args) -> dict:
    from .plotting import fan_figure, poset_figure

    _checked(S)
    out_dir = Path(args.output)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.file).stem
    files = []
    poset = out_dir / f"{stem}_poset.svg"
    poset.write_text(poset_figure(S), encoding="utf-8")
    files.append(poset.name)
    if S.rank == 2:
        cones = out_dir / f"{stem}_cones.svg"
        cones.write_text(fan_figure(S), encoding="utf-8")
        files.append(cones.name)
    return {"files": files, "classes": len(S.omega()), "edges": len(S.omega().covers())}


COMMANDS = {
    "validate": (cmd_validate, "check the system axioms"),
    "orbits": (cmd_orbits, "orbit classes and their order"),
    "affine": (cmd_affine, "system of maximal affine charts"),
    "separate": (cmd_separate, "toric separation (reduction to a fan)"),
    "prequotient": (cmd_prequotient, "prequotient algorithm by a sublattice"),
    "check-good": (cmd_check_good, "test for a good prequotient"),
    "quotient": (cmd_quotient, "toric quotient: prequotient followed by separation"),
    "cox": (cmd_cox, "presentation as a quotient of an orthant subfan"),
    "affine-intersection": (cmd_affine_intersection, "pairwise chart intersections affine?"),
    "fiber": (cmd_fiber, "fibre of a map over a target class"),
    "plot": (cmd_plot, "write SVG figures"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toricprevar", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="system document")
    common.add_argument("--json", action="store_true", help="print JSON instead of text")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=helptext)
        if name in ("prequotient", "check-good", "quotient"):
            p.add_argument("--sublattice", required=True, help="name of a sublattice block")
        if name == "cox":
            p.add_argument("--mode", choices=["categorical", "good"], default="good")
        if name == "fiber":
            p.add_argument("--map", required=True, help="name of a map block")
            p.add_argument("--class", dest="class_id", type=int, required=True,
                           help="target class id")
        if name == "plot":
            p.add_argument("--format", choices=["svg"], default="svg")
            p.add_argument("--output", default=".", help="directory for the figures")
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    func = COMMANDS[args.command][0]
    try:
        doc, S = _load(args.file)
        result = func(doc, S, args)
    except CommandFailed as exc:
        stderr.write(f"error: {exc}\n")
        return 1
    except DOMAIN_ERRORS as exc:
        stderr.write(f"error: {exc}\n")
        return 1
    code = result.pop("_exit", 0)
    stdout.write(render(result, args.json))
    return code


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
