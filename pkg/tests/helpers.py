"""Shared builders and independent oracles for the test suite."""
from __future__ import annotations

import itertools
import random
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

from toricprevar.cone import Cone
from toricprevar.lattice import Sublattice, saturate
from toricprevar.sysfan import SystemOfFans, face_closure

DATA = Path(__file__).resolve().parents[1] / "src" / "toricprevar" / "data"


def C(n, *gens):
    return Cone.from_generators(n, gens)


def e(n, *idx):
    v = [0] * n
    for i in idx:
        v[i - 1] += 1
    return tuple(v)


def span(n, *gens):
    return Sublattice.span(n, gens)


# ------------------------------------------------------------ LP oracles (floating point, tiny inputs)


def lp_in_cone(v, gens) -> bool:
    """Is v a nonnegative combination of gens?"""
    if not gens:
        return not any(v)
    A = np.array(gens, dtype=float).T
    res = linprog(np.zeros(len(gens)), A_eq=A, b_eq=np.array(v, dtype=float),
                  bounds=[(0, None)] * len(gens), method="highs")
    return res.status == 0


def lp_relints_meet(g1, g2, n) -> bool:
    """Exists x = sum a_k g1_k = sum b_k g2_k with all a_k, b_k >= 1?"""
    k1, k2 = len(g1), len(g2)
    if k1 == 0 and k2 == 0:
        return True
    A = np.zeros((n, k1 + k2))
    for k, g in enumerate(g1):
        A[:, k] = g
    for k, g in enumerate(g2):
        A[:, k1 + k] = [-a for a in g]
    res = linprog(np.zeros(k1 + k2), A_eq=A, b_eq=np.zeros(n),
                  bounds=[(1, None)] * (k1 + k2), method="highs")
    return res.status == 0


def brute_extreme_rays(gens):
    """Generators not in the cone of the others (pointed input, distinct directions)."""
    out = []
    for k, g in enumerate(gens):
        others = [h for m, h in enumerate(gens) if m != k]
        if not lp_in_cone(g, others):
            out.append(g)
    return out


def brute_faces(sigma: Cone) -> set[Cone]:
    """Intersect σ with the orthogonal complement of every subset of facet normals."""
    faces = set()
    normals = list(sigma.facets)
    for r in range(len(normals) + 1):
        for sub in itertools.combinations(normals, r):
            faces.add(Cone.from_inequalities(sigma.rank, normals, list(sigma.equations) + list(sub)))
    return faces


# ------------------------------------------------------------ random generators


def random_vector(rng: random.Random, n: int, bound: int = 2):
    while True:
        v = tuple(rng.randint(-bound, bound) for _ in range(n))
        if any(v):
            return v


def random_cone(rng: random.Random, n: int, max_gens: int = 6, pointed: bool = False) -> Cone:
    while True:
        k = rng.randint(0, max_gens)
        c = Cone.from_generators(n, [random_vector(rng, n) for _ in range(k)])
        if not pointed or c.is_pointed:
            return c


def random_sublattice(rng: random.Random, n: int, max_rank: int | None = None) -> Sublattice:
    max_rank = n if max_rank is None else max_rank
    k = rng.randint(0, max_rank)
    return saturate([random_vector(rng, n) for _ in range(k)], n)


def random_affine_system(rng: random.Random, n: int, charts: int, max_rays: int = 5) -> SystemOfFans:
    """Pointed chart cones drawn from a shared vector pool, random transitive glueing."""
    pool = [random_vector(rng, n) for _ in range(rng.randint(n, n + 3))]
    cones = []
    while len(cones) < charts:
        gens = rng.sample(pool, rng.randint(1, min(max_rays, len(pool))))
        c = Cone.from_generators(n, gens)
        if c.is_pointed and len(c.rays) <= max_rays:
            cones.append(c)
    blocks = {(i + 1, i + 1): c.faces for i, c in enumerate(cones)}
    for i, j in itertools.combinations(range(1, charts + 1), 2):
        common = sorted(cones[i - 1].faces & cones[j - 1].faces, key=Cone.sort_key)
        chosen = [t for t in common if rng.random() < 0.5]
        blocks[(i, j)] = face_closure(chosen) | {Cone.zero(n)}
    changed = True
    while changed:
        changed = False
        for i, j, k in itertools.permutations(range(1, charts + 1), 3):
            a = blocks[(min(i, j), max(i, j))] & blocks[(min(j, k), max(j, k))]
            key = (min(i, k), max(i, k))
            if not a <= blocks[key]:
                blocks[key] = blocks[key] | a
                changed = True
    return SystemOfFans(n, blocks, range(1, charts + 1))



# ------------------------------------------------------------ shipped documents and CLI cases


def load(name: str):
    from toricprevar.docformat import parse

    return parse((DATA / f"{name}.toric").read_text(encoding="utf-8"))


def cli_cases() -> list[tuple[str, list[str]]]:
    """(case id, argv without the file) for every shipped document."""
    cases = []
    for path in sorted(DATA.glob("*.toric")):
        doc = load(path.stem)
        cmds = [["validate"], ["orbits"], ["affine"], ["separate"], ["affine-intersection"],
                ["plot", "--format", "svg"], ["cox", "--mode", "good"], ["cox", "--mode", "categorical"]]
        for name in sorted(doc.sublattices):
            for c in ("check-good", "prequotient", "quotient"):
                cmds.append([c, "--sublattice", name])
        for name in sorted(doc.maps):
            target = doc.targets[doc.maps[name].target].system()
            for c in range(len(target.omega())):
                cmds.append(["fiber", "--map", name, "--class", str(c)])
        for argv in cmds:
            cid = "_".join([path.stem] + [a.lstrip("-") for a in argv if a not in ("--format", "svg")])
            cases.append((cid, argv + [str(path)]))
        cases.append((f"{path.stem}_orbits_json", ["orbits", "--json", str(path)]))
    return cases


def run_cli(argv: list[str], outdir: Path) -> dict[str, str]:
    """Run the CLI in-process; return every produced artifact as text."""
    import io

    from toricprevar.cli import main

    out, err = io.StringIO(), io.StringIO()
    if argv[0] == "plot":
        argv = argv[:-1] + ["--output", str(outdir), argv[-1]]
    code = main(argv, out, err)
    # argv carries an absolute path; keep artifacts location independent
    text = f"exit: {code}\n--- stdout\n{out.getvalue()}--- stderr\n{err.getvalue()}"
    arts = {"out.txt": text.replace(str(DATA) + "/", "")}
    if argv[0] == "plot":
        for f in sorted(outdir.glob("*.svg")):
            arts[f.name] = f.read_text(encoding="utf-8")
    return arts
