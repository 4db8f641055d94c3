"""Presentations of a system of fans as a quotient of a subfan of an orthant.

Both constructions enlarge the lattice to ``Ñ = N ⊕ N'`` with one new basis
vector per ray label, and send that vector to the primitive generator of its
ray: ``Q = [id_N | v_ρ ...]``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .cone import Cone, format_cone
from .lattice import LatticeMap, Sublattice, compose as compose_lattice, kernel, quotient_projection
from .quotient import toric_prequotient
from .sysfan import (
    FanSystemError,
    SystemOfFans,
    from_cones,
    is_affine_intersection,
    make_irredundant,
    require_valid,
)
from .sysmap import SystemMap, induced_from_index_map, is_affine_map, is_surjective


class NotAffineIntersection(FanSystemError):
    pass


@dataclass
class Presentation:
    kind: str
    ambient_fan: SystemOfFans
    q: SystemMap
    H: Sublattice
    Q: LatticeMap
    basis_labels: list[str]
    chart_labels: list[str]
    index_map: dict[int, int]

    @property
    def ambient_rank(self) -> int:
        return self.ambient_fan.rank


def _unit(n: int, k: int) -> tuple[int, ...]:
    return tuple(int(i == k) for i in range(n))


def _ray_vector(rho: Cone) -> tuple[int, ...]:
    (v,) = rho.rays
    return v


def _require_input(S: SystemOfFans):
    require_valid(S)
    if not S.is_affine:
        raise FanSystemError("presentations need an affine system")
    if not S.is_fan_system():
        raise FanSystemError("presentations need a system of fans (strictly convex cones)")


def _build(kind, S, labels, generators, charts, index_map, chart_labels) -> Presentation:
    n = S.rank
    total = n + len(labels)
    columns = [_unit(n, k) for k in range(n)] + generators
    Q = LatticeMap.from_columns(columns, n)
    pos = {lab: n + k for k, lab in enumerate(labels)}
    cones = [Cone.from_generators(total, [_unit(total, pos[lab]) for lab in chart]) for chart in charts]
    ambient = from_cones(total, cones, "full_fan")
    q = induced_from_index_map(Q, index_map, ambient, S)
    names = [f"n{k + 1}" for k in range(n)] + [_label_text(lab) for lab in labels]
    return Presentation(kind, ambient, q, kernel(Q), Q, names, chart_labels, dict(index_map))


def _label_text(lab) -> str:
    a, b = lab
    if isinstance(a, Cone):
        return f"e[{format_cone(a)},{b}]"
    return f"e[class {a}]"


def categorical_presentation(S: SystemOfFans) -> Presentation:
    """One chart per ``(τ, i, j)`` with ``i ≤ j`` and τ maximal in ``Δ_ij``."""
    _require_input(S)
    if make_irredundant(S) != S:
        raise FanSystemError("the system is redundant; apply make_irredundant first")
    labels = []
    for i in S.charts:
        rays = sorted((c for c in S.delta(i, i) if c.dim == 1), key=Cone.sort_key)
        labels += [(rho, i) for rho in rays]
    generators = [_ray_vector(rho) for rho, _ in labels]
    charts, mu, names = [], {}, []
    for i, j in S.pairs():
        for tau in S.delta_max(i, j):
            charts.append([(rho, l) for rho, l in labels if l in (i, j) and rho in tau.faces])
            mu[len(charts)] = i
            names.append(f"({format_cone(tau)},{i},{j})")
    return _build("categorical", S, labels, generators, charts, mu, names)


def good_presentation(S: SystemOfFans) -> Presentation:
    """One chart per chart of S, one new basis vector per ray class of Ω(S)."""
    _require_input(S)
    if not is_affine_intersection(S):
        raise NotAffineIntersection("the system is not of affine intersection")
    om = S.omega()
    ray_classes = [cl for cl in om.classes if cl.cone.dim == 1]
    labels = [(cl.id, min(cl.charts)) for cl in ray_classes]
    generators = [_ray_vector(cl.cone) for cl in ray_classes]
    charts, mu, names = [], {}, []
    for k, i in enumerate(S.charts, start=1):
        rays = [c for c in S.delta(i, i) if c.dim == 1]
        ids = {om.class_of(rho, i) for rho in rays}
        charts.append([lab for lab, cl in zip(labels, ray_classes) if cl.id in ids])
        mu[k] = i
        names.append(str(i))
    return _build("good", S, labels, generators, charts, mu, names)


@dataclass(frozen=True)
class Certificate:
    reproduces: bool
    surjective: bool
    affine: bool
    loop1_steps: int
    loop2_steps: int


def certify(p: Presentation, S: SystemOfFans) -> Certificate:
    """Recompute the toric prequotient of the ambient system by H and compare with S."""
    from .sysfan import is_isomorphic

    res = toric_prequotient(p.ambient_fan, p.H)
    P = quotient_projection(p.ambient_rank, p.H).projection
    G = compose_lattice(p.Q, P.right_inverse())
    return Certificate(is_isomorphic(res.target, S, G), is_surjective(p.q), is_affine_map(p.q),
                       res.loop1_steps, res.loop2_steps)


__all__ = ["Presentation", "NotAffineIntersection", "categorical_presentation",
           "good_presentation", "make_irredundant", "certify", "Certificate"]
