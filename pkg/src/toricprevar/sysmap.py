"""Maps of systems of (quasi-)fans and their fibres."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .cone import Cone, format_cone, image
from .lattice import LatticeMap, Sublattice, compose as compose_lattice, kernel, quotient_projection
from .sysfan import FanSystemError, SystemOfFans, Violation


class MapError(ValueError):
    pass


class NoTargetCone(MapError):
    def __init__(self, cone: Cone, chart: int):
        self.cone, self.chart = cone, chart
        super().__init__(f"no target cone contains the image of ({format_cone(cone)}, {chart})")


class IndexMapConditionFailed(MapError):
    """No cone of ``Δ'_{μ(i)μ(j)}`` contains the image of some σ ∈ ``Δ_ij``."""

    def __init__(self, i: int, j: int, cone: Cone, image_cone: Cone):
        self.i, self.j, self.cone, self.image_cone = i, j, cone, image_cone
        super().__init__(
            f"the image {format_cone(image_cone)} of {format_cone(cone)} in Δ_{i}{j} "
            f"lies in no cone of the target block")


def maps_into_interior(F: LatticeMap, sigma: Cone, target: Cone) -> bool:
    """``F_R(σ°) ⊂ (σ')°``."""
    im = image(F, sigma)
    return target.contains_cone(im) and target.relint_contains(im.interior_point())


def carrier(cone_image: Cone, candidates) -> Cone | None:
    """The cone among candidates whose relative interior contains that of cone_image."""
    x = cone_image.interior_point()
    for c in candidates:
        if c.contains_cone(cone_image) and c.relint_contains(x):
            return c
    return None


@dataclass
class SystemMap:
    F: LatticeMap
    source: SystemOfFans
    target: SystemOfFans
    class_map: dict[int, int]

    def __call__(self, c: int) -> int:
        return self.class_map[c]

    def image_classes(self) -> set[int]:
        return set(self.class_map.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, SystemMap):
            return NotImplemented
        return (self.F == other.F and self.source == other.source
                and self.target == other.target and self.class_map == other.class_map)


def identity_map(S: SystemOfFans) -> SystemMap:
    return SystemMap(LatticeMap.identity(S.rank), S, S, {c: c for c in range(len(S.omega()))})


def map_to_fan(F: LatticeMap, S: SystemOfFans, target: SystemOfFans) -> SystemMap:
    """The unique class map into a one-chart system."""
    if len(target.charts) != 1:
        raise MapError("map_to_fan needs a target with a single fan")
    _check_ranks(F, S, target)
    (t,) = target.charts
    fan = sorted(target.delta(t, t), key=Cone.sort_key)
    om, om_t = S.omega(), target.omega()
    class_map = {}
    for cl in om.classes:
        hit = carrier(image(F, cl.cone), fan)
        if hit is None:
            raise NoTargetCone(cl.cone, min(cl.charts))
        class_map[cl.id] = om_t.class_of(hit, t)
    return SystemMap(F, S, target, class_map)


def induced_from_index_map(F: LatticeMap, mu: Mapping[int, int], S: SystemOfFans,
                           T: SystemOfFans) -> SystemMap:
    _check_ranks(F, S, T)
    for i in S.charts:
        if mu.get(i) not in T.charts:
            raise MapError(f"index map sends chart {i} to unknown chart {mu.get(i)}")
    for i in S.charts:
        for j in S.charts:
            if i > j:
                continue
            block = T.delta(mu[i], mu[j])
            for sigma in sorted(S.delta(i, j), key=Cone.sort_key):
                im = image(F, sigma)
                if not any(c.contains_cone(im) for c in block):
                    raise IndexMapConditionFailed(i, j, sigma, im)
    om, om_t = S.omega(), T.omega()
    class_map = {}
    for cl in om.classes:
        values = set()
        for i in sorted(cl.charts):
            hit = carrier(image(F, cl.cone), T.delta(mu[i], mu[i]))
            values.add(om_t.class_of(hit, mu[i]))
        if len(values) != 1:
            raise MapError(f"class {cl.label()} has inconsistent images {sorted(values)}")
        class_map[cl.id] = values.pop()
    return SystemMap(F, S, T, class_map)


def validate_map(m: SystemMap) -> list[Violation]:
    out: list[Violation] = []
    om, om_t = m.source.omega(), m.target.omega()
    if m.F.source_rank != m.source.rank or m.F.target_rank != m.target.rank:
        return [Violation("lattice map ranks", (m.F.source_rank, m.F.target_rank))]
    for c in range(len(om)):
        if c not in m.class_map:
            out.append(Violation("class map defined", (c,)))
        elif not 0 <= m.class_map[c] < len(om_t):
            out.append(Violation("class map target", (c, m.class_map[c])))
    if out:
        return out
    for a in range(len(om)):
        for b in range(len(om)):
            if a != b and om.leq(a, b) and not om_t.leq(m.class_map[a], m.class_map[b]):
                out.append(Violation("order preserving", (a, b),
                                     (om[a].cone, om[b].cone)))
    for cl in om.classes:
        tgt = om_t[m.class_map[cl.id]].cone
        if not maps_into_interior(m.F, cl.cone, tgt):
            out.append(Violation("interior", (cl.id, m.class_map[cl.id]), (cl.cone, tgt),
                                 "F(σ°) is not inside (σ')°"))
    return out


@dataclass(frozen=True)
class FiberDescription:
    target_class: int
    components: tuple[tuple[int, Sublattice], ...]


def fiber(m: SystemMap, c: int) -> FiberDescription:
    """Source classes over c, each with the pulled-back stabilizer lattice."""
    om_t = m.target.omega()
    tgt = om_t[c].cone
    span = tgt.span()
    P = quotient_projection(m.target.rank, span).projection
    stab = kernel(compose_lattice(P, m.F))
    comps = tuple((a, stab) for a in sorted(m.class_map) if m.class_map[a] == c)
    return FiberDescription(c, comps)


def is_affine_map(m: SystemMap) -> bool:
    """Each target chart has a preimage class set with a unique maximum.

    A chart with empty preimage counts as affine (the empty preimage is affine).
    """
    if not m.target.is_affine:
        raise FanSystemError("is_affine_map needs an affine target")
    om, om_t = m.source.omega(), m.target.omega()
    for i in m.target.charts:
        top = om_t.class_of(m.target.chart_cone(i), i)
        R = [a for a in range(len(om)) if om_t.leq(m.class_map[a], top)]
        maxima = [a for a in R if not any(b != a and om.leq(a, b) for b in R)]
        if len(maxima) > 1:
            return False
    return True


def is_surjective(m: SystemMap) -> bool:
    return m.F.rank() == m.target.rank and m.image_classes() == set(range(len(m.target.omega())))


def compose(m1: SystemMap, m2: SystemMap) -> SystemMap:
    """``m1 ∘ m2``: first m2, then m1."""
    if m2.target != m1.source:
        raise MapError("maps are not composable")
    F = compose_lattice(m1.F, m2.F)
    out = SystemMap(F, m2.source, m1.target,
                    {a: m1.class_map[b] for a, b in m2.class_map.items()})
    problems = validate_map(out)
    if problems:
        raise MapError("; ".join(str(p) for p in problems))
    return out


def _check_ranks(F: LatticeMap, S: SystemOfFans, T: SystemOfFans):
    if F.source_rank != S.rank or F.target_rank != T.rank:
        raise MapError(f"lattice map Z^{F.source_rank} -> Z^{F.target_rank} does not fit "
                       f"Z^{S.rank} -> Z^{T.rank}")
