"""Quotients of systems of fans by sublattices.

Contains the chart-wise algebraic quotient, the face-projection test for good
prequotients, the Init / Loop 1 / Loop 2 prequotient algorithm, the reduction
of quasi-fan systems to fan systems, and toric separation.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable

from .cone import (
    Cone,
    format_cone,
    hull_union,
    image,
    intersect,
    is_face,
    preimage_intersect,
    smallest_face_containing,
)
from .lattice import (
    LatticeError,
    LatticeMap,
    Sublattice,
    compose as compose_lattice,
    quotient_projection,
    saturate,
)
from .sysfan import (
    FanSystemError,
    InvalidSystem,
    SystemOfFans,
    face_closure,
    maximal_cones,
    require_valid,
    single_fan,
    validate,
)
from .sysmap import SystemMap, compose, induced_from_index_map, map_to_fan


class QuotientError(ValueError):
    pass


class NotGoodPrequotient(QuotientError):
    def __init__(self, report: "GoodPrequotientReport"):
        self.report = report
        super().__init__("no good prequotient: " + "; ".join(w.describe() for w in report.witnesses))


class SeparationDiverged(QuotientError):
    pass


def _projection(n: int, L: Sublattice) -> LatticeMap:
    if L.ambient_rank != n:
        raise LatticeError(f"sublattice lives in Z^{L.ambient_rank}, system in Z^{n}")
    return quotient_projection(n, L).projection


# ------------------------------------------------------------ affine charts


@dataclass(frozen=True)
class AffineQuotient:
    L_hat: Sublattice
    projection: LatticeMap
    cone: Cone


def affine_quotient_cone(sigma: Cone, L: Sublattice) -> AffineQuotient:
    """Algebraic quotient of one chart: project σ along ``L̂ = σ_L + L``."""
    if not sigma.is_pointed:
        raise QuotientError(f"{format_cone(sigma)} is not strictly convex")
    _, L_hat = smallest_face_containing(sigma, L)
    P = _projection(sigma.rank, L_hat)
    return AffineQuotient(L_hat, P, image(P, sigma))


# ------------------------------------------------------------ good prequotients


@dataclass(frozen=True)
class Witness:
    i: int
    j: int
    cone: Cone
    condition: str
    detail: Cone | None = None

    def describe(self) -> str:
        text = f"({self.i},{self.j},{format_cone(self.cone)}) violates {self.condition}"
        if self.detail is not None:
            text += f" [{format_cone(self.detail)}]"
        return text


@dataclass(frozen=True)
class GoodPrequotientReport:
    holds: bool
    witnesses: tuple[Witness, ...]
    L_hat: Sublattice | None


def check_good_prequotient(S: SystemOfFans, L: Sublattice) -> GoodPrequotientReport:
    """Face-projection test on every maximal glued cone, in both orientations.

    Condition ``i``: ``P(τ)`` is a face of ``P(σ(i))``.
    Condition ``ii``: ``P⁻¹(P(τ)) ∩ σ(i) = τ``; the witness carries the preimage.
    """
    require_valid(S)
    if not S.is_affine:
        raise FanSystemError("check_good_prequotient needs an affine system")
    P = _projection(S.rank, L)
    witnesses = []
    for i in S.charts:
        sigma = S.chart_cone(i)
        psigma = image(P, sigma)
        for j in S.charts:
            for tau in S.delta_max(i, j):
                ptau = image(P, tau)
                if not is_face(ptau, psigma):
                    witnesses.append(Witness(i, j, tau, "i", ptau))
                back = preimage_intersect(P, ptau, sigma)
                if back != tau:
                    witnesses.append(Witness(i, j, tau, "ii", back))
    L_hat = None
    if not witnesses:
        hats = {smallest_face_containing(S.chart_cone(i), L)[1] for i in S.charts}
        if len(hats) != 1:
            raise QuotientError("charts disagree on σ(i)_L + L although both conditions hold")
        L_hat = hats.pop()
    return GoodPrequotientReport(not witnesses, tuple(witnesses), L_hat)


@dataclass
class PrequotientResult:
    target: SystemOfFans
    map: SystemMap
    loop1_steps: int = 0
    loop2_steps: int = 0
    trace: list[str] = field(default_factory=list)


def build_good_prequotient(S: SystemOfFans, L: Sublattice) -> PrequotientResult:
    report = check_good_prequotient(S, L)
    if not report.holds:
        raise NotGoodPrequotient(report)
    P = _projection(S.rank, L)
    blocks = {}
    for i, j in S.pairs():
        blocks[(i, j)] = face_closure(image(P, t) for t in S.delta_max(i, j))
    quasi = SystemOfFans(P.target_rank, blocks, S.charts)
    require_valid(quasi)
    first = induced_from_index_map(P, {i: i for i in S.charts}, S, quasi)
    fans, second = quasifans_to_fans(quasi)
    return PrequotientResult(fans, compose(second, first))


# ------------------------------------------------------------ prequotient algorithm


def _key(c: Cone):
    return c.sort_key()


def _chooser(order: str, seed: int | None) -> Callable[[list], object]:
    if order == "lex":
        return lambda cands: cands[0]
    if order == "reverse":
        return lambda cands: cands[-1]
    if order == "random":
        rng = random.Random(seed)
        return lambda cands: rng.choice(cands)
    raise QuotientError(f"unknown scan order {order!r}")


class _Related:
    """Mutable system of related cones indexed by unordered chart pairs."""

    def __init__(self, charts, tau: dict[int, Cone], blocks: dict[tuple[int, int], frozenset[Cone]]):
        self.charts = charts
        self.tau = tau
        self.blocks = blocks

    def get(self, i: int, j: int) -> frozenset[Cone]:
        return self.blocks[(min(i, j), max(i, j))]

    def set(self, i: int, j: int, cones):
        self.blocks[(min(i, j), max(i, j))] = frozenset(cones)

    def maxima(self, i: int, j: int) -> list[Cone]:
        return maximal_cones(self.get(i, j))

    def measure(self, points) -> int:
        total = 0
        for i, j in itertools.product(self.charts, repeat=2):
            for t in self.maxima(i, j):
                total += sum(1 for p in points if t.contains(p))
        return total

    def max_counts(self):
        return tuple(len(self.maxima(i, j)) for i, j in itertools.product(self.charts, repeat=2))


def prequotient(S: SystemOfFans, L: Sublattice, order: str = "lex", seed: int | None = None,
                debug: bool = False, max_steps: int = 100000) -> PrequotientResult:
    """Prequotient of an affine system of quasi-fans by L.

    ``order`` picks among the applicable steps of each loop: ``lex`` takes the
    first in (i, j[, k], cone) order, ``reverse`` the last, ``random`` a seeded
    random one.  With ``debug`` the Loop 1 termination measure is asserted.
    """
    require_valid(S)
    if not S.is_affine:
        raise FanSystemError("the prequotient algorithm needs an affine system")
    P = _projection(S.rank, L)
    pick = _chooser(order, seed)
    charts = S.charts
    tau = {i: image(P, S.chart_cone(i)) for i in charts}
    blocks = {}
    for i, j in S.pairs():
        blocks[(i, j)] = face_closure(image(P, r) for r in S.delta_max(i, j))
    W = _Related(charts, tau, blocks)
    trace: list[str] = []
    points = set()
    for i in charts:
        for g in S.chart_cone(i).generators():
            points.add(P(g))

    loop1 = 0
    last_counts, last_measure = W.max_counts(), W.measure(points)
    while True:
        cands = []
        for i, j in itertools.product(charts, repeat=2):
            if i == j:
                continue
            for rho in W.maxima(i, j):
                if not is_face(rho, W.tau[i]):
                    cands.append((i, j, rho))
        if not cands:
            break
        cands.sort(key=lambda c: (c[0], c[1], _key(c[2])))
        i, j, rho = pick(cands)
        rho_i = W.tau[i].smallest_face_containing(rho)
        assert rho_i.relint_contains(rho.interior_point())
        W.tau[j] = hull_union(W.tau[j], rho_i)
        W.set(j, j, W.tau[j].faces)
        kept = [t for t in W.maxima(i, j) if t != rho] + [rho_i]
        W.set(i, j, face_closure(kept))
        loop1 += 1
        trace.append(f"L1 i={i} j={j} rho={format_cone(rho)} -> rho_i={format_cone(rho_i)}")
        if debug:
            counts, measure = W.max_counts(), W.measure(points)
            assert all(a <= b for a, b in zip(counts, last_counts)), "maximal cone count increased"
            if counts == last_counts:
                assert measure > last_measure, "Loop 1 measure did not grow"
            last_counts, last_measure = counts, measure
        if loop1 > max_steps:
            raise QuotientError("Loop 1 exceeded the step limit")

    loop2 = 0
    while True:
        cands = []
        for i, j, k in itertools.product(charts, repeat=3):
            if i == k or j in (i, k):
                continue
            for rho in W.get(i, j) & W.get(j, k):
                if rho not in W.get(i, k):
                    cands.append((i, j, k, rho))
        if not cands:
            break
        cands.sort(key=lambda c: (c[0], c[1], c[2], _key(c[3])))
        i, j, k, rho = pick(cands)
        W.set(i, k, W.get(i, k) | rho.faces)
        loop2 += 1
        trace.append(f"L2 i,j,k={i},{j},{k} rho={format_cone(rho)}")
        if loop2 > max_steps:
            raise QuotientError("Loop 2 exceeded the step limit")

    target = SystemOfFans(P.target_rank, {(i, j): W.get(i, j) for i, j in S.pairs()}, charts)
    problems = validate(target)
    if problems:
        raise InvalidSystem(problems)
    m = induced_from_index_map(P, {i: i for i in charts}, S, target)
    return PrequotientResult(target, m, loop1, loop2, trace)


# ------------------------------------------------------------ quasi-fans to fans


def quasifans_to_fans(S: SystemOfFans) -> tuple[SystemOfFans, SystemMap]:
    """Divide a quasi-fan system by its common minimal cone."""
    require_valid(S)
    sigma0 = S.minimal_cone()
    Q = _projection(S.rank, saturate(sigma0.lineality, S.rank))
    blocks = {(i, j): frozenset(image(Q, c) for c in S.delta(i, j)) for i, j in S.pairs()}
    T = SystemOfFans(Q.target_rank, blocks, S.charts)
    m = induced_from_index_map(Q, {i: i for i in S.charts}, S, T)
    return T, m


def toric_prequotient(S: SystemOfFans, L: Sublattice, **kwargs) -> PrequotientResult:
    res = prequotient(S, L, **kwargs)
    fans, q = quasifans_to_fans(res.target)
    return PrequotientResult(fans, compose(q, res.map), res.loop1_steps, res.loop2_steps, res.trace)


# ------------------------------------------------------------ toric separation


def _merge_once(work: list[Cone]) -> bool:
    for a, b in itertools.combinations(range(len(work)), 2):
        s, t = work[a], work[b]
        rho = intersect(s, t)
        s1 = s.smallest_face_containing(rho)
        t1 = t.smallest_face_containing(rho)
        if s1 != t1:
            work[a] = hull_union(s, t1)
            work[b] = hull_union(t, s1)
            return True
    return False


def _tidy(work: list[Cone]) -> list[Cone]:
    uniq = sorted(set(work), key=Cone.sort_key)
    return [c for c in uniq if not any(d != c and is_face(c, d) for d in uniq)]


def toric_separation(S: SystemOfFans, max_iterations: int = 10000) -> tuple[SystemOfFans, SystemMap]:
    """Map S to a single fan by merging cones that overlap badly.

    Two working cones σ, τ with ``ρ = σ ∩ τ`` are compatible iff the smallest
    faces of σ and of τ containing ρ coincide; otherwise each absorbs the other's
    face.  When no merge applies, the span of all linealities is divided out.
    The loop stops once the working cones form a fan of strictly convex cones.
    """
    require_valid(S)
    P = LatticeMap.identity(S.rank)
    work = _tidy([c for i in S.charts for c in S.delta_max(i, i)])
    steps = 0
    while True:
        while _merge_once(work):
            steps += 1
            if steps > max_iterations:
                raise SeparationDiverged(
                    f"toric separation did not stabilise after {max_iterations} merges; "
                    f"working cones: {' '.join(format_cone(c) for c in work)}")
            work = _tidy(work)
        lin = [v for c in work for v in c.lineality]
        if not lin:
            break
        Q = _projection(P.target_rank, saturate(lin, P.target_rank))
        P = compose_lattice(Q, P)
        work = _tidy([image(Q, c) for c in work])
    fan = single_fan(P.target_rank, work)
    return fan, map_to_fan(P, S, fan)


def toric_quotient(S: SystemOfFans, L: Sublattice, **kwargs) -> tuple[SystemOfFans, SystemMap]:
    pre = toric_prequotient(S, L, **kwargs)
    fan, sep = toric_separation(pre.target)
    return fan, compose(sep, pre.map)
