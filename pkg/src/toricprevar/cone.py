"""Exact rational polyhedral cones.

A :class:`Cone` is stored in a canonical double description:

* ``lineality``: HNF basis of the lattice ``(σ ∩ -σ) ∩ N``;
* ``rays``: primitive extreme rays, each reduced orthogonally modulo the
  lineality space, sorted;
* ``facets``: primitive inner facet normals, each reduced orthogonally
  modulo the annihilator of ``span(σ)``, sorted;
* ``equations``: HNF basis of the annihilator of ``span(σ)``.

Equal cones have equal canonical forms, so ``==`` and ``hash`` are exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from . import _dd
from .lattice import (
    LatticeError,
    LatticeMap,
    Matrix,
    Sublattice,
    Vector,
    clear_denominators,
    dot,
    format_vector,
    hnf,
    integer_kernel,
    primitive,
    quotient_projection,
    saturate,
)


class ConeError(ValueError):
    pass


def _reduce_modulo(v: Sequence[int], basis: Matrix) -> Vector:
    """Primitive positive multiple of the orthogonal projection of v onto basis^⊥."""
    if not basis:
        return primitive(v)
    k = len(basis)
    gram = [[Fraction(dot(b, c)) for c in basis] for b in basis]
    rhs = [Fraction(dot(b, v)) for b in basis]
    # solve gram * coeffs = rhs
    M = [row + [r] for row, r in zip(gram, rhs)]
    for c in range(k):
        p = next(i for i in range(c, k) if M[i][c] != 0)
        M[c], M[p] = M[p], M[c]
        inv = 1 / M[c][c]
        M[c] = [a * inv for a in M[c]]
        for i in range(k):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    coeffs = [M[i][k] for i in range(k)]
    proj = [Fraction(x) - sum(c * b[j] for c, b in zip(coeffs, basis)) for j, x in enumerate(v)]
    return clear_denominators(proj)


def _check_rank(rank: int, vectors: Iterable[Sequence[int]]):
    for v in vectors:
        if len(v) != rank:
            raise ConeError(f"vector {tuple(v)} does not live in Z^{rank}")


@dataclass(frozen=True)
class Cone:
    rank: int
    rays: Matrix
    lineality: Matrix
    facets: Matrix
    equations: Matrix

    # ------------------------------------------------------------------ build
    @staticmethod
    def from_generators(rank: int, gens: Iterable[Sequence[int]]) -> "Cone":
        gens = tuple(tuple(int(a) for a in g) for g in gens)
        _check_rank(rank, gens)
        return _cone_from_generators(rank, gens)

    @staticmethod
    def from_inequalities(rank: int, ineqs: Iterable[Sequence[int]] = (),
                          eqs: Iterable[Sequence[int]] = ()) -> "Cone":
        rows = [tuple(u) for u in ineqs]
        for w in eqs:
            rows.append(tuple(w))
            rows.append(tuple(-a for a in w))
        _check_rank(rank, rows)
        lin, rays = _dd.generators_of(rows, rank)
        gens = list(rays) + list(lin) + [tuple(-a for a in l) for l in lin]
        return Cone.from_generators(rank, gens)

    @staticmethod
    def zero(rank: int) -> "Cone":
        return Cone.from_generators(rank, ())

    @staticmethod
    def space(rank: int) -> "Cone":
        return Cone.from_generators(rank, [e for i in range(rank) for e in (_unit(rank, i), _unit(rank, i, -1))])

    @staticmethod
    def linear(W: Sublattice) -> "Cone":
        gens = list(W.basis) + [tuple(-a for a in b) for b in W.basis]
        return Cone.from_generators(W.ambient_rank, gens)

    # ------------------------------------------------------------- accessors
    @property
    def dim(self) -> int:
        return self.rank - len(self.equations)

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    @property
    def ray_generators(self) -> Matrix:
        return self.rays

    @property
    def facet_normals(self) -> Matrix:
        return self.facets

    @property
    def lineality_basis(self) -> Sublattice:
        return self.lineality_space()

    def generators(self) -> Matrix:
        """Generators as a cone: rays together with ± the lineality basis."""
        return self.rays + self.lineality + tuple(tuple(-a for a in l) for l in self.lineality)

    def lineality_space(self) -> Sublattice:
        return Sublattice(self.rank, self.lineality)

    def span(self) -> Sublattice:
        """The saturated lattice ``span(σ) ∩ N``."""
        return Sublattice(self.rank, integer_kernel(self.equations, self.rank))

    def sort_key(self):
        return (self.dim, len(self.lineality), self.lineality, len(self.rays), self.rays)

    def contains(self, v: Sequence[int]) -> bool:
        _check_rank(self.rank, [v])
        return (all(dot(u, v) >= 0 for u in self.facets)
                and all(dot(w, v) == 0 for w in self.equations))

    def contains_cone(self, other: "Cone") -> bool:
        _same_rank(self, other)
        return all(self.contains(g) for g in other.generators())

    def relint_contains(self, v: Sequence) -> bool:
        """Whether the (rational) vector v lies in the relative interior."""
        _check_rank(self.rank, [v])
        return (all(dot(u, v) > 0 for u in self.facets)
                and all(dot(w, v) == 0 for w in self.equations))

    def interior_point(self) -> Vector:
        """A lattice point of the relative interior (sum of the rays)."""
        p = [0] * self.rank
        for r in self.rays:
            for i, a in enumerate(r):
                p[i] += a
        return tuple(p)

    # ---------------------------------------------------------------- faces
    def _face_from_rays(self, ray_ids: frozenset[int]) -> "Cone":
        gens = [self.rays[i] for i in sorted(ray_ids)]
        gens += list(self.lineality) + [tuple(-a for a in l) for l in self.lineality]
        return Cone.from_generators(self.rank, gens)

    @cached_property
    def _faces_by_rays(self) -> dict[frozenset[int], "Cone"]:
        top = frozenset(range(len(self.rays)))
        found = {top: self}
        todo = [top]
        while todo:
            face = todo.pop()
            for k, u in enumerate(self.facets):
                sub = frozenset(i for i in face if dot(u, self.rays[i]) == 0)
                if sub != face and sub not in found:
                    found[sub] = self._face_from_rays(sub)
                    todo.append(sub)
        return found

    @cached_property
    def faces(self) -> frozenset["Cone"]:
        return frozenset(self._faces_by_rays.values())

    def sorted_faces(self) -> list["Cone"]:
        return sorted(self.faces, key=Cone.sort_key)

    def face_covers(self) -> list[tuple["Cone", "Cone"]]:
        """Pairs (τ, σ') of faces with τ a facet of σ'."""
        faces = self.sorted_faces()
        return [(t, s) for s in faces for t in faces if t.dim == s.dim - 1 and s.contains_cone(t)]

    def minimal_face(self) -> "Cone":
        return Cone.linear(self.lineality_space())

    def smallest_face_containing_point(self, v: Sequence[int]) -> "Cone":
        if not self.contains(v):
            raise ConeError(f"{format_vector(v)} is not in {self}")
        tight = [u for u in self.facets if dot(u, v) == 0]
        ids = frozenset(i for i, r in enumerate(self.rays) if all(dot(u, r) == 0 for u in tight))
        return self._faces_by_rays.get(ids) or self._face_from_rays(ids)

    def smallest_face_containing(self, other: "Cone") -> "Cone":
        if not self.contains_cone(other):
            raise ConeError(f"{other} is not contained in {self}")
        return self.smallest_face_containing_point(other.interior_point())

    def __str__(self) -> str:
        return format_cone(self)


def _unit(n: int, i: int, s: int = 1) -> Vector:
    return tuple(s if j == i else 0 for j in range(n))


def _same_rank(a: Cone, b: Cone):
    if a.rank != b.rank:
        raise ConeError(f"rank mismatch: {a.rank} vs {b.rank}")


@lru_cache(maxsize=65536)
def _cone_from_generators(rank: int, gens: tuple[Vector, ...]) -> Cone:
    gens = tuple(g for g in gens if any(g))
    dual_lin, dual_rays = _dd.generators_of(gens, rank)
    equations = hnf(dual_lin, rank) if dual_lin else ()
    # the annihilator of span(σ) is saturated; make the basis canonical
    equations = saturate(equations, rank).basis if equations else ()
    rows = list(dual_rays)
    for w in equations:
        rows.append(w)
        rows.append(tuple(-a for a in w))
    lin, rays = _dd.generators_of(rows, rank)
    lineality = saturate(lin, rank).basis if lin else ()
    rays = sorted({_reduce_modulo(r, lineality) for r in rays})
    facets = sorted({_reduce_modulo(u, equations) for u in dual_rays})
    return Cone(rank, tuple(rays), lineality, tuple(facets), equations)


def format_cone(c: Cone) -> str:
    parts = [format_vector(r) for r in c.rays]
    if c.lineality:
        parts.append("lin " + " ".join(format_vector(l) for l in c.lineality))
    return "cone(" + " ".join(parts) + ")"


# ------------------------------------------------------------ operations


def cone_from_generators(rank: int, gens: Iterable[Sequence[int]]) -> Cone:
    return Cone.from_generators(rank, gens)


@dataclass(frozen=True)
class FaceLattice:
    faces: tuple[Cone, ...]
    covers: tuple[tuple[Cone, Cone], ...]

    def __len__(self) -> int:
        return len(self.faces)

    def __contains__(self, tau) -> bool:
        return tau in self.faces

    def __iter__(self):
        return iter(self.faces)

    @property
    def minimum(self) -> Cone:
        return self.faces[0]

    @property
    def maximum(self) -> Cone:
        return self.faces[-1]


def faces(sigma: Cone) -> FaceLattice:
    return FaceLattice(tuple(sigma.sorted_faces()), tuple(sigma.face_covers()))


def is_face(tau: Cone, sigma: Cone) -> bool:
    _same_rank(tau, sigma)
    return tau in sigma.faces


def relint_contains(sigma: Cone, v: Sequence) -> bool:
    return sigma.relint_contains(v)


def relint_meets(sigma: Cone, tau: Cone) -> bool:
    """Whether ``σ° ∩ τ° ≠ ∅``.

    With ``ρ = σ ∩ τ`` the relative interiors meet iff ρ is contained in no
    proper face of σ and no proper face of τ, i.e. iff an interior point of ρ
    is interior to both.
    """
    _same_rank(sigma, tau)
    rho = intersect(sigma, tau)
    x = rho.interior_point()
    return sigma.relint_contains(x) and tau.relint_contains(x)


def hull_union(sigma: Cone, tau: Cone) -> Cone:
    _same_rank(sigma, tau)
    return Cone.from_generators(sigma.rank, sigma.generators() + tau.generators())


def intersect(sigma: Cone, tau: Cone) -> Cone:
    _same_rank(sigma, tau)
    if sigma.sort_key() > tau.sort_key():
        sigma, tau = tau, sigma
    return _intersect(sigma, tau)


@lru_cache(maxsize=65536)
def _intersect(sigma: Cone, tau: Cone) -> Cone:
    return Cone.from_inequalities(sigma.rank, sigma.facets + tau.facets,
                                  sigma.equations + tau.equations)


def image(F: LatticeMap, sigma: Cone) -> Cone:
    if F.source_rank != sigma.rank:
        raise ConeError(f"map from Z^{F.source_rank} applied to a cone in Z^{sigma.rank}")
    return Cone.from_generators(F.target_rank, [F(g) for g in sigma.generators()])


def preimage(F: LatticeMap, tau: Cone) -> Cone:
    if F.target_rank != tau.rank:
        raise ConeError("rank mismatch")
    return Cone.from_inequalities(F.source_rank, [F.pullback(u) for u in tau.facets],
                                  [F.pullback(w) for w in tau.equations])


def preimage_intersect(F: LatticeMap, tau: Cone, sigma: Cone) -> Cone:
    """``F^{-1}(τ) ∩ σ``."""
    if F.target_rank != tau.rank or F.source_rank != sigma.rank:
        raise ConeError("rank mismatch")
    ineqs = [F.pullback(u) for u in tau.facets] + list(sigma.facets)
    eqs = [F.pullback(w) for w in tau.equations] + list(sigma.equations)
    return Cone.from_inequalities(sigma.rank, ineqs, eqs)


def smallest_face_containing(sigma: Cone, W: Sublattice) -> tuple[Cone, Sublattice]:
    """``σ_W`` (smallest face containing ``W ∩ σ``) and ``Ŵ = σ_W + W``."""
    if W.ambient_rank != sigma.rank:
        raise ConeError("rank mismatch")
    meet = intersect(sigma, Cone.linear(W))
    face = sigma.smallest_face_containing(meet)
    W_hat = saturate(face.generators() + W.basis, sigma.rank)
    return face, W_hat


def projection_along(L: Sublattice) -> LatticeMap:
    return quotient_projection(L.ambient_rank, saturate(L.basis, L.ambient_rank)).projection


def face_projection_conditions(sigma: Cone, tau: Cone, L: Sublattice) -> tuple[bool, bool, bool]:
    """The three equivalent conditions on a face τ ≺ σ and a subspace L.

    1. ``τ+L ≺ σ+L`` and ``(τ+L) ∩ σ = τ``;
    2. ``P¹(τ) ≺ P¹(σ)`` and ``P¹⁻¹(P¹(τ)) ∩ σ = τ`` with ``P¹`` along L;
    3. the same with the projection along ``L̂ = σ_L + L``.
    """
    if not is_face(tau, sigma):
        raise ConeError(f"{tau} is not a face of {sigma}")
    L = saturate(L.basis, L.ambient_rank)
    linear = Cone.linear(L)
    tau_L, sigma_L = hull_union(tau, linear), hull_union(sigma, linear)
    first = is_face(tau_L, sigma_L) and intersect(tau_L, sigma) == tau

    def projected(M: Sublattice) -> bool:
        P = projection_along(M)
        ptau, psigma = image(P, tau), image(P, sigma)
        return is_face(ptau, psigma) and preimage_intersect(P, ptau, sigma) == tau

    _, L_hat = smallest_face_containing(sigma, L)
    return first, projected(L), projected(L_hat)


def face_projection_check(sigma: Cone, tau: Cone, L: Sublattice) -> bool:
    """``P¹(τ) ≺ P¹(σ)`` and ``P¹⁻¹(P¹(τ)) ∩ σ = τ`` for the projection along L."""
    if not is_face(tau, sigma):
        raise ConeError(f"{tau} is not a face of {sigma}")
    P = projection_along(L)
    ptau, psigma = image(P, tau), image(P, sigma)
    return is_face(ptau, psigma) and preimage_intersect(P, ptau, sigma) == tau


__all__ = [
    "Cone", "ConeError", "FaceLattice", "LatticeError", "cone_from_generators", "faces", "is_face",
    "relint_contains", "relint_meets", "hull_union", "intersect", "image", "preimage",
    "preimage_intersect", "smallest_face_containing", "face_projection_check",
    "face_projection_conditions", "format_cone", "projection_along",
]
