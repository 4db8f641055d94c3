"""Systems of fans and quasi-fans, the glueing relation and its orbit poset."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .cone import Cone, ConeError, format_cone, image, intersect, is_face
from .lattice import LatticeMap

Pair = tuple[int, int]


class FanSystemError(ValueError):
    """Raised when a system of fans is used in a way its structure forbids."""


class InvalidSystem(FanSystemError):
    def __init__(self, violations: Sequence["Violation"]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


@dataclass(frozen=True)
class Violation:
    axiom: str
    indices: tuple[int, ...]
    cones: tuple[Cone, ...] = ()
    detail: str = ""

    def __str__(self) -> str:
        where = ",".join(str(i) for i in self.indices)
        cones = " ".join(format_cone(c) for c in self.cones)
        text = f"{self.axiom} at ({where})"
        if cones:
            text += f" for {cones}"
        if self.detail:
            text += f": {self.detail}"
        return text


def face_closure(cones: Iterable[Cone]) -> frozenset[Cone]:
    out: set[Cone] = set()
    for c in cones:
        out |= c.faces
    return frozenset(out)


def maximal_cones(cones: Iterable[Cone]) -> list[Cone]:
    """Cones that are not a proper face of another cone in the set."""
    cones = set(cones)
    maxima = [c for c in cones if not any(d != c and is_face(c, d) for d in cones)]
    return sorted(maxima, key=Cone.sort_key)


def minimal_cones(cones: Iterable[Cone]) -> list[Cone]:
    cones = set(cones)
    minima = [c for c in cones if not any(d != c and is_face(d, c) for d in cones)]
    return sorted(minima, key=Cone.sort_key)


class SystemOfFans:
    """A family ``(Δ_ij)`` of (quasi-)fans indexed by ordered pairs of charts.

    ``blocks`` maps ``(i, j)`` to a face-closed set of cones.  A pair given in
    only one orientation is mirrored; a pair missing in both orientations
    defaults to the minimal cones shared by ``Δ_ii`` and ``Δ_jj``.  Both
    orientations may be given, in which case :func:`validate` checks that they
    agree.
    """

    def __init__(self, rank: int, blocks: Mapping[Pair, Iterable[Cone]],
                 charts: Sequence[int] | None = None):
        self.rank = rank
        raw = {(int(i), int(j)): frozenset(v) for (i, j), v in blocks.items()}
        if charts is None:
            charts = sorted({i for i, _ in raw} | {j for _, j in raw})
        self.charts: tuple[int, ...] = tuple(sorted(charts))
        for i in self.charts:
            if (i, i) not in raw:
                raise FanSystemError(f"chart {i} has no fan Δ_{i}{i}")
        for (i, j) in list(raw):
            if i not in self.charts or j not in self.charts:
                raise FanSystemError(f"block ({i},{j}) refers to an unknown chart")
        for i, j in itertools.product(self.charts, repeat=2):
            if (i, j) in raw:
                continue
            if (j, i) in raw:
                raw[(i, j)] = raw[(j, i)]
            else:
                common = set(minimal_cones(raw[(i, i)])) & set(minimal_cones(raw[(j, j)]))
                raw[(i, j)] = frozenset(common)
        self._blocks = raw
        self._omega = None

    # ------------------------------------------------------------- builders
    @classmethod
    def from_maximal(cls, rank: int, maxima: Mapping[Pair, Iterable[Cone]],
                     charts: Sequence[int] | None = None) -> "SystemOfFans":
        """Build from maximal cones per block; each block is closed under faces."""
        return cls(rank, {k: face_closure(v) for k, v in maxima.items()}, charts)

    @classmethod
    def affine(cls, rank: int, cones: Sequence[Cone],
               glue: Mapping[Pair, Iterable[Cone]] = None) -> "SystemOfFans":
        """Charts ``1..r`` with ``Δ_ii`` the faces of ``cones[i-1]``."""
        maxima: dict[Pair, Iterable[Cone]] = {(i + 1, i + 1): [c] for i, c in enumerate(cones)}
        for k, v in (glue or {}).items():
            maxima[k] = v
        return cls.from_maximal(rank, maxima, range(1, len(cones) + 1))

    # ------------------------------------------------------------- accessors
    def delta(self, i: int, j: int) -> frozenset[Cone]:
        try:
            return self._blocks[(i, j)]
        except KeyError:
            raise FanSystemError(f"unknown pair of charts ({i},{j})") from None

    def delta_max(self, i: int, j: int) -> list[Cone]:
        return maximal_cones(self.delta(i, j))

    def pairs(self) -> list[Pair]:
        return [(i, j) for i in self.charts for j in self.charts if i <= j]

    def all_cones(self) -> frozenset[Cone]:
        out: set[Cone] = set()
        for i in self.charts:
            out |= self.delta(i, i)
        return frozenset(out)

    @property
    def is_affine(self) -> bool:
        return all(len(self.delta_max(i, i)) == 1 for i in self.charts)

    def chart_cone(self, i: int) -> Cone:
        maxima = self.delta_max(i, i)
        if len(maxima) != 1:
            raise FanSystemError(f"chart {i} is not affine")
        return maxima[0]

    def is_fan_system(self) -> bool:
        return all(c.is_pointed for c in self.all_cones())

    def minimal_cone(self) -> Cone:
        minima = set()
        for i in self.charts:
            minima |= set(minimal_cones(self.delta(i, i)))
        if len(minima) != 1:
            raise FanSystemError("the fans of the system do not share one minimal cone")
        return next(iter(minima))

    def omega(self) -> "OrbitClassTable":
        if self._omega is None:
            self._omega = orbit_classes(self)
        return self._omega

    def __eq__(self, other) -> bool:
        if not isinstance(other, SystemOfFans):
            return NotImplemented
        return (self.rank, self.charts, self._blocks) == (other.rank, other.charts, other._blocks)

    __hash__ = None

    def __repr__(self) -> str:
        return f"SystemOfFans(rank={self.rank}, charts={self.charts})"

    def describe(self) -> list[str]:
        lines = [f"rank {self.rank}"]
        for i, j in self.pairs():
            maxima = " | ".join(format_cone(c) for c in self.delta_max(i, j))
            label = f"chart {i}" if i == j else f"glue {i} {j}"
            lines.append(f"{label}: {maxima}")
        return lines


# ------------------------------------------------------------ validation


def _is_face_closed(cones: frozenset[Cone]) -> list[Cone]:
    return [c for c in cones if not c.faces <= cones]


def validate(S: SystemOfFans) -> list[Violation]:
    out: list[Violation] = []
    for (i, j), cones in sorted(S._blocks.items()):
        for c in cones:
            if c.rank != S.rank:
                out.append(Violation("rank", (i, j), (c,), f"cone lives in Z^{c.rank}"))
    if out:
        return out
    for (i, j), cones in sorted(S._blocks.items()):
        if not cones:
            out.append(Violation("nonempty", (i, j), (), "Δij must contain the minimal cone"))
        for c in sorted(_is_face_closed(cones), key=Cone.sort_key):
            out.append(Violation("face closure", (i, j), (c,), "some face is missing"))
    for i in S.charts:
        cones = sorted(S.delta(i, i), key=Cone.sort_key)
        for a, b in itertools.combinations(cones, 2):
            m = intersect(a, b)
            if not (is_face(m, a) and is_face(m, b)):
                out.append(Violation("quasi-fan", (i,), (a, b), "intersection is not a common face"))
    minima = set()
    for cones in S._blocks.values():
        minima |= set(minimal_cones(cones))
    if len(minima) > 1:
        out.append(Violation("common minimal cone", tuple(S.charts),
                             tuple(sorted(minima, key=Cone.sort_key)), "minimal cones differ"))
    for c in minima:
        if c.dim != len(c.lineality):
            out.append(Violation("common minimal cone", tuple(S.charts), (c,), "minimal cone is not linear"))
    for i, j in itertools.product(S.charts, repeat=2):
        if i < j and S.delta(i, j) != S.delta(j, i):
            out.append(Violation("Δij = Δji", (i, j)))
    for i, j in itertools.product(S.charts, repeat=2):
        extra = S.delta(i, j) - (S.delta(i, i) & S.delta(j, j))
        for c in sorted(extra, key=Cone.sort_key):
            out.append(Violation("Δij ≺ Δii ∩ Δjj", (i, j), (c,)))
    for i, j, k in itertools.product(S.charts, repeat=3):
        if len({i, j, k}) < 3 or i > k:
            continue
        extra = (S.delta(i, j) & S.delta(j, k)) - S.delta(i, k)
        for c in sorted(extra, key=Cone.sort_key):
            out.append(Violation("Δij ∩ Δjk ≺ Δik", (i, j, k), (c,)))
    return out


def require_valid(S: SystemOfFans) -> None:
    problems = validate(S)
    if problems:
        raise InvalidSystem(problems)


# ------------------------------------------------------------ orbit classes


@dataclass(frozen=True)
class OrbitClass:
    id: int
    cone: Cone
    charts: frozenset[int]

    def label(self) -> str:
        return f"[{format_cone(self.cone)},{min(self.charts)}]"


@dataclass
class OrbitClassTable:
    classes: list[OrbitClass]
    lookup: dict[tuple[Cone, int], int]
    _leq: set[tuple[int, int]] = field(default_factory=set, repr=False)

    def class_of(self, cone: Cone, chart: int) -> int:
        try:
            return self.lookup[(cone, chart)]
        except KeyError:
            raise FanSystemError(f"({format_cone(cone)}, {chart}) is not a labelled cone of the system") from None

    def __len__(self) -> int:
        return len(self.classes)

    def __getitem__(self, c: int) -> OrbitClass:
        if not 0 <= c < len(self.classes):
            raise FanSystemError(f"unknown class {c}")
        return self.classes[c]

    def leq(self, a: int, b: int) -> bool:
        """``a ≼ b``: the orbit of a lies in the closure of the orbit of b."""
        return (a, b) in self._leq

    def down(self, c: int) -> set[int]:
        self[c]
        return {a for a in range(len(self.classes)) if self.leq(a, c)}

    def up(self, c: int) -> set[int]:
        self[c]
        return {b for b in range(len(self.classes)) if self.leq(c, b)}

    def maximal(self) -> list[int]:
        return [c for c in range(len(self.classes)) if self.up(c) == {c}]

    def covers(self) -> list[tuple[int, int]]:
        n = len(self.classes)
        out = []
        for a in range(n):
            for b in range(n):
                if a != b and self.leq(a, b) and not any(
                        c not in (a, b) and self.leq(a, c) and self.leq(c, b) for c in range(n)):
                    out.append((a, b))
        return out


def orbit_classes(S: SystemOfFans) -> OrbitClassTable:
    labelled = [(c, i) for i in S.charts for c in S.delta(i, i)]
    parent = {x: x for x in labelled}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in itertools.combinations(S.charts, 2):
        for c in S.delta(i, j):
            if (c, i) in parent and (c, j) in parent:
                a, b = find((c, i)), find((c, j))
                if a != b:
                    parent[a] = b
    groups: dict = {}
    for x in labelled:
        groups.setdefault(find(x), []).append(x)
    raw = []
    for members in groups.values():
        cone = members[0][0]
        raw.append((cone, frozenset(i for _, i in members)))
    raw.sort(key=lambda t: (t[0].sort_key(), min(t[1])))
    classes = [OrbitClass(k, c, ch) for k, (c, ch) in enumerate(raw)]
    lookup = {(cl.cone, i): cl.id for cl in classes for i in cl.charts}
    leq = set()
    for a in classes:
        for b in classes:
            if is_face(a.cone, b.cone) and any(lookup.get((a.cone, i)) == a.id for i in b.charts):
                leq.add((a.id, b.id))
    return OrbitClassTable(classes, lookup, leq)


def chart_classes(S: SystemOfFans, c: int) -> set[int]:
    return S.omega().down(c)


# ------------------------------------------------------------ derived systems


def to_affine_system(S: SystemOfFans) -> tuple[SystemOfFans, dict[int, int]]:
    """Charts indexed by the maximal classes of Ω(S), numbered ``1..k``.

    Returns the affine system and the relabelling ``old class id -> new class id``.
    """
    require_valid(S)
    om = S.omega()
    tops = sorted(om.maximal())
    rep = {m: min(om[c].charts) for m, c in enumerate(tops, start=1)}
    cone_of = {m: om[c].cone for m, c in enumerate(tops, start=1)}
    blocks: dict[Pair, frozenset[Cone]] = {}
    for m, n in itertools.product(rep, repeat=2):
        if m > n:
            continue
        common = cone_of[m].faces & cone_of[n].faces
        glued = frozenset(t for t in common if om.class_of(t, rep[m]) == om.class_of(t, rep[n]))
        blocks[(m, n)] = glued
    A = SystemOfFans(S.rank, blocks, sorted(rep))
    new = A.omega()
    relabel = {}
    for cl in om.classes:
        m = next(m for m, c in enumerate(tops, start=1) if om.leq(cl.id, c))
        relabel[cl.id] = new.class_of(cl.cone, m)
    return A, relabel


def is_affine_intersection(S: SystemOfFans) -> bool:
    if not S.is_affine:
        raise FanSystemError("affine intersection is defined for affine systems")
    return all(len(S.delta_max(i, j)) == 1 for i, j in S.pairs())


def is_separated(S: SystemOfFans) -> bool:
    """Diagonal criterion: chart cones meet in common faces that are glued."""
    require_valid(S)
    for i, j in S.pairs():
        for a in S.delta(i, i):
            for b in S.delta(j, j):
                m = intersect(a, b)
                if not (is_face(m, a) and is_face(m, b)) or m not in S.delta(i, j):
                    return False
    return True


def from_cones(rank: int, cones: Sequence, mode: str = "common_proper_faces") -> SystemOfFans:
    """Standard systems built from cones (or fans given by maximal cones).

    * ``common_proper_faces``: ``Δ_ij`` = faces common to σ_i and σ_j that are
      proper in both (i ≠ j);
    * ``trivial_glueing``: ``Δ_ij`` = the minimal cone only;
    * ``full_fan``: ``Δ_ij = Δ_ii ∩ Δ_jj``; the inputs must fit into one fan.
    """
    fans = []
    for c in cones:
        fans.append([c] if isinstance(c, Cone) else list(c))
    for fan in fans:
        for c in fan:
            if c.rank != rank:
                raise ConeError(f"cone {format_cone(c)} does not live in Z^{rank}")
    diag = {i + 1: face_closure(f) for i, f in enumerate(fans)}
    blocks: dict[Pair, frozenset[Cone]] = {(i, i): d for i, d in diag.items()}
    for i, j in itertools.combinations(diag, 2):
        if mode == "trivial_glueing":
            blocks[(i, j)] = frozenset(set(minimal_cones(diag[i])) & set(minimal_cones(diag[j])))
        elif mode == "common_proper_faces":
            if len(fans[i - 1]) != 1 or len(fans[j - 1]) != 1:
                raise FanSystemError("common_proper_faces needs one cone per chart")
            a, b = fans[i - 1][0], fans[j - 1][0]
            shared = set(minimal_cones(diag[i])) & set(minimal_cones(diag[j]))
            blocks[(i, j)] = frozenset(t for t in diag[i] & diag[j] if t != a and t != b) | shared
        elif mode == "full_fan":
            for a in fans[i - 1]:
                for b in fans[j - 1]:
                    m = intersect(a, b)
                    if not (is_face(m, a) and is_face(m, b)):
                        raise FanSystemError(
                            f"{format_cone(a)} and {format_cone(b)} do not meet in a common face")
            blocks[(i, j)] = diag[i] & diag[j]
        else:
            raise FanSystemError(f"unknown mode {mode!r}")
    return SystemOfFans(rank, blocks, sorted(diag))


def single_fan(rank: int, maximal: Sequence[Cone]) -> SystemOfFans:
    """A fan as a one-chart system."""
    return SystemOfFans.from_maximal(rank, {(1, 1): maximal}, [1])


def make_irredundant(S: SystemOfFans) -> SystemOfFans:
    """Drop chart j when some i < j is glued to it along all of ``Δ_jj``.

    Surviving charts keep their ids.
    """
    keep = []
    for j in S.charts:
        if any(S.delta(i, j) == S.delta(j, j) for i in keep):
            continue
        keep.append(j)
    blocks = {(i, j): S.delta(i, j) for i in keep for j in keep if i <= j}
    return SystemOfFans(S.rank, blocks, keep)


def renumber(S: SystemOfFans) -> SystemOfFans:
    """Same system with charts renumbered ``1..r`` in order."""
    new = {c: k for k, c in enumerate(S.charts, start=1)}
    return SystemOfFans(S.rank, {(new[i], new[j]): S.delta(i, j) for i, j in S.pairs()},
                        sorted(new.values()))


def is_isomorphic(S1: SystemOfFans, S2: SystemOfFans, F: LatticeMap | None = None) -> bool:
    """Whether the lattice isomorphism F (default identity) carries S1 onto S2.

    Both systems are reduced to their affine systems over maximal classes; an
    isomorphism is then a chart bijection matching chart cones and glueings.
    """
    if F is None:
        if S1.rank != S2.rank:
            return False
        F = LatticeMap.identity(S1.rank)
    if F.source_rank != S1.rank or F.target_rank != S2.rank or not F.is_unimodular():
        return False
    A1, _ = to_affine_system(S1)
    A2, _ = to_affine_system(S2)
    if len(A1.charts) != len(A2.charts):
        return False

    def push(cones):
        return frozenset(image(F, c) for c in cones)

    c1 = {m: image(F, A1.chart_cone(m)) for m in A1.charts}
    c2 = {m: A2.chart_cone(m) for m in A2.charts}
    order = list(A1.charts)
    used: dict[int, int] = {}

    def extend(k: int) -> bool:
        if k == len(order):
            return True
        m = order[k]
        for n in A2.charts:
            if n in used.values() or c1[m] != c2[n]:
                continue
            used[m] = n
            if all(push(A1.delta(m, p)) == A2.delta(n, used[p]) for p in order[:k + 1]) and extend(k + 1):
                return True
            del used[m]
        return False

    return extend(0)
