"""Exact integer lattice linear algebra.

Vectors are plain tuples of Python ints.  Sublattices are stored by their
row-style Hermite normal form, so two sublattices are equal iff their
``basis`` tuples are equal.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vector = tuple[int, ...]
Matrix = tuple[Vector, ...]


class LatticeError(ValueError):
    """Dimension mismatch or a non-primitive sublattice where one is required."""


def dot(u: Sequence[int], v: Sequence[int]):
    return sum(a * b for a, b in zip(u, v))


def primitive(v: Sequence[int]) -> Vector:
    """Divide out the gcd of the entries (zero stays zero)."""
    g = 0
    for a in v:
        g = gcd(g, a)
    if g <= 1:
        return tuple(int(a) for a in v)
    return tuple(a // g for a in v)


def clear_denominators(v: Sequence[Fraction]) -> Vector:
    """Smallest positive integer multiple of a rational vector, made primitive."""
    den = 1
    for a in v:
        den = den * Fraction(a).denominator // gcd(den, Fraction(a).denominator)
    return primitive(tuple(int(Fraction(a) * den) for a in v))


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def echelon_with_transform(rows: Sequence[Sequence[int]], ncols: int | None = None):
    """Row-reduce an integer matrix by unimodular row operations.

    Returns ``(H, T)`` with ``T @ A == H``, ``T`` unimodular and ``H`` in
    Hermite normal form (positive pivots, entries above a pivot reduced
    into ``[0, pivot)``, zero rows at the bottom).
    """
    A = [list(r) for r in rows]
    m = len(A)
    if ncols is None:
        ncols = len(A[0]) if A else 0
    T = [[int(i == j) for j in range(m)] for i in range(m)]
    pivot_row = 0
    for col in range(ncols):
        if pivot_row >= m:
            break
        for r in range(pivot_row + 1, m):
            if A[r][col] == 0:
                continue
            a, b = A[pivot_row][col], A[r][col]
            g, x, y = _xgcd(a, b)
            p, q = a // g, b // g
            # [[x, y], [-q, p]] has determinant 1
            A[pivot_row], A[r] = (
                [x * u + y * v for u, v in zip(A[pivot_row], A[r])],
                [-q * u + p * v for u, v in zip(A[pivot_row], A[r])],
            )
            T[pivot_row], T[r] = (
                [x * u + y * v for u, v in zip(T[pivot_row], T[r])],
                [-q * u + p * v for u, v in zip(T[pivot_row], T[r])],
            )
        piv = A[pivot_row][col]
        if piv == 0:
            continue
        if piv < 0:
            A[pivot_row] = [-u for u in A[pivot_row]]
            T[pivot_row] = [-u for u in T[pivot_row]]
            piv = -piv
        for r in range(pivot_row):
            f = A[r][col] // piv
            if f:
                A[r] = [u - f * v for u, v in zip(A[r], A[pivot_row])]
                T[r] = [u - f * v for u, v in zip(T[r], T[pivot_row])]
        pivot_row += 1
    H = tuple(tuple(r) for r in A)
    return H, tuple(tuple(r) for r in T)


def hnf(rows: Iterable[Sequence[int]], ncols: int) -> Matrix:
    """Hermite normal form basis of the lattice spanned by ``rows``."""
    rows = [tuple(r) for r in rows]
    if not rows:
        return ()
    H, _ = echelon_with_transform(rows, ncols)
    return tuple(r for r in H if any(r))


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> Matrix:
    """HNF basis of ``{x in Z^n : A x = 0}`` for the matrix with the given rows."""
    for r in rows:
        if len(r) != n:
            raise LatticeError(f"row of length {len(r)} in a matrix with {n} columns")
    if not rows:
        return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    transposed = [tuple(r[j] for r in rows) for j in range(n)]
    H, T = echelon_with_transform(transposed, len(rows))
    kernel = [T[i] for i in range(n) if not any(H[i])]
    return hnf(kernel, n)


def matrix_rank(rows: Sequence[Sequence[int]], n: int) -> int:
    return len(hnf(rows, n))


def solve_rational(rows: Sequence[Sequence[int]], rhs: Sequence[int]):
    """Some rational solution of ``A x = b`` or None (Gauss-Jordan on Fractions)."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    M = [[Fraction(a) for a in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [a * inv for a in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    if any(M[i][n] != 0 for i in range(r, m)):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = M[i][n]
    return tuple(x)


@dataclass(frozen=True)
class Sublattice:
    """A sublattice of ``Z^ambient_rank`` given by its HNF basis."""

    ambient_rank: int
    basis: Matrix

    @classmethod
    def span(cls, ambient_rank: int, gens: Iterable[Sequence[int]]) -> "Sublattice":
        gens = [tuple(g) for g in gens]
        for g in gens:
            if len(g) != ambient_rank:
                raise LatticeError(f"vector {g} does not live in Z^{ambient_rank}")
        return cls(ambient_rank, hnf(gens, ambient_rank))

    @classmethod
    def zero(cls, ambient_rank: int) -> "Sublattice":
        return cls(ambient_rank, ())

    @classmethod
    def full(cls, ambient_rank: int) -> "Sublattice":
        return cls.span(ambient_rank, _identity(ambient_rank))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def orthogonal(self) -> Matrix:
        """HNF basis of the saturated annihilator in the dual lattice."""
        return integer_kernel(self.basis, self.ambient_rank)

    def is_primitive(self) -> bool:
        return saturate(self.basis, self.ambient_rank) == self

    def contains(self, v: Sequence[int]) -> bool:
        if len(v) != self.ambient_rank:
            raise LatticeError("rank mismatch")
        return hnf(list(self.basis) + [tuple(v)], self.ambient_rank) == self.basis

    def contains_rationally(self, v: Sequence[int]) -> bool:
        return all(dot(w, v) == 0 for w in self.orthogonal())

    def __add__(self, other: "Sublattice") -> "Sublattice":
        if other.ambient_rank != self.ambient_rank:
            raise LatticeError("rank mismatch")
        return Sublattice.span(self.ambient_rank, self.basis + other.basis)

    def __str__(self) -> str:
        return "span(" + ", ".join(format_vector(v) for v in self.basis) + ")"


def _identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def saturate(gens: Iterable[Sequence[int]], ambient_rank: int) -> Sublattice:
    """Smallest primitive sublattice containing ``gens``: ``Z^n ∩ Q-span(gens)``."""
    gens = [tuple(g) for g in gens]
    for g in gens:
        if len(g) != ambient_rank:
            raise LatticeError(f"vector {g} does not live in Z^{ambient_rank}")
    if not any(any(g) for g in gens):
        return Sublattice.zero(ambient_rank)
    annihilator = integer_kernel(gens, ambient_rank)
    return Sublattice(ambient_rank, integer_kernel(annihilator, ambient_rank))


@dataclass(frozen=True)
class LatticeMap:
    """Homomorphism ``Z^source_rank -> Z^target_rank`` acting on column vectors."""

    matrix: Matrix
    source_rank: int
    target_rank: int

    def __post_init__(self):
        if len(self.matrix) != self.target_rank:
            raise LatticeError("matrix has the wrong number of rows")
        for row in self.matrix:
            if len(row) != self.source_rank:
                raise LatticeError("matrix has the wrong number of columns")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], source_rank: int) -> "LatticeMap":
        rows = tuple(tuple(int(a) for a in r) for r in rows)
        return cls(rows, source_rank, len(rows))

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]], target_rank: int) -> "LatticeMap":
        rows = tuple(tuple(c[i] for c in cols) for i in range(target_rank))
        return cls(rows, len(cols), target_rank)

    @classmethod
    def identity(cls, n: int) -> "LatticeMap":
        return cls(_identity(n), n, n)

    @classmethod
    def zero(cls, source_rank: int, target_rank: int) -> "LatticeMap":
        return cls(tuple((0,) * source_rank for _ in range(target_rank)), source_rank, target_rank)

    def __call__(self, v: Sequence[int]) -> Vector:
        if len(v) != self.source_rank:
            raise LatticeError(f"vector of length {len(v)} fed to a map from Z^{self.source_rank}")
        return tuple(dot(row, v) for row in self.matrix)

    def columns(self) -> Matrix:
        return tuple(tuple(r[j] for r in self.matrix) for j in range(self.source_rank))

    def pullback(self, u: Sequence[int]) -> Vector:
        """The linear form ``u ∘ F`` on the source."""
        return tuple(sum(u[i] * self.matrix[i][j] for i in range(self.target_rank))
                     for j in range(self.source_rank))

    def rank(self) -> int:
        return matrix_rank(self.matrix, self.source_rank)

    def is_unimodular(self) -> bool:
        return (self.source_rank == self.target_rank
                and hnf(self.matrix, self.source_rank) == _identity(self.source_rank))

    def right_inverse(self) -> "LatticeMap":
        """An integer section ``s`` with ``F ∘ s = id``; raises if F is not onto Z^m."""
        m, n = self.target_rank, self.source_rank
        if m == 0:
            return LatticeMap(tuple(() for _ in range(n)), 0, n)
        H, T = echelon_with_transform(self.columns(), m)
        top = [list(H[i]) for i in range(m)]
        if any(top[i][i] != 1 for i in range(m)):
            raise LatticeError("map is not surjective over the integers")
        # H0 upper unitriangular; s = T^t [H0^{-t}; 0]
        inv_t = _inverse_unitriangular_transpose(top)
        cols = []
        for k in range(m):
            col = [sum(T[i][r] * inv_t[i][k] for i in range(m)) for r in range(n)]
            cols.append(col)
        rows = tuple(tuple(cols[k][r] for k in range(m)) for r in range(n))
        section = LatticeMap(rows, m, n)
        assert compose(self, section) == LatticeMap.identity(m)
        return section

    def __str__(self) -> str:
        return "[" + "; ".join(" ".join(str(a) for a in r) for r in self.matrix) + "]"


def _inverse_unitriangular_transpose(H0: list[list[int]]) -> list[list[int]]:
    """(H0^t)^{-1} for an upper unitriangular integer matrix H0."""
    m = len(H0)
    L = [[H0[j][i] for j in range(m)] for i in range(m)]  # lower unitriangular
    inv = [[int(i == j) for j in range(m)] for i in range(m)]
    for i in range(m):
        for k in range(i):
            f = L[i][k]
            if f:
                inv[i] = [a - f * b for a, b in zip(inv[i], inv[k])]
    return inv


def compose(F: LatticeMap, G: LatticeMap) -> LatticeMap:
    """``F ∘ G`` (apply G first)."""
    if G.target_rank != F.source_rank:
        raise LatticeError(f"cannot compose Z^{F.source_rank}->... after ...->Z^{G.target_rank}")
    rows = tuple(
        tuple(sum(F.matrix[i][k] * G.matrix[k][j] for k in range(F.source_rank))
              for j in range(G.source_rank))
        for i in range(F.target_rank)
    )
    return LatticeMap(rows, G.source_rank, F.target_rank)


def kernel(F: LatticeMap) -> Sublattice:
    return Sublattice(F.source_rank, integer_kernel(F.matrix, F.source_rank))


@dataclass(frozen=True)
class LatticeProjection:
    """Projection ``N -> N/kernel`` with a fixed basis of the quotient."""

    kernel: Sublattice
    projection: LatticeMap


def quotient_projection(ambient_rank: int, L: Sublattice) -> LatticeProjection:
    """Canonical projection with kernel exactly ``L``.

    The rows of the projection matrix are the HNF basis of the annihilator of
    ``L``; this basis extends to a basis of the dual lattice because ``L`` is
    primitive, so the map is onto.
    """
    if L.ambient_rank != ambient_rank:
        raise LatticeError("sublattice lives in a different lattice")
    if not L.is_primitive():
        raise LatticeError(f"sublattice {L} is not primitive; saturate it first")
    rows = L.orthogonal()
    return LatticeProjection(L, LatticeMap(rows, ambient_rank, len(rows)))


def format_vector(v: Sequence[int]) -> str:
    return "(" + ",".join(str(a) for a in v) + ")"
