"""Double description method over the integers.

``generators_of(ineqs, n)`` returns the lineality basis and the extreme rays
of ``{x in R^n : <a, x> >= 0 for every a}``.  All arithmetic is on Python
ints; every intermediate vector is kept primitive.
"""
from __future__ import annotations

from typing import Sequence

from .lattice import Vector, dot, primitive


def _combine(s: int, v: Sequence[int], t: int, w: Sequence[int]) -> Vector:
    return primitive(tuple(s * a - t * b for a, b in zip(v, w)))


def generators_of(ineqs: Sequence[Sequence[int]], n: int) -> tuple[list[Vector], list[Vector]]:
    lineality: list[Vector] = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    rays: list[Vector] = []
    # zero sets over processed inequalities, parallel to ``rays``
    zeros: list[frozenset[int]] = []

    for k, a in enumerate(ineqs):
        if not any(a):
            continue
        moving = [l for l in lineality if dot(a, l)]
        if moving:
            l0 = moving[0]
            if dot(a, l0) < 0:
                l0 = tuple(-x for x in l0)
            s = dot(a, l0)
            lineality = [
                _combine(s, l, dot(a, l), l0) if dot(a, l) else l
                for l in lineality if l is not moving[0]
            ]
            rays = [_combine(s, r, dot(a, r), l0) if dot(a, r) else r for r in rays]
            zeros = [z | {k} for z in zeros]
            rays.append(primitive(l0))
            zeros.append(frozenset(range(k)))
            continue

        values = [dot(a, r) for r in rays]
        pos = [i for i, v in enumerate(values) if v > 0]
        neg = [i for i, v in enumerate(values) if v < 0]
        zer = [i for i, v in enumerate(values) if v == 0]
        new_rays = [rays[i] for i in pos] + [rays[i] for i in zer]
        new_zeros = [zeros[i] for i in pos] + [zeros[i] | {k} for i in zer]
        for p in pos:
            for q in neg:
                common = zeros[p] & zeros[q]
                if any(common <= zeros[r] for r in range(len(rays)) if r != p and r != q):
                    continue
                new_rays.append(_combine(values[p], rays[q], values[q], rays[p]))
                new_zeros.append(common | {k})
        rays, zeros = new_rays, new_zeros

    seen = set()
    unique = []
    for r in rays:
        if any(r) and r not in seen:
            seen.add(r)
            unique.append(r)
    return lineality, unique
