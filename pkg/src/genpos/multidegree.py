"""Combinatorics of multidegrees in N^k.

A multidegree is a plain tuple of non-negative ints and a shape is a tuple of
positive ints ``(n_1, ..., n_k)`` naming P^{n_1} x ... x P^{n_k}.  Axes are
0-based throughout the package.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb, prod
from typing import Callable, Iterable, Iterator, Sequence

MultiDegree = tuple[int, ...]
Shape = tuple[int, ...]


class DimensionMismatch(ValueError):
    pass


def as_shape(dims: Iterable[int]) -> Shape:
    shape = tuple(int(n) for n in dims)
    if not shape:
        raise ValueError("shape needs at least one factor")
    if any(n < 1 for n in shape):
        raise ValueError(f"every projective dimension must be >= 1, got {shape}")
    return shape


def as_degree(parts: Iterable[int], k: int | None = None) -> MultiDegree:
    j = tuple(int(a) for a in parts)
    if any(a < 0 for a in j):
        raise ValueError(f"multidegree parts must be >= 0, got {j}")
    if k is not None and len(j) != k:
        raise DimensionMismatch(f"degree {j} has length {len(j)}, expected {k}")
    return j


def _check(j: Sequence[int], shape: Sequence[int]) -> None:
    if len(j) != len(shape):
        raise DimensionMismatch(f"degree {tuple(j)} does not match shape {tuple(shape)}")


def leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def unit(k: int, l: int, c: int = 1) -> MultiDegree:
    return tuple(c if h == l else 0 for h in range(k))


def shift(j: Sequence[int], l: int, c: int = 1) -> tuple[int, ...]:
    """``j + c*e_l``; the result may have a negative part when ``c < 0``."""
    out = list(j)
    out[l] += c
    return tuple(out)


def is_nonneg(j: Sequence[int]) -> bool:
    return all(a >= 0 for a in j)


def box_degrees(box: Sequence[int]) -> Iterator[MultiDegree]:
    """All degrees ``<= box``, in lexicographic (hence graded-compatible) order."""
    return itertools.product(*(range(b + 1) for b in box))


def graded_dim(j: Sequence[int], shape: Sequence[int]) -> int:
    """N(j) = prod_h C(n_h + j_h, j_h), the number of monomials of degree j."""
    _check(j, shape)
    return prod(comb(n + a, a) for n, a in zip(shape, j))


def _block_monomials(n: int, d: int) -> list[tuple[int, ...]]:
    # exponent vectors of degree d in n+1 variables, grevlex descending
    # with x_0 > x_1 > ... > x_n
    out = []

    def rec(pos, left, acc):
        # fill from the last variable backwards so smaller powers of late
        # variables come first, which is grevlex order
        if pos == 0:
            acc[0] = left
            out.append(tuple(acc))
            acc[0] = 0
            return
        for e in range(left + 1):
            acc[pos] = e
            rec(pos - 1, left - e, acc)
        acc[pos] = 0

    rec(n, d, [0] * (n + 1))
    return out


def monomials_of_degree(j: Sequence[int], shape: Sequence[int]) -> list[tuple[int, ...]]:
    """Exponent vectors of all monomials of degree ``j``.

    Vectors run over the sum(n_h + 1) variables, block by block.  Inside a
    block the order is grevlex; the blocks are combined lexicographically with
    block 0 varying slowest.
    """
    _check(j, shape)
    blocks = [_block_monomials(n, d) for n, d in zip(shape, j)]
    return [sum(parts, ()) for parts in itertools.product(*blocks)]


def minimal_elements(
    pred: Callable[[MultiDegree], bool], shape: Sequence[int], box: Sequence[int]
) -> set[MultiDegree]:
    """Minimal degrees ``<= box`` satisfying an upward-closed predicate."""
    _check(box, shape)
    k = len(box)
    hits = {j for j in box_degrees(box) if pred(j)}
    return {
        j for j in hits
        if not any(j[l] > 0 and shift(j, l, -1) in hits for l in range(k))
    }


def axis_bound(n: int, s: int, strict: bool = True) -> int:
    """Smallest d with C(n + d, d) > s (or >= s when ``strict`` is False)."""
    d = 0
    while not (comb(n + d, d) > s if strict else comb(n + d, d) >= s):
        d += 1
    return d


@dataclass
class DegreeSetReport:
    """The degree sets attached to s generic points in a product of spaces.

    ``D`` is the antichain of minimal degrees with N(j) > s, ``DD`` the
    degrees j = i + e_l (i in D) not excluded by some j - e_a - e_b >= i' in D,
    ``L[j]`` the axes l with j - e_l in D, and ``T`` = D union (D + e_l).
    """
    s: int
    shape: Shape
    D: set[MultiDegree] = field(default_factory=set)
    DD: set[MultiDegree] = field(default_factory=set)
    L: dict[MultiDegree, tuple[int, ...]] = field(default_factory=dict)
    T: set[MultiDegree] = field(default_factory=set)

    def exclusion_witness(self, j: MultiDegree):
        """Return ``(a, b, i)`` with ``j - e_a - e_b >= i`` for i in D, or None."""
        return _exclusion_witness(j, self.D)


def _exclusion_witness(j, D):
    k = len(j)
    for a in range(k):
        for b in range(a, k):
            r = shift(shift(j, a, -1), b, -1)
            if not is_nonneg(r):
                continue
            for i in sorted(D):
                if leq(i, r):
                    return a, b, i
    return None


def compute_degree_sets(s: int, shape: Sequence[int]) -> DegreeSetReport:
    if s < 1:
        raise ValueError("s must be >= 1")
    shape = as_shape(shape)
    k = len(shape)
    box = tuple(axis_bound(n, s) for n in shape)
    D = minimal_elements(lambda j: graded_dim(j, shape) > s, shape, box)
    T = set(D)
    for i in D:
        for l in range(k):
            T.add(shift(i, l))
    DD = {j for j in T - D if _exclusion_witness(j, D) is None}
    L = {
        j: tuple(l for l in range(k) if j[l] > 0 and shift(j, l, -1) in D)
        for j in DD
    }
    return DegreeSetReport(s=s, shape=shape, D=D, DD=DD, L=L, T=T)
