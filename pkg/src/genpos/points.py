"""Finite point sets in P^{n_1} x ... x P^{n_k} and their Hilbert functions.

Coordinates are exact: ints/Fractions over Q, or residues when a prime ``p``
is given.  Each component of a point is stored normalized, with its first
nonzero coordinate equal to 1.
"""
from __future__ import annotations

import json
import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Iterable, Sequence

from .exactla import Echelon, Matrix, kernel_basis, span_dim, to_rational, to_residue
from .multidegree import (
    MultiDegree, Shape, as_degree, as_shape, axis_bound, box_degrees, graded_dim,
    is_nonneg, minimal_elements, monomials_of_degree, shift,
)

DEFAULT_COORD_BOUND = 50
DEFAULT_RETRIES = 100


class SamplingError(RuntimeError):
    """Random sampling gave up after its retry cap."""


def _normalize(coords: Sequence, p: int | None) -> tuple:
    if p is None:
        c = [to_rational(x) for x in coords]
    else:
        c = [to_residue(x, p) for x in coords]
    lead = next((x for x in c if x), None)
    if lead is None:
        raise ValueError("a projective point needs a nonzero coordinate")
    if p is None:
        return tuple(to_rational(Fraction(x) / lead) if x else 0 for x in c)
    inv = pow(lead, -1, p)
    return tuple(x * inv % p for x in c)


class PointSet:
    """``s`` distinct points of a product of projective spaces.

    Hilbert values and coordinate-ring pieces are cached per degree; the
    caches are guarded by a lock so one instance can be shared by threads.
    """

    def __init__(self, shape: Iterable[int], points: Iterable[Sequence[Sequence]],
                 p: int | None = None, seed: int | None = None):
        self.shape: Shape = as_shape(shape)
        self.k = len(self.shape)
        self.p = p
        self.seed = seed
        pts = []
        for P in points:
            P = list(P)
            if len(P) != self.k:
                raise ValueError(f"point {P} has {len(P)} components, expected {self.k}")
            comps = []
            for n, c in zip(self.shape, P):
                if len(c) != n + 1:
                    raise ValueError(f"component {c} should have {n + 1} coordinates")
                comps.append(_normalize(c, p))
            pts.append(tuple(comps))
        if not pts:
            raise ValueError("a point set needs at least one point")
        if len(set(pts)) != len(pts):
            raise ValueError("points must be pairwise distinct")
        self.points: tuple = tuple(pts)
        self.s = len(pts)
        # values of each variable x_{l,m} at every point
        self._var = [
            [tuple(P[l][m] for P in pts) for m in range(n + 1)]
            for l, n in enumerate(self.shape)
        ]
        self._lock = threading.Lock()
        self._spaces: dict[MultiDegree, Echelon] = {}
        self._slices: dict[MultiDegree, IdealSlice] = {}

    def __len__(self):
        return self.s

    def __eq__(self, other):
        return (isinstance(other, PointSet) and self.shape == other.shape
                and self.p == other.p and set(self.points) == set(other.points))

    def __repr__(self):
        return f"PointSet(s={self.s}, shape={self.shape}, p={self.p})"

    def variable_values(self, l: int, m: int) -> tuple:
        return self._var[l][m]

    def _mul(self, u, w):
        if self.p is None:
            return [a * b for a, b in zip(u, w)]
        return [a * b % self.p for a, b in zip(u, w)]

    def coordinate_space(self, j: Sequence[int]) -> Echelon:
        """The span V_j in k^s of the evaluation vectors of degree-j monomials.

        V_j is isomorphic to (R/I_X)_j, so its dimension is H_X(j).  The
        stored basis consists of monomial evaluation vectors, except that a
        full space is kept with the standard basis.
        """
        j = tuple(j)
        with self._lock:
            hit = self._spaces.get(j)
        if hit is not None:
            return hit
        s = self.s
        E = Echelon(s, self.p)
        if not any(j):
            E.add([1] * s)
        else:
            l = next(h for h in range(self.k) if j[h])
            prev = self.coordinate_space(shift(j, l, -1))
            if prev.dim == s:
                # every point has some nonzero x_{l,m}, so e_i lies in x_l * k^s
                E = Echelon.full(s, self.p)
            else:
                for b in prev.basis:
                    for xm in self._var[l]:
                        E.add(self._mul(xm, b))
                        if E.dim == s:
                            break
                    if E.dim == s:
                        break
        with self._lock:
            return self._spaces.setdefault(j, E)


def hilbert(X: PointSet, j: Sequence[int]) -> int:
    """H_X(j); zero when ``j`` has a negative part."""
    j = tuple(j)
    if len(j) != X.k:
        raise ValueError(f"degree {j} does not match shape {X.shape}")
    if not is_nonneg(j):
        return 0
    return X.coordinate_space(j).dim


def evaluation_matrix(X: PointSet, j: Sequence[int]) -> Matrix:
    """The s x N(j) matrix of monomials of degree j evaluated at the points."""
    j = as_degree(j, X.k)
    monos = monomials_of_degree(j, X.shape)
    p = X.p
    rows = []
    for P in X.points:
        coords = [x for comp in P for x in comp]
        row = []
        for e in monos:
            v = 1
            for x, a in zip(coords, e):
                if a:
                    v *= x ** a
            row.append(v % p if p is not None else v)
        rows.append(row)
    return Matrix(rows, len(monos))


@dataclass
class IdealSlice:
    """A basis of (I_X)_j as coefficient rows over the monomials of degree j."""
    degree: MultiDegree
    basis: Matrix

    @property
    def dim(self) -> int:
        return self.basis.nrows


def ideal_slice(X: PointSet, j: Sequence[int]) -> IdealSlice:
    j = as_degree(j, X.k)
    with X._lock:
        hit = X._slices.get(j)
    if hit is not None:
        return hit
    sl = IdealSlice(j, kernel_basis(evaluation_matrix(X, j), X.p))
    with X._lock:
        return X._slices.setdefault(j, sl)


def _offsets(shape):
    off, acc = [], 0
    for n in shape:
        off.append(acc)
        acc += n + 1
    return off


def multiply_slice(sl: IdealSlice, l: int, X: PointSet) -> Matrix:
    """Rows x_{l,m} * G for every basis row G and every variable of block l.

    Rows come G-major: x_{l,0}G_1, ..., x_{l,n_l}G_1, x_{l,0}G_2, ...  Columns
    follow the monomial order of degree ``sl.degree + e_l``.
    """
    if not 0 <= l < X.k:
        raise ValueError(f"block index {l} out of range for k={X.k}")
    j = sl.degree
    up = shift(j, l)
    target = monomials_of_degree(up, X.shape)
    index = {e: c for c, e in enumerate(target)}
    src = monomials_of_degree(j, X.shape)
    off = _offsets(X.shape)[l]
    # column maps c -> column of x_{l,m} * mono_c
    maps = []
    for m in range(X.shape[l] + 1):
        pos = off + m
        maps.append([index[e[:pos] + (e[pos] + 1,) + e[pos + 1:]] for e in src])
    rows = []
    for G in sl.basis.rows:
        nz = [(c, x) for c, x in enumerate(G) if x]
        for cmap in maps:
            row = [0] * len(target)
            for c, x in nz:
                row[cmap[c]] = x
            rows.append(row)
    return Matrix(rows, len(target))


def w_dim(X: PointSet, j: Sequence[int], L: Iterable[int]) -> int:
    """dim of the sum over l in L of R_{e_l} (I_X)_{j - e_l} inside (I_X)_j."""
    j = as_degree(j, X.k)
    L = sorted(set(L))
    stacked = Matrix([], graded_dim(j, X.shape))
    for l in L:
        below = shift(j, l, -1)
        if not is_nonneg(below):
            raise ValueError(f"j - e_{l} has a negative part for j={j}")
        stacked = stacked.stack(multiply_slice(ideal_slice(X, below), l, X))
    return span_dim(stacked, X.p, cap=graded_dim(j, X.shape) - hilbert(X, j))


@dataclass
class GenericityCertificate:
    """Hilbert values on the finite degree set that decides generic position.

    ``checked`` lists ``(degree, H_X(degree), min(N(degree), s))``.
    """
    generic: bool
    s: int
    shape: Shape
    checked: list = field(default_factory=list)
    failing: MultiDegree | None = None

    def __bool__(self):
        return self.generic

    def to_json(self) -> dict:
        return {
            "generic": self.generic,
            "failing": list(self.failing) if self.failing is not None else None,
            "checked": [
                {"degree": list(d), "hilbert": h, "expected": e}
                for d, h, e in self.checked
            ],
        }


def genericity_degrees(s: int, shape: Sequence[int]) -> list[MultiDegree]:
    """{j : N(j) < s} together with min{j : N(j) >= s}, sorted."""
    shape = as_shape(shape)
    box = tuple(axis_bound(n, s, strict=False) for n in shape)
    below = {j for j in box_degrees(box) if graded_dim(j, shape) < s}
    edge = minimal_elements(lambda j: graded_dim(j, shape) >= s, shape, box)
    return sorted(below | edge)


def is_generic_position(X: PointSet) -> GenericityCertificate:
    """Decide whether H_X(j) = min(N(j), s) for all j.

    By monotonicity of H_X it is enough to look at the degrees where N < s and
    at the minimal degrees where N >= s.
    """
    cert = GenericityCertificate(True, X.s, X.shape)
    for j in genericity_degrees(X.s, X.shape):
        h = hilbert(X, j)
        want = min(graded_dim(j, X.shape), X.s)
        cert.checked.append((j, h, want))
        if h != want and cert.generic:
            cert.generic = False
            cert.failing = j
    return cert


def projection_sizes(X: PointSet) -> tuple[int, ...]:
    """t_l = number of distinct l-th components among the points."""
    return tuple(len({P[l] for P in X.points}) for l in range(X.k))


def derive_seed(seed: int, attempt: int) -> int:
    return seed if attempt == 0 else seed + attempt * 1_000_003


def random_point_set(s: int, shape: Iterable[int], coord_bound: int = DEFAULT_COORD_BOUND,
                     seed: int = 0, p: int | None = None,
                     max_tries: int = DEFAULT_RETRIES) -> PointSet:
    """``s`` distinct points with x_{l,0} = 1 and other coordinates uniform in
    [-coord_bound, coord_bound]; a deterministic function of ``seed``."""
    shape = as_shape(shape)
    if s < 1:
        raise ValueError("s must be >= 1")
    if coord_bound < 0:
        raise ValueError("coord_bound must be >= 0")
    rng = random.Random(seed)
    pts: list = []
    seen = set()
    misses = 0
    while len(pts) < s:
        P = tuple(
            (1,) + tuple(rng.randint(-coord_bound, coord_bound) for _ in range(n))
            for n in shape
        )
        key = P if p is None else tuple(tuple(x % p for x in c) for c in P)
        if key in seen:
            misses += 1
            if misses > max_tries:
                raise SamplingError(
                    f"could not draw {s} distinct points with coord_bound={coord_bound}")
            continue
        seen.add(key)
        pts.append(P)
    return PointSet(shape, pts, p=p, seed=seed)


def random_generic_point_set(s: int, shape: Iterable[int],
                             coord_bound: int = DEFAULT_COORD_BOUND, seed: int = 0,
                             p: int | None = None,
                             max_tries: int = DEFAULT_RETRIES) -> PointSet:
    """Rejection-sample a certified generic set; the accepted seed is kept on
    the result as ``X.seed``."""
    for attempt in range(max_tries):
        sd = derive_seed(seed, attempt)
        try:
            X = random_point_set(s, shape, coord_bound, sd, p, max_tries)
        except SamplingError:
            continue
        if is_generic_position(X):
            return X
    raise SamplingError(
        f"no generic set of {s} points in shape {tuple(shape)} after {max_tries} seeds")


# -- file format ---------------------------------------------------------------

def _integer_representative(comp, p):
    if p is not None:
        return [int(x) for x in comp]
    den = 1
    for x in comp:
        if isinstance(x, Fraction):
            den = lcm(den, x.denominator)
    return [int(x * den) for x in comp]


def point_set_to_json(X: PointSet) -> dict:
    return {
        "shape": list(X.shape),
        "points": [
            [[str(c) for c in _integer_representative(comp, X.p)] for comp in P]
            for P in X.points
        ],
    }


def point_set_from_json(data: dict, p: int | None = None) -> PointSet:
    try:
        shape = data["shape"]
        pts = [[[Fraction(str(c)) for c in comp] for comp in P] for P in data["points"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed point-set JSON: {exc}") from exc
    return PointSet(shape, pts, p=p)


def save_points(X: PointSet, path: str | Path) -> None:
    Path(path).write_text(json.dumps(point_set_to_json(X), indent=1) + "\n")


def load_points(path: str | Path, p: int | None = None) -> PointSet:
    return point_set_from_json(json.loads(Path(path).read_text()), p=p)
