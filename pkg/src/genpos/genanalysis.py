"""Counting minimal generators of I_X.

Two independent routes are provided.  ``nu`` works only for non-degenerate
sets in generic position and counts generators degree by degree over the
sets D and DD of :mod:`genpos.multidegree`.  ``brute_force_nu`` makes no
assumption on X: it walks a box of degrees and reads the number of minimal
generators in each degree off a Koszul complex over the coordinate ring.
"""
from __future__ import annotations

import hashlib
import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .exactla import Echelon, Matrix, rank, span_dim
from .multidegree import (
    MultiDegree, Shape, as_degree, as_shape, box_degrees,
    compute_degree_sets, graded_dim, is_nonneg, shift,
)
from .points import (
    DEFAULT_COORD_BOUND, DEFAULT_RETRIES, GenericityCertificate, PointSet,
    SamplingError, derive_seed, hilbert, ideal_slice, is_generic_position, multiply_slice,
    projection_sizes, random_generic_point_set, w_dim,
)


class DegenerateInputError(ValueError):
    """s <= max(n_h) or s = 1, where the generic counting formulas do not apply."""


class NotGenericError(ValueError):
    def __init__(self, certificate: GenericityCertificate):
        self.certificate = certificate
        j = certificate.failing
        h = next(h for d, h, _ in certificate.checked if d == j)
        want = next(e for d, _, e in certificate.checked if d == j)
        super().__init__(
            f"point set is not in generic position: H_X{j} = {h}, expected {want}")


def _check_nondegenerate(s: int, shape: Sequence[int]) -> None:
    if s < 2 or s <= max(shape):
        raise DegenerateInputError(
            f"need 2 <= s and s > max(n_h); got s={s}, shape={tuple(shape)}")


# -- combinatorial bounds -------------------------------------------------------

def v_bound(s: int, shape: Sequence[int]) -> int:
    """The lower bound v(s; n_1, ..., n_k) for nu(I_X) of s generic points."""
    shape = as_shape(shape)
    _check_nondegenerate(s, shape)
    ds = compute_degree_sets(s, shape)
    total = sum(graded_dim(i, shape) - s for i in ds.D)
    for j in ds.DD:
        expected_w = sum(
            (shape[l] + 1) * (graded_dim(shift(j, l, -1), shape) - s) for l in ds.L[j])
        total += max(0, graded_dim(j, shape) - s - expected_w)
    return total


def upper_bound(s: int, shape: Sequence[int]) -> int:
    """Upper bound for nu(I_X) from dim W_j >= 2 dim (I_X)_{j - e_l}.

    The axis l is taken to be the smallest one in L_j; any choice is valid.
    """
    shape = as_shape(shape)
    _check_nondegenerate(s, shape)
    ds = compute_degree_sets(s, shape)
    total = sum(graded_dim(i, shape) - s for i in ds.D)
    for j in ds.DD:
        l = min(ds.L[j])
        total += graded_dim(j, shape) - 2 * graded_dim(shift(j, l, -1), shape) + s
    return total


# -- nu via the generic degree sets -------------------------------------------

@dataclass
class DegreeCount:
    slice_dim: int
    new_generators: int
    w_dim: int | None = None


@dataclass
class GeneratorReport:
    s: int
    shape: Shape
    generic: GenericityCertificate
    per_degree: dict[MultiDegree, DegreeCount]
    nu: int
    v: int
    upper: int

    @property
    def gap(self) -> int:
        return self.nu - self.v

    def to_json(self) -> dict:
        rows = []
        for j in sorted(self.per_degree):
            c = self.per_degree[j]
            row = {"degree": list(j), "slice_dim": c.slice_dim}
            if c.w_dim is not None:
                row["w_dim"] = c.w_dim
            row["new_generators"] = c.new_generators
            rows.append(row)
        return {
            "s": self.s,
            "shape": list(self.shape),
            "generic": self.generic.to_json(),
            "per_degree": rows,
            "nu": self.nu,
            "v": self.v,
            "upper": self.upper,
            "gap": self.gap,
        }


def nu(X: PointSet) -> GeneratorReport:
    """nu(I_X) for a non-degenerate set X in generic position.

    Degrees in D contribute N(i) - s generators each; a degree j in DD
    contributes N(j) - s - dim W_j, where W_j is spanned by the variable
    multiples of the slices in degrees j - e_l, l in L_j.
    """
    _check_nondegenerate(X.s, X.shape)
    cert = is_generic_position(X)
    if not cert:
        raise NotGenericError(cert)
    s, shape = X.s, X.shape
    ds = compute_degree_sets(s, shape)
    per: dict[MultiDegree, DegreeCount] = {}
    for i in sorted(ds.D):
        d = graded_dim(i, shape) - s
        per[i] = DegreeCount(slice_dim=d, new_generators=d)
    for j in sorted(ds.DD):
        d = graded_dim(j, shape) - s
        w = w_dim(X, j, ds.L[j])
        per[j] = DegreeCount(slice_dim=d, new_generators=d - w, w_dim=w)
    total = sum(c.new_generators for c in per.values())
    return GeneratorReport(s, shape, cert, per, total, v_bound(s, shape),
                           upper_bound(s, shape))


def _dim_or_zero(j, shape):
    return graded_dim(j, shape) if is_nonneg(j) else 0


def predicted_w_dim(s: int, shape: Sequence[int], j: Sequence[int]) -> int | None:
    """dim W_j forced by a closed formula, for j in DD with a single axis in L_j.

    If s = N(j - e_l) - 1 the one form below has n_l + 1 independent
    multiples.  In (P^1)^k the answer is N(j) - s when N(j - 2e_l) = s and
    2N(j - e_l) - 2s otherwise.  Returns None when neither case applies.
    """
    shape = as_shape(shape)
    j = as_degree(j, len(shape))
    ds = compute_degree_sets(s, shape)
    if j not in ds.DD or len(ds.L[j]) != 1:
        return None
    (l,) = ds.L[j]
    below = graded_dim(shift(j, l, -1), shape)
    if s == below - 1:
        return shape[l] + 1
    if all(n == 1 for n in shape):
        if _dim_or_zero(shift(j, l, -2), shape) == s:
            return graded_dim(j, shape) - s
        return 2 * below - 2 * s
    return None


def growth_law(X: PointSet, i: Sequence[int], l: int) -> tuple[int, int]:
    """``(dim R_{e_l} (I_X)_i, 2 dim (I_X)_i - dim (I_X)_{i - e_l})``.

    The two agree for every finite X in a product of projective lines.
    """
    i = as_degree(i, X.k)
    lo = shift(i, l, -1)
    dim_i = graded_dim(i, X.shape) - hilbert(X, i)
    dim_lo = _dim_or_zero(lo, X.shape) - hilbert(X, lo)
    observed = span_dim(multiply_slice(ideal_slice(X, i), l, X), X.p)
    return observed, 2 * dim_i - dim_lo


# -- general degree bound ------------------------------------------------------

@dataclass
class GeneralDegreeBound:
    """Candidate generator degrees E = B minus A for an arbitrary point set.

    ``thresholds[(l, rest)]`` is the first i >= 1 with
    H(.., i-1, ..) = H(.., i, ..) along axis l, ``rest`` being the other
    coordinates of the line.  Everything is restricted to the box (t_1..t_k).
    """
    box: MultiDegree
    thresholds: dict[tuple[int, tuple[int, ...]], int]
    B: set[MultiDegree]
    E: set[MultiDegree]

    def in_A(self, j: Sequence[int]) -> bool:
        for l in range(len(j)):
            rest = tuple(j[:l]) + tuple(j[l + 1:])
            i = self.thresholds.get((l, rest))
            if i is not None and j[l] > i:
                return True
        return False


def general_generator_degrees(X: PointSet) -> GeneralDegreeBound:
    t = projection_sizes(X)
    k = X.k
    box = tuple(t)
    thresholds = {}
    for l in range(k):
        others = [range(b + 1) for h, b in enumerate(box) if h != l]
        for rest in itertools.product(*others):
            prev = None
            for i in range(box[l] + 1):
                h = hilbert(X, rest[:l] + (i,) + rest[l:])
                if prev is not None and h == prev:
                    thresholds[(l, rest)] = i
                    break
                prev = h
    B = {j for j in box_degrees(box) if hilbert(X, j) < graded_dim(j, X.shape)}
    bound = GeneralDegreeBound(box, thresholds, B, set())
    bound.E = {j for j in B if not bound.in_A(j)}
    return bound


# -- brute force ---------------------------------------------------------------

@dataclass
class BruteForceResult:
    total: int
    per_degree: dict[MultiDegree, int]
    box: MultiDegree
    method: str

    @property
    def degrees(self) -> set[MultiDegree]:
        return set(self.per_degree)


def default_box(X: PointSet) -> MultiDegree:
    t = projection_sizes(X)
    ds = compute_degree_sets(X.s, X.shape)
    top = [max(i[h] for i in ds.D) + 1 for h in range(X.k)]
    return tuple(max(a, b) for a, b in zip(t, top))


def new_generators_by_slices(X: PointSet, j: Sequence[int]) -> int:
    """dim (I_X)_j minus the span of all x_{l,m} (I_X)_{j - e_l}.

    Literal linear algebra in R_j; only practical while N(j) stays small.
    """
    j = as_degree(j, X.k)
    d = graded_dim(j, X.shape) - hilbert(X, j)
    if d == 0:
        return 0
    stacked = Matrix([], graded_dim(j, X.shape))
    for l in range(X.k):
        below = shift(j, l, -1)
        if is_nonneg(below) and hilbert(X, below) < graded_dim(below, X.shape):
            stacked = stacked.stack(multiply_slice(ideal_slice(X, below), l, X))
    return d - span_dim(stacked, X.p, cap=d)


class _KoszulCounter:
    """Minimal generators of I_X per degree as dim Tor_1(R/I_X, k).

    (R/I_X)_j is realised as the span V_j of monomial evaluation vectors in
    k^s.  If some block b has x_{b,0} = 1 at every point then x_{b,0} is a
    nonzerodivisor; Tor is then computed over R/(x_{b,0}) for the module
    M_j = V_j / V_{j - e_b}, which vanishes once H stops growing along b.
    """

    def __init__(self, X: PointSet):
        self.X = X
        self.k = X.k
        self.b = next((l for l in range(X.k) if all(x == 1 for x in X.variable_values(l, 0))),
                      None)
        self.vars = [(l, m) for l in range(X.k) for m in range(X.shape[l] + 1)
                     if (l, m) != (self.b, 0)]
        self._sub: dict[MultiDegree, Echelon] = {}
        self._gens: dict[MultiDegree, list] = {}

    def _below(self, j):
        # subspace of V_j that is killed in M_j
        if j not in self._sub:
            E = Echelon(self.X.s, self.X.p)
            if self.b is not None:
                jb = shift(j, self.b, -1)
                if is_nonneg(jb):
                    V = self.X.coordinate_space(jb)
                    if V.dim == self.X.s:
                        E = Echelon.full(self.X.s, self.X.p)
                    else:
                        for v in V.basis:
                            E.add(v)
            self._sub[j] = E
        return self._sub[j]

    def mdim(self, j) -> int:
        if not is_nonneg(j):
            return 0
        return hilbert(self.X, j) - self._below(j).dim

    def _module_gens(self, j):
        # vectors of V_j whose classes form a basis of M_j
        if j not in self._gens:
            E = self._below(j).copy()
            out = []
            for v in self.X.coordinate_space(j).basis:
                if E.add(v):
                    out.append(v)
            self._gens[j] = out
        return self._gens[j]

    def count(self, j: MultiDegree) -> int:
        if not any(j):
            return 0
        X = self.X
        slots = []
        for (l, m) in self.vars:
            src = shift(j, l, -1)
            slots.append(self.mdim(src))
        kernel_d1 = sum(slots) - self.mdim(j)
        if kernel_d1 == 0:
            return 0
        # quotient coordinates of each slot
        offsets, width = [], 0
        free_cols = []
        for (l, m), dim_slot in zip(self.vars, slots):
            offsets.append(width)
            if dim_slot:
                fc = self._below(shift(j, l, -1)).free_columns
            else:
                fc = []
            free_cols.append(fc)
            width += len(fc)
        rows = []
        nv = len(self.vars)
        for a in range(nv):
            la, ma = self.vars[a]
            for c in range(a + 1, nv):
                if not (slots[a] or slots[c]):
                    continue
                lc, mc = self.vars[c]
                src = shift(shift(j, la, -1), lc, -1)
                if not is_nonneg(src) or self.mdim(src) == 0:
                    continue
                xa = X.variable_values(la, ma)
                xc = X.variable_values(lc, mc)
                ea = self._below(shift(j, la, -1))
                ec = self._below(shift(j, lc, -1))
                for g in self._module_gens(src):
                    row = [0] * width
                    # d(e_a ^ e_c) = x_a e_c - x_c e_a
                    ra = ea.reduce(X._mul(xc, g))
                    rc = ec.reduce(X._mul(xa, g))
                    for t, col in enumerate(free_cols[a]):
                        row[offsets[a] + t] = -ra[col]
                    for t, col in enumerate(free_cols[c]):
                        row[offsets[c] + t] = rc[col]
                    if any(row):
                        rows.append(row)
        im_d2 = rank(Matrix(rows, width), X.p, cap=kernel_d1) if rows else 0
        return kernel_d1 - im_d2


def brute_force_nu(X: PointSet, box: Sequence[int] | None = None,
                   method: str = "koszul") -> BruteForceResult:
    """Count minimal generators of I_X in every degree of ``box``.

    No genericity is assumed.  ``method="koszul"`` uses the small Koszul
    complex over the coordinate ring; ``method="slices"`` does the literal
    computation in R_j and is meant for cross-checks on small boxes.
    """
    if box is None:
        box = default_box(X)
    box = as_degree(box, X.k)
    if method == "koszul":
        counter = _KoszulCounter(X)
        count = counter.count
    elif method == "slices":
        def count(j):
            return new_generators_by_slices(X, j)
    else:
        raise ValueError(f"unknown method {method!r}")
    per = {}
    for j in box_degrees(box):
        c = count(j)
        if c:
            per[j] = c
    return BruteForceResult(sum(per.values()), per, box, method)


# -- special cases from the (P^1)^3 construction ----------------------------------

def _poly_mul(f, g):
    out = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _poly_add(*terms):
    out = {}
    for coeff, f in terms:
        for e, c in f.items():
            out[e] = out.get(e, 0) + coeff * c
    return {e: c for e, c in out.items() if c}


def _poly_eval(f, point):
    total = 0
    for e, c in f.items():
        v = c
        for x, a in zip(point, e):
            v *= x ** a
        total += v
    return total


def _var(i):
    return {tuple(int(t == i) for t in range(6)): 1}


def three_point_forms(a: Sequence[int], b: Sequence[int]) -> dict[str, dict]:
    """The forms F1 (deg 110), F2 (deg 101), F3 (deg 011) through
    [1:0]^3, [1:a1]x[1:a2]x[1:a3] and [1:b1]x[1:b2]x[1:b3].

    Polynomials are dicts over exponent vectors in (x0, x1, y0, y1, z0, z1).
    """
    a1, a2, a3 = a
    b1, b2, b3 = b
    x0, x1, y0, y1, z0, z1 = (_var(i) for i in range(6))
    F1 = _poly_add(((a2 * b1 - a1 * b2), _poly_mul(x1, y1)),
                   (a2 * b2 * (a1 - b1), _poly_mul(x1, y0)),
                   (a1 * b1 * (b2 - a2), _poly_mul(x0, y1)))
    F2 = _poly_add(((a3 * b1 - a1 * b3), _poly_mul(x1, z1)),
                   (a3 * b3 * (a1 - b1), _poly_mul(x1, z0)),
                   (a1 * b1 * (b3 - a3), _poly_mul(x0, z1)))
    F3 = _poly_add(((a2 * b3 - a3 * b2), _poly_mul(y1, z1)),
                   (a3 * b3 * (b2 - a2), _poly_mul(y1, z0)),
                   (a2 * b2 * (a3 - b3), _poly_mul(y0, z1)))
    return {"F1": F1, "F2": F2, "F3": F3}


def three_point_relations(a: Sequence[int], b: Sequence[int]) -> tuple[bool, bool]:
    """Check that x0 F3 and x1 F3 lie in the span of z F1 and y F2, through the
    two explicit linear relations, as exact polynomial identities."""
    a1, a2, a3 = a
    b1, b2, b3 = b
    F = three_point_forms(a, b)
    F1, F2, F3 = F["F1"], F["F2"], F["F3"]
    x0, x1, y0, y1, z0, z1 = (_var(i) for i in range(6))
    lhs1 = _poly_add((a1 * b1 * (a1 - b1), _poly_mul(x0, F3)))
    rhs1 = _poly_add(((a1 - b1) * a3 * b3, _poly_mul(z0, F1)),
                     (-(a1 - b1) * a2 * b2, _poly_mul(y0, F2)),
                     (a3 * b1 - a1 * b3, _poly_mul(z1, F1)),
                     (-(a2 * b1 - b2 * a1), _poly_mul(y1, F2)))
    lhs2 = _poly_add((a1 - b1, _poly_mul(x1, F3)))
    rhs2 = _poly_add((b2 - a2, _poly_mul(y1, F2)), (a3 - b3, _poly_mul(z1, F1)))
    return lhs1 == rhs1, lhs2 == rhs2


@dataclass
class ThreePointReport:
    seed: int
    a: tuple[int, int, int]
    b: tuple[int, int, int]
    generic: bool
    forms_vanish: bool
    relations: tuple[bool, bool]
    w_dim_111: int
    nu: int
    v: int

    @property
    def gap(self) -> int:
        return self.nu - self.v

    @property
    def ok(self) -> bool:
        return (self.generic and self.forms_vanish and all(self.relations)
                and self.w_dim_111 == 4 and self.gap == 1)

    def to_json(self) -> dict:
        return {
            "seed": self.seed, "a": list(self.a), "b": list(self.b),
            "generic": self.generic, "forms_vanish": self.forms_vanish,
            "relations": list(self.relations), "w_dim_111": self.w_dim_111,
            "nu": self.nu, "v": self.v, "gap": self.gap, "ok": self.ok,
        }


def verify_thm55(seed: int, coord_bound: int = DEFAULT_COORD_BOUND,
                 max_tries: int = DEFAULT_RETRIES) -> ThreePointReport:
    """Three generic points of P^1 x P^1 x P^1 in the normal form
    [1:0]^3, [1:a], [1:b]; recompute W_(1,1,1) and the generator excess."""
    for attempt in range(max_tries):
        sd = derive_seed(seed, attempt)
        rng = random.Random(sd)
        a = tuple(rng.randint(-coord_bound, coord_bound) for _ in range(3))
        b = tuple(rng.randint(-coord_bound, coord_bound) for _ in range(3))
        if any(x == 0 for x in a + b) or any(x == y for x, y in zip(a, b)):
            continue
        X = PointSet((1, 1, 1), [
            [(1, 0), (1, 0), (1, 0)],
            [(1, a[0]), (1, a[1]), (1, a[2])],
            [(1, b[0]), (1, b[1]), (1, b[2])],
        ], seed=sd)
        if not is_generic_position(X):
            continue
        forms = three_point_forms(a, b)
        vanish = all(
            _poly_eval(f, (P[0][0], P[0][1], P[1][0], P[1][1], P[2][0], P[2][1])) == 0
            for f in forms.values() for P in X.points)
        rep = nu(X)
        return ThreePointReport(
            seed=sd, a=a, b=b, generic=True, forms_vanish=vanish,
            relations=three_point_relations(a, b),
            w_dim_111=rep.per_degree[(1, 1, 1)].w_dim, nu=rep.nu, v=rep.v)
    raise SamplingError(f"no usable triple after {max_tries} seeds from {seed}")


# -- scans -----------------------------------------------------------------------

@dataclass
class ScanRow:
    s: int
    shape: Shape
    seed: int
    nu: int | None
    v: int | None
    equal: bool | None
    status: str

    def csv_fields(self) -> list[str]:
        def show(x):
            if x is None:
                return ""
            if isinstance(x, bool):
                return str(x).lower()
            return str(x)
        return [str(self.s), ",".join(map(str, self.shape)), str(self.seed),
                show(self.nu), show(self.v), show(self.equal), self.status]


    def to_json(self) -> dict:
        return {"s": self.s, "shape": list(self.shape), "seed": self.seed, "nu": self.nu,
                "v": self.v, "equal": self.equal, "status": self.status}


SCAN_HEADER = ["s", "shape", "seed", "nu", "v", "equal", "status"]


def cell_seed(base_seed: int, s: int, shape: Sequence[int], index: int) -> int:
    key = f"{base_seed}|{s}|{','.join(map(str, shape))}|{index}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:4], "big")


def _scan_cell(args) -> ScanRow:
    s, shape, seed, coord_bound, max_tries, p = args
    try:
        _check_nondegenerate(s, shape)
    except DegenerateInputError:
        return ScanRow(s, shape, seed, None, None, None, "degenerate")
    try:
        X = random_generic_point_set(s, shape, coord_bound, seed, p, max_tries)
    except SamplingError:
        return ScanRow(s, shape, seed, None, None, None, "sampling-failure")
    rep = nu(X)
    return ScanRow(s, shape, X.seed, rep.nu, rep.v, rep.nu == rep.v, "ok")


def scan(cells: Iterable[tuple[int, Sequence[int]]], seeds_per_cell: int = 1,
         base_seed: int = 0, coord_bound: int = DEFAULT_COORD_BOUND,
         max_tries: int = DEFAULT_RETRIES, p: int | None = None,
         jobs: int = 1) -> list[ScanRow]:
    """Compare nu with v on ``seeds_per_cell`` random generic sets per cell.

    Rows come out sorted by (s, shape, sample index) whatever ``jobs`` is.
    """
    cells = sorted({(int(s), as_shape(sh)) for s, sh in cells})
    tasks = [
        (s, shape, cell_seed(base_seed, s, shape, i), coord_bound, max_tries, p)
        for s, shape in cells for i in range(seeds_per_cell)
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_scan_cell, tasks))
    return [_scan_cell(t) for t in tasks]


def k2_cells(max_n: int, max_s: int) -> list[tuple[int, Shape]]:
    """All (s, (n1, n2)) with 1 <= n1 <= n2 <= max_n and n2 < s <= max_s."""
    return [(s, (n1, n2)) for n1 in range(1, max_n + 1) for n2 in range(n1, max_n + 1)
            for s in range(n2 + 1, max_s + 1)]


def family_cells(ns: Iterable[int]) -> list[tuple[int, Shape]]:
    """The cells (1 + 2n, (1, n, n))."""
    return [(1 + 2 * n, (1, n, n)) for n in ns]
