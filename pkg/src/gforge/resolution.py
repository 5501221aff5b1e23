"""Minimal graded free resolutions of the trivial module and chain-map lifting.

Position ``i`` of a resolution is the free module ``P_i = A (x) V_i`` and
``maps[i]`` is the differential ``P_i -> P_{i-1}``.  Generators are added
degree by degree; within a degree a complement of the image of the existing
generators inside the kernel is picked in pivot order.
"""

from __future__ import annotations

from itertools import product as iproduct

from .exactla import CERT_PRIME, Echelon, modular_rank, rank_of_columns
from .galgebra import FreeModule, GradedAlgebra, ModuleMap, elem_add, elem_lmul


class BoundTooSmall(ValueError):
    pass


class LiftError(ValueError):
    pass


class FreeResolution:
    def __init__(self, algebra: GradedAlgebra, shifts: list, maps: list, H: int, D: int,
                 terminated: bool, notes=None):
        self.algebra = algebra
        self.shifts = [tuple(s) for s in shifts]
        self.modules = [FreeModule(algebra, s) for s in self.shifts]
        self.maps = [None] + [ModuleMap(self.modules[i], self.modules[i - 1], maps[i], check=False)
                              for i in range(1, len(self.shifts))]
        self.H = H
        self.D = D
        self.terminated = terminated
        self.notes = notes or {}
        self._solvers: dict = {}

    @property
    def length(self) -> int:
        """Index of the last nonempty position."""
        return max(i for i, s in enumerate(self.shifts) if s)

    def generators(self, k: int) -> tuple:
        return self.shifts[k] if 0 <= k < len(self.shifts) else ()

    def boundary(self, k: int, j: int) -> dict:
        return self.maps[k].images[j]

    def betti(self) -> list:
        out = []
        for s in self.shifts:
            t: dict = {}
            for x in s:
                t[x] = t.get(x, 0) + 1
            out.append(dict(sorted(t.items())))
        return out

    def betti_table(self) -> list:
        return [[[d, n] for d, n in b.items()] for b in self.betti()]

    # ----------------------------------------------------------- solving
    def solver(self, k: int, d: int) -> Echelon:
        """Tracked echelon of the columns of ``d_k`` in degree ``d``."""
        key = (k, d)
        e = self._solvers.get(key)
        if e is None:
            e = Echelon(self.algebra.field, track=True)
            for c, col in enumerate(self.maps[k].columns(d)):
                e.add(col, c)
            self._solvers[key] = e
        return e

    def solve(self, k: int, target: dict, d: int, free_one: bool = False):
        """A preimage under ``d_k`` of the element ``target`` of ``P_{k-1}``.

        The particular solution uses only pivot columns (free variables 0);
        with ``free_one`` every kernel direction is added once.
        """
        if not target:
            return {}
        if k >= len(self.shifts) or not self.shifts[k]:
            raise LiftError(f"nothing at position {k} to hit a nonzero element")
        vec = self.modules[k - 1].coords(target, d)
        e = self.solver(k, d)
        x = e.express(vec)
        if x is None:
            raise LiftError(f"element is not a boundary at position {k}, degree {d}")
        if free_one:
            for rel in e.kernel():
                for c, v in rel.items():
                    y = x.get(c, 0) + v
                    if y:
                        x[c] = y
                    else:
                        x.pop(c, None)
        return self.modules[k].element(x, d)


def _new_generators(A, prev_map, image_cols, kernel_dim_p, rows, d, certify):
    """Exact complement of the image inside the kernel in degree ``d``."""
    field = A.field
    if prev_map is None:
        kernel = [{c: field.one} for c in range(rows)]
    else:
        e = Echelon(field, track=True)
        for c, col in enumerate(prev_map.columns(d)):
            e.add(col, c)
        kernel = e.kernel()
    img = Echelon(field)
    for col in image_cols:
        img.add(col)
    new = []
    for v in kernel:
        if img.add(v):
            new.append(v)
    return new


def minimal_resolution(A: GradedAlgebra, H: int, D: int | None = None, certify: bool = True) -> FreeResolution:
    """Minimal free resolution of the trivial module up to position ``H`` and degree ``D``.

    ``certify`` uses a rank computation modulo a large prime to skip exact
    work in degrees where nothing new can appear; the skip is sound because
    reduction mod p cannot raise a rank.
    """
    D = A.bound if D is None else D
    if D > A.bound:
        raise BoundTooSmall(f"degree bound {D} exceeds the algebra bound {A.bound}")
    field = A.field
    shifts = [[0]]
    images = [[]]
    maps = [None]
    exact_work = 0
    terminated = False
    # position H + 1 is only a probe: empty means the resolution stops at H
    for i in range(1, H + 2):
        target = FreeModule(A, shifts[i - 1])
        prev_map = maps[i - 1]
        sh: list = []
        ims: list = []
        lo = min(shifts[i - 1]) + 1 if shifts[i - 1] else D + 1
        for d in range(lo, D + 1):
            rows = target.dim(d)
            if rows == 0:
                continue
            cur = ModuleMap(FreeModule(A, sh), target, ims, check=False) if sh else None
            image_cols = cur.columns(d) if cur else []
            if prev_map is None:
                kdim_p = rows
            else:
                r = modular_rank(prev_map.columns(d), FreeModule(A, shifts[i - 2]).dim(d), field) \
                    if certify else None
                kdim_p = rows - r if r is not None else None
            if certify and kdim_p is not None:
                irank = modular_rank(image_cols, rows, field) if image_cols else 0
                if irank is not None and irank == kdim_p:
                    continue
                if kdim_p == 0:
                    continue
            exact_work += 1
            new = _new_generators(A, prev_map, image_cols, kdim_p, rows, d, certify)
            for v in new:
                sh.append(d)
                ims.append(target.element(v, d))
        shifts.append(sh)
        images.append(ims)
        maps.append(ModuleMap(FreeModule(A, sh), target, ims, check=False))
        if not sh:
            terminated = True
            break
    if len(shifts) > H + 1:
        del shifts[H + 1:], images[H + 1:]
    while len(shifts) > 1 and not shifts[-1]:
        shifts.pop()
        images.pop()
    return FreeResolution(A, shifts, images, H, D, terminated,
                          {"exact_degree_steps": exact_work, "certificate_prime": CERT_PRIME if certify else None})


def resolution_from_rows(A: GradedAlgebra, shifts: list, rows: list, H=None, D=None, params=None,
                         check: bool = True) -> FreeResolution:
    """Resolution given by differentials in row convention (row ``j`` = image of generator ``j``).

    ``shifts[0]`` must be ``[0]``; ``rows[i-1]`` describes ``d_i``.  With
    ``check`` the result must be a minimal resolution within the bounds.
    """
    D = A.bound if D is None else D
    if list(shifts[0]) != [0]:
        raise ValueError("position 0 must be the algebra itself")
    if len(rows) != len(shifts) - 1:
        raise ValueError("one differential per position after the first")
    images = [[]]
    for i in range(1, len(shifts)):
        src, tgt = FreeModule(A, shifts[i]), FreeModule(A, shifts[i - 1])
        images.append(ModuleMap.from_rows(src, tgt, rows[i - 1], params).images)
    res = FreeResolution(A, shifts, images, H if H is not None else len(shifts) - 1, D, True)
    if check:
        problems = verify_resolution(res, exact_through=D)
        if problems:
            raise ValueError("supplied resolution is not a minimal resolution: " + problems[0])
    return res


def verify_resolution(res: FreeResolution, exact_through: int | None = None) -> list:
    """Complex, minimality and exactness checks; returns a list of problems."""
    A = res.algebra
    D = res.D if exact_through is None else exact_through
    problems = []
    n = len(res.shifts)
    for i in range(1, n):
        for j, im in enumerate(res.maps[i].images):
            for t, p in im.items():
                if () in p:
                    problems.append(f"d_{i} has a constant entry at ({t},{j})")
    for i in range(2, n):
        for j, im in enumerate(res.maps[i].images):
            if res.maps[i - 1].apply(im):
                problems.append(f"d_{i - 1} o d_{i} is nonzero on generator {j}")
    if problems:
        return problems
    ranks = {}
    for i in range(1, n):
        for d in range(D + 1):
            ranks[i, d] = rank_of_columns(res.maps[i].columns(d), res.modules[i - 1].dim(d), A.field)
    for d in range(1, D + 1):
        if ranks.get((1, d), 0) != A.dim(d):
            problems.append(f"not exact at position 0 in degree {d}")
    top_terminated = res.terminated
    for i in range(1, n):
        for d in range(D + 1):
            below = ranks[i, d]
            above = ranks.get((i + 1, d), 0)
            if i == n - 1 and not top_terminated:
                continue
            if below + above != res.modules[i].dim(d):
                problems.append(f"not exact at position {i} in degree {d}")
    return problems


def exactness_report(res: FreeResolution) -> dict:
    """Per position, the degree up to which exactness is asserted."""
    margin = max(res.shifts[-1]) if res.shifts[-1] else 0
    return {"asserted_through_degree": res.D - margin if not res.terminated else res.D,
            "margin": 0 if res.terminated else margin}


def is_pure(res: FreeResolution):
    """``(True, None)`` or ``(False, i)`` with ``i`` the first mixed position."""
    for i, s in enumerate(res.shifts):
        if len(set(s)) > 1:
            return False, i
    return True, None


# ----------------------------------------------------------- chain maps

class ChainMap:
    """``components[k][j]``: image of generator ``j`` of position ``k``."""

    def __init__(self, source, target, hom_shift: int, int_shift: int, components: dict):
        self.source = source
        self.target = target
        self.hom_shift = hom_shift
        self.int_shift = int_shift
        self.components = components

    def apply(self, k: int, x: dict) -> dict:
        A = self.target.algebra
        comp = self.components[k]
        out: dict = {}
        for j, c in x.items():
            out = elem_add(out, elem_lmul(A, c, comp[j]))
        return out


def lift_map(source, target: FreeResolution, start: int, initial: dict, hom_shift: int = 0,
             int_shift: int = 0, upto: int | None = None, free_one: bool = False) -> ChainMap:
    """Comparison-theorem lift.

    ``source`` needs ``generators(k)`` (degrees) and ``boundary(k, j)`` (an
    element of position ``k-1`` in terms of its generators).  ``initial[j]``
    is the image of generator ``j`` of position ``start`` in
    ``target[start - hom_shift]``.  Components satisfy
    ``d(alpha_k z) = (-1)^hom_shift alpha_{k-1}(d z)``, which is the chain-map
    condition into the target shifted by ``hom_shift``.
    """
    A = target.algebra
    sign = -1 if hom_shift % 2 else 1
    comps = {start: dict(initial)}
    last = upto
    if last is None:
        last = start
        while source.generators(last + 1):
            last += 1
    for k in range(start + 1, last + 1):
        gens = source.generators(k)
        if not gens:
            break
        tk = k - hom_shift
        comp = {}
        for j, deg in enumerate(gens):
            rhs: dict = {}
            for u, c in source.boundary(k, j).items():
                img = comps[k - 1].get(u)
                if img:
                    rhs = elem_add(rhs, elem_lmul(A, c, img))
            if not rhs:
                comp[j] = {}
                continue
            if sign < 0:
                rhs = {g: {w: -x for w, x in p.items()} for g, p in rhs.items()}
            comp[j] = target.solve(tk, rhs, deg - int_shift, free_one)
        comps[k] = comp
    return ChainMap(source, target, hom_shift, int_shift, comps)


# ----------------------------------------------------------- bar oracle

def bar_betti(A: GradedAlgebra, H: int, D: int) -> list:
    """``dim Tor_i(k,k)_d`` for ``i <= H``, ``d <= D`` from the reduced bar complex.

    The differential is ``a1|...|ai -> sum_r (-1)^r a1|...|a_r a_{r+1}|...|ai``.
    Everything is built from monomial bases and products, without any
    resolution machinery.
    """
    field = A.field

    def cells(i, d):
        """Compositions of d into i positive parts, with basis words for each part."""
        out = []
        if i == 0:
            return [()] if d == 0 else []

        def comps(i, d):
            if i == 1:
                if d >= 1:
                    yield (d,)
                return
            for first in range(1, d - i + 2):
                for rest in comps(i - 1, d - first):
                    yield (first,) + rest

        for c in comps(i, d):
            for ws in iproduct(*[A.basis(x) for x in c]):
                out.append(ws)
        return out

    cache = {}

    def index(i, d):
        if (i, d) not in cache:
            cache[i, d] = {c: n for n, c in enumerate(cells(i, d))}
        return cache[i, d]

    def rank(i, d):
        """Rank of the bar differential from length i to length i-1 in degree d."""
        if i < 2:
            return 0
        tgt = index(i - 1, d)
        e = Echelon(field)
        for cell in index(i, d):
            col: dict = {}
            for r in range(1, i):
                prod = A.mul_words(cell[r - 1], cell[r])
                s = -1 if r % 2 else 1
                for w, c in prod.items():
                    key = tgt[cell[:r - 1] + (w,) + cell[r + 1:]]
                    y = col.get(key, 0) + s * c
                    if y:
                        col[key] = y
                    else:
                        col.pop(key, None)
            e.add(col)
        return e.rank

    out = []
    for i in range(H + 1):
        row = {}
        for d in range(D + 1):
            n = len(index(i, d))
            dim = n - rank(i, d) - rank(i + 1, d)
            if dim:
                row[d] = dim
        out.append(row)
    return out
