"""Homological invariants: the phi tower, det and hdet of sigma, Ext-algebras
with Yoneda products, Frobenius data, and the tau_E checks on C.

Elements of an Ext-algebra are dicts ``{(i, j): scalar}`` where ``(i, j)`` is
the dual of generator ``j`` of position ``i`` of the chosen resolution.  The
product ``left * right`` is computed by lifting ``right`` to a chain map
``alpha`` and reading ``left`` off ``alpha``.
"""

from __future__ import annotations

from .exactla import Echelon, ScalarMatrix, invert, modular_rank, rank_of_columns
from .galgebra import GradedAlgebra, TwistedRightAction, elem_add, elem_lmul
from .resolution import FreeResolution, LiftError, is_pure, lift_map, minimal_resolution
from .twist import (GradedAutomorphism, MatrixAlgebraHom, TwistData, TwistedTensorAlgebra,
                    Violation, build_twisted_tensor, invert_sigma, validate_sigma)


class NotRegular(ValueError):
    """An AS-regularity hypothesis fails at the current bounds."""


class DegeneratePairing(ValueError):
    pass


class TowerError(ValueError):
    pass


# ------------------------------------------------------------ phi tower

class PhiTower:
    """``phis[i]`` is the right action matrix on position ``i`` of ``F = C (x)_B Q``."""

    def __init__(self, data: TwistData, T: TwistedTensorAlgebra, Q: FreeResolution, F: FreeResolution,
                 phis: list, notes: dict):
        self.data = data
        self.T = T
        self.Q = Q
        self.F = F
        self.phis = phis
        self.notes = notes

    @property
    def sizes(self) -> list:
        return [p.size for p in self.phis]

    def action(self, i: int) -> TwistedRightAction:
        return TwistedRightAction(self.F.modules[i], self.phis[i], self.T.iota_A)

    def check_right_linearity(self, i: int) -> list:
        """``d(e_j * x) == d(e_j) * x`` for every generator ``e_j`` of ``F_i`` and ``x`` of A."""
        A = self.data.A
        C = self.T.C
        bad = []
        act_i, act_lo = self.action(i), self.action(i - 1)
        d = self.F.maps[i]
        for j in range(self.F.modules[i].rank):
            ej = {j: C.one()}
            for g in range(A.ngens):
                x = A.gen(g)
                lhs = d.apply(act_i.act(ej, x))
                rhs = act_lo.act(d.apply(ej), x)
                if elem_add(lhs, rhs, -1):
                    bad.append((i, j, A.alphabet.names[g]))
        return bad


def _iota_images(T: TwistedTensorAlgebra, images: list) -> list:
    return [{k: T.iota_B(p) for k, p in im.items()} for im in images]


def build_phi_tower(data: TwistData, Q: FreeResolution, T: TwistedTensorAlgebra | None = None) -> PhiTower:
    """Solve for ``phi_1, phi_2, ...`` along the resolution ``Q`` of B.

    The complex is formed with delta dropped.  For each generator ``x`` of A
    and each generator ``e_j`` of ``F_i`` the equation
    ``d(sum_p a_p e_p) = d(e_j) * x`` is solved with every ``a_p`` in the
    A-slice of C; the solution must be unique.
    """
    pure, where = is_pure(Q)
    if not pure:
        raise TowerError(f"resolution of B is not pure at position {where}")
    if data.mirrored:
        raise TowerError("tower needs data in standard orientation")
    bar = data.without_delta()
    if T is None:
        T = build_twisted_tensor(bar)
    A = data.A
    C = T.C
    shifts = Q.shifts
    F = FreeResolution(C, shifts, [[]] + [_iota_images(T, Q.maps[i].images) for i in range(1, len(shifts))],
                       Q.H, Q.D, Q.terminated)
    phis = [MatrixAlgebraHom.diagonal(A, 1)]
    notes = {"unique": True}
    for i in range(1, len(shifts)):
        if not shifts[i]:
            break
        s = len(shifts[i])
        prev = phis[i - 1]
        act = TwistedRightAction(F.modules[i - 1], prev, T.iota_A)
        src = F.modules[i - 1]
        l_i = shifts[i][0]
        d = F.maps[i]
        images = []
        for g in range(A.ngens):
            dg = A.alphabet.degrees[g]
            deg = l_i + dg
            x = A.gen(g)
            words = A.basis(dg)
            ech = Echelon(A.field, track=True)
            for p in range(s):
                for w in words:
                    a = T.iota_A({w: A.field.one})
                    ech.add(src.coords(elem_lmul(C, a, d.images[p]), deg), (p, w))
            if ech.kernel():
                notes["unique"] = False
                raise TowerError(f"phi_{i} is not unique on {A.alphabet.names[g]}")
            mat = []
            for j in range(s):
                rhs = act.act(d.apply({j: C.one()}), x)
                sol = ech.express(src.coords(rhs, deg))
                if sol is None:
                    raise TowerError(f"no solution for phi_{i} on {A.alphabet.names[g]} (row {j}); "
                                     "sigma may not be invertible or the bound is too small")
                row = [{} for _ in range(s)]
                for (p, w), c in sol.items():
                    row[p][w] = c
                mat.append(row)
            images.append(mat)
        phi = MatrixAlgebraHom(A, s, images)
        validate_sigma(phi)
        phis.append(phi)
    tower = PhiTower(data, T, Q, F, phis, notes)
    return tower


def det_sigma(tower: PhiTower) -> GradedAutomorphism:
    Q = tower.Q
    if not Q.terminated:
        raise NotRegular("resolution of B does not terminate within the bounds")
    top = tower.phis[-1]
    if top.size != 1 or len(tower.phis) != Q.length + 1:
        raise NotRegular(f"top Betti number of B is {top.size}, not 1")
    nu = GradedAutomorphism(tower.data.A, [img[0][0] for img in top.images])
    nu.validate()
    return nu


# ------------------------------------------------------------ hdet

class TwistedComplex:
    """``phi``-twisted copy of ``P (x) U`` as a complex of free modules.

    Generator ``v*m + l`` stands for ``v (x) e_l``; its boundary is
    ``sum_v' sum_i sigma_li(r_vv') (v' (x) e_i)`` where ``d(v) = sum r_vv' v'``.
    """

    def __init__(self, P: FreeResolution, sigma: MatrixAlgebraHom):
        self.P = P
        self.sigma = sigma
        self.m = sigma.size

    def generators(self, k: int) -> tuple:
        return tuple(s for s in self.P.generators(k) for _ in range(self.m))

    def boundary(self, k: int, idx: int) -> dict:
        v, l = divmod(idx, self.m)
        out: dict = {}
        for vp, r in self.P.boundary(k, v).items():
            for i in range(self.m):
                e = self.sigma.entry(l, i, r)
                if e:
                    out[vp * self.m + i] = e
        return out


def _top(res: FreeResolution):
    if not res.terminated:
        raise NotRegular("resolution does not terminate within the bounds")
    h = res.length
    if len(res.shifts[h]) != 1:
        raise NotRegular(f"top Betti number is {len(res.shifts[h])}, not 1")
    return h, res.shifts[h][0]


def hdet(A: GradedAlgebra, sigma: MatrixAlgebraHom, P: FreeResolution) -> ScalarMatrix:
    """Row ``i`` comes from lifting the ``i``-th coordinate projection to the top."""
    h, _ = _top(P)
    if invert_sigma(sigma) is None:
        raise Violation("sigma is not invertible")
    m = sigma.size
    tw = TwistedComplex(P, sigma)
    rows = []
    for i in range(m):
        init = {idx: ({0: A.one()} if idx == i else {}) for idx in range(m)}
        try:
            theta = lift_map(tw, P, 0, init, upto=h)
        except LiftError as e:
            raise LiftError(f"lifting the projection {i + 1}: {e}") from None
        top = theta.components[h]
        rows.append([top[l].get(0, {}).get((), A.field.zero) for l in range(m)])
    H = ScalarMatrix.from_rows(rows, A.field)
    if invert(H) is None:
        raise Violation("homological determinant is singular")
    return H


# ------------------------------------------------------------ Ext

class ExtAlgebra:
    def __init__(self, algebra: GradedAlgebra, res):
        self.algebra = algebra
        self.res = res
        self.basis = [(i, j) for i in range(len(res.shifts)) for j in range(len(res.shifts[i]))]
        self._lifts: dict = {}

    def degree(self, c) -> tuple:
        i, j = c
        return i, self.res.shifts[i][j]

    def dims(self) -> dict:
        out: dict = {}
        for c in self.basis:
            k = self.degree(c)
            out[k] = out.get(k, 0) + 1
        return dict(sorted(out.items()))

    def total_dims(self) -> list:
        return [len(s) for s in self.res.shifts]

    def classes(self, i: int, t: int | None = None) -> list:
        return [(i, j) for j, s in enumerate(self.res.generators(i)) if t is None or s == t]

    def top(self):
        return _top(self.res)

    def lift(self, c, free_one: bool = False):
        key = (c, free_one)
        lf = self._lifts.get(key)
        if lf is None:
            i, u = c
            A = self.algebra
            init = {j: ({0: A.one()} if j == u else {}) for j in range(len(self.res.shifts[i]))}
            lf = lift_map(self.res, self.res, i, init, hom_shift=i, int_shift=self.res.shifts[i][u],
                          free_one=free_one)
            self._lifts[key] = lf
        return lf

    def product(self, left, right, free_one: bool = False) -> dict:
        """``left * right`` for basis classes."""
        (i2, u2), (i1, _) = left, right
        n = i1 + i2
        gens = self.res.generators(n)
        if not gens:
            return {}
        alpha = self.lift(right, free_one)
        comp = alpha.components.get(n)
        if comp is None:
            return {}
        zero = self.algebra.field.zero
        out = {}
        for z in range(len(gens)):
            c = comp[z].get(u2, {}).get((), zero)
            if c:
                out[(n, z)] = c
        return out

    def mul(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for z, c in self.product(a, b).items():
                    v = out.get(z, 0) + ca * cb * c
                    if v:
                        out[z] = v
                    else:
                        out.pop(z, None)
        return out

    def table(self) -> dict:
        """Structure constants of all basis products inside the computed range."""
        out = {}
        n = len(self.res.shifts)
        for a in self.basis:
            for b in self.basis:
                if a[0] + b[0] < n:
                    out[a, b] = self.product(a, b)
        return out

    def check_associativity(self) -> list:
        bad = []
        n = len(self.res.shifts)
        for a in self.basis:
            for b in self.basis:
                if a[0] + b[0] >= n:
                    continue
                ab = self.product(a, b)
                for c in self.basis:
                    if a[0] + b[0] + c[0] >= n:
                        continue
                    lhs = self.mul(ab, {c: 1})
                    rhs = self.mul({a: 1}, self.product(b, c))
                    if lhs != rhs:
                        bad.append((a, b, c))
        return bad

    def check_lift_independence(self) -> list:
        bad = []
        n = len(self.res.shifts)
        for a in self.basis:
            for b in self.basis:
                if a[0] + b[0] < n and self.product(a, b) != self.product(a, b, free_one=True):
                    bad.append((a, b))
        return bad


def ext_algebra(A: GradedAlgebra, P: FreeResolution) -> ExtAlgebra:
    return ExtAlgebra(A, P)


class FrobeniusData:
    """Pairing into the top class and the Nakayama automorphism of E per bidegree."""

    def __init__(self, ext: ExtAlgebra):
        self.ext = ext
        self.h, self.l = ext.top()
        self.omega = (self.h, 0)
        self.nakayama: dict = {}
        F = ext.algebra.field
        for (i2, t2) in ext.dims():
            bs = ext.classes(i2, t2)
            as_ = ext.classes(self.h - i2, self.l - t2)
            if len(as_) != len(bs):
                raise DegeneratePairing(f"E^{i2} in degree {t2} is not paired with a space of equal size")
            G = ScalarMatrix.from_rows([[self.pairing(a, b) for b in bs] for a in as_], F)
            K = ScalarMatrix.from_rows([[self.pairing(b, a) for a in as_] for b in bs], F)
            Ki = invert(K)
            if Ki is None or invert(G) is None:
                raise DegeneratePairing(f"pairing is degenerate on E^{i2} in degree {t2}")
            eps = -1 if ((self.h - i2) * i2) % 2 else 1
            self.nakayama[(i2, t2)] = (bs, (G.transpose() @ Ki).scale(F(eps)))

    def pairing(self, a, b):
        return self.ext.product(a, b).get(self.omega, self.ext.algebra.field.zero)

    def mu(self, c) -> dict:
        i, j = c
        bs, N = self.nakayama[self.ext.degree(c)]
        s = bs.index(c)
        return {bs[t]: x for t, x in N.row(s).items()}

    def check_relation(self) -> list:
        """Pairs violating ``<a, b> = (-1)^{i1 i2} <mu(b), a>``."""
        bad = []
        zero = self.ext.algebra.field.zero
        for a in self.ext.basis:
            for b in self.ext.basis:
                lhs = self.pairing(a, b)
                rhs = zero
                for bp, x in self.mu(b).items():
                    rhs += x * self.pairing(bp, a)
                if (a[0] * b[0]) % 2:
                    rhs = -rhs
                if lhs != rhs:
                    bad.append((a, b))
        return bad


def frobenius_data(ext: ExtAlgebra) -> FrobeniusData:
    return FrobeniusData(ext)


# ------------------------------------------------------------ C and tau_E

def tensor_resolution(tower: PhiTower, P: FreeResolution) -> tuple:
    """Resolution of k over C (delta dropped) with generators ``e_a (x) v_b``.

    Returns ``(resolution, labels)`` with ``labels[n][z] = (p, a, b)``.
    """
    T = tower.T
    C = T.C
    Q = tower.Q
    nQ, nP = len(Q.shifts), len(P.shifts)
    labels, shifts = [], []
    for n in range(nQ + nP - 1):
        lab = [(p, a, b) for p in range(nQ) for a in range(len(Q.shifts[p]))
               for b in range(len(P.shifts[n - p]) if 0 <= n - p < nP else 0)]
        labels.append(lab)
        shifts.append([Q.shifts[p][a] + P.shifts[n - p][b] for p, a, b in lab])
    while shifts and not shifts[-1]:
        shifts.pop()
        labels.pop()
    images = [[]]
    for n in range(1, len(shifts)):
        index = {lab: z for z, lab in enumerate(labels[n - 1])}
        ims = []
        for p, a, b in labels[n]:
            q = n - p
            im: dict = {}
            if p >= 1:
                for a2, c in tower.F.maps[p].images[a].items():
                    im = elem_add(im, {index[(p - 1, a2, b)]: c})
            if q >= 1:
                sign = -1 if p % 2 else 1
                phi = tower.phis[p]
                for b2, r in P.maps[q].images[b].items():
                    for a2 in range(phi.size):
                        e = phi.entry(a, a2, r)
                        if e:
                            im = elem_add(im, {index[(p, a2, b2)]: T.iota_A(e)}, sign)
            ims.append(im)
        images.append(ims)
    res = FreeResolution(C, shifts, images, len(shifts) - 1, min(P.D, Q.D, C.bound), True)
    return res, labels


def bigraded_convolution(eb: dict, ea: dict) -> dict:
    out: dict = {}
    for (p, s), x in eb.items():
        for (q, t), y in ea.items():
            k = (p + q, s + t)
            out[k] = out.get(k, 0) + x * y
    return dict(sorted(out.items()))


def _identity_first_map(res: FreeResolution) -> bool:
    A = res.algebra
    if len(res.shifts) < 2:
        return True
    ims = res.maps[1].images
    return all(im == {0: A.gen(j)} for j, im in enumerate(ims)) and len(ims) == A.ngens


def tau_E_restrictions(tower: PhiTower, P: FreeResolution, nu: GradedAutomorphism, H: ScalarMatrix,
                       C_betti_res: FreeResolution | None = None) -> dict:
    """Factorization, the sign law and the two boundary formulas on C (delta dropped).

    ``C_betti_res`` is a minimal resolution of the algebra whose Ext is
    compared with the convolution (defaults to one of C computed here).
    """
    Q = tower.Q
    if not (_identity_first_map(Q) and _identity_first_map(P)):
        raise ValueError("first differentials must send generator j to the j-th algebra generator")
    hB, _ = _top(Q)
    hA, _ = _top(P)
    T = tower.T
    C = T.C
    report = {"factorization": True, "sign_law": True, "det_formula": True, "hdet_formula": True,
              "violations": []}

    EA, EB = ext_algebra(tower.data.A, P), ext_algebra(tower.data.B, Q)
    expected = bigraded_convolution(EB.dims(), EA.dims())
    if C_betti_res is None:
        C_betti_res = minimal_resolution(C, len(expected) and max(n for n, _ in expected) + 1, C.bound)
    got = ext_algebra(C_betti_res.algebra, C_betti_res).dims()
    report["ext_dims_C"] = got
    report["convolution"] = expected
    if got != expected:
        report["factorization"] = False
        report["violations"].append(("factorization", got, expected))

    R, labels = tensor_resolution(tower, P)
    E = ext_algebra(C, R)
    idx = [{lab: z for z, lab in enumerate(ls)} for ls in labels]

    # (g (x) 1)(1 (x) f) = (-1)^{pq} g (x) f
    for p in range(len(Q.shifts)):
        for a in range(len(Q.shifts[p])):
            g = (p, idx[p][(p, a, 0)])
            for q in range(len(P.shifts)):
                for b in range(len(P.shifts[q])):
                    f = (q, idx[q][(0, 0, b)])
                    want = {(p + q, idx[p + q][(p, a, b)]): (-1 if (p * q) % 2 else 1)}
                    got = E.product(g, f)
                    if got != want:
                        report["sign_law"] = False
                        report["violations"].append(("sign_law", (p, a), (q, b)))

    # (1 (x) x_b*)(omega_B (x) 1) = sum_r N_rb omega_B (x) x_r*
    N = nu.matrix()
    omega = (hB, idx[hB][(hB, 0, 0)])
    for b in range(len(P.shifts[1])):
        f = (1, idx[1][(0, 0, b)])
        want = {}
        for r in range(len(P.shifts[1])):
            x = N[r, b]
            if x:
                want[(hB + 1, idx[hB + 1][(hB, 0, r)])] = x
        if E.product(f, omega) != want:
            report["det_formula"] = False
            report["violations"].append(("det_formula", b))

    # (1 (x) f_top)(e_i* (x) 1) = sum_j hdet_ij e_j* (x) f_top
    ftop = (hA, idx[hA][(0, 0, 0)])
    for i in range(len(Q.shifts[1])):
        e = (1, idx[1][(1, i, 0)])
        want = {}
        for j in range(len(Q.shifts[1])):
            x = H[i, j]
            if x:
                want[(hA + 1, idx[hA + 1][(1, j, 0)])] = x
        if E.product(ftop, e) != want:
            report["hdet_formula"] = False
            report["violations"].append(("hdet_formula", i))
    report["ok"] = all(report[k] for k in ("factorization", "sign_law", "det_formula", "hdet_formula"))
    return report


# ------------------------------------------------------------ AS report

def _dual_rank(A, res, i, t, exact):
    """Rank of ``Hom(P_{i-1}, A) -> Hom(P_i, A)`` in degree ``t``."""
    if i < 1 or i >= len(res.shifts):
        return 0
    src, tgt = res.shifts[i - 1], res.shifts[i]
    toffs, n = [], 0
    for s in tgt:
        toffs.append(n)
        n += A.dim(s + t)
    cols = []
    for u, su in enumerate(src):
        for w in A.basis(su + t):
            col: dict = {}
            for j, im in enumerate(res.maps[i].images):
                a = im.get(u)
                if not a:
                    continue
                idx = A.index(tgt[j] + t)
                for v, c in a.items():
                    for x, y in A.mul_words(v, w).items():
                        k = toffs[j] + idx[x]
                        z = col.get(k, 0) + c * y
                        if z:
                            col[k] = z
                        else:
                            col.pop(k, None)
            cols.append(col)
    if exact:
        return rank_of_columns(cols, n, A.field)
    return modular_rank(cols, n, A.field)


def _dual_cohomology(A, res, exact):
    allshifts = [s for sh in res.shifts for s in sh]
    top = max(allshifts)
    out = {}
    for t in range(-top, A.bound - top + 1):
        for i in range(len(res.shifts)):
            dim = sum(A.dim(s + t) for s in res.shifts[i])
            r_in = _dual_rank(A, res, i, t, exact)
            r_out = _dual_rank(A, res, i + 1, t, exact)
            if r_in is None or r_out is None:
                return None
            hdim = dim - r_out - r_in
            if hdim:
                out[(i, t)] = hdim
    return out


def as_regular_report(A: GradedAlgebra, res: FreeResolution) -> dict:
    """AS type within the bounds, or ``undetermined at bound``."""
    rep = {"bounds": {"H": res.H, "D": res.D}, "within_bounds": True}
    if not res.terminated:
        rep.update(status="undetermined at bound", reason="resolution does not terminate within H")
        return rep
    h = res.length
    if len(res.shifts[h]) != 1:
        rep.update(status="not AS-regular", reason=f"top Betti number {len(res.shifts[h])}")
        return rep
    l = res.shifts[h][0]
    want = {(h, -l): 1}
    coh = _dual_cohomology(A, res, exact=False)
    method = "modular"
    if coh != want:
        coh = _dual_cohomology(A, res, exact=True)
        method = "exact"
    rep["dual_cohomology"] = {f"{i},{t}": d for (i, t), d in sorted(coh.items())}
    rep["method"] = method
    if coh == want:
        rep.update(status="AS-regular", type=[h, l])
    else:
        rep.update(status="not AS-regular", reason="dual complex has extra cohomology")
    return rep
