"""Nakayama automorphisms of a base algebra and of the twisted tensor product C.

The base route dualizes the Nakayama automorphism of E on E^1.  The twisted
route assembles ``mu_C`` from ``det sigma``, ``hdet sigma``, ``mu_A`` and
``mu_B``; when delta is nonzero the A-valued tails on the y-generators are
solved from the requirement that ``mu_C`` kills every relation of C.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .exactla import Echelon, ScalarMatrix, invert
from .galgebra import GradedAlgebra
from .homalg import FrobeniusData, ext_algebra, frobenius_data
from .kernel import axpy
from .resolution import minimal_resolution
from .twist import GradedAutomorphism, TwistedTensorAlgebra

__all__ = ["GradedAutomorphism", "NakayamaResult", "TailError", "nakayama_of_base",
           "nakayama_of_twisted", "nakayama_oracle"]


class TailError(ValueError):
    def __init__(self, message, dimension=None):
        super().__init__(message)
        self.dimension = dimension


def _first_map_matrix(frob: FrobeniusData) -> ScalarMatrix:
    """``P[s][r]``: coefficient of ``x_r`` in ``d_1(v_s)``."""
    res = frob.ext.res
    A = res.algebra
    rows = []
    for im in res.maps[1].images:
        row = [A.field.zero] * A.ngens
        for w, c in im.get(0, {}).items():
            row[w[0]] = c
        rows.append(row)
    return ScalarMatrix.from_rows(rows, A.field)


def nakayama_of_base(A: GradedAlgebra, frob: FrobeniusData) -> GradedAutomorphism:
    """``mu_A`` on A_1 as the dual of ``mu_E`` on E^1."""
    if any(d != 1 for d in A.alphabet.degrees):
        raise ValueError("needs an algebra generated in degree 1")
    ext = frob.ext
    if len(ext.res.shifts) < 2 or len(ext.res.shifts[1]) != A.ngens:
        raise ValueError("generators are not minimal")
    bs, N = frob.nakayama[(1, 1)]
    if bs != ext.classes(1):
        raise ValueError("unexpected ordering of E^1")
    P = _first_map_matrix(frob)
    Pi = invert(P)
    if Pi is None:
        raise ValueError("first differential is not a change of basis")
    M = Pi @ N.transpose() @ P
    mu = GradedAutomorphism.from_matrix(A, M)
    mu.validate()
    return mu


def nakayama_oracle(C: GradedAlgebra, H: int | None = None, res=None) -> GradedAutomorphism:
    """``mu_C`` from the Frobenius structure of E(C) alone."""
    if res is None:
        res = minimal_resolution(C, H if H is not None else C.bound, C.bound)
    return nakayama_of_base(C, frobenius_data(ext_algebra(C, res)))


@dataclass
class NakayamaResult:
    mu: GradedAutomorphism
    restriction_A: GradedAutomorphism
    y_block: ScalarMatrix
    tails: list
    provenance: str
    hypotheses: dict = dc_field(default_factory=dict)
    tail_dimension: int = 0

    def format(self) -> dict:
        C = self.mu.algebra
        A = self.restriction_A.algebra
        return {
            "mu": self.mu.format(),
            "restriction_A": self.restriction_A.format(),
            "y_block": self.y_block.format_rows(),
            "tails": [A.format(t) for t in self.tails],
            "provenance": self.provenance,
            "tail_solution_dimension": self.tail_dimension,
            "hypotheses": self.hypotheses,
            "algebra": C.name,
        }


def _apply_on_word(images: list, C: GradedAlgebra, w) -> dict:
    out = C.one()
    for g in w:
        out = C.mul(out, images[g])
    return out


def nakayama_of_twisted(T: TwistedTensorAlgebra, mu_A: GradedAutomorphism, mu_B: GradedAutomorphism,
                        nu: GradedAutomorphism, H: ScalarMatrix, oracle=None, hypotheses=None) -> NakayamaResult:
    """``mu_C`` on A is ``nu^{-1} o mu_A``; on y it is ``mu_B`` followed by hdet, plus tails.

    On E^1 the y-part of ``mu_E`` is ``hdet`` times that of ``mu_E(B)``;
    dualizing to B_1 transposes, so ``mu_C(y_i) = sum_j Y_ij y_j`` with
    ``Y = M_B . hdet^T`` where ``mu_B(y_i) = sum_j M_B[i][j] y_j``.

    ``oracle`` is a callable returning ``mu_C``; it is only consulted when the
    tail system has more than one solution.
    """
    data = T.data
    A, B, C = data.A, data.B, T.C
    if data.mirrored:
        raise ValueError("needs data in standard orientation")
    n, m = A.ngens, B.ngens
    rest = nu.inverse().compose(mu_A)
    Y = mu_B.matrix() @ H.transpose()
    base = [T.iota_A(p) for p in rest.images]
    for i in range(m):
        y = {}
        for j, c in Y.row(i).items():
            axpy(y, T.iota_B(B.gen(j)), c)
        base.append(y)

    tails = [{} for _ in range(m)]
    provenance = "theorem"
    dim = 0
    if data.has_delta():
        tails, dim, provenance = _solve_tails(T, base, oracle)
    images = list(base)
    for i in range(m):
        images[n + i] = C.nf(dict(base[n + i]))
        axpy(images[n + i], T.iota_A(tails[i]), 1)
    mu = GradedAutomorphism(C, images)
    mu.validate()
    return NakayamaResult(mu, rest, Y, tails, provenance, dict(hypotheses or {}), dim)


def _solve_tails(T: TwistedTensorAlgebra, base: list, oracle):
    """Affine system for the tails from the relations with one y letter."""
    data = T.data
    A, C = data.A, T.C
    n, m = A.ngens, data.B.ngens
    F = A.field
    unknowns = [(i, w) for i in range(m) for w in A.basis(data.B.alphabet.degrees[i])]
    eqs = []
    for rel in C.relations:
        ys = {sum(1 for g in w if g >= n) for w in rel.terms}
        if ys - {0, 1} or 1 not in ys:
            continue
        const: dict = {}
        lin = [dict() for _ in unknowns]
        for w, c in rel.terms.items():
            axpy(const, _apply_on_word(base, C, w), c)
            for k, g in enumerate(w):
                if g < n:
                    continue
                pre = _apply_on_word(base, C, w[:k])
                post = _apply_on_word(base, C, w[k + 1:])
                for u, (i, tw) in enumerate(unknowns):
                    if g - n == i:
                        axpy(lin[u], C.mul(C.mul(pre, T.iota_A({tw: F.one})), post), c)
        eqs.append((const, lin))
    # coordinates: (equation, word)
    ech = Echelon(F, track=True)
    cols = [dict() for _ in unknowns]
    rhs: dict = {}
    for e, (const, lin) in enumerate(eqs):
        for w, c in const.items():
            rhs[(e, w)] = -c
        for u, p in enumerate(lin):
            for w, c in p.items():
                cols[u][(e, w)] = c
    for u, col in enumerate(cols):
        ech.add(col, u)
    sol = ech.express(rhs)
    if sol is None:
        raise TailError("tail system is inconsistent: no automorphism of the stated shape")
    kernel = ech.kernel()
    dim = len(kernel)
    tails = [{} for _ in range(m)]
    if dim == 0:
        for u, c in sol.items():
            i, w = unknowns[u]
            tails[i][w] = c
        return tails, 0, "theorem"
    if oracle is None:
        raise TailError(f"tail system has a {dim}-dimensional solution space", dimension=dim)
    mu = oracle()
    for i in range(m):
        img = mu.images[n + i]
        tails[i] = T.pi_A(img)
    # the oracle's tails must lie in the affine solution set
    vec = {}
    for u, (i, w) in enumerate(unknowns):
        x = tails[i].get(w)
        if x:
            vec[u] = x
    check: dict = {}
    for u, x in vec.items():
        for k, c in cols[u].items():
            v = check.get(k, 0) + x * c
            if v:
                check[k] = v
            else:
                check.pop(k, None)
    if check != {k: v for k, v in rhs.items() if v}:
        raise TailError("oracle tails do not solve the tail system", dimension=dim)
    return tails, dim, "oracle"
