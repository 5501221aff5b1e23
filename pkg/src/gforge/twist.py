"""Twisting data tau = (sigma, delta) and the algebra C it presents.

``sigma`` is an algebra map ``A -> M_m(A)`` stored by generator images; the
product is the ordinary matrix product, so ``sigma(ab) = sigma(a) sigma(b)``.
``delta`` is a column of maps ``A -> A`` extended from generators by

    delta_j(ab) = sum_t sigma_jt(a) delta_t(b) + delta_j(a) b,

which is what rewriting ``y_j a b`` with ``y_j a = sum_t sigma_jt(a) y_t +
delta_j(a)`` forces.  C is presented on the generators of A followed by those
of B with the extra rules ``y_j x_i = sum_t sigma_jt(x_i) y_t + delta_j(x_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .exactla import ScalarMatrix, invert
from .freealg import NcPoly
from .galgebra import GradedAlgebra
from .kernel import axpy


class Violation(Exception):
    """A map fails to respect a relation."""

    def __init__(self, message, relation=None, entry=None, value=None):
        super().__init__(message)
        self.relation = relation
        self.entry = entry
        self.value = value


class NotTwisting(Exception):
    def __init__(self, degree: int, defect: int, expected: int, actual: int):
        self.degree = degree
        self.defect = defect
        self.expected = expected
        self.actual = actual
        super().__init__(f"not a twisting map: in degree {degree} expected dimension {expected}, "
                         f"found {actual} (defect {defect})")


def _mat_mul(A, X, Y):
    n = len(X)
    out = [[{} for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for k in range(n):
            a = X[i][k]
            if not a:
                continue
            for j in range(n):
                b = Y[k][j]
                if b:
                    axpy(out[i][j], A.mul(a, b), 1)
    return out


class MatrixAlgebraHom:
    """Graded algebra map ``A -> M_m(A)`` given on generators."""

    def __init__(self, algebra: GradedAlgebra, size: int, images: list):
        A = algebra
        if len(images) != A.ngens:
            raise ValueError(f"need an image for each of the {A.ngens} generators")
        self.algebra = A
        self.size = size
        self.images = []
        for g, mat in enumerate(images):
            if len(mat) != size or any(len(r) != size for r in mat):
                raise ValueError(f"image of {A.alphabet.names[g]} is not {size}x{size}")
            dg = A.alphabet.degrees[g]
            clean = []
            for r in mat:
                row = []
                for e in r:
                    e = A.nf(e)
                    for w in e:
                        if A.degree_of(w) != dg:
                            raise ValueError(f"image of {A.alphabet.names[g]} has an entry of wrong degree")
                    row.append(e)
                clean.append(row)
            self.images.append(clean)
        self._memo: dict = {(): self._identity()}

    def _identity(self):
        one = self.algebra.one()
        return [[dict(one) if i == j else {} for j in range(self.size)] for i in range(self.size)]

    @classmethod
    def diagonal(cls, algebra: GradedAlgebra, size: int):
        ims = []
        for g in range(algebra.ngens):
            x = algebra.gen(g)
            ims.append([[dict(x) if i == j else {} for j in range(size)] for i in range(size)])
        return cls(algebra, size, ims)

    @classmethod
    def from_strings(cls, algebra, images, params=None):
        """``images[g][i][j]`` are expression strings."""
        degs = algebra.alphabet.degrees
        return cls(algebra, len(images[0]),
                   [[[algebra.parse(s, params, degs[g]) for s in row] for row in mat]
                    for g, mat in enumerate(images)])

    def apply_word(self, w) -> list:
        r = self._memo.get(w)
        if r is None:
            r = _mat_mul(self.algebra, self.apply_word(w[:-1]), self.images[w[-1]])
            self._memo[w] = r
        return r

    def apply(self, p: dict) -> list:
        out = [[{} for _ in range(self.size)] for _ in range(self.size)]
        for w, c in p.items():
            m = self.apply_word(w)
            for i in range(self.size):
                for j in range(self.size):
                    if m[i][j]:
                        axpy(out[i][j], m[i][j], c)
        return out

    def entry(self, i: int, j: int, p: dict) -> dict:
        out: dict = {}
        for w, c in p.items():
            e = self.apply_word(w)[i][j]
            if e:
                axpy(out, e, c)
        return out

    def block_matrix(self, d: int, transpose_blocks: bool) -> ScalarMatrix:
        """Matrix of all ``sigma_ij`` restricted to ``A_d``.

        With ``transpose_blocks`` block ``(k, i)`` holds ``sigma_ik``,
        otherwise block ``(i, k)`` does.
        """
        A = self.algebra
        basis = A.basis(d)
        n = len(basis)
        m = self.size
        rows = [dict() for _ in range(m * n)]
        idx = A.index(d)
        for c, w in enumerate(basis):
            mat = self.apply_word(w)
            for i in range(m):
                for k in range(m):
                    br, bc = (k, i) if transpose_blocks else (i, k)
                    for u, x in mat[i][k].items():
                        rows[br * n + idx[u]][bc * n + c] = x
        return ScalarMatrix(m * n, m * n, rows, A.field)

    def degree_one_matrix(self):
        """For ``m = 1``: the matrix ``N`` with ``sigma(x_r) = sum_s N[r][s] x_s``."""
        A = self.algebra
        gens = [g for g in range(A.ngens) if A.alphabet.degrees[g] == 1]
        rows = []
        for g in gens:
            img = self.images[g][0][0]
            rows.append([img.get((s,), A.field.zero) for s in gens])
        return ScalarMatrix.from_rows(rows, A.field)

    def format(self) -> dict:
        A = self.algebra
        return {A.alphabet.names[g]: [[A.format(e) for e in row] for row in mat]
                for g, mat in enumerate(self.images)}

    def __eq__(self, other):
        return isinstance(other, MatrixAlgebraHom) and self.size == other.size and self.images == other.images


def validate_sigma(sigma: MatrixAlgebraHom):
    """Check every relation of A maps to the zero matrix; raise ``Violation`` otherwise."""
    A = sigma.algebra
    for r in A.relations:
        m = sigma.apply(r.terms)
        for i in range(sigma.size):
            for j in range(sigma.size):
                e = A.nf(m[i][j])
                if e:
                    raise Violation(f"relation {r} is not killed: entry ({i + 1},{j + 1}) is {A.format(e)}",
                                    relation=r, entry=(i, j), value=e)
    return {"relations_checked": len(A.relations), "size": sigma.size}


class SigmaDerivation:
    """``delta = (delta_1, ..., delta_m)`` given on generators."""

    def __init__(self, sigma: MatrixAlgebraHom, images: list, ydegrees=None):
        A = sigma.algebra
        m = sigma.size
        self.sigma = sigma
        self.ydegrees = tuple(ydegrees) if ydegrees is not None else (1,) * m
        if len(images) != A.ngens:
            raise ValueError("need a delta image for each generator")
        self.images = []
        for g, vec in enumerate(images):
            if len(vec) != m:
                raise ValueError("delta images must have length m")
            row = []
            for j, e in enumerate(vec):
                e = A.nf(e)
                want = A.alphabet.degrees[g] + self.ydegrees[j]
                for w in e:
                    if A.degree_of(w) != want:
                        raise ValueError(f"delta_{j + 1}({A.alphabet.names[g]}) must have degree {want}")
                row.append(e)
            self.images.append(row)
        self._memo: dict = {(): [{} for _ in range(m)]}

    @classmethod
    def zero(cls, sigma, ydegrees=None):
        return cls(sigma, [[{} for _ in range(sigma.size)] for _ in range(sigma.algebra.ngens)], ydegrees)

    def is_zero(self) -> bool:
        return not any(e for row in self.images for e in row)

    def apply_word(self, w) -> list:
        r = self._memo.get(w)
        if r is not None:
            return r
        A = self.sigma.algebra
        m = self.sigma.size
        a, rest = w[:1], w[1:]
        sa = self.sigma.apply_word(a)
        drest = self.apply_word(rest)
        da = self.images[a[0]]
        restp = {rest: A.field.one}
        r = []
        for j in range(m):
            acc: dict = {}
            for t in range(m):
                if sa[j][t] and drest[t]:
                    axpy(acc, A.mul(sa[j][t], drest[t]), 1)
            if da[j]:
                axpy(acc, A.mul(da[j], A.nf(restp)), 1)
            r.append(acc)
        self._memo[w] = r
        return r

    def apply(self, p: dict) -> list:
        out = [{} for _ in range(self.sigma.size)]
        for w, c in p.items():
            for j, e in enumerate(self.apply_word(w)):
                if e:
                    axpy(out[j], e, c)
        return out

    def validate(self):
        A = self.sigma.algebra
        for r in A.relations:
            for j, e in enumerate(self.apply(r.terms)):
                e = A.nf(e)
                if e:
                    raise Violation(f"delta_{j + 1} does not kill relation {r}: gives {A.format(e)}",
                                    relation=r, entry=j, value=e)
        return {"relations_checked": len(A.relations)}

    def format(self) -> dict:
        A = self.sigma.algebra
        return {A.alphabet.names[g]: [A.format(e) for e in row] for g, row in enumerate(self.images)}


@dataclass
class TwistData:
    """``A``, ``B`` and ``tau = (sigma, delta)``.

    With ``mirrored`` the same data instead presents ``B (x) A`` through the
    rules ``x y_i = sum_s y_s sigma_si(x) + delta_i(x)`` (the shape taken by
    the inverse of a twisting map).
    """

    A: GradedAlgebra
    B: GradedAlgebra
    sigma: MatrixAlgebraHom
    delta: SigmaDerivation | None = None
    mirrored: bool = False
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.sigma.size != self.B.ngens:
            raise ValueError("sigma size must equal the number of generators of B")
        if self.sigma.algebra is not self.A:
            raise ValueError("sigma must be defined on A")
        if self.delta is None:
            self.delta = SigmaDerivation.zero(self.sigma, self.B.alphabet.degrees)

    def has_delta(self) -> bool:
        return not self.delta.is_zero()

    def without_delta(self) -> "TwistData":
        return TwistData(self.A, self.B, self.sigma, None, self.mirrored, dict(self.meta))

    def presentation(self):
        """Alphabet and relation dicts of the presented algebra."""
        A, B = self.A, self.B
        n, m = A.ngens, B.ngens
        f = A.field
        if not self.mirrored:
            alpha = A.alphabet.concat(B.alphabet)
            xs = lambda w: tuple(w)
            ys = lambda w: tuple(n + i for i in w)
        else:
            alpha = B.alphabet.concat(A.alphabet)
            xs = lambda w: tuple(m + i for i in w)
            ys = lambda w: tuple(w)
        rels = []
        for r in A.relations:
            rels.append({xs(w): c for w, c in r.terms.items()})
        for r in B.relations:
            rels.append({ys(w): c for w, c in r.terms.items()})
        for i in range(n):
            sx = self.sigma.images[i]
            dx = self.delta.images[i]
            for j in range(m):
                g: dict = {}
                if not self.mirrored:
                    # y_j x_i - sum_t sigma_jt(x_i) y_t - delta_j(x_i)
                    axpy(g, {ys((j,)) + xs((i,)): f.one}, 1)
                    for t in range(m):
                        for w, c in sx[j][t].items():
                            axpy(g, {xs(w) + ys((t,)): c}, -1)
                else:
                    # x_i y_j - sum_s y_s sigma_sj(x_i) - delta_j(x_i)
                    axpy(g, {xs((i,)) + ys((j,)): f.one}, 1)
                    for s in range(m):
                        for w, c in sx[s][j].items():
                            axpy(g, {ys((s,)) + xs(w): c}, -1)
                for w, c in dx[j].items():
                    axpy(g, {xs(w): c}, -1)
                rels.append(g)
        return alpha, rels, xs, ys


class TwistedTensorAlgebra:
    """The algebra C with its embeddings and projections."""

    def __init__(self, data: TwistData, C: GradedAlgebra, xs, ys, expected: list):
        self.data = data
        self.C = C
        self._xs = xs
        self._ys = ys
        self.expected = expected
        self.hilbert = C.hilbert()

    def iota_A(self, p: dict) -> dict:
        return self.C.nf({self._xs(w): c for w, c in p.items()})

    def iota_B(self, p: dict) -> dict:
        return self.C.nf({self._ys(w): c for w, c in p.items()})

    def _split(self, w):
        A = self.data.A
        n, m = A.ngens, self.data.B.ngens
        if not self.data.mirrored:
            return tuple(i for i in w if i < n), tuple(i - n for i in w if i >= n)
        return tuple(i - m for i in w if i >= m), tuple(i for i in w if i < m)

    def pi_A(self, p: dict) -> dict:
        """Kill every word involving a generator of B."""
        out = {}
        for w, c in p.items():
            a, b = self._split(w)
            if not b:
                out[a] = c
        return out

    def pi_B(self, p: dict) -> dict:
        out = {}
        for w, c in p.items():
            a, b = self._split(w)
            if not a:
                out[b] = c
        return out

    def a_slice(self, d: int) -> list:
        """Normal words of C of degree ``d`` that only involve generators of A."""
        return [self._xs(w) for w in self.data.A.basis(d)]


def convolution(h1: list, h2: list, bound: int) -> list:
    return [sum(h1[p] * h2[d - p] for p in range(d + 1) if p < len(h1) and d - p < len(h2))
            for d in range(bound + 1)]


def build_twisted_tensor(data: TwistData, bound: int | None = None) -> TwistedTensorAlgebra:
    """Present C and certify the twisting property by Hilbert-series factorization."""
    A, B = data.A, data.B
    D = bound if bound is not None else min(A.bound, B.bound)
    if D > A.bound or D > B.bound:
        raise ValueError("bound exceeds the bounds of A or B")
    alpha, rels, xs, ys = data.presentation()
    C = GradedAlgebra(alpha, rels, D, A.field, name="C")
    expected = convolution(A.hilbert(), B.hilbert(), D)
    actual = C.hilbert()
    for d in range(D + 1):
        if actual[d] != expected[d]:
            raise NotTwisting(d, expected[d] - actual[d], expected[d], actual[d])
    return TwistedTensorAlgebra(data, C, xs, ys, expected)


def _hom_from_blocks(algebra: GradedAlgebra, m: int, blocks_by_degree: dict, transpose_blocks: bool):
    """Read generator images off block matrices of linear maps on ``A_d``.

    Block ``(j, k)`` (or ``(k, j)`` when transposed) of ``blocks_by_degree[d]``
    is the matrix of the ``(j, k)`` entry map on ``A_d`` in the monomial basis.
    """
    A = algebra
    images = []
    for g in range(A.ngens):
        d = A.alphabet.degrees[g]
        M = blocks_by_degree[d]
        basis = A.basis(d)
        n = len(basis)
        gw = A.gen(g)
        col = A.coords(gw, d)
        mat = [[{} for _ in range(m)] for _ in range(m)]
        for j in range(m):
            for k in range(m):
                br, bc = (k, j) if transpose_blocks else (j, k)
                e = {}
                for r in range(n):
                    x = sum((M[br * n + r, bc * n + c] * v for c, v in col.items()), A.field.zero)
                    if x:
                        e[basis[r]] = x
                mat[j][k] = e
        images.append(mat)
    return MatrixAlgebraHom(A, m, images)


def _check_inverse(sigma, phi, bound):
    """Both composition identities on monomial bases up to ``bound``."""
    A = sigma.algebra
    m = sigma.size
    for d in range(1, bound + 1):
        for w in A.basis(d):
            p = {w: A.field.one}
            S = sigma.apply(p)
            for i in range(m):
                for j in range(m):
                    acc: dict = {}
                    for k in range(m):
                        axpy(acc, phi.entry(j, k, S[i][k]), 1)
                    if acc != (p if i == j else {}):
                        return False
            F = phi.apply(p)
            for i in range(m):
                for j in range(m):
                    acc = {}
                    for k in range(m):
                        axpy(acc, sigma.entry(k, j, F[k][i]), 1)
                    if acc != (p if i == j else {}):
                        return False
    return True


def invert_sigma(sigma: MatrixAlgebraHom, bound: int | None = None):
    """The inverse ``phi`` with ``sum_k phi_jk o sigma_ik = delta_ij id`` and
    ``sum_k sigma_kj o phi_ki = delta_ij id``, or None."""
    A = sigma.algebra
    D = A.bound if bound is None else bound
    m = sigma.size
    blocks = {}
    for d in sorted(set(A.alphabet.degrees)):
        S = sigma.block_matrix(d, transpose_blocks=True)
        F = invert(S)
        if F is None:
            return None
        blocks[d] = F
    phi = _hom_from_blocks(A, m, blocks, transpose_blocks=False)
    try:
        validate_sigma(phi)
    except Violation:
        return None
    if not _check_inverse(sigma, phi, D):
        return None
    return phi


def uninvert_sigma(phi: MatrixAlgebraHom, bound: int | None = None):
    """The ``sigma`` whose inverse is ``phi`` (the other way round)."""
    A = phi.algebra
    D = A.bound if bound is None else bound
    m = phi.size
    blocks = {}
    for d in sorted(set(A.alphabet.degrees)):
        F = phi.block_matrix(d, transpose_blocks=False)
        S = invert(F)
        if S is None:
            return None
        blocks[d] = S
    sigma = _hom_from_blocks(A, m, blocks, transpose_blocks=True)
    try:
        validate_sigma(sigma)
    except Violation:
        return None
    if not _check_inverse(sigma, phi, D):
        return None
    return sigma


def invert_twist(data: TwistData, bound: int | None = None) -> TwistData:
    """Data presenting ``B (x) A`` through the inverse twisting map."""
    A = data.A
    m = data.sigma.size
    if not data.mirrored:
        phi = invert_sigma(data.sigma, bound)
        if phi is None:
            raise ValueError("sigma is not invertible")
        # delta'_i = - sum_j delta_j o phi_ji
        new = []
        for g in range(A.ngens):
            x = A.gen(g)
            F = phi.apply(x)
            row = []
            for i in range(m):
                acc: dict = {}
                for j in range(m):
                    if F[j][i]:
                        axpy(acc, data.delta.apply(F[j][i])[j], -1)
                row.append(acc)
            new.append(row)
        return TwistData(A, data.B, phi, SigmaDerivation(phi, new, data.delta.ydegrees), True, dict(data.meta))
    sigma = uninvert_sigma(data.sigma, bound)
    if sigma is None:
        raise ValueError("sigma is not invertible")
    # delta_j = - sum_t delta~_t o sigma_jt
    new = []
    for g in range(A.ngens):
        x = A.gen(g)
        S = sigma.apply(x)
        row = []
        for j in range(m):
            acc = {}
            for t in range(m):
                if S[j][t]:
                    axpy(acc, data.delta.apply(S[j][t])[t], -1)
            row.append(acc)
        new.append(row)
    return TwistData(A, data.B, sigma, SigmaDerivation(sigma, new, data.delta.ydegrees), False, dict(data.meta))


def check_twist(data: TwistData, bound: int | None = None) -> dict:
    """Validate sigma and delta, then certify C; returns a certificate dict."""
    validate_sigma(data.sigma)
    data.delta.validate()
    T = build_twisted_tensor(data, bound)
    return {"certified": True, "hilbert_C": T.hilbert, "convolution": T.expected, "algebra": T}


def poly_of(A: GradedAlgebra, p: dict, degree: int) -> NcPoly:
    return NcPoly(A.alphabet, p, degree, A.field)


class GradedAutomorphism:
    """Degree-preserving algebra endomorphism of A given on generators."""

    def __init__(self, algebra: GradedAlgebra, images: list):
        A = algebra
        if len(images) != A.ngens:
            raise ValueError("one image per generator")
        self.algebra = A
        self.images = []
        for g, p in enumerate(images):
            p = A.nf(p)
            for w in p:
                if A.degree_of(w) != A.alphabet.degrees[g]:
                    raise ValueError(f"image of {A.alphabet.names[g]} has the wrong degree")
            self.images.append(p)
        self._memo = {(): A.one()}

    @classmethod
    def from_matrix(cls, algebra: GradedAlgebra, M: ScalarMatrix):
        """Degree-one generators: ``x_r -> sum_s M[r][s] x_s``."""
        A = algebra
        if any(d != 1 for d in A.alphabet.degrees):
            raise ValueError("matrix form needs an algebra generated in degree 1")
        rows = M.sparse_rows()
        return cls(A, [{(s,): c for s, c in rows[r].items()} for r in range(A.ngens)])

    @classmethod
    def identity(cls, algebra):
        return cls(algebra, [algebra.gen(g) for g in range(algebra.ngens)])

    def apply_word(self, w) -> dict:
        r = self._memo.get(w)
        if r is None:
            r = self.algebra.mul(self.apply_word(w[:-1]), self.images[w[-1]])
            self._memo[w] = r
        return r

    def apply(self, p: dict) -> dict:
        out: dict = {}
        for w, c in p.items():
            axpy(out, self.apply_word(w), c)
        return out

    def matrix(self) -> ScalarMatrix:
        """Degree-one matrix ``M`` with ``x_r -> sum_s M[r][s] x_s``."""
        A = self.algebra
        gens = [g for g in range(A.ngens) if A.alphabet.degrees[g] == 1]
        return ScalarMatrix.from_rows(
            [[self.images[r].get((s,), A.field.zero) for s in gens] for r in gens], A.field)

    def kills_relations(self):
        A = self.algebra
        for r in A.relations:
            e = A.nf(self.apply(r.terms))
            if e:
                return False, r
        return True, None

    def validate(self):
        ok, r = self.kills_relations()
        if not ok:
            raise Violation(f"relation {r} is not killed", relation=r)
        if invert(self.matrix()) is None:
            raise Violation("degree-one matrix is singular")
        return True

    def inverse(self) -> "GradedAutomorphism":
        M = invert(self.matrix())
        if M is None:
            raise Violation("degree-one matrix is singular")
        return GradedAutomorphism.from_matrix(self.algebra, M)

    def compose(self, other: "GradedAutomorphism") -> "GradedAutomorphism":
        """``self o other``."""
        return GradedAutomorphism(self.algebra, [self.apply(p) for p in other.images])

    def format(self) -> dict:
        A = self.algebra
        return {A.alphabet.names[g]: A.format(p) for g, p in enumerate(self.images)}

    def __eq__(self, other):
        return isinstance(other, GradedAutomorphism) and self.images == other.images

    def __repr__(self):
        return f"GradedAutomorphism({self.format()})"
