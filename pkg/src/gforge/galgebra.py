"""Truncated connected graded algebras, graded free modules and module maps.

Algebra elements are dicts ``{normal word: scalar}``.  An element of a free
module ``A(-s_0) + A(-s_1) + ...`` is a dict ``{generator: algebra element}``.
A module map stores, for each source generator ``j``, its image
``{target generator i: entry a_ij}``, so ``f(c*u_j) = sum_i c*a_ij * e_i``.
"""

from __future__ import annotations

from .exactla import QQ, Field, ScalarMatrix
from .freealg import Alphabet, NcPoly, parse_expr
from .gbasis import DegreeBoundError, TruncatedGB
from .kernel import axpy


class GradedAlgebra:
    """``k<X>/(relations)`` known up to degree ``bound``."""

    def __init__(self, alphabet: Alphabet, relations: list, bound: int, field: Field = QQ, name: str = ""):
        self.alphabet = alphabet
        self.field = field
        self.bound = bound
        self.name = name
        self.relations = [r if isinstance(r, NcPoly) else NcPoly(alphabet, r, None, field) for r in relations]
        self.gb = TruncatedGB(alphabet, self.relations, bound, field)
        self._index: dict = {}
        self._mul_memo: dict = {}

    @classmethod
    def from_strings(cls, names, relations, bound, degrees=None, field: Field = QQ, params=None, name=""):
        alpha = Alphabet(names, degrees)
        rels = [parse_expr(r, alpha, field, params) for r in relations]
        return cls(alpha, rels, bound, field, name)

    @property
    def ngens(self) -> int:
        return len(self.alphabet)

    def basis(self, d: int) -> list:
        if d < 0:
            return []
        return self.gb.monomial_basis(d)

    def dim(self, d: int) -> int:
        return len(self.basis(d)) if d >= 0 else 0

    def index(self, d: int) -> dict:
        idx = self._index.get(d)
        if idx is None:
            idx = {w: i for i, w in enumerate(self.basis(d))}
            self._index[d] = idx
        return idx

    def hilbert(self) -> list:
        return self.gb.hilbert_function()

    def degree_of(self, w) -> int:
        return self.alphabet.word_degree(w)

    def nf(self, p: dict) -> dict:
        return self.gb.nf(p)

    def mul_words(self, u, v) -> dict:
        key = (u, v)
        r = self._mul_memo.get(key)
        if r is None:
            r = self.gb.nf_word(u + v)
            self._mul_memo[key] = r
        return r

    def mul(self, p: dict, q: dict) -> dict:
        out: dict = {}
        for u, a in p.items():
            for v, b in q.items():
                axpy(out, self.mul_words(u, v), a * b)
        return out

    def one(self) -> dict:
        return {(): self.field.one}

    def gen(self, i: int) -> dict:
        return self.nf({(i,): self.field.one})

    def coords(self, p: dict, d: int) -> dict:
        """Sparse coordinates of a normal-form element of degree ``d``."""
        idx = self.index(d)
        return {idx[w]: c for w, c in p.items()}

    def element(self, vec: dict, d: int) -> dict:
        b = self.basis(d)
        return {b[i]: c for i, c in vec.items() if c}

    def augmentation(self, p: dict):
        return p.get((), self.field.zero)

    def poly(self, p: dict, degree: int) -> NcPoly:
        return NcPoly(self.alphabet, p, degree, self.field)

    def parse(self, text: str, params=None, degree=None) -> dict:
        return self.nf(parse_expr(text, self.alphabet, self.field, params, degree).terms)

    def format(self, p: dict) -> str:
        if not p:
            return "0"
        d = self.degree_of(next(iter(p)))
        return str(NcPoly(self.alphabet, p, d, self.field))

    def check_degree(self, d):
        if d > self.bound:
            raise DegreeBoundError(f"degree {d} exceeds the truncation bound {self.bound}")


# ----------------------------------------------------------------- modules

class FreeModule:
    """``sum_j A(-shifts[j])``."""

    def __init__(self, algebra: GradedAlgebra, shifts):
        self.algebra = algebra
        self.shifts = tuple(shifts)

    @property
    def rank(self) -> int:
        return len(self.shifts)

    def layout(self, d: int):
        """Offsets of each generator block in the degree-``d`` coordinate space."""
        offs = []
        n = 0
        for s in self.shifts:
            offs.append(n)
            n += self.algebra.dim(d - s)
        return offs, n

    def dim(self, d: int) -> int:
        return self.layout(d)[1]

    def coords(self, elem: dict, d: int) -> dict:
        offs, _ = self.layout(d)
        A = self.algebra
        out = {}
        for j, p in elem.items():
            idx = A.index(d - self.shifts[j])
            o = offs[j]
            for w, c in p.items():
                out[o + idx[w]] = c
        return out

    def element(self, vec: dict, d: int) -> dict:
        offs, _ = self.layout(d)
        A = self.algebra
        out: dict = {}
        j = 0
        for k in sorted(vec):
            while j + 1 < len(offs) and offs[j + 1] <= k:
                j += 1
            b = A.basis(d - self.shifts[j])
            out.setdefault(j, {})[b[k - offs[j]]] = vec[k]
        return out

    def __eq__(self, other):
        return isinstance(other, FreeModule) and other.algebra is self.algebra and other.shifts == self.shifts

    def __hash__(self):
        return hash(self.shifts)

    def __repr__(self):
        return f"FreeModule(shifts={list(self.shifts)})"


def elem_add(x: dict, y: dict, c=1) -> dict:
    """x + c*y for module elements."""
    out = {j: dict(p) for j, p in x.items()}
    for j, p in y.items():
        q = out.setdefault(j, {})
        axpy(q, p, c)
        if not q:
            del out[j]
    return out


def elem_lmul(A: GradedAlgebra, a: dict, x: dict) -> dict:
    """Left multiplication of a module element by an algebra element."""
    out = {}
    for j, p in x.items():
        q = A.mul(a, p)
        if q:
            out[j] = q
    return out


class ModuleMap:
    """Left-module map between free modules given by generator images."""

    def __init__(self, source: FreeModule, target: FreeModule, images: list, check: bool = True):
        if len(images) != source.rank:
            raise ValueError("one image per source generator")
        self.source = source
        self.target = target
        A = source.algebra
        self.images = [{i: A.nf(p) for i, p in im.items() if p} for im in images]
        self.images = [{i: p for i, p in im.items() if p} for im in self.images]
        if check:
            for j, im in enumerate(self.images):
                for i, p in im.items():
                    want = source.shifts[j] - target.shifts[i]
                    for w in p:
                        if A.degree_of(w) != want:
                            raise ValueError(
                                f"entry ({i},{j}) has degree {A.degree_of(w)}, expected {want}")
        self._cols: dict = {}

    @classmethod
    def from_rows(cls, source, target, rows, params=None):
        """Build from row-convention strings: ``rows[j][i]`` is the coefficient
        of target generator ``i`` in the image of source generator ``j``."""
        A = source.algebra
        images = []
        for j, row in enumerate(rows):
            if len(row) != target.rank:
                raise ValueError(f"row {j} has {len(row)} entries, target has rank {target.rank}")
            im = {}
            for i, s in enumerate(row):
                p = A.parse(s, params, source.shifts[j] - target.shifts[i]) if isinstance(s, str) else s
                if p:
                    im[i] = p
            images.append(im)
        return cls(source, target, images)

    @classmethod
    def identity(cls, module: FreeModule):
        one = module.algebra.one()
        return cls(module, module, [{j: dict(one)} for j in range(module.rank)])

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, [{} for _ in range(source.rank)])

    def entry(self, i, j) -> dict:
        return self.images[j].get(i, {})

    def apply(self, x: dict) -> dict:
        A = self.source.algebra
        out: dict = {}
        for j, c in x.items():
            out = elem_add(out, elem_lmul(A, c, self.images[j]))
        return out

    def columns(self, d: int) -> list:
        """Degree-``d`` matrix as a list of sparse columns (cached)."""
        cols = self._cols.get(d)
        if cols is not None:
            return cols
        A = self.source.algebra
        A.check_degree(d)
        toffs, _ = self.target.layout(d)
        tsh = self.target.shifts
        cols = []
        for j, s in enumerate(self.source.shifts):
            im = self.images[j]
            for w in A.basis(d - s):
                col: dict = {}
                for i, p in im.items():
                    idx = A.index(d - tsh[i])
                    o = toffs[i]
                    for v, c in p.items():
                        for u, x in A.mul_words(w, v).items():
                            k = o + idx[u]
                            y = col.get(k)
                            y = c * x if y is None else y + c * x
                            if y:
                                col[k] = y
                            else:
                                del col[k]
                cols.append(col)
        self._cols[d] = cols
        return cols

    def degree_matrix(self, d: int) -> ScalarMatrix:
        return ScalarMatrix.from_columns(self.target.dim(d), self.columns(d), self.source.algebra.field)

    def is_zero(self) -> bool:
        return not any(self.images)

    def __eq__(self, other):
        return (isinstance(other, ModuleMap) and self.source == other.source
                and self.target == other.target and self.images == other.images)

    def format_rows(self) -> list:
        A = self.source.algebra
        return [[A.format(self.entry(i, j)) for i in range(self.target.rank)] for j in range(self.source.rank)]


def degree_matrix(f: ModuleMap, d: int) -> ScalarMatrix:
    return f.degree_matrix(d)


def compose(f: ModuleMap, g: ModuleMap) -> ModuleMap:
    """``f o g``."""
    if g.target != f.source:
        raise ValueError("shape mismatch: target of g is not the source of f")
    return ModuleMap(g.source, f.target, [f.apply(im) for im in g.images])


class TwistedRightAction:
    """Right action on a free module with all shifts equal, through a matrix hom.

    ``(sum_j c_j e_j) * a = sum_j sum_p c_j phi_jp(a) e_p`` where ``phi_jp(a)``
    is carried into the module's algebra by ``embed`` (identity by default).
    """

    def __init__(self, module: FreeModule, phi, embed=None):
        if len(set(module.shifts)) > 1:
            raise ValueError("twisted actions need a module generated in one degree")
        if phi.size != module.rank:
            raise ValueError("matrix size does not match module rank")
        self.module = module
        self.phi = phi
        self.embed = embed or (lambda p: p)

    def act(self, x: dict, a: dict) -> dict:
        A = self.module.algebra
        out: dict = {}
        for j, c in x.items():
            for w, coeff in a.items():
                mat = self.phi.apply_word(w)
                for p in range(self.phi.size):
                    e = mat[j][p]
                    if e:
                        term = A.mul(c, self.embed(e))
                        if term:
                            out = elem_add(out, {p: term}, coeff)
        return out
