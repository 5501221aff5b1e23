"""Degree-truncated Gröbner bases of homogeneous two-sided ideals.

Completion runs degree by degree: overlaps (S-polynomials) of each degree are
reduced against everything found so far, and the survivors of that degree are
inter-reduced and made monic before moving on.  Once degree ``d`` is done the
basis is final in all degrees up to ``d``.
"""

from __future__ import annotations

from .exactla import QQ, Field
from .freealg import ORDER_TAG, Alphabet, NcPoly
from .kernel import axpy


class DegreeBoundError(ValueError):
    pass


class TruncatedGB:
    """A Gröbner basis valid in degrees up to ``bound``.

    ``basis`` is a list of ``(leading_word, poly_dict)`` pairs; each poly is
    monic in its leading word.  Polynomials are plain dicts word -> scalar.
    """

    def __init__(self, alphabet: Alphabet, relations: list, bound: int, field: Field = QQ):
        self.alphabet = alphabet
        self.relations = list(relations)
        self.bound = bound
        self.field = field
        self.order = ORDER_TAG
        self.basis: list = []
        self._leads: dict = {}  # lead word -> basis index
        self._lead_lengths: list = []
        self._nf_memo: dict = {}
        self._normal_words: dict = {0: [()]}
        self._complete()

    # ------------------------------------------------------------ reduction
    def _find_lead(self, w):
        """Leftmost occurrence of a leading word inside ``w``.

        Returns ``(position, basis_index)``; ties at one position go to the
        lowest basis index.
        """
        leads = self._leads
        n = len(w)
        for i in range(n):
            best = None
            for L in self._lead_lengths:
                if i + L > n:
                    break
                j = leads.get(w[i:i + L])
                if j is not None and (best is None or j < best):
                    best = j
            if best is not None:
                return i, best
        return None

    def nf_word(self, w) -> dict:
        """Normal form of a single word (memoized)."""
        memo = self._nf_memo
        r = memo.get(w)
        if r is not None:
            return r
        hit = self._find_lead(w)
        if hit is None:
            r = {w: self.field.one}
        else:
            i, j = hit
            lead, g = self.basis[j]
            pre, post = w[:i], w[i + len(lead):]
            r = {}
            for t, c in g.items():
                if t != lead:
                    axpy(r, self.nf_word(pre + t + post), -c)
        memo[w] = r
        return r

    def nf(self, poly: dict) -> dict:
        out: dict = {}
        for w, c in poly.items():
            if c:
                axpy(out, self.nf_word(w), c)
        return out

    def is_normal(self, w) -> bool:
        return self._find_lead(w) is None

    # ------------------------------------------------------------ completion
    def _add(self, g: dict):
        key = self.alphabet.key
        lead = max(g, key=key)
        inv = 1 / g[lead]
        g = {w: c * inv for w, c in g.items()}
        idx = len(self.basis)
        self.basis.append((lead, g))
        self._leads[lead] = idx
        if len(lead) not in self._lead_lengths:
            self._lead_lengths.append(len(lead))
            self._lead_lengths.sort()
        return idx

    def _overlaps(self, i: int, j: int):
        """S-polynomials from a proper suffix of lead_i equal to a prefix of lead_j."""
        u, gi = self.basis[i]
        v, gj = self.basis[j]
        out = []
        for k in range(1, min(len(u), len(v))):
            if u[len(u) - k:] == v[:k] and len(u) > k and len(v) > k:
                a = u[:len(u) - k]
                b = v[k:]
                s = {}
                for w, c in gi.items():
                    axpy(s, {w + b: c}, 1)
                for w, c in gj.items():
                    axpy(s, {a + w: c}, -1)
                out.append((self.alphabet.word_degree(u + b), s))
        return out

    def _complete(self):
        deg = self.alphabet.word_degree
        f = self.field
        pending: dict = {}
        for r in self.relations:
            terms = r.terms if isinstance(r, NcPoly) else r
            terms = {tuple(w): f(c) for w, c in terms.items() if c}
            if not terms:
                continue
            ds = {deg(w) for w in terms}
            if len(ds) != 1:
                raise ValueError("relations must be homogeneous")
            (d,) = ds
            if d < 2:
                raise ValueError("relations must have degree at least 2")
            if d <= self.bound:
                pending.setdefault(d, []).append(terms)
        key = self.alphabet.key
        for d in range(2, self.bound + 1):
            cands = pending.pop(d, [])
            if not cands:
                continue
            # reduce against lower degrees, then echelonize within degree d
            rows = {}
            for c in cands:
                r = self.nf(c)
                while r:
                    lead = max(r, key=key)
                    if lead in rows:
                        axpy(r, rows[lead], -r[lead])
                    else:
                        inv = 1 / r[lead]
                        rows[lead] = {w: x * inv for w, x in r.items()}
                        break
            if not rows:
                continue
            # full inter-reduction inside degree d (largest lead first is not
            # needed: clear every lead word from every other row)
            leads = sorted(rows, key=key)
            for lw in leads:
                for other in leads:
                    if other != lw:
                        x = rows[other].get(lw)
                        if x:
                            axpy(rows[other], rows[lw], -x)
            start = len(self.basis)
            for lw in leads:
                self._add(rows[lw])
            # words of degree >= d may now reduce further
            self._nf_memo = {w: r for w, r in self._nf_memo.items() if deg(w) < d}
            for i in range(start, len(self.basis)):
                for j in range(len(self.basis)):
                    for pair in ((i, j), (j, i)) if i != j else ((i, i),):
                        for dd, s in self._overlaps(*pair):
                            if dd <= self.bound:
                                pending.setdefault(dd, []).append(s)

    # ------------------------------------------------------------ queries
    def _check_degree(self, d):
        if d > self.bound:
            raise DegreeBoundError(f"degree {d} exceeds the truncation bound {self.bound}")

    def normal_form(self, p):
        """Normal form of an ``NcPoly`` (or a plain dict)."""
        if isinstance(p, NcPoly):
            self._check_degree(p.degree)
            return NcPoly(p.alphabet, self.nf(p.terms), p.degree, p.field)
        for w in p:
            self._check_degree(self.alphabet.word_degree(w))
        return self.nf(p)

    def monomial_basis(self, d: int) -> list:
        self._check_degree(d)
        if d < 0:
            return []
        nw = self._normal_words
        if d in nw:
            return nw[d]
        degs = self.alphabet.degrees
        out = []
        for g, dg in enumerate(degs):
            if dg > d:
                continue
            for w in self.monomial_basis(d - dg):
                x = w + (g,)
                if self._suffix_normal(x):
                    out.append(x)
        out.sort(key=self.alphabet.key)
        nw[d] = out
        return out

    def _suffix_normal(self, x) -> bool:
        n = len(x)
        for L in self._lead_lengths:
            if L > n:
                break
            if x[n - L:] in self._leads:
                return False
        return True

    def hilbert_function(self) -> list:
        return [len(self.monomial_basis(d)) for d in range(self.bound + 1)]

    def polys(self) -> list:
        return [NcPoly(self.alphabet, g, None, self.field) for _, g in self.basis]


def truncated_groebner(relations: list, bound: int, alphabet: Alphabet | None = None,
                       field: Field | None = None) -> TruncatedGB:
    if alphabet is None:
        if not relations or not isinstance(relations[0], NcPoly):
            raise ValueError("alphabet required when relations are not NcPoly values")
        alphabet = relations[0].alphabet
    if field is None:
        field = relations[0].field if relations and isinstance(relations[0], NcPoly) else QQ
    return TruncatedGB(alphabet, relations, bound, field)


def normal_form(p, gb: TruncatedGB):
    return gb.normal_form(p)


def monomial_basis(gb: TruncatedGB, d: int) -> list:
    return gb.monomial_basis(d)


def hilbert_function(gb: TruncatedGB) -> list:
    return gb.hilbert_function()


def ideal_dimension_oracle(alphabet: Alphabet, relations: list, d: int, field: Field = QQ) -> int:
    """dim of (free algebra / ideal) in degree ``d`` by brute-force linear algebra.

    Spans all ``u*g*v`` of degree ``d`` and takes the rank; independent of the
    rewriting machinery above.  Only sensible for small ``d``.
    """
    from .exactla import Echelon

    words = alphabet.words(d)
    index = {w: i for i, w in enumerate(words)}
    ech = Echelon(field)
    deg = alphabet.word_degree
    for r in relations:
        terms = r.terms if isinstance(r, NcPoly) else r
        if not terms:
            continue
        e = deg(next(iter(terms)))
        if e > d:
            continue
        for a in range(d - e + 1):
            for u in alphabet.words(a):
                for v in alphabet.words(d - e - a):
                    ech.add({index[u + w + v]: field(c) for w, c in terms.items()})
    return len(words) - ech.rank
