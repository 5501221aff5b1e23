"""Words and homogeneous noncommutative polynomials, plus the expression parser.

A word is a tuple of generator indices.  Words are compared by weighted
degree first and then lexicographically, where a generator listed later in
the alphabet is larger.  The leading word of a polynomial is its largest word.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .exactla import QQ, Field
from .kernel import axpy

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


class ParseError(ValueError):
    """Malformed expression; ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int | None = None, text: str | None = None):
        self.offset = offset
        self.text = text
        where = f" at offset {offset}" if offset is not None else ""
        super().__init__(f"{message}{where}")


class InhomogeneousError(ParseError):
    def __init__(self, d1: int, d2: int, offset=None, text=None):
        self.degrees = (d1, d2)
        super().__init__(f"inhomogeneous expression: degree {d1} vs degree {d2}", offset, text)


@dataclass(frozen=True)
class Alphabet:
    names: tuple
    degrees: tuple

    def __init__(self, names, degrees=None):
        names = tuple(names)
        degrees = tuple(degrees) if degrees is not None else (1,) * len(names)
        if len(set(names)) != len(names):
            raise ValueError("generator names must be distinct")
        if len(degrees) != len(names):
            raise ValueError("one degree per generator")
        if any(int(d) < 1 for d in degrees):
            raise ValueError("generator degrees must be positive")
        for n in names:
            if not _IDENT.fullmatch(n):
                raise ValueError(f"bad generator name {n!r}")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "degrees", tuple(int(d) for d in degrees))

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def word_degree(self, w) -> int:
        degs = self.degrees
        return sum(degs[i] for i in w)

    def key(self, w):
        """Sort key realizing the monomial order."""
        return (self.word_degree(w), w)

    def format_word(self, w) -> str:
        if not w:
            return "1"
        return "*".join(self.names[i] for i in w)

    def concat(self, other: "Alphabet") -> "Alphabet":
        return Alphabet(self.names + other.names, self.degrees + other.degrees)

    def words(self, d: int) -> list:
        """All words of weighted degree ``d`` in increasing order."""
        out = {0: [()]}
        for e in range(1, d + 1):
            out[e] = [w + (g,) for g, dg in enumerate(self.degrees) if dg <= e for w in out[e - dg]]
        return sorted(out[d], key=self.key)


ORDER_TAG = "deglex (weighted degree, then lexicographic; later generators are larger)"


class NcPoly:
    """Homogeneous element of the free algebra on an alphabet.

    ``terms`` maps words to nonzero scalars.  The zero polynomial still
    carries a degree.
    """

    __slots__ = ("alphabet", "field", "terms", "degree")

    def __init__(self, alphabet: Alphabet, terms: dict, degree: int | None = None, field: Field = QQ):
        clean = {tuple(w): field(c) for w, c in terms.items() if c}
        clean = {w: c for w, c in clean.items() if c}
        degs = {alphabet.word_degree(w) for w in clean}
        if len(degs) > 1:
            d1, d2 = sorted(degs)[:2]
            raise InhomogeneousError(d1, d2)
        if degs:
            (d,) = degs
            if degree is not None and degree != d:
                raise ValueError(f"declared degree {degree} but terms have degree {d}")
            degree = d
        elif degree is None:
            degree = 0
        self.alphabet = alphabet
        self.field = field
        self.terms = clean
        self.degree = degree

    # constructors
    @classmethod
    def zero(cls, alphabet, degree=0, field=QQ):
        return cls(alphabet, {}, degree, field)

    @classmethod
    def one(cls, alphabet, field=QQ):
        return cls(alphabet, {(): field.one}, 0, field)

    @classmethod
    def word(cls, alphabet, w, coeff=1, field=QQ):
        return cls(alphabet, {tuple(w): coeff}, None, field)

    @classmethod
    def generator(cls, alphabet, name_or_index, field=QQ):
        i = alphabet.index(name_or_index) if isinstance(name_or_index, str) else name_or_index
        return cls(alphabet, {(i,): field.one}, None, field)

    def _like(self, terms, degree):
        p = NcPoly.__new__(NcPoly)
        p.alphabet, p.field, p.terms, p.degree = self.alphabet, self.field, terms, degree
        return p

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _check(self, other):
        if self.alphabet != other.alphabet:
            raise ValueError("polynomials over different alphabets")

    def __add__(self, other):
        self._check(other)
        if self.terms and other.terms and self.degree != other.degree:
            raise InhomogeneousError(*sorted((self.degree, other.degree)))
        out = dict(self.terms)
        axpy(out, other.terms, self.field.one)
        deg = self.degree if self.terms else other.degree
        return self._like(out, deg)

    def __neg__(self):
        return self._like({w: -c for w, c in self.terms.items()}, self.degree)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = self.field(c)
        if not c:
            return self._like({}, self.degree)
        return self._like({w: c * x for w, x in self.terms.items()}, self.degree)

    def __mul__(self, other):
        if isinstance(other, NcPoly):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, NcPoly):
            return NotImplemented
        return self.alphabet == other.alphabet and self.terms == other.terms and (
            bool(self.terms) or self.degree == other.degree)

    def __hash__(self):
        return hash((self.degree, frozenset(self.terms.items())))

    def sorted_terms(self, descending=True):
        return sorted(self.terms.items(), key=lambda t: self.alphabet.key(t[0]), reverse=descending)

    def leading_word(self):
        if not self.terms:
            return None
        return max(self.terms, key=self.alphabet.key)

    def __str__(self):
        return pretty(self)

    def __repr__(self):
        return f"NcPoly({pretty(self)!r}, degree={self.degree})"


def pretty(p: NcPoly) -> str:
    """Canonical text form; leading word first.  Parses back to ``p``."""
    if not p.terms:
        return "0"
    out = []
    for w, c in p.sorted_terms():
        s = p.field.format(c)
        neg = s.startswith("-")
        if neg:
            s = s[1:]
        body = p.alphabet.format_word(w)
        if not w:
            piece = s
        elif s == "1":
            piece = body
        else:
            piece = f"{s}*{body}"
        if out:
            out.append(("- " if neg else "+ ") + piece)
        else:
            out.append(("-" if neg else "") + piece)
    return " ".join(out)


def mul(p: NcPoly, q: NcPoly) -> NcPoly:
    p._check(q)
    out: dict = {}
    for u, a in p.terms.items():
        for v, b in q.terms.items():
            w = u + v
            c = out.get(w)
            c = a * b if c is None else c + a * b
            if c:
                out[w] = c
            else:
                del out[w]
    return p._like(out, p.degree + q.degree)


def apply_generator_map(p: NcPoly, images: list) -> NcPoly:
    """Apply the algebra map sending generator ``i`` to ``images[i]``."""
    alpha = p.alphabet
    if len(images) != len(alpha):
        raise ValueError(f"expected {len(alpha)} images, got {len(images)}")
    target = images[0].alphabet if images else alpha
    for i, im in enumerate(images):
        if im.degree != alpha.degrees[i]:
            raise ValueError(
                f"image of {alpha.names[i]} has degree {im.degree}, generator has degree {alpha.degrees[i]}")
    out = NcPoly.zero(target, p.degree, p.field)
    for w, c in p.terms.items():
        t = NcPoly.one(target, p.field)
        for i in w:
            t = mul(t, images[i])
        out = out + t.scale(c)
    return out


# ----------------------------------------------------------------- parser

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))", re.S)


class _Parser:
    def __init__(self, text, alphabet, field, params):
        self.text = text
        self.alphabet = alphabet
        self.field = field
        self.params = params or {}
        self.toks = []
        # offsets are character positions; errors translate them to bytes
        for m in _TOKEN.finditer(text):
            if m.group(0).strip() == "":
                continue
            start = m.start(m.lastindex)
            kind = ("num", "id", "op")[m.lastindex - 1]
            self.toks.append((kind, m.group(m.lastindex), start))
        self.i = 0

    def byte_offset(self, char_offset):
        return len(self.text[:char_offset].encode())

    def error(self, msg, at=None):
        if at is None:
            at = self.toks[self.i][2] if self.i < len(self.toks) else len(self.text)
        return ParseError(msg, self.byte_offset(at), self.text)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    # Internally a value is (terms, degree) with degree None for an untagged zero.
    def parse(self):
        if not self.toks:
            raise self.error("empty expression")
        val = self.expr()
        if self.i != len(self.toks):
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return val

    def _add(self, a, b, sign, at):
        ta, da = a
        tb, db = b
        if ta and tb and da != db:
            raise InhomogeneousError(*sorted((da, db)), offset=self.byte_offset(at), text=self.text)
        out = dict(ta)
        axpy(out, tb, self.field(sign))
        if ta:
            deg = da
        elif tb:
            deg = db
        else:
            deg = da if da is not None else db
        return out, deg

    def expr(self):
        kind, val, at = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        acc = self.term()
        if sign == -1:
            acc = ({w: -c for w, c in acc[0].items()}, acc[1])
        while True:
            kind, val, at = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                acc = self._add(acc, self.term(), -1 if val == "-" else 1, at)
            else:
                return acc

    def term(self):
        acc = self.factor()
        while True:
            kind, val, at = self.peek()
            if kind == "op" and val == "*":
                self.take()
                acc = self._mul(acc, self.factor())
            elif kind in ("num", "id") or (kind == "op" and val == "("):
                # juxtaposition after a scalar: "2 x1"
                acc = self._mul(acc, self.factor())
            else:
                return acc

    def _mul(self, a, b):
        ta, da = a
        tb, db = b
        out: dict = {}
        for u, x in ta.items():
            for v, y in tb.items():
                w = u + v
                c = out.get(w)
                c = x * y if c is None else c + x * y
                if c:
                    out[w] = c
                else:
                    del out[w]
        deg = None if da is None or db is None else da + db
        if out:
            deg = self.alphabet.word_degree(next(iter(out)))
        return out, deg

    def factor(self):
        kind, val, at = self.take()
        f = self.field
        if kind == "num":
            num = int(val)
            den = 1
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "/":
                self.take()
                k3, v3, a3 = self.take()
                if k3 != "num":
                    raise self.error("expected digits after '/'", a3)
                den = int(v3)
                if den == 0:
                    raise self.error("zero denominator", a3)
            c = f.parse(f"{num}/{den}")
            return ({(): c} if c else {}), (0 if c else None)
        if kind == "id":
            if val in self.params:
                c = f(self.params[val])
                return ({(): c} if c else {}), (0 if c else None)
            try:
                g = self.alphabet.index(val)
            except ValueError:
                raise ParseError(f"unknown identifier {val!r}", self.byte_offset(at), self.text) from None
            return {(g,): f.one}, self.alphabet.degrees[g]
        if kind == "op" and val == "(":
            inner = self.expr()
            k2, v2, a2 = self.take()
            if k2 != "op" or v2 != ")":
                raise self.error("expected ')'", a2)
            return inner
        if kind is None:
            raise self.error("unexpected end of expression")
        raise self.error(f"unexpected {val!r}", at)


def parse_expr(text: str, alphabet: Alphabet, field: Field = QQ, params: dict | None = None,
               degree: int | None = None) -> NcPoly:
    """Parse ``text`` into a homogeneous polynomial.

    ``params`` maps identifiers to scalars substituted while parsing.  When
    ``degree`` is given, the result must have it (a zero result is tagged
    with it).
    """
    if params:
        clash = set(params) & set(alphabet.names)
        if clash:
            raise ParseError(f"parameter name shadows generator: {sorted(clash)[0]}")
    p = _Parser(text, alphabet, field, params)
    terms, deg = p.parse()
    if not terms:
        return NcPoly.zero(alphabet, degree if degree is not None else (deg or 0), field)
    if degree is not None and deg != degree:
        raise ParseError(f"expected degree {degree}, got degree {deg}", 0, text)
    return NcPoly(alphabet, terms, deg, field)
