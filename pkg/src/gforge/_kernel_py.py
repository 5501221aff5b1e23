"""Pure-Python elimination kernels.

Used when the compiled ``_kernel`` extension is unavailable.  Both modules
expose the same four functions; ``gforge.kernel`` picks one at import.

Sparse vectors are dicts ``{index: scalar}`` with no stored zeros.
"""


def axpy(dst, src, c):
    """dst += c * src, in place."""
    if not c:
        return
    for k, v in src.items():
        w = dst.get(k)
        if w is None:
            dst[k] = c * v
        else:
            w = w + c * v
            if w:
                dst[k] = w
            else:
                del dst[k]


def reduce_vector(vec, basis, combo=None, basis_combos=None):
    """Reduce ``vec`` in place against an echelon ``basis``.

    ``basis`` maps a pivot index to a vector whose smallest key is that pivot
    and whose pivot entry is 1.  When ``combo`` is given, the same row
    operations are applied to it using ``basis_combos``.  Returns the pivot of
    the residue, or -1 if it reduced to zero.
    """
    while vec:
        k = min(vec)
        b = basis.get(k)
        if b is None:
            return k
        c = -vec[k]
        axpy(vec, b, c)
        if combo is not None:
            axpy(combo, basis_combos[k], c)
    return -1


def rank_mod(columns, nrows, p):
    """Rank over GF(p) of the matrix with the given sparse integer columns."""
    basis = {}
    rank = 0
    for col in columns:
        v = {k: x % p for k, x in col.items() if x % p}
        while v:
            k = min(v)
            b = basis.get(k)
            if b is None:
                inv = pow(v[k], p - 2, p)
                basis[k] = {j: (x * inv) % p for j, x in v.items()}
                rank += 1
                break
            c = v[k]
            for j, x in b.items():
                w = (v.get(j, 0) - c * x) % p
                if w:
                    v[j] = w
                else:
                    v.pop(j, None)
    return rank


def rref_mod(rows, ncols, p):
    """Reduced row echelon form over GF(p) of a dense list-of-lists matrix.

    Returns ``(reduced_rows, pivots)``.
    """
    m = [[x % p for x in r] for r in rows]
    pivots = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r == nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if m[i][c]:
                piv = i
                break
        if piv < 0:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], p - 2, p)
        row = [(x * inv) % p for x in m[r]]
        m[r] = row
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], row)]
        pivots.append(c)
        r += 1
    return m, pivots
