"""Exact linear algebra over Z and Q on small dense matrices.

Matrices are lists of lists of ints (or Fractions for the rational solver).
Everything here is sized for intersection matrices and ideal lattices
(dimension <= ~20), so the simple cubic algorithms are the right tool.
"""

from __future__ import annotations

from fractions import Fraction


def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    return [
        [sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)]
        for i in range(rows)
    ]


def mat_vec(a, v):
    return [sum(row[j] * v[j] for j in range(len(v))) for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)]


def smith_normal_form(mat):
    """Return (d, u, v) with u*mat*v = d in Smith normal form.

    d is diagonal with d[i][i] | d[i+1][i+1], entries nonnegative; u and v are
    unimodular.  The input is not modified.
    """
    a = [list(row) for row in mat]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, q):
        # row_i += q * row_j
        a[i] = [x + q * y for x, y in zip(a[i], a[j])]
        u[i] = [x + q * y for x, y in zip(u[i], u[j])]

    def add_col(i, j, q):
        for row in a:
            row[i] += q * row[j]
        for row in v:
            row[i] += q * row[j]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(rows, cols):
        # Find a pivot of minimal absolute value in the remaining block.
        pivot = None
        for i in range(t, rows):
            for j in range(t, cols):
                if a[i][j] != 0 and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        if a[t][t] < 0:
            negate_row(t)

        dirty = False
        for i in range(t + 1, rows):
            if a[i][t] % a[t][t] != 0:
                dirty = True
            add_row(i, t, -(a[i][t] // a[t][t]))
        for j in range(t + 1, cols):
            if a[t][j] % a[t][t] != 0:
                dirty = True
            add_col(j, t, -(a[t][j] // a[t][t]))
        if dirty or any(a[i][t] for i in range(t + 1, rows)) or any(
            a[t][j] for j in range(t + 1, cols)
        ):
            continue

        # Divisibility condition against the rest of the block.
        offender = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if a[i][j] % a[t][t] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(t, offender, 1)
            continue
        t += 1

    return a, u, v


def invariant_factors(mat) -> list[int]:
    """Nontrivial diagonal entries (> 1) of the Smith normal form."""
    d, _, _ = smith_normal_form(mat)
    out = []
    for i in range(min(len(d), len(d[0]) if d else 0)):
        if d[i][i] > 1:
            out.append(d[i][i])
    return out


def kernel_basis(mat) -> list[list[int]]:
    """Basis of the integer kernel {x : mat @ x = 0} as a list of vectors."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    d, _, v = smith_normal_form(mat)
    rank = sum(1 for i in range(min(rows, cols)) if d[i][i] != 0)
    return [[v[i][j] for i in range(cols)] for j in range(rank, cols)]


def solve_rational(mat, rhs):
    """One exact solution x of mat @ x = rhs over Q, or None if inconsistent.

    mat entries and rhs may be ints or Fractions; the kernel is ignored, any
    particular solution is returned.
    """
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    a = [[Fraction(x) for x in row] + [Fraction(r)] for row, r in zip(mat, rhs)]
    pivots = []
    r = 0
    for c in range(cols):
        pr = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if pr is None:
            continue
        a[r], a[pr] = a[pr], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if a[i][cols] != 0:
            return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = a[i][cols]
    return x


def hnf_row_lattice(vectors) -> list[list[int]]:
    """Row Hermite normal form of the lattice spanned by integer vectors.

    Returns a full list of nonzero rows, upper triangular with positive
    pivots and entries above each pivot reduced into [0, pivot).
    """
    work = [list(v) for v in vectors if any(v)]
    if not work:
        return []
    cols = len(work[0])
    basis = []
    col = 0
    while col < cols and work:
        live = [w for w in work if w[col] != 0]
        rest = [w for w in work if w[col] == 0]
        while len(live) > 1:
            live.sort(key=lambda w: abs(w[col]))
            head = live[0]
            new_live = [head]
            for w in live[1:]:
                q = w[col] // head[col]
                w2 = [x - q * y for x, y in zip(w, head)]
                if w2[col] != 0:
                    new_live.append(w2)
                elif any(w2):
                    rest.append(w2)
            if len(new_live) == 1:
                live = new_live
                break
            live = new_live
        if live:
            head = live[0]
            if head[col] < 0:
                head = [-x for x in head]
            basis.append(head)
        work = rest
        col += 1
    # Reduce entries above pivots.
    for i in range(len(basis) - 1, -1, -1):
        pcol = next(j for j in range(cols) if basis[i][j] != 0)
        for k in range(i):
            q = basis[k][pcol] // basis[i][pcol]
            if q:
                basis[k] = [x - q * y for x, y in zip(basis[k], basis[i])]
    return basis
