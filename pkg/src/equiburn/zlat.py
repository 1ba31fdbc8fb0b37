"""Exact linear algebra over the integers.

Hermite and Smith normal forms with unimodular transform certificates,
lattice membership with explicit coefficient certificates, and invariant
factors of finitely presented abelian groups.  Everything runs on Python's
unbounded ints; fixed-width arithmetic is never used here.

Conventions: a matrix is a list of rows, a lattice is spanned by the rows
of a matrix, and vectors multiply from the left (``x . A`` is ``vecmat``).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd


def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def copy_matrix(A: list[list[int]]) -> list[list[int]]:
    return [list(row) for row in A]


def dims(A: list[list[int]]) -> tuple[int, int]:
    m = len(A)
    n = len(A[0]) if m else 0
    for row in A:
        if len(row) != n:
            raise ValueError("ragged matrix")
    return m, n


def matmul(A: list[list[int]], B: list[list[int]]) -> list[list[int]]:
    ma, na = dims(A)
    mb, nb = dims(B)
    if na != mb:
        raise ValueError(f"shape mismatch {ma}x{na} . {mb}x{nb}")
    Bt = list(zip(*B)) if B else []
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def vecmat(x: list[int], A: list[list[int]]) -> list[int]:
    m, n = dims(A)
    if len(x) != m:
        raise ValueError("vector/matrix shape mismatch")
    out = [0] * n
    for xi, row in zip(x, A):
        if xi:
            for j, aij in enumerate(row):
                if aij:
                    out[j] += xi * aij
    return out


def det(A: list[list[int]]) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    m, n = dims(A)
    if m != n:
        raise ValueError("determinant of non-square matrix")
    if n == 0:
        return 1
    M = copy_matrix(A)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k] != 0:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            M[i][k] = 0
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def hnf(A: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row-style Hermite normal form.

    Returns (H, U) with U unimodular and U.A = H; H is upper echelon with
    positive pivots and the entries above each pivot reduced into
    [0, pivot).  Rows below the rank are zero.
    """
    m, n = dims(A)
    H = copy_matrix(A)
    U = identity(m)
    r = 0
    for c in range(n):
        if r == m:
            break
        # Knock the column down to a single entry at row r by repeated
        # minimal-pivot reduction; |pivot| strictly decreases, so this ends.
        while True:
            piv = None
            for i in range(r, m):
                if H[i][c] != 0 and (piv is None or abs(H[i][c]) < abs(H[piv][c])):
                    piv = i
            if piv is None:
                break
            if piv != r:
                H[r], H[piv] = H[piv], H[r]
                U[r], U[piv] = U[piv], U[r]
            done = True
            p = H[r][c]
            for i in range(r + 1, m):
                if H[i][c] != 0:
                    q = H[i][c] // p
                    if q:
                        H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                        U[i] = [a - q * b for a, b in zip(U[i], U[r])]
                    if H[i][c] != 0:
                        done = False
            if done:
                break
        if H[r][c] != 0:
            if H[r][c] < 0:
                H[r] = [-a for a in H[r]]
                U[r] = [-a for a in U[r]]
            p = H[r][c]
            for i in range(r):
                q = H[i][c] // p
                if q:
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
            r += 1
    return H, U


def inverse_unimodular(A: list[list[int]]) -> list[list[int]]:
    """Inverse of a unimodular integer matrix (raises if A is not one)."""
    m, n = dims(A)
    if m != n:
        raise ValueError("not square")
    H, U = hnf(A)
    if H != identity(n):
        raise ValueError("matrix is not unimodular")
    return U


def kernel_basis(A: list[list[int]]) -> list[list[int]]:
    """Basis of the left kernel {x : x.A = 0}, as rows."""
    m, _ = dims(A)
    H, U = hnf(A)
    return [U[i] for i in range(m) if all(a == 0 for a in H[i])]


@dataclass(frozen=True)
class SNFData:
    """Smith normal form U.A.V = diag(diag), with U, V unimodular."""

    diag: tuple[int, ...]
    U: tuple[tuple[int, ...], ...]
    V: tuple[tuple[int, ...], ...]

    def check(self, A: list[list[int]]) -> bool:
        m, n = dims(A)
        U = [list(r) for r in self.U]
        V = [list(r) for r in self.V]
        D = matmul(matmul(U, A), V)
        for i in range(m):
            for j in range(n):
                want = self.diag[i] if i == j and i < len(self.diag) else 0
                if D[i][j] != want:
                    return False
        chain = all(
            self.diag[i + 1] % self.diag[i] == 0
            for i in range(len(self.diag) - 1)
            if self.diag[i] != 0
        ) and all(
            self.diag[j] == 0
            for i in range(len(self.diag))
            for j in range(i, len(self.diag))
            if self.diag[i] == 0
        )
        return chain and abs(det(U)) == 1 and abs(det(V)) == 1


def snf(A: list[list[int]]) -> SNFData:
    """Smith normal form with transforms.

    Pivot strategy: minimal absolute value in the working submatrix, with
    gcd reduction of its row and column, which keeps entry growth tame at
    the sizes this library works at.
    """
    m, n = dims(A)
    D = copy_matrix(A)
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        if i != j:
            D[i], D[j] = D[j], D[i]
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        if i != j:
            for row in D:
                row[i], row[j] = row[j], row[i]
            for row in V:
                row[i], row[j] = row[j], row[i]

    def addmul_row(dst, src, q):
        # row_dst -= q * row_src
        D[dst] = [a - q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def addmul_col(dst, src, q):
        for row in D:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        # Locate the minimal nonzero entry of the working submatrix.
        pi = pj = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] != 0 and (pi is None or abs(D[i][j]) < abs(D[pi][pj])):
                    pi, pj = i, j
        if pi is None:
            break
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            # Clear column t and row t; a nonzero remainder becomes the new,
            # strictly smaller pivot, so the loop terminates.
            dirty = False
            for i in range(t + 1, m):
                if D[i][t] != 0:
                    addmul_row(i, t, D[i][t] // D[t][t])
                    if D[i][t] != 0:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if D[t][j] != 0:
                    addmul_col(j, t, D[t][j] // D[t][t])
                    if D[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
            if dirty:
                continue
            # Divisibility sweep: fold any offending row into row t and redo.
            p = D[t][t]
            offender = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i][j] % p != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            addmul_row(t, offender, -1)
        if D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    diag = tuple(D[i][i] for i in range(min(m, n)))
    return SNFData(
        diag=diag,
        U=tuple(tuple(r) for r in U),
        V=tuple(tuple(r) for r in V),
    )


def member(L: list[list[int]], v: list[int]) -> list[int] | None:
    """Coefficients x with x.L = v, or None when no integer solution exists.

    Deterministic and certificate-producing: back-substitution against the
    Hermite form of L, with the echelon coefficients pushed back through the
    unimodular transform.
    """
    m = len(L)
    if m == 0:
        return [] if all(a == 0 for a in v) else None
    _, n = dims(L)
    if len(v) != n:
        raise ValueError("vector length mismatch")
    H, U = hnf(L)
    w = list(v)
    y = [0] * m
    for i in range(m):
        c = next((j for j, a in enumerate(H[i]) if a != 0), None)
        if c is None:
            break
        if w[c] % H[i][c] != 0:
            return None
        q = w[c] // H[i][c]
        if q:
            y[i] = q
            w = [a - q * b for a, b in zip(w, H[i])]
    if any(w):
        return None
    return vecmat(y, U)


def quotient_invariants(
    ncols: int, rows: list[list[int]]
) -> tuple[int, list[int]]:
    """Invariants of Z^ncols modulo the lattice spanned by ``rows``.

    Returns (free_rank, torsion) with torsion entries >= 2 in a
    divisibility chain.
    """
    if not rows:
        return ncols, []
    if any(len(r) != ncols for r in rows):
        raise ValueError("relation width mismatch")
    # Compress to an echelon basis first; the quotient only sees the lattice.
    basis = RowSpace(ncols, track=False)
    for r in rows:
        basis.insert(r)
    reduced = basis.echelon_rows()
    if not reduced:
        return ncols, []
    diag = snf(reduced).diag
    rank = sum(1 for d in diag if d != 0)
    torsion = [d for d in diag if d >= 2]
    return ncols - rank, torsion


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class RowSpace:
    """Incremental integer row-echelon container.

    Rows are stored sparsely (column -> entry dicts), keyed by leading
    column.  With ``track=True`` every echelon row carries its expression
    over the rows inserted so far, so membership queries come with exact
    coefficient certificates over the original rows.
    """

    def __init__(self, ncols: int, track: bool = True):
        self.ncols = ncols
        self.track = track
        self._pivots: dict[int, dict[int, int]] = {}
        self._prov: dict[int, dict[int, int]] = {}
        self.inserted = 0

    @staticmethod
    def _combine(a: dict[int, int], ca: int, b: dict[int, int], cb: int) -> dict[int, int]:
        out = {}
        for k, v in a.items():
            w = ca * v
            if w:
                out[k] = w
        for k, v in b.items():
            w = out.get(k, 0) + cb * v
            if w:
                out[k] = w
            elif k in out:
                del out[k]
        return out

    def insert(self, row) -> None:
        """Add a row (list or sparse dict) to the spanned lattice."""
        if isinstance(row, dict):
            cur = {c: v for c, v in row.items() if v}
        else:
            cur = {c: v for c, v in enumerate(row) if v}
        idx = self.inserted
        self.inserted += 1
        prov = {idx: 1} if self.track else {}
        while cur:
            c = min(cur)
            if c not in self._pivots:
                self._pivots[c] = cur
                if self.track:
                    self._prov[c] = prov
                return
            piv = self._pivots[c]
            p, v = piv[c], cur[c]
            if v % p == 0:
                q = v // p
                cur = self._combine(cur, 1, piv, -q)
                if self.track:
                    prov = self._combine(prov, 1, self._prov[c], -q)
            else:
                # Unimodular merge: new pivot gets gcd, the remainder of the
                # incoming row continues with a zero at column c.
                g, x, y = _xgcd(p, v)
                new_piv = self._combine(piv, x, cur, y)
                new_cur = self._combine(cur, p // g, piv, -(v // g))
                if self.track:
                    new_piv_prov = self._combine(self._prov[c], x, prov, y)
                    prov = self._combine(prov, p // g, self._prov[c], -(v // g))
                    self._prov[c] = new_piv_prov
                self._pivots[c] = new_piv
                cur = new_cur

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def echelon_rows(self) -> list[list[int]]:
        rows = []
        for c in sorted(self._pivots):
            row = [0] * self.ncols
            for j, v in self._pivots[c].items():
                row[j] = v
            rows.append(row)
        return rows

    def reduce(self, v: list[int]) -> tuple[dict[int, int], dict[int, int]]:
        """Residual of v against the echelon, plus echelon coefficients."""
        cur = {c: x for c, x in enumerate(v) if x}
        coeffs: dict[int, int] = {}
        for c in sorted(self._pivots):
            if c in cur:
                piv = self._pivots[c]
                if cur[c] % piv[c] == 0:
                    q = cur[c] // piv[c]
                    cur = self._combine(cur, 1, piv, -q)
                    if q:
                        coeffs[c] = q
        return cur, coeffs

    def member(self, v: list[int]) -> list[int] | None:
        """Coefficients over the inserted rows with x.rows = v, or None."""
        residual, coeffs = self.reduce(v)
        if residual:
            return None
        if not self.track:
            raise RuntimeError("certificates need track=True")
        x = [0] * self.inserted
        for c, q in coeffs.items():
            for idx, w in self._prov[c].items():
                x[idx] += q * w
        return x

    def contains(self, v: list[int]) -> bool:
        residual, _ = self.reduce(v)
        return not residual
